import json

import pytest

from gridfact import (
    AlignmentStats,
    FactLineBackend,
    Weights,
    ZeroDenominator,
    align_deterministic,
    breakdown_from_stats,
    cell_penalty,
    penalty_score,
    table_penalty,
    table_to_graph,
    table_new,
    text_to_graph,
)

# The documented worked example: one missing row out of five, one extra
# column out of four, two missing and one extra cell out of twenty, with
# two graded deviations 0.2 and 0.5.
WALKTHROUGH = AlignmentStats(
    mi_r=1, ei_r=0, mi_c=0, ei_c=1,
    mi_cell=2, ei_cell=1,
    gamma=0.9 * 0.2 + 0.9 * 0.5,
    n_r=5, n_c=4, n_cell=20,
    n_exact=0, n_partial=2, n_categorical=0,
)


class TestPenalties:
    def test_walkthrough_table_penalty_exact(self):
        assert table_penalty(WALKTHROUGH, Weights()) == 0.405

    def test_walkthrough_cell_penalty(self):
        assert cell_penalty(WALKTHROUGH, Weights()) == pytest.approx(0.1362, abs=5e-4)

    def test_walkthrough_final(self):
        b = breakdown_from_stats(WALKTHROUGH, Weights())
        assert b.final == pytest.approx(0.5412, abs=5e-4)
        assert b.final == b.table_penalty + b.cell_penalty

    def test_zero_stats_zero_score(self):
        st = AlignmentStats(0, 0, 0, 0, 0, 0, 0.0, 3, 2, 6)
        b = breakdown_from_stats(st, Weights())
        assert b.final == 0.0

    def test_zero_denominator_rejected(self):
        st = AlignmentStats(0, 0, 0, 0, 0, 0, 0.0, 0, 2, 6)
        with pytest.raises(ZeroDenominator):
            table_penalty(st, Weights())
        st2 = AlignmentStats(0, 0, 0, 0, 0, 0, 0.0, 3, 2, 0)
        with pytest.raises(ZeroDenominator):
            cell_penalty(st2, Weights())

    def test_missing_scales_with_beta_mi_only(self):
        st = AlignmentStats(1, 0, 0, 0, 2, 0, 0.0, 5, 4, 20)
        base = breakdown_from_stats(st, Weights()).final
        up_mi = breakdown_from_stats(st, Weights(beta_mi=2.0)).final
        up_ei = breakdown_from_stats(st, Weights(beta_ei=1.8)).final
        assert up_mi > base
        assert up_ei == base

    def test_extra_scales_with_beta_ei_only(self):
        st = AlignmentStats(0, 1, 0, 0, 0, 2, 0.0, 5, 4, 20)
        base = breakdown_from_stats(st, Weights()).final
        up_ei = breakdown_from_stats(st, Weights(beta_ei=1.8)).final
        up_mi = breakdown_from_stats(st, Weights(beta_mi=2.0)).final
        assert up_ei > base
        assert up_mi == base

    def test_gamma_scales_with_beta_partial(self):
        st = AlignmentStats(0, 0, 0, 0, 0, 0, 0.63, 5, 4, 20)
        base = breakdown_from_stats(st, Weights()).final
        up = breakdown_from_stats(st, Weights(beta_partial=1.6)).final
        assert up == pytest.approx(2 * base)


class TestBreakdown:
    def test_terms_cover_all_components(self):
        b = breakdown_from_stats(WALKTHROUGH, Weights())
        names = [t.name for t in b.terms]
        assert names == [
            "missing_rows", "missing_cols", "extra_rows", "extra_cols",
            "missing_cells", "extra_cells", "partial_deviation",
        ]
        total = sum(t.value for t in b.terms)
        assert total == pytest.approx(b.final)

    def test_term_formulas_are_stated(self):
        b = breakdown_from_stats(WALKTHROUGH, Weights())
        by_name = {t.name: t.formula for t in b.terms}
        assert "beta_mi" in by_name["missing_rows"]
        assert "alpha_cell" in by_name["extra_cells"]
        assert "gamma" in by_name["partial_deviation"].lower()

    def test_quality_in_unit_interval(self):
        b = breakdown_from_stats(WALKTHROUGH, Weights())
        assert 0.0 < b.quality <= 1.0
        zero = breakdown_from_stats(AlignmentStats(0, 0, 0, 0, 0, 0, 0.0, 1, 1, 1), Weights())
        assert zero.quality == 1.0

    def test_json_payload_is_serializable(self):
        b = breakdown_from_stats(WALKTHROUGH, Weights())
        payload = b.to_json_dict()
        text = json.dumps(payload, sort_keys=True)
        assert "0.405" in text

    def test_json_skips_trace_on_request(self):
        g_t = table_to_graph(table_new(["a", "b"], [["x", "1"]]))
        g_s = text_to_graph("x | b | 1\n", FactLineBackend())
        report = align_deterministic(g_t, g_s)
        b = penalty_score(report, g_t, g_s)
        assert "trace" in b.to_json_dict()
        assert "trace" not in b.to_json_dict(include_trace=False)


class TestPenaltyScoreEndToEnd:
    def test_identity_is_zero(self):
        g_t = table_to_graph(table_new(["Item", "Qty"], [["a", "1"], ["b", "2"]]))
        g_s = text_to_graph("a | qty | 1\nb | qty | 2\n", FactLineBackend())
        report = align_deterministic(g_t, g_s)
        assert penalty_score(report, g_t, g_s).final == 0.0

    def test_trace_names_the_leftovers(self):
        g_t = table_to_graph(table_new(["Item", "Qty"], [["a", "1"], ["c", "9"]]))
        g_s = text_to_graph("a | qty | 1\nb | qty | 2\n", FactLineBackend())
        report = align_deterministic(g_t, g_s)
        b = penalty_score(report, g_t, g_s)
        trace = b.to_json_dict()["trace"]
        missing = {e["source_fact"]["subject"] for e in trace["missing_in_table"]}
        extra = {e["table_fact"]["subject"] for e in trace["extra_in_table"]}
        assert missing == {"b"}
        assert extra == {"c"}
