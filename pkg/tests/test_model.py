import pytest

from gridfact import (
    EmptyHeader,
    KnowledgeGraph,
    Origin,
    RaggedRows,
    SourceFormat,
    Table,
    Triplet,
    TypedValue,
    ValueKind,
    Weights,
    graph_counts,
    table_new,
    value_fingerprint,
)


def _fact(s, p, raw, row=0, col=1):
    return Triplet(s, p, TypedValue(ValueKind.STRING, raw), Origin.cell(row, col))


class TestTable:
    def test_basic_shape(self):
        t = table_new(["a", "b"], [["1", "2"], ["3", "4"]])
        assert t.n_rows == 2
        assert t.n_cols == 2
        assert t.column(1) == ["2", "4"]

    def test_ragged_rows_rejected(self):
        with pytest.raises(RaggedRows) as err:
            table_new(["a", "b"], [["1", "2"], ["3"]])
        assert err.value.row_idx == 1
        assert err.value.expected == 2
        assert err.value.got == 1

    def test_blank_header_rejected(self):
        with pytest.raises(EmptyHeader):
            table_new(["a", "   "], [["1", "2"]])

    def test_equality_ignores_source_format(self):
        a = table_new(["a"], [["1"]], SourceFormat.MARKDOWN)
        b = table_new(["a"], [["1"]], SourceFormat.HTML)
        assert a == b

    def test_json_round_trip(self):
        t = table_new(["a", "b"], [["1", "x"]], SourceFormat.HTML)
        again = Table.from_json_dict(t.to_json_dict())
        assert again == t
        assert again.source_format is SourceFormat.HTML


class TestTypedValue:
    def test_numeric_requires_value(self):
        with pytest.raises(ValueError):
            TypedValue(ValueKind.NUMBER, "3")
        with pytest.raises(ValueError):
            TypedValue(ValueKind.STRING, "x", numeric_value=1.0)

    def test_fingerprint_includes_unit(self):
        usd = TypedValue(ValueKind.NUMBER, "$5", numeric_value=5.0, unit="USD")
        bare = TypedValue(ValueKind.NUMBER, "5", numeric_value=5.0)
        assert value_fingerprint(usd) != value_fingerprint(bare)

    def test_fingerprint_collapses_strings(self):
        a = TypedValue(ValueKind.STRING, "  Quality   First ")
        b = TypedValue(ValueKind.STRING, "quality first")
        assert value_fingerprint(a) == value_fingerprint(b)

    def test_json_round_trip(self):
        v = TypedValue(ValueKind.PERCENT, "12%", numeric_value=0.12)
        again = TypedValue.from_json_dict(v.to_json_dict())
        assert again == v


class TestTriplet:
    def test_empty_subject_rejected(self):
        with pytest.raises(ValueError):
            _fact("", "p", "x")

    def test_key_ignores_origin(self):
        a = _fact("s", "p", "x", row=0)
        b = _fact("s", "p", "x", row=5)
        assert a.key() == b.key()


class TestKnowledgeGraph:
    def test_dedup_by_content(self):
        g = KnowledgeGraph.from_triplets(
            [_fact("s", "p", "x", row=0), _fact("s", "p", "X ", row=1)]
        )
        assert len(g.triplets) == 1

    def test_conflicts_retained(self):
        g = KnowledgeGraph.from_triplets(
            [_fact("s", "p", "x"), _fact("s", "p", "y")]
        )
        assert len(g.triplets) == 2
        assert g.conflicting_keys() == [("s", "p")]

    def test_counts_and_indexes(self):
        g = KnowledgeGraph.from_triplets(
            [_fact("s1", "p1", "x"), _fact("s1", "p2", "y"), _fact("s2", "p1", "z")]
        )
        assert graph_counts(g) == (2, 2, 3)
        assert g.subject_index["s1"] == (0, 1)
        assert g.predicate_index["p1"] == (0, 2)

    def test_key_multiset_is_order_free(self):
        facts = [_fact("s1", "p1", "x"), _fact("s2", "p2", "y")]
        a = KnowledgeGraph.from_triplets(facts)
        b = KnowledgeGraph.from_triplets(list(reversed(facts)))
        assert a.key_multiset() == b.key_multiset()

    def test_json_round_trip(self):
        g = KnowledgeGraph.from_triplets([_fact("s", "p", "x")])
        again = KnowledgeGraph.from_json_dict(g.to_json_dict())
        assert again.key_multiset() == g.key_multiset()


class TestWeights:
    def test_defaults(self):
        w = Weights()
        assert w.beta_mi == 1.0
        assert w.beta_ei == 0.9
        assert w.beta_partial == 0.8
        assert w.alpha_r == 0.9
        assert w.alpha_c == 1.0
        assert w.alpha_cell == 0.8
        assert w.omega_p == 0.9

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            Weights(beta_mi=-0.1)

    def test_json_round_trip(self):
        w = Weights(alpha_r=0.25)
        assert Weights.from_json_dict(w.to_json_dict()) == w
