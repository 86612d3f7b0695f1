import random

import pytest

from gridfact import (
    BackendProtocolError,
    FactLineBackend,
    SubjectColumnOutOfRange,
    ValueKind,
    fact_lines,
    table_new,
    table_to_graph,
    text_to_graph,
)
from helpers import make_rich_table


class TestTableToGraph:
    def test_one_fact_per_filled_cell(self):
        t = table_new(
            ["Item", "Qty", "Note"],
            [["bolt", "5", "steel"], ["nut", "3", ""]],
        )
        g = table_to_graph(t)
        assert len(g.triplets) == 3  # empty cell contributes nothing
        keys = g.key_multiset()
        assert ("bolt", "qty", "number:5.0:") in keys
        assert ("nut", "note", "string:") not in [k for k in keys]

    def test_subject_col_out_of_range(self):
        t = table_new(["a"], [["x"]])
        with pytest.raises(SubjectColumnOutOfRange):
            table_to_graph(t, subject_col=3)

    def test_non_default_subject_col(self):
        t = table_new(["Qty", "Item"], [["5", "bolt"]])
        g = table_to_graph(t, subject_col=1)
        assert g.key_multiset() == [("bolt", "qty", "number:5.0:")]

    def test_empty_subject_gets_positional_key(self):
        t = table_new(["Item", "Qty"], [["", "5"]])
        g = table_to_graph(t)
        assert g.triplets[0].subject == "row_0"

    def test_duplicate_subjects_numbered(self):
        t = table_new(
            ["Item", "Qty"],
            [["bolt", "5"], ["bolt", "7"]],
        )
        g = table_to_graph(t)
        assert sorted(g.subjects) == ["bolt", "bolt#2"]

    def test_duplicate_numbering_is_row_order_invariant(self):
        rows = [["bolt", "5"], ["bolt", "7"]]
        t1 = table_new(["Item", "Qty"], rows)
        t2 = table_new(["Item", "Qty"], list(reversed(rows)))
        assert table_to_graph(t1).key_multiset() == table_to_graph(t2).key_multiset()

    def test_duplicate_numbering_is_column_order_invariant(self):
        t1 = table_new(
            ["Item", "Qty", "Note"],
            [["bolt", "5", "alpha"], ["bolt", "7", "beta"]],
        )
        t2 = table_new(
            ["Item", "Note", "Qty"],
            [["bolt", "alpha", "5"], ["bolt", "beta", "7"]],
        )
        assert table_to_graph(t1).key_multiset() == table_to_graph(t2).key_multiset()

    def test_origin_records_cell(self):
        t = table_new(["Item", "Qty"], [["bolt", "5"]])
        g = table_to_graph(t)
        origin = g.triplets[0].origin
        assert (origin.row, origin.col) == (0, 1)

    def test_values_typed(self):
        t = table_new(
            ["Item", "Amount", "Share", "When"],
            [["a", "$1,000", "12%", "2020-01-02"]],
        )
        kinds = {tr.predicate: tr.object.kind for tr in table_to_graph(t).triplets}
        assert kinds == {
            "amount": ValueKind.NUMBER,
            "share": ValueKind.PERCENT,
            "when": ValueKind.DATE,
        }


class TestFactLines:
    def test_render_shape(self):
        t = table_new(["Item", "Qty"], [["bolt", "5"]])
        assert fact_lines(table_to_graph(t)) == "bolt | qty | 5\n"

    def test_round_trip_preserves_graph(self):
        rng = random.Random(99)
        for _ in range(20):
            t = make_rich_table(rng)
            g = table_to_graph(t)
            g2 = text_to_graph(fact_lines(g), FactLineBackend())
            assert g2.key_multiset() == g.key_multiset()

    def test_pipes_in_object_survive(self):
        backend = FactLineBackend()
        triples = backend.extract("s | p | a|b|c\n")
        assert triples == [("s", "p", "a|b|c")]

    def test_comments_and_blanks_skipped(self):
        backend = FactLineBackend()
        text = "# comment\n\ns | p | v\n"
        assert backend.extract(text) == [("s", "p", "v")]


class TestTextToGraph:
    def test_short_lines_dropped(self):
        g = text_to_graph("not enough parts\ns | p | v\n", FactLineBackend())
        assert len(g.triplets) == 1

    def test_empty_key_triples_dropped(self):
        g = text_to_graph("??? | p | v\ns | p | v\n", FactLineBackend())
        assert g.key_multiset() == [("s", "p", "string:v")]

    def test_backend_protocol_enforced(self):
        class BadBackend:
            name = "bad"
            deterministic = True

            def extract(self, text):
                return "nope"

        with pytest.raises(BackendProtocolError):
            text_to_graph("x", BadBackend())

    def test_backend_bad_entries_rejected(self):
        class BadEntries:
            name = "bad-entries"
            deterministic = True

            def extract(self, text):
                return [("s", "p")]

        with pytest.raises(BackendProtocolError):
            text_to_graph("x", BadEntries())
