"""Unrolling tables and source text into knowledge graphs.

A table unrolls row by row: the subject column names the entity, every other
header is a predicate, every non-empty cell is one fact.  Source text goes
through an ExtractionBackend; the offline FactLineBackend reads the
``subject | predicate | object`` dialect, and the LLM backend plugs in behind
the same protocol.
"""

from __future__ import annotations

import logging
from typing import Protocol, Sequence

from .errors import BackendProtocolError, SubjectColumnOutOfRange
from .model import KnowledgeGraph, Origin, Table, Triplet, value_fingerprint
from .normalize import DEFAULT_UNITS, UnitTable, normalize_key, parse_value

logger = logging.getLogger(__name__)

RawTriplet = tuple[str, str, str]


class ExtractionBackend(Protocol):
    """Turns free text into raw (subject, predicate, object) string triples."""

    name: str
    deterministic: bool

    def extract(self, text: str) -> Sequence[RawTriplet]: ...


class FactLineBackend:
    """Offline extraction: one ``subject | predicate | object`` fact per line.

    Lines starting with '#' and blank lines are ignored.  The object is
    everything after the second pipe, so objects may contain pipes.  Lines
    with fewer than two pipes surface as invalid triplets that text_to_graph
    drops with a diagnostic.
    """

    name = "fact_lines"
    deterministic = True

    def extract(self, text: str) -> list:
        out = []
        for line in text.splitlines():
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split("|")
            if len(parts) < 3:
                out.append(("", "", stripped))
                continue
            out.append((parts[0].strip(), parts[1].strip(), "|".join(parts[2:]).strip()))
        return out


def _subject_keys(t: Table, subject_col: int, units: UnitTable) -> list:
    """Canonical subject per row; repeats disambiguated with a #k suffix.

    Repeated subjects are numbered by a column-order-independent signature of
    their row content, so row and column permutations of the table produce
    the same subject assignment.
    """
    base_keys = []
    for r, row in enumerate(t.rows):
        key = normalize_key(row[subject_col])
        if not key:
            key = f"row_{r}"
            logger.warning("row %d has an empty subject cell; using fallback %r", r, key)
        base_keys.append(key)

    def signature(r: int) -> tuple:
        sig = []
        for c, cell in enumerate(t.rows[r]):
            if c == subject_col or not cell.strip():
                continue
            sig.append((normalize_key(t.headers[c]), value_fingerprint(parse_value(cell, units))))
        return tuple(sorted(sig))

    taken = set(base_keys)
    assigned = list(base_keys)
    by_key: dict = {}
    for r, key in enumerate(base_keys):
        by_key.setdefault(key, []).append(r)
    for key, rows in by_key.items():
        if len(rows) == 1:
            continue
        ordered = sorted(rows, key=lambda r: (signature(r), r))
        for k, r in enumerate(ordered[1:], start=2):
            candidate = f"{key}#{k}"
            while candidate in taken:
                k += 1
                candidate = f"{key}#{k}"
            taken.add(candidate)
            assigned[r] = candidate
    return assigned


def table_to_graph(
    t: Table,
    subject_col: int = 0,
    units: UnitTable = DEFAULT_UNITS,
) -> KnowledgeGraph:
    """Unroll a table into facts: one triplet per non-empty non-subject cell."""
    if not (0 <= subject_col < t.n_cols):
        raise SubjectColumnOutOfRange(subject_col, t.n_cols)
    header_keys = []
    for c, h in enumerate(t.headers):
        key = normalize_key(h)
        if not key:
            key = f"col_{c}"
            logger.warning("header %d normalizes to nothing; using fallback %r", c, key)
        header_keys.append(key)
    subjects = _subject_keys(t, subject_col, units)
    triplets = []
    for r, row in enumerate(t.rows):
        for c, cell in enumerate(row):
            if c == subject_col or not cell.strip():
                continue
            triplets.append(
                Triplet(
                    subject=subjects[r],
                    predicate=header_keys[c],
                    object=parse_value(cell, units),
                    origin=Origin.cell(r, c),
                )
            )
    return KnowledgeGraph.from_triplets(triplets)


def text_to_graph(
    text: str,
    backend: ExtractionBackend,
    units: UnitTable = DEFAULT_UNITS,
) -> KnowledgeGraph:
    """Extract facts from text via the backend and canonicalize them.

    Triplets whose subject or predicate normalizes to nothing are dropped
    with a diagnostic.  BackendUnavailable from the backend propagates.
    """
    raw = backend.extract(text)
    if not isinstance(raw, (list, tuple)):
        raise BackendProtocolError(f"backend {backend.name} returned {type(raw).__name__}, not a list")
    triplets = []
    for entry in raw:
        if not (isinstance(entry, (list, tuple)) and len(entry) == 3):
            raise BackendProtocolError(f"backend {backend.name} returned a non-triple entry: {entry!r}")
        s, p, o = (str(x) for x in entry)
        skey = normalize_key(s)
        pkey = normalize_key(p)
        if not skey or not pkey:
            logger.warning("dropping invalid triplet from %s: %r", backend.name, entry)
            continue
        triplets.append(
            Triplet(subject=skey, predicate=pkey, object=parse_value(o, units), origin=Origin.text())
        )
    return KnowledgeGraph.from_triplets(triplets)


def fact_lines(g: KnowledgeGraph) -> str:
    """Render a graph in the FactLineBackend dialect; its own round trip.

    text_to_graph(fact_lines(g), FactLineBackend()) reproduces g's facts.
    """
    lines = []
    for t in g.triplets:
        obj = " ".join(t.object.raw.split()) if "\n" in t.object.raw else t.object.raw.strip()
        lines.append(f"{t.subject} | {t.predicate} | {obj}")
    return "\n".join(lines) + ("\n" if lines else "")
