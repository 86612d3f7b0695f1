"""Two-pass alignment between a table graph and a source graph.

Pass one matches facts deterministically on equal (subject, predicate) keys,
greedily picking the smallest value deviation inside each group.  Pass two is
optional: a refinement backend may propose extra matches among the leftovers,
and the report only ever grows.  Every match carries a difference vector; the
leftovers become the missing/extra evidence the scorer consumes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Protocol, Sequence

from .errors import EmptySourceGraph
from .model import KnowledgeGraph, Triplet, TypedValue, Weights, value_fingerprint
from .normalize import comparable_numbers, values_comparable, values_equal

logger = logging.getLogger(__name__)

# Guards the relative-deviation denominator for near-zero source values.
_DEV_EPS = 1e-9


class DiffKind(Enum):
    EXACT = "exact"
    PARTIAL = "partial"
    CATEGORICAL_MISMATCH = "categorical_mismatch"
    MISSING_IN_TABLE = "missing_in_table"
    EXTRA_IN_TABLE = "extra_in_table"


@dataclass(frozen=True)
class DifferenceVector:
    kind: DiffKind
    deviation: float = 0.0
    detail: str = ""

    def __post_init__(self):
        if self.kind is DiffKind.PARTIAL and not (0.0 <= self.deviation <= 1.0):
            raise ValueError(f"partial deviation out of range: {self.deviation}")

    def to_json_dict(self) -> dict:
        d: dict = {"kind": self.kind.value}
        if self.kind is DiffKind.PARTIAL:
            d["deviation"] = repr(self.deviation)
        if self.detail:
            d["detail"] = self.detail
        return d


def diff(obj_t: TypedValue, obj_s: TypedValue, *, coerce_percent: bool = False) -> DifferenceVector:
    """Compare a table value against a source value.

    Equal after canonicalization: exact.  Comparable numerics: partial with
    relative deviation min(1, |v_T - v_S| / max(|v_S|, eps)).  Anything else
    is a categorical mismatch.
    """
    if values_equal(obj_t, obj_s):
        return DifferenceVector(DiffKind.EXACT)
    if (
        obj_t.numeric_value is not None
        and obj_s.numeric_value is not None
        and values_comparable(obj_t, obj_s, coerce_percent=coerce_percent)
    ):
        vt, vs = comparable_numbers(obj_t, obj_s)
        deviation = min(1.0, abs(vt - vs) / max(abs(vs), _DEV_EPS))
        return DifferenceVector(
            DiffKind.PARTIAL,
            deviation=deviation,
            detail=f"{obj_t.raw.strip()} vs {obj_s.raw.strip()}",
        )
    return DifferenceVector(
        DiffKind.CATEGORICAL_MISMATCH,
        deviation=1.0,
        detail=f"{obj_t.raw.strip()} vs {obj_s.raw.strip()}",
    )


PROVENANCE_DETERMINISTIC = "deterministic"
PROVENANCE_REFINED = "refined"


@dataclass(frozen=True)
class MatchedPair:
    table_index: int
    source_index: int
    difference: DifferenceVector
    provenance: str = PROVENANCE_DETERMINISTIC


@dataclass(frozen=True)
class AlignmentReport:
    """Matches plus leftovers; a partition of both graphs' triplet indices."""

    matched: tuple
    unmatched_table: tuple
    unmatched_source: tuple

    def validate(self, n_table: int, n_source: int) -> None:
        t_used = [m.table_index for m in self.matched]
        s_used = [m.source_index for m in self.matched]
        if len(set(t_used)) != len(t_used) or len(set(s_used)) != len(s_used):
            raise ValueError("alignment is not injective")
        if sorted(t_used + list(self.unmatched_table)) != list(range(n_table)):
            raise ValueError("table indices do not partition the table graph")
        if sorted(s_used + list(self.unmatched_source)) != list(range(n_source)):
            raise ValueError("source indices do not partition the source graph")

    def to_json_dict(self, g_t: KnowledgeGraph, g_s: KnowledgeGraph) -> dict:
        matched = []
        for m in self.matched:
            matched.append(
                {
                    "table_index": m.table_index,
                    "source_index": m.source_index,
                    "difference": m.difference.to_json_dict(),
                    "provenance": m.provenance,
                    "table_fact": g_t.triplets[m.table_index].to_json_dict(),
                    "source_fact": g_s.triplets[m.source_index].to_json_dict(),
                }
            )
        return {
            "matched": matched,
            "missing_in_table": [
                {"source_index": i, "kind": DiffKind.MISSING_IN_TABLE.value,
                 "source_fact": g_s.triplets[i].to_json_dict()}
                for i in self.unmatched_source
            ],
            "extra_in_table": [
                {"table_index": i, "kind": DiffKind.EXTRA_IN_TABLE.value,
                 "table_fact": g_t.triplets[i].to_json_dict()}
                for i in self.unmatched_table
            ],
        }


def _report(matches: list, n_table: int, n_source: int) -> AlignmentReport:
    t_used = {m.table_index for m in matches}
    s_used = {m.source_index for m in matches}
    report = AlignmentReport(
        matched=tuple(matches),
        unmatched_table=tuple(i for i in range(n_table) if i not in t_used),
        unmatched_source=tuple(i for i in range(n_source) if i not in s_used),
    )
    report.validate(n_table, n_source)
    return report


def _diff_order(d: DifferenceVector) -> tuple:
    kind_rank = {DiffKind.EXACT: 0, DiffKind.PARTIAL: 1, DiffKind.CATEGORICAL_MISMATCH: 2}
    return (d.deviation if d.kind is not DiffKind.EXACT else 0.0, kind_rank[d.kind])


def align_deterministic(
    g_t: KnowledgeGraph,
    g_s: KnowledgeGraph,
    *,
    coerce_percent: bool = False,
) -> AlignmentReport:
    """Pass one: match on equal (subject, predicate) keys, smallest deviation first.

    Ties are broken by the canonical object fingerprints, never by list
    position, so the match set is invariant to triplet order in both graphs.
    """
    by_key_t: dict = {}
    for i, t in enumerate(g_t.triplets):
        by_key_t.setdefault((t.subject, t.predicate), []).append(i)
    by_key_s: dict = {}
    for j, s in enumerate(g_s.triplets):
        by_key_s.setdefault((s.subject, s.predicate), []).append(j)

    matches: list = []
    for key in sorted(set(by_key_t) & set(by_key_s)):
        candidates = []
        for i in by_key_t[key]:
            for j in by_key_s[key]:
                d = diff(g_t.triplets[i].object, g_s.triplets[j].object, coerce_percent=coerce_percent)
                candidates.append(
                    (
                        _diff_order(d),
                        value_fingerprint(g_s.triplets[j].object),
                        value_fingerprint(g_t.triplets[i].object),
                        i,
                        j,
                        d,
                    )
                )
        candidates.sort(key=lambda c: c[:3])
        used_t: set = set()
        used_s: set = set()
        for _, _, _, i, j, d in candidates:
            if i in used_t or j in used_s:
                continue
            used_t.add(i)
            used_s.add(j)
            matches.append(MatchedPair(i, j, d, PROVENANCE_DETERMINISTIC))
    matches.sort(key=lambda m: (m.table_index, m.source_index))
    return _report(matches, len(g_t.triplets), len(g_s.triplets))


class RefinementBackend(Protocol):
    """Proposes matches among leftover facts; indices refer to the passed lists."""

    name: str
    deterministic: bool

    def propose(
        self, table_facts: Sequence[Triplet], source_facts: Sequence[Triplet]
    ) -> Sequence[tuple]: ...


def align_refine(
    report: AlignmentReport,
    g_t: KnowledgeGraph,
    g_s: KnowledgeGraph,
    backend: Optional[RefinementBackend],
    *,
    coerce_percent: bool = False,
) -> AlignmentReport:
    """Pass two: merge backend-proposed matches among the unmatched facts.

    Out-of-range or duplicate proposals are dropped with a diagnostic (first
    proposal wins).  With no backend, or nothing unmatched on either side,
    the report is returned unchanged and the backend is never called.
    """
    if backend is None or not report.unmatched_table or not report.unmatched_source:
        return report
    table_facts = [g_t.triplets[i] for i in report.unmatched_table]
    source_facts = [g_s.triplets[j] for j in report.unmatched_source]
    proposals = backend.propose(table_facts, source_facts)

    matches = list(report.matched)
    used_t: set = set()
    used_s: set = set()
    for entry in proposals:
        if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
            logger.warning("refinement %s: malformed proposal %r dropped", backend.name, entry)
            continue
        ti, si = entry
        if not (isinstance(ti, int) and isinstance(si, int)):
            logger.warning("refinement %s: non-integer proposal %r dropped", backend.name, entry)
            continue
        if not (0 <= ti < len(table_facts) and 0 <= si < len(source_facts)):
            logger.warning("refinement %s: out-of-range proposal %r dropped", backend.name, entry)
            continue
        if ti in used_t or si in used_s:
            logger.warning("refinement %s: duplicate proposal %r dropped", backend.name, entry)
            continue
        used_t.add(ti)
        used_s.add(si)
        gi = report.unmatched_table[ti]
        gj = report.unmatched_source[si]
        d = diff(g_t.triplets[gi].object, g_s.triplets[gj].object, coerce_percent=coerce_percent)
        matches.append(MatchedPair(gi, gj, d, PROVENANCE_REFINED))
    matches.sort(key=lambda m: (m.table_index, m.source_index))
    return _report(matches, len(g_t.triplets), len(g_s.triplets))


@dataclass(frozen=True)
class AlignmentStats:
    """Counts the scorer consumes; denominators come from the source graph."""

    mi_r: int
    ei_r: int
    mi_c: int
    ei_c: int
    mi_cell: int
    ei_cell: int
    gamma: float
    n_r: int
    n_c: int
    n_cell: int
    n_exact: int = 0
    n_partial: int = 0
    n_categorical: int = 0

    def __post_init__(self):
        if self.mi_r > self.n_r or self.mi_c > self.n_c or self.mi_cell > self.n_cell:
            raise ValueError("missing counts cannot exceed source totals")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")

    def to_json_dict(self) -> dict:
        return {
            "mi_r": self.mi_r,
            "ei_r": self.ei_r,
            "mi_c": self.mi_c,
            "ei_c": self.ei_c,
            "mi_cell": self.mi_cell,
            "ei_cell": self.ei_cell,
            "gamma": repr(self.gamma),
            "n_r": self.n_r,
            "n_c": self.n_c,
            "n_cell": self.n_cell,
            "n_exact": self.n_exact,
            "n_partial": self.n_partial,
            "n_categorical": self.n_categorical,
        }


def derive_stats(
    report: AlignmentReport,
    g_t: KnowledgeGraph,
    g_s: KnowledgeGraph,
    w: Weights,
) -> AlignmentStats:
    """Aggregate an alignment into row/column/cell counts and weighted deviation.

    Missing counts come from source entities with zero matched facts, extra
    counts from table entities with zero matched facts; gamma accumulates
    omega_p-weighted deviations (a categorical mismatch counts as 1.0).
    """
    if not g_s.triplets:
        raise EmptySourceGraph("source graph has no facts; penalties are undefined")

    matched_s_subjects = {g_s.triplets[m.source_index].subject for m in report.matched}
    matched_s_predicates = {g_s.triplets[m.source_index].predicate for m in report.matched}
    matched_t_subjects = {g_t.triplets[m.table_index].subject for m in report.matched}
    matched_t_predicates = {g_t.triplets[m.table_index].predicate for m in report.matched}

    gamma = 0.0
    n_exact = n_partial = n_categorical = 0
    for m in report.matched:
        if m.difference.kind is DiffKind.EXACT:
            n_exact += 1
        elif m.difference.kind is DiffKind.PARTIAL:
            n_partial += 1
            gamma += w.omega_p * m.difference.deviation
        else:
            n_categorical += 1
            gamma += w.omega_p * 1.0

    return AlignmentStats(
        mi_r=len(g_s.subject_index) - len(matched_s_subjects),
        ei_r=len(g_t.subject_index) - len(matched_t_subjects),
        mi_c=len(g_s.predicate_index) - len(matched_s_predicates),
        ei_c=len(g_t.predicate_index) - len(matched_t_predicates),
        mi_cell=len(report.unmatched_source),
        ei_cell=len(report.unmatched_table),
        gamma=gamma,
        n_r=len(g_s.subject_index),
        n_c=len(g_s.predicate_index),
        n_cell=len(g_s.triplets),
        n_exact=n_exact,
        n_partial=n_partial,
        n_categorical=n_categorical,
    )
