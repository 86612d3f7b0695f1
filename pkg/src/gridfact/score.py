"""Penalty scoring over alignment statistics.

Two additive components, lower is better, zero means the table states exactly
the facts in the source:

  structure = beta_mi*(alpha_r*MI_r/N_r + alpha_c*MI_c/N_c)
            + beta_ei*(alpha_r*EI_r/N_r + alpha_c*EI_c/N_c)
  content   = beta_mi*alpha_cell*MI_cell/N_cell
            + beta_ei*alpha_cell*EI_cell/N_cell
            + beta_partial*alpha_cell*Gamma/N_cell

All denominators come from the source graph.  The extra-entity ratios may
exceed 1 for heavily fabricated tables; they are deliberately not clamped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .align import AlignmentReport, AlignmentStats, derive_stats
from .errors import ZeroDenominator
from .model import KnowledgeGraph, Weights


def table_penalty(st: AlignmentStats, w: Weights) -> float:
    """Structural penalty from missing/extra rows and columns."""
    if st.n_r < 1:
        raise ZeroDenominator("N_r")
    if st.n_c < 1:
        raise ZeroDenominator("N_c")
    return w.beta_mi * (w.alpha_r * st.mi_r / st.n_r + w.alpha_c * st.mi_c / st.n_c) + w.beta_ei * (
        w.alpha_r * st.ei_r / st.n_r + w.alpha_c * st.ei_c / st.n_c
    )


def cell_penalty(st: AlignmentStats, w: Weights) -> float:
    """Content penalty from missing/extra cells and graded value deviation."""
    if st.n_cell < 1:
        raise ZeroDenominator("N_cell")
    return (
        w.beta_mi * w.alpha_cell * st.mi_cell / st.n_cell
        + w.beta_ei * w.alpha_cell * st.ei_cell / st.n_cell
        + w.beta_partial * w.alpha_cell * st.gamma / st.n_cell
    )


@dataclass(frozen=True)
class Term:
    name: str
    formula: str
    value: float

    def to_json_dict(self) -> dict:
        return {"name": self.name, "formula": self.formula, "value": repr(self.value)}


@dataclass(frozen=True)
class ScoreBreakdown:
    """Final score plus every additive term, for explainability."""

    table_penalty: float
    cell_penalty: float
    final: float
    terms: tuple
    stats: AlignmentStats
    weights: Weights
    trace: Optional[dict] = None

    @property
    def quality(self) -> float:
        """Bounded convenience view in (0, 1], higher is better: 1/(1+final)."""
        return 1.0 / (1.0 + self.final)

    def to_json_dict(self, *, include_trace: bool = True) -> dict:
        d: dict = {
            "final": repr(self.final),
            "table_penalty": repr(self.table_penalty),
            "cell_penalty": repr(self.cell_penalty),
            "quality": repr(self.quality),
            "terms": [t.to_json_dict() for t in self.terms],
            "stats": self.stats.to_json_dict(),
            "weights": self.weights.to_json_dict(),
        }
        if include_trace and self.trace is not None:
            d["trace"] = self.trace
        return d


def _terms(st: AlignmentStats, w: Weights) -> tuple:
    return (
        Term("missing_rows", "beta_mi * alpha_r * MI_r / N_r", w.beta_mi * w.alpha_r * st.mi_r / st.n_r),
        Term("missing_cols", "beta_mi * alpha_c * MI_c / N_c", w.beta_mi * w.alpha_c * st.mi_c / st.n_c),
        Term("extra_rows", "beta_ei * alpha_r * EI_r / N_r", w.beta_ei * w.alpha_r * st.ei_r / st.n_r),
        Term("extra_cols", "beta_ei * alpha_c * EI_c / N_c", w.beta_ei * w.alpha_c * st.ei_c / st.n_c),
        Term(
            "missing_cells",
            "beta_mi * alpha_cell * MI_cell / N_cell",
            w.beta_mi * w.alpha_cell * st.mi_cell / st.n_cell,
        ),
        Term(
            "extra_cells",
            "beta_ei * alpha_cell * EI_cell / N_cell",
            w.beta_ei * w.alpha_cell * st.ei_cell / st.n_cell,
        ),
        Term(
            "partial_deviation",
            "beta_partial * alpha_cell * Gamma / N_cell",
            w.beta_partial * w.alpha_cell * st.gamma / st.n_cell,
        ),
    )


def breakdown_from_stats(st: AlignmentStats, w: Weights, trace: Optional[dict] = None) -> ScoreBreakdown:
    """Assemble the full breakdown; final is exactly table + cell penalty."""
    tp = table_penalty(st, w)
    cp = cell_penalty(st, w)
    return ScoreBreakdown(
        table_penalty=tp,
        cell_penalty=cp,
        final=tp + cp,
        terms=_terms(st, w),
        stats=st,
        weights=w,
        trace=trace,
    )


def penalty_score(
    report: AlignmentReport,
    g_t: KnowledgeGraph,
    g_s: KnowledgeGraph,
    w: Weights = Weights(),
    *,
    include_trace: bool = True,
) -> ScoreBreakdown:
    """Score an alignment end to end: derive stats, apply both penalties."""
    st = derive_stats(report, g_t, g_s, w)
    trace = report.to_json_dict(g_t, g_s) if include_trace else None
    return breakdown_from_stats(st, w, trace)
