"""End-to-end evaluation: table plus source text in, scored breakdown out."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .align import AlignmentReport, RefinementBackend, align_deterministic, align_refine
from .graphify import ExtractionBackend, table_to_graph, text_to_graph
from .model import KnowledgeGraph, Table, Weights
from .normalize import DEFAULT_UNITS, UnitTable
from .score import ScoreBreakdown, penalty_score


@dataclass(frozen=True)
class PipelineResult:
    breakdown: ScoreBreakdown
    table_graph: KnowledgeGraph
    source_graph: KnowledgeGraph
    report: AlignmentReport

    def to_json_dict(self, *, include_trace: bool = True) -> dict:
        return self.breakdown.to_json_dict(include_trace=include_trace)


def evaluate_table(
    table: Table,
    source_text: str,
    *,
    extraction: ExtractionBackend,
    refinement: Optional[RefinementBackend] = None,
    weights: Weights = Weights(),
    subject_col: int = 0,
    units: UnitTable = DEFAULT_UNITS,
    include_trace: bool = True,
) -> PipelineResult:
    """Run the full path: graphs, two-pass alignment, penalty scoring."""
    g_t = table_to_graph(table, subject_col, units)
    g_s = text_to_graph(source_text, extraction, units)
    report = align_deterministic(g_t, g_s)
    report = align_refine(report, g_t, g_s, refinement)
    breakdown = penalty_score(report, g_t, g_s, weights, include_trace=include_trace)
    return PipelineResult(
        breakdown=breakdown,
        table_graph=g_t,
        source_graph=g_s,
        report=report,
    )


def score_table_pair(
    table: Table,
    reference: Table,
    *,
    weights: Weights = Weights(),
    table_subject_col: int = 0,
    reference_subject_col: int = 0,
    units: UnitTable = DEFAULT_UNITS,
    include_trace: bool = True,
) -> PipelineResult:
    """Score one table against another table treated as the source of truth."""
    g_t = table_to_graph(table, table_subject_col, units)
    g_s = table_to_graph(reference, reference_subject_col, units)
    report = align_deterministic(g_t, g_s)
    breakdown = penalty_score(report, g_t, g_s, weights, include_trace=include_trace)
    return PipelineResult(
        breakdown=breakdown,
        table_graph=g_t,
        source_graph=g_s,
        report=report,
    )
