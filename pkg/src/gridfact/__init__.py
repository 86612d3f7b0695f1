"""gridfact: reference-free table evaluation against a source text.

A table and the text it was built from are both unrolled into fact graphs,
the graphs are aligned in two passes, and the disagreements are folded into
an interpretable penalty (lower is better) with a per-fact trace.
"""

from .align import (
    AlignmentReport,
    AlignmentStats,
    DifferenceVector,
    DiffKind,
    MatchedPair,
    RefinementBackend,
    align_deterministic,
    align_refine,
    derive_stats,
    diff,
)
from .errors import (
    AuthFailure,
    BackendProtocolError,
    BackendUnavailable,
    DegenerateRanking,
    EmptyHeader,
    EmptySourceGraph,
    GridfactError,
    InvalidPersistence,
    LengthMismatch,
    MalformedMarkup,
    MalformedResponse,
    MismatchedIds,
    MissingSeparatorRow,
    NoTableFound,
    RaggedRows,
    SpecInapplicable,
    SubjectColumnOutOfRange,
    TableTooSmall,
    Unreachable,
    ZeroDenominator,
)
from .graphify import (
    ExtractionBackend,
    FactLineBackend,
    fact_lines,
    table_to_graph,
    text_to_graph,
)
from .model import (
    KnowledgeGraph,
    Origin,
    OriginKind,
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
from .normalize import (
    DEFAULT_UNITS,
    UnitTable,
    collapse_text,
    normalize_key,
    parse_value,
    values_comparable,
    values_equal,
)
from .perturb import (
    CATALOGUE,
    PerturbationSpec,
    PerturbedInstance,
    PerturbGroup,
    PerturbTier,
    apply,
    fan_out,
    plan,
    rubric_rank,
    verify_label,
    write_bench,
)
from .pipeline import PipelineResult, evaluate_table, score_table_pair
from .rankstats import (
    ConfusionCounts,
    Ranking,
    footrule,
    kendall_tau,
    kernel_backend,
    rbo,
    sens_spec,
    spearman_rho,
    tie_ratio,
    weighted_kendall,
)
from .score import (
    ScoreBreakdown,
    Term,
    breakdown_from_stats,
    cell_penalty,
    penalty_score,
    table_penalty,
)
from .table_io import (
    ParseDiagnostics,
    ParseResult,
    parse_html,
    parse_markdown,
    render_markdown,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentReport",
    "AlignmentStats",
    "AuthFailure",
    "BackendProtocolError",
    "BackendUnavailable",
    "CATALOGUE",
    "ConfusionCounts",
    "DEFAULT_UNITS",
    "DegenerateRanking",
    "DiffKind",
    "DifferenceVector",
    "EmptyHeader",
    "EmptySourceGraph",
    "ExtractionBackend",
    "FactLineBackend",
    "GridfactError",
    "InvalidPersistence",
    "KnowledgeGraph",
    "LengthMismatch",
    "MalformedMarkup",
    "MalformedResponse",
    "MatchedPair",
    "MismatchedIds",
    "MissingSeparatorRow",
    "NoTableFound",
    "Origin",
    "OriginKind",
    "ParseDiagnostics",
    "ParseResult",
    "PerturbGroup",
    "PerturbTier",
    "PerturbationSpec",
    "PerturbedInstance",
    "PipelineResult",
    "RaggedRows",
    "Ranking",
    "RefinementBackend",
    "ScoreBreakdown",
    "SourceFormat",
    "SpecInapplicable",
    "SubjectColumnOutOfRange",
    "Table",
    "TableTooSmall",
    "Term",
    "Triplet",
    "TypedValue",
    "UnitTable",
    "Unreachable",
    "ValueKind",
    "Weights",
    "ZeroDenominator",
    "align_deterministic",
    "align_refine",
    "apply",
    "breakdown_from_stats",
    "cell_penalty",
    "collapse_text",
    "derive_stats",
    "diff",
    "evaluate_table",
    "fact_lines",
    "fan_out",
    "footrule",
    "graph_counts",
    "kendall_tau",
    "kernel_backend",
    "normalize_key",
    "parse_html",
    "parse_markdown",
    "parse_value",
    "penalty_score",
    "plan",
    "rbo",
    "render_markdown",
    "rubric_rank",
    "score_table_pair",
    "sens_spec",
    "spearman_rho",
    "table_new",
    "table_penalty",
    "table_to_graph",
    "text_to_graph",
    "tie_ratio",
    "value_fingerprint",
    "values_comparable",
    "values_equal",
    "verify_label",
    "weighted_kendall",
    "write_bench",
]
