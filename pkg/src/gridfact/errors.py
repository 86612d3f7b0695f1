"""Exception types shared across the package."""

from __future__ import annotations


class GridfactError(Exception):
    """Base class for all package-specific errors."""


# --- table construction / parsing ---


class RaggedRows(GridfactError):
    """A row's cell count does not match the header count."""

    def __init__(self, row_idx: int, expected: int, got: int):
        self.row_idx = row_idx
        self.expected = expected
        self.got = got
        super().__init__(f"row {row_idx} has {got} cells, expected {expected}")


class EmptyHeader(GridfactError):
    """A header cell is empty after trimming."""

    def __init__(self, col_idx: int):
        self.col_idx = col_idx
        super().__init__(f"header {col_idx} is empty after trimming")


class NoTableFound(GridfactError):
    """The input text contains no recognizable table."""


class MissingSeparatorRow(GridfactError):
    """A pipe-delimited header line is not followed by a separator row."""


class MalformedMarkup(GridfactError):
    """HTML contains a table element that cannot be interpreted."""


# --- graph construction ---


class SubjectColumnOutOfRange(GridfactError):
    """The requested subject column index does not exist in the table."""

    def __init__(self, subject_col: int, n_cols: int):
        self.subject_col = subject_col
        self.n_cols = n_cols
        super().__init__(f"subject column {subject_col} out of range for {n_cols} columns")


class BackendUnavailable(GridfactError):
    """An extraction or refinement backend cannot be reached."""


class BackendProtocolError(GridfactError):
    """A backend returned a payload that violates its contract."""


# --- alignment / scoring ---


class EmptySourceGraph(GridfactError):
    """The source graph has no triplets, so penalty ratios are undefined."""


class ZeroDenominator(GridfactError):
    """A penalty denominator (row, column, or cell count) is zero."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"denominator {name} is zero")


# --- rank statistics ---


class MismatchedIds(GridfactError):
    """Two rankings do not cover the same id set."""


class DegenerateRanking(GridfactError):
    """A statistic is undefined because one ranking has no variance."""


class InvalidPersistence(GridfactError):
    """The overlap persistence parameter must lie strictly between 0 and 1."""


class LengthMismatch(GridfactError):
    """Parallel score/label sequences have different lengths."""


# --- perturbation ---


class TableTooSmall(GridfactError):
    """The table lacks the rows/columns a perturbation kind needs."""

    def __init__(self, kind: str, reason: str):
        self.kind = kind
        self.reason = reason
        super().__init__(f"{kind}: {reason}")


class SpecInapplicable(GridfactError):
    """A perturbation spec cannot be applied to the given table."""


# --- LLM client ---


class Unreachable(GridfactError):
    """The chat endpoint could not be reached within the retry budget."""


class AuthFailure(GridfactError):
    """The chat endpoint rejected the request credentials."""


class MalformedResponse(GridfactError):
    """The chat endpoint returned content that is not the required JSON."""
