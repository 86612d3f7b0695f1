"""Core immutable data types: tables, typed values, fact triplets, graphs, weights.

All types are frozen dataclasses so they can be shared freely across threads.
JSON serialization keeps a fixed field order and renders floats as decimal
strings, which keeps stored fixtures stable across platforms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .errors import EmptyHeader, RaggedRows


class SourceFormat(Enum):
    MARKDOWN = "markdown"
    HTML = "html"
    CONSTRUCTED = "constructed"


@dataclass(frozen=True)
class Table:
    """A rectangular grid: one header row plus zero or more data rows.

    ``source_format`` records where the table came from and is excluded from
    equality: two tables with the same headers and rows are the same table.
    """

    headers: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    source_format: SourceFormat = field(default=SourceFormat.CONSTRUCTED, compare=False)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.headers)

    def column(self, col: int) -> list[str]:
        return [row[col] for row in self.rows]

    def to_json_dict(self) -> dict:
        return {
            "headers": list(self.headers),
            "rows": [list(r) for r in self.rows],
            "source_format": self.source_format.value,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Table":
        return table_new(
            d["headers"],
            d["rows"],
            SourceFormat(d.get("source_format", "constructed")),
        )


def table_new(
    headers: Sequence[str],
    rows: Sequence[Sequence[str]],
    source_format: SourceFormat = SourceFormat.CONSTRUCTED,
) -> Table:
    """Validating Table constructor.

    Raises EmptyHeader if any header is empty after trimming, RaggedRows if a
    row's width differs from the header count.
    """
    if not headers:
        raise EmptyHeader(0)
    for i, h in enumerate(headers):
        if not str(h).strip():
            raise EmptyHeader(i)
    width = len(headers)
    fixed_rows = []
    for r, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRows(r, width, len(row))
        fixed_rows.append(tuple(str(c) for c in row))
    return Table(tuple(str(h) for h in headers), tuple(fixed_rows), source_format)


class ValueKind(Enum):
    NUMBER = "number"
    PERCENT = "percent"
    BOOLEAN = "boolean"
    DATE = "date"
    LIST = "list"
    STRING = "string"


NUMERIC_KINDS = frozenset({ValueKind.NUMBER, ValueKind.PERCENT})


@dataclass(frozen=True)
class TypedValue:
    """A cell or object value after type detection.

    numeric_value is set iff kind is number or percent (percent stored as a
    fraction: "12%" -> 0.12).  canonical holds the normalized text form for
    boolean/date/list kinds; for plain strings it is computed on demand.
    """

    kind: ValueKind
    raw: str
    numeric_value: Optional[float] = None
    unit: Optional[str] = None
    canonical: Optional[str] = None

    def __post_init__(self):
        has_num = self.numeric_value is not None
        if (self.kind in NUMERIC_KINDS) != has_num:
            raise ValueError(f"numeric_value presence inconsistent with kind {self.kind}")

    def to_json_dict(self) -> dict:
        d: dict = {"kind": self.kind.value, "raw": self.raw}
        if self.numeric_value is not None:
            d["numeric_value"] = repr(self.numeric_value)
        if self.unit is not None:
            d["unit"] = self.unit
        if self.canonical is not None:
            d["canonical"] = self.canonical
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "TypedValue":
        num = d.get("numeric_value")
        return cls(
            kind=ValueKind(d["kind"]),
            raw=d["raw"],
            numeric_value=float(num) if num is not None else None,
            unit=d.get("unit"),
            canonical=d.get("canonical"),
        )


class OriginKind(Enum):
    TABLE_CELL = "table_cell"
    TEXT_SPAN = "text_span"


@dataclass(frozen=True)
class Origin:
    """Where a triplet came from: a table cell (row, col) or source text."""

    kind: OriginKind
    row: Optional[int] = None
    col: Optional[int] = None

    @classmethod
    def cell(cls, row: int, col: int) -> "Origin":
        return cls(OriginKind.TABLE_CELL, row, col)

    @classmethod
    def text(cls) -> "Origin":
        return cls(OriginKind.TEXT_SPAN)

    def to_json_dict(self) -> dict:
        d: dict = {"kind": self.kind.value}
        if self.kind is OriginKind.TABLE_CELL:
            d["row"] = self.row
            d["col"] = self.col
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "Origin":
        return cls(OriginKind(d["kind"]), d.get("row"), d.get("col"))


@dataclass(frozen=True)
class Triplet:
    """One fact: (subject, predicate, object) plus provenance."""

    subject: str
    predicate: str
    object: TypedValue
    origin: Origin

    def __post_init__(self):
        if not self.subject:
            raise ValueError("triplet subject must be non-empty")
        if not self.predicate:
            raise ValueError("triplet predicate must be non-empty")

    def key(self) -> tuple[str, str, str]:
        """Content identity, ignoring provenance: (subject, predicate, canonical object)."""
        return (self.subject, self.predicate, value_fingerprint(self.object))

    def to_json_dict(self) -> dict:
        return {
            "subject": self.subject,
            "predicate": self.predicate,
            "object": self.object.to_json_dict(),
            "origin": self.origin.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Triplet":
        return cls(
            subject=d["subject"],
            predicate=d["predicate"],
            object=TypedValue.from_json_dict(d["object"]),
            origin=Origin.from_json_dict(d["origin"]),
        )


def value_fingerprint(v: TypedValue) -> str:
    """Stable text form used for content identity and deduplication."""
    if v.kind in NUMERIC_KINDS:
        unit = v.unit or ""
        return f"{v.kind.value}:{repr(v.numeric_value)}:{unit}"
    if v.canonical is not None:
        return f"{v.kind.value}:{v.canonical}"
    return f"{v.kind.value}:{_collapse(v.raw)}"


def _collapse(s: str) -> str:
    return " ".join(s.casefold().split())


@dataclass(frozen=True)
class KnowledgeGraph:
    """An indexed set of triplets.

    Triplets whose (subject, predicate, object) content is identical are
    deduplicated at construction; triplets sharing (subject, predicate) with
    conflicting objects are all retained and visible via conflicting_keys().
    """

    triplets: tuple[Triplet, ...]
    subject_index: dict = field(compare=False, repr=False)
    predicate_index: dict = field(compare=False, repr=False)

    @classmethod
    def from_triplets(cls, triplets: Iterable[Triplet]) -> "KnowledgeGraph":
        kept: list[Triplet] = []
        seen: set[tuple[str, str, str]] = set()
        for t in triplets:
            k = t.key()
            if k in seen:
                continue
            seen.add(k)
            kept.append(t)
        subj: dict[str, tuple[int, ...]] = {}
        pred: dict[str, tuple[int, ...]] = {}
        for i, t in enumerate(kept):
            subj[t.subject] = subj.get(t.subject, ()) + (i,)
            pred[t.predicate] = pred.get(t.predicate, ()) + (i,)
        return cls(tuple(kept), subj, pred)

    @property
    def subjects(self) -> tuple[str, ...]:
        return tuple(self.subject_index.keys())

    @property
    def predicates(self) -> tuple[str, ...]:
        return tuple(self.predicate_index.keys())

    def conflicting_keys(self) -> list[tuple[str, str]]:
        """(subject, predicate) pairs that carry more than one distinct object."""
        by_sp: dict[tuple[str, str], int] = {}
        for t in self.triplets:
            sp = (t.subject, t.predicate)
            by_sp[sp] = by_sp.get(sp, 0) + 1
        return sorted(sp for sp, n in by_sp.items() if n > 1)

    def key_multiset(self) -> list[tuple[str, str, str]]:
        """Sorted content keys; equal iff two graphs state the same facts."""
        return sorted(t.key() for t in self.triplets)

    def to_json_dict(self) -> dict:
        return {"triplets": [t.to_json_dict() for t in self.triplets]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "KnowledgeGraph":
        return cls.from_triplets(Triplet.from_json_dict(t) for t in d["triplets"])


def graph_counts(g: KnowledgeGraph) -> tuple[int, int, int]:
    """(distinct subjects, distinct predicates, triplet count)."""
    return (len(g.subject_index), len(g.predicate_index), len(g.triplets))


@dataclass(frozen=True)
class Weights:
    """Penalty weights; defaults follow the shipped configuration."""

    beta_mi: float = 1.0
    beta_ei: float = 0.9
    beta_partial: float = 0.8
    alpha_r: float = 0.9
    alpha_c: float = 1.0
    alpha_cell: float = 0.8
    omega_p: float = 0.9

    def __post_init__(self):
        for name in ("beta_mi", "beta_ei", "beta_partial", "alpha_r", "alpha_c", "alpha_cell", "omega_p"):
            if getattr(self, name) < 0:
                raise ValueError(f"weight {name} must be non-negative")

    def to_json_dict(self) -> dict:
        return {
            "beta_mi": repr(self.beta_mi),
            "beta_ei": repr(self.beta_ei),
            "beta_partial": repr(self.beta_partial),
            "alpha_r": repr(self.alpha_r),
            "alpha_c": repr(self.alpha_c),
            "alpha_cell": repr(self.alpha_cell),
            "omega_p": repr(self.omega_p),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Weights":
        return cls(**{k: float(v) for k, v in d.items()})


def to_canonical_json(obj) -> str:
    """Compact JSON with the object's own field order preserved."""
    d = obj.to_json_dict() if hasattr(obj, "to_json_dict") else obj
    return json.dumps(d, ensure_ascii=False, separators=(",", ":"))
