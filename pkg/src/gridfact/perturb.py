"""Deterministic table perturbations for benchmarking the scorer.

A fan-out produces twelve labeled variants per table: two groups (semantics
preserving / altering), three difficulty tiers, two kinds each.  Kinds that
need more table than they get are substituted by the nearest applicable kind
in the same group, recorded in the plan.  All randomness flows from a
per-spec seed derived from (seed, spec id), so plans and variants are
reproducible byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

from .align import DiffKind, align_deterministic
from .errors import SpecInapplicable
from .graphify import table_to_graph
from .model import Table, ValueKind, table_new
from .normalize import DEFAULT_UNITS, collapse_text, normalize_key, parse_value, values_equal
from .table_io import render_markdown

logger = logging.getLogger(__name__)


class PerturbGroup(Enum):
    PRESERVING = "preserving"
    ALTERING = "altering"


class PerturbTier(Enum):
    EASY = "easy"
    MEDIUM = "medium"
    HARD = "hard"


@dataclass(frozen=True)
class PerturbationSpec:
    id: str
    group: PerturbGroup
    tier: PerturbTier
    kind: str
    rng_seed: int
    parameters: dict
    substituted_from: Optional[str] = None

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "group": self.group.value,
            "tier": self.tier.value,
            "kind": self.kind,
            "rng_seed": self.rng_seed,
            "parameters": self.parameters,
            "substituted_from": self.substituted_from,
        }


@dataclass(frozen=True)
class PerturbedInstance:
    table: Table
    spec: PerturbationSpec
    label: int  # 0 = preserving, 1 = altering
    edit_log: tuple

    def to_json_dict(self) -> dict:
        d = self.spec.to_json_dict()
        d["label"] = self.label
        d["edit_log"] = list(self.edit_log)
        return d


# (group, tier, kind) in fixed catalogue order; two kinds per (group, tier).
CATALOGUE = (
    (PerturbGroup.PRESERVING, PerturbTier.EASY, "row_shuffle"),
    (PerturbGroup.PRESERVING, PerturbTier.EASY, "column_reorder"),
    (PerturbGroup.PRESERVING, PerturbTier.MEDIUM, "header_synonym_rename"),
    (PerturbGroup.PRESERVING, PerturbTier.MEDIUM, "unit_rescale"),
    (PerturbGroup.PRESERVING, PerturbTier.HARD, "number_reformat"),
    (PerturbGroup.PRESERVING, PerturbTier.HARD, "transpose"),
    (PerturbGroup.ALTERING, PerturbTier.EASY, "delete_row"),
    (PerturbGroup.ALTERING, PerturbTier.EASY, "insert_fabricated_row"),
    (PerturbGroup.ALTERING, PerturbTier.MEDIUM, "delete_column"),
    (PerturbGroup.ALTERING, PerturbTier.MEDIUM, "swap_two_numeric_cells"),
    (PerturbGroup.ALTERING, PerturbTier.HARD, "numeric_noise"),
    (PerturbGroup.ALTERING, PerturbTier.HARD, "inject_misspellings"),
)

_PARAMETERS = {
    "numeric_noise": {"min_relative": 0.01, "max_relative": 0.05},
    "inject_misspellings": {"max_cells": 2},
}

# Terminal fallbacks are always applicable for their group.
_TERMINAL = {PerturbGroup.PRESERVING: "row_shuffle", PerturbGroup.ALTERING: "insert_fabricated_row"}


def derived_seed(seed: int, spec_id: str) -> int:
    """Stable 63-bit per-spec seed from the run seed and spec id."""
    digest = hashlib.sha256(f"{seed}:{spec_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & (2**63 - 1)


# --- cell inspection helpers ---

_PLAIN_INT_RE = re.compile(r"^[+-]?(?:\d{1,3}(?:,\d{3})+|\d+)$")
_PLAIN_NUM_RE = re.compile(r"^[+-]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?$")


def _currency_split(text: str) -> tuple:
    if text and text[0] in DEFAULT_UNITS.currency_symbols:
        return text[0], text[1:].lstrip()
    return "", text


def _plain_number_cells(t: Table, subject_col: int) -> list:
    """(row, col) of cells that are a bare number, optionally currency-prefixed."""
    out = []
    for r, row in enumerate(t.rows):
        for c, cell in enumerate(row):
            if c == subject_col:
                continue
            _, body = _currency_split(cell.strip())
            if _PLAIN_NUM_RE.match(body):
                out.append((r, c))
    return out


def _rescalable_cells(t: Table, subject_col: int) -> list:
    """Plain integer cells with magnitude >= 1000; scale suffixes apply cleanly."""
    out = []
    for r, c in _plain_number_cells(t, subject_col):
        _, body = _currency_split(t.rows[r][c].strip())
        if _PLAIN_INT_RE.match(body) and abs(int(body.replace(",", ""))) >= 1000:
            out.append((r, c))
    return out


def _number_cells(t: Table, subject_col: int, nonzero: bool = False) -> list:
    out = []
    for r, row in enumerate(t.rows):
        for c, cell in enumerate(row):
            if c == subject_col or not cell.strip():
                continue
            v = parse_value(cell)
            if v.kind is ValueKind.NUMBER:
                if nonzero and v.numeric_value == 0:
                    continue
                out.append((r, c, v))
    return out


def _string_cells(t: Table, subject_col: int) -> list:
    out = []
    for r, row in enumerate(t.rows):
        for c, cell in enumerate(row):
            if c == subject_col or not cell.strip():
                continue
            if parse_value(cell).kind is ValueKind.STRING:
                out.append((r, c))
    return out


def _subject_key_rows(t: Table, subject_col: int) -> list:
    return [normalize_key(row[subject_col]) for row in t.rows]


# --- applicability ---


def _applicable(kind: str, t: Table, subject_col: int) -> bool:
    if kind == "row_shuffle":
        return True
    if kind == "column_reorder":
        return t.n_cols >= 2
    if kind == "header_synonym_rename":
        return t.n_cols >= 2
    if kind == "unit_rescale":
        return bool(_rescalable_cells(t, subject_col))
    if kind == "number_reformat":
        return bool(_plain_number_cells(t, subject_col))
    if kind == "transpose":
        if t.n_cols < 2 or t.n_rows < 1:
            return False
        subject_keys = _subject_key_rows(t, subject_col)
        if any(not k for k in subject_keys) or len(set(subject_keys)) != len(subject_keys):
            return False
        header_keys = [normalize_key(h) for c, h in enumerate(t.headers) if c != subject_col]
        return len(set(header_keys)) == len(header_keys) and all(header_keys)
    if kind == "delete_row":
        return t.n_rows >= 2 and any(
            any(cell.strip() for c, cell in enumerate(row) if c != subject_col) for row in t.rows
        )
    if kind == "insert_fabricated_row":
        return True
    if kind == "delete_column":
        return t.n_cols >= 2 and any(
            any(t.rows[r][c].strip() for r in range(t.n_rows))
            for c in range(t.n_cols)
            if c != subject_col
        )
    if kind == "swap_two_numeric_cells":
        cells = _number_cells(t, subject_col)
        return any(
            not values_equal(cells[i][2], cells[j][2])
            for i in range(len(cells))
            for j in range(i + 1, len(cells))
        )
    if kind == "numeric_noise":
        return bool(_number_cells(t, subject_col, nonzero=True))
    if kind == "inject_misspellings":
        return bool(_string_cells(t, subject_col))
    raise ValueError(f"unknown perturbation kind: {kind}")


def _substitute(kind: str, group: PerturbGroup, tier: PerturbTier, t: Table, subject_col: int) -> str:
    """Nearest applicable kind in the same group: same tier first, then outward."""
    tiers = [PerturbTier.EASY, PerturbTier.MEDIUM, PerturbTier.HARD]
    ordered = [(g, tr, k) for (g, tr, k) in CATALOGUE if g is group and k != kind]
    ranked = sorted(
        ordered,
        key=lambda e: (abs(tiers.index(e[1]) - tiers.index(tier)), CATALOGUE.index(e)),
    )
    for _, _, candidate in ranked:
        if _applicable(candidate, t, subject_col):
            return candidate
    return _TERMINAL[group]


def plan(t: Table, seed: int, subject_col: int = 0) -> list:
    """Twelve specs covering the catalogue; inapplicable kinds substituted.

    Every (group, tier) pair occurs exactly twice regardless of substitution,
    so the 6/6 label split is structural.
    """
    specs = []
    slot_counter: dict = {}
    for group, tier, kind in CATALOGUE:
        slot_key = (group, tier)
        slot_counter[slot_key] = slot_counter.get(slot_key, 0) + 1
        spec_id = f"{group.value}-{tier.value}-{slot_counter[slot_key]}"
        chosen = kind
        substituted_from = None
        if not _applicable(kind, t, subject_col):
            chosen = _substitute(kind, group, tier, t, subject_col)
            substituted_from = kind
            logger.warning(
                "kind %s inapplicable for this table; substituting %s in slot %s",
                kind,
                chosen,
                spec_id,
            )
        specs.append(
            PerturbationSpec(
                id=spec_id,
                group=group,
                tier=tier,
                kind=chosen,
                rng_seed=derived_seed(seed, spec_id),
                parameters=dict(_PARAMETERS.get(chosen, {})),
                substituted_from=substituted_from,
            )
        )
    return specs


# --- executors ---


def _rows_list(t: Table) -> list:
    return [list(row) for row in t.rows]


def _x_row_shuffle(t: Table, rng: random.Random, subject_col: int) -> tuple:
    # only rows with real subjects move; positional fallback subjects stay put
    movable = [r for r in range(t.n_rows) if normalize_key(t.rows[r][subject_col])]
    order = movable[:]
    rng.shuffle(order)
    if len(movable) >= 2 and order == movable:
        order = order[1:] + order[:1]
    rows = _rows_list(t)
    new_rows = rows[:]
    for src, dst in zip(order, movable):
        new_rows[dst] = rows[src]
    log = [{"op": "row_shuffle", "order": order, "positions": movable}]
    return table_new(t.headers, new_rows), log


def _x_column_reorder(t: Table, rng: random.Random, subject_col: int) -> tuple:
    movable = [c for c in range(t.n_cols) if c != subject_col]
    order = movable[:]
    rng.shuffle(order)
    if len(movable) >= 2 and order == movable:
        order = order[1:] + order[:1]
    mapping = dict(zip(movable, order))
    perm = [mapping.get(c, c) for c in range(t.n_cols)]
    headers = [t.headers[perm[c]] for c in range(t.n_cols)]
    rows = [[row[perm[c]] for c in range(t.n_cols)] for row in t.rows]
    log = [{"op": "column_reorder", "permutation": perm}]
    return table_new(headers, rows), log


_SYNONYMS = {
    "revenue": "turnover",
    "profit": "earnings",
    "employees": "headcount",
    "country": "nation",
    "amount": "value",
    "price": "cost",
    "growth": "increase",
    "population": "inhabitants",
}
_RENAME_PATTERNS = ("{h} (reported)", "reported {h}", "{h} figure")


def _x_header_rename(t: Table, rng: random.Random, subject_col: int) -> tuple:
    candidates = [c for c in range(t.n_cols) if c != subject_col]
    if not candidates:
        raise SpecInapplicable("no non-subject header to rename")
    col = rng.choice(candidates)
    old = t.headers[col]
    folded = old.strip().casefold()
    if folded in _SYNONYMS:
        new = _SYNONYMS[folded]
    else:
        new = rng.choice(_RENAME_PATTERNS).format(h=old.strip())
    headers = list(t.headers)
    headers[col] = new
    log = [
        {
            "op": "header_synonym_rename",
            "col": col,
            "before": old,
            "after": new,
            "key_before": normalize_key(old),
            "key_after": normalize_key(new),
        }
    ]
    return table_new(headers, t.rows), log


def _scaled_string(digits: str, scale_digits: int) -> str:
    """Exact decimal for digits / 10**scale_digits, no float math."""
    if len(digits) <= scale_digits:
        digits = digits.zfill(scale_digits + 1)
    head = digits[:-scale_digits]
    tail = digits[-scale_digits:].rstrip("0")
    return f"{head}.{tail}" if tail else head


def _x_unit_rescale(t: Table, rng: random.Random, subject_col: int) -> tuple:
    cells = _rescalable_cells(t, subject_col)
    if not cells:
        raise SpecInapplicable("no integer cell large enough to rescale")
    r, c = cells[rng.randrange(len(cells))]
    raw = t.rows[r][c].strip()
    prefix, body = _currency_split(raw)
    sign = ""
    if body and body[0] in "+-":
        sign, body = body[0], body[1:]
    digits = body.replace(",", "")
    magnitude = abs(int(digits))
    if magnitude >= 10**9:
        suffix, scale_digits = "B", 9
    elif magnitude >= 10**6:
        suffix, scale_digits = "M", 6
    else:
        suffix, scale_digits = "k", 3
    new_raw = f"{prefix}{sign}{_scaled_string(digits, scale_digits)}{suffix}"
    rows = _rows_list(t)
    rows[r][c] = new_raw
    log = [{"op": "unit_rescale", "row": r, "col": c, "before": t.rows[r][c], "after": new_raw}]
    return table_new(t.headers, rows), log


def _group_digits(digits: str) -> str:
    out = []
    for i, ch in enumerate(reversed(digits)):
        if i and i % 3 == 0:
            out.append(",")
        out.append(ch)
    return "".join(reversed(out))


def _x_number_reformat(t: Table, rng: random.Random, subject_col: int) -> tuple:
    cells = _plain_number_cells(t, subject_col)
    if not cells:
        raise SpecInapplicable("no plain numeric cell to reformat")
    r, c = cells[rng.randrange(len(cells))]
    raw = t.rows[r][c].strip()
    prefix, body = _currency_split(raw)
    sign = ""
    if body and body[0] in "+-":
        sign, body = body[0], body[1:]
    if "," in body:
        new_body = body.replace(",", "")
    else:
        int_part, dot, frac = body.partition(".")
        if len(int_part) > 3:
            new_body = _group_digits(int_part) + dot + frac
        elif dot:
            new_body = body + "0"
        else:
            new_body = body + ".0"
    new_raw = f"{prefix}{sign}{new_body}"
    rows = _rows_list(t)
    rows[r][c] = new_raw
    log = [{"op": "number_reformat", "row": r, "col": c, "before": t.rows[r][c], "after": new_raw}]
    return table_new(t.headers, rows), log


def _x_transpose(t: Table, rng: random.Random, subject_col: int) -> tuple:
    if t.n_cols < 2:
        raise SpecInapplicable("transpose needs at least one non-subject column")
    headers = [t.headers[subject_col]] + [row[subject_col] for row in t.rows]
    rows = []
    for c in range(t.n_cols):
        if c == subject_col:
            continue
        rows.append([t.headers[c]] + [row[c] for row in t.rows])
    log = [{"op": "transpose", "subject_col": subject_col}]
    return table_new(headers, rows), log


def _x_delete_row(t: Table, rng: random.Random, subject_col: int) -> tuple:
    candidates = [
        r
        for r, row in enumerate(t.rows)
        if any(cell.strip() for c, cell in enumerate(row) if c != subject_col)
    ]
    if t.n_rows < 2 or not candidates:
        raise SpecInapplicable("needs two rows and a row with facts to delete")
    r = candidates[rng.randrange(len(candidates))]
    rows = _rows_list(t)
    removed = rows.pop(r)
    log = [{"op": "delete_row", "row": r, "cells": removed}]
    return table_new(t.headers, rows), log


_FABRICATED_WORDS = ("aurora", "basalt", "cobalt", "damson", "ember", "fjord")


def _x_insert_row(t: Table, rng: random.Random, subject_col: int) -> tuple:
    existing = set(_subject_key_rows(t, subject_col))
    n = rng.randint(100, 999)
    subject = f"synthetic entity {n}"
    while normalize_key(subject) in existing:
        n += 1
        subject = f"synthetic entity {n}"
    row = []
    for c in range(t.n_cols):
        if c == subject_col:
            row.append(subject)
            continue
        column_kinds = {
            parse_value(t.rows[r][c]).kind for r in range(t.n_rows) if t.rows[r][c].strip()
        }
        if ValueKind.NUMBER in column_kinds:
            row.append(str(rng.randint(2, 9999)))
        else:
            row.append(f"{rng.choice(_FABRICATED_WORDS)} {rng.randint(2, 99)}")
    rows = _rows_list(t)
    pos = rng.randint(0, t.n_rows)
    rows.insert(pos, row)
    log = [{"op": "insert_fabricated_row", "row": pos, "cells": row}]
    return table_new(t.headers, rows), log


def _x_delete_column(t: Table, rng: random.Random, subject_col: int) -> tuple:
    candidates = [
        c
        for c in range(t.n_cols)
        if c != subject_col and any(t.rows[r][c].strip() for r in range(t.n_rows))
    ]
    if not candidates:
        raise SpecInapplicable("no non-empty non-subject column to delete")
    col = candidates[rng.randrange(len(candidates))]
    headers = [h for c, h in enumerate(t.headers) if c != col]
    rows = [[cell for c, cell in enumerate(row) if c != col] for row in t.rows]
    log = [{"op": "delete_column", "col": col, "header": t.headers[col]}]
    return table_new(headers, rows), log


def _x_swap_numeric(t: Table, rng: random.Random, subject_col: int) -> tuple:
    cells = _number_cells(t, subject_col)
    pairs = []
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            if not values_equal(cells[i][2], cells[j][2]):
                pairs.append((cells[i][:2], cells[j][:2]))
    if not pairs:
        raise SpecInapplicable("needs two numeric cells with different values")
    (r1, c1), (r2, c2) = pairs[rng.randrange(len(pairs))]
    rows = _rows_list(t)
    rows[r1][c1], rows[r2][c2] = rows[r2][c2], rows[r1][c1]
    log = [{"op": "swap_two_numeric_cells", "first": [r1, c1], "second": [r2, c2]}]
    return table_new(t.headers, rows), log


def _x_numeric_noise(t: Table, rng: random.Random, subject_col: int) -> tuple:
    cells = _number_cells(t, subject_col, nonzero=True)
    if not cells:
        raise SpecInapplicable("no non-zero numeric cell to perturb")
    count = max(1, len(cells) // 4)
    chosen = rng.sample(range(len(cells)), count)
    rows = _rows_list(t)
    log = []
    for idx in sorted(chosen):
        r, c, v = cells[idx]
        delta = rng.uniform(0.01, 0.05) * rng.choice((-1.0, 1.0))
        new_value = v.numeric_value * (1.0 + delta)
        new_raw = repr(new_value)
        rows[r][c] = new_raw
        log.append(
            {"op": "numeric_noise", "row": r, "col": c, "before": t.rows[r][c],
             "after": new_raw, "relative_delta": repr(delta)}
        )
    return table_new(t.headers, rows), log


_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def _mutations(word: str, rng: random.Random):
    """Candidate misspellings, random attempts first, then a systematic sweep."""
    n = len(word)
    for _ in range(20):
        op = rng.choice(("swap", "substitute", "delete", "insert"))
        i = rng.randrange(n)
        if op == "swap" and n >= 2:
            j = min(i, n - 2)
            yield word[:j] + word[j + 1] + word[j] + word[j + 2:]
        elif op == "substitute":
            yield word[:i] + rng.choice(_ALPHABET) + word[i + 1:]
        elif op == "delete" and n >= 2:
            yield word[:i] + word[i + 1:]
        elif op == "insert":
            yield word[:i] + rng.choice(_ALPHABET) + word[i:]
    for i in range(n):
        for ch in _ALPHABET:
            yield word[:i] + ch + word[i + 1:]


def _misspell(raw: str, rng: random.Random) -> Optional[str]:
    stripped = raw.strip()
    for candidate in _mutations(stripped, rng):
        if not candidate.strip():
            continue
        if collapse_text(candidate) == collapse_text(stripped):
            continue
        if parse_value(candidate).kind is not ValueKind.STRING:
            continue
        return candidate
    return None


def _x_misspell(t: Table, rng: random.Random, subject_col: int) -> tuple:
    candidates = _string_cells(t, subject_col)
    if not candidates:
        raise SpecInapplicable("no textual cell to misspell")
    count = max(1, min(2, len(candidates)))
    chosen = rng.sample(range(len(candidates)), count)
    rows = _rows_list(t)
    log = []
    for idx in sorted(chosen):
        r, c = candidates[idx]
        mutated = _misspell(t.rows[r][c], rng)
        if mutated is None:
            continue
        rows[r][c] = mutated
        log.append(
            {"op": "inject_misspellings", "row": r, "col": c,
             "before": t.rows[r][c], "after": mutated}
        )
    if not log:
        raise SpecInapplicable("no cell admitted a canonical-changing misspelling")
    return table_new(t.headers, rows), log


_EXECUTORS = {
    "row_shuffle": _x_row_shuffle,
    "column_reorder": _x_column_reorder,
    "header_synonym_rename": _x_header_rename,
    "unit_rescale": _x_unit_rescale,
    "number_reformat": _x_number_reformat,
    "transpose": _x_transpose,
    "delete_row": _x_delete_row,
    "insert_fabricated_row": _x_insert_row,
    "delete_column": _x_delete_column,
    "swap_two_numeric_cells": _x_swap_numeric,
    "numeric_noise": _x_numeric_noise,
    "inject_misspellings": _x_misspell,
}


def apply(t: Table, spec: PerturbationSpec, subject_col: int = 0) -> PerturbedInstance:
    """Execute one spec; all randomness comes from spec.rng_seed."""
    executor = _EXECUTORS.get(spec.kind)
    if executor is None:
        raise SpecInapplicable(f"unknown kind {spec.kind}")
    rng = random.Random(spec.rng_seed)
    variant, log = executor(t, rng, subject_col)
    return PerturbedInstance(
        table=variant,
        spec=spec,
        label=1 if spec.group is PerturbGroup.ALTERING else 0,
        edit_log=tuple(log),
    )


def fan_out(t: Table, seed: int, subject_col: int = 0) -> list:
    """Plan plus apply: the twelve labeled variants for one table."""
    return [apply(t, spec, subject_col) for spec in plan(t, seed, subject_col)]


def effective_subject_col(instance: PerturbedInstance, subject_col: int) -> int:
    """Subject column of the variant table; some kinds move or renumber it."""
    if instance.spec.kind == "transpose":
        return 0
    if instance.spec.kind == "delete_column":
        deleted = instance.edit_log[0]["col"]
        if deleted < subject_col:
            return subject_col - 1
    return subject_col


def verify_label(gt: Table, instance: PerturbedInstance, subject_col: int = 0) -> bool:
    """Check label soundness on graphs, honoring recorded renames/transposes."""
    g_gt = table_to_graph(gt, subject_col)
    g_var = table_to_graph(instance.table, effective_subject_col(instance, subject_col))
    keys_var = g_var.key_multiset()
    if instance.spec.kind == "header_synonym_rename":
        rename = {e["key_after"]: e["key_before"] for e in instance.edit_log}
        keys_var = sorted((s, rename.get(p, p), o) for s, p, o in keys_var)
    elif instance.spec.kind == "transpose":
        keys_var = sorted((p, s, o) for s, p, o in keys_var)
    same = keys_var == g_gt.key_multiset()
    return same if instance.label == 0 else not same


def _rubric_signature(gt_graph, instance: PerturbedInstance, subject_col: int) -> tuple:
    g_var = table_to_graph(instance.table, effective_subject_col(instance, subject_col))
    report = align_deterministic(g_var, gt_graph)
    matched_s_subj = {gt_graph.triplets[m.source_index].subject for m in report.matched}
    matched_s_pred = {gt_graph.triplets[m.source_index].predicate for m in report.matched}
    matched_t_subj = {g_var.triplets[m.table_index].subject for m in report.matched}
    matched_t_pred = {g_var.triplets[m.table_index].predicate for m in report.matched}
    col_missing = len(gt_graph.predicate_index) - len(matched_s_pred)
    col_extra = len(g_var.predicate_index) - len(matched_t_pred)
    row_missing = len(gt_graph.subject_index) - len(matched_s_subj)
    row_extra = len(g_var.subject_index) - len(matched_t_subj)
    cell_missing = len(report.unmatched_source)
    cell_extra = len(report.unmatched_table)
    partial_sum = 0.0
    n_str = n_numlike = n_list = n_other = 0
    n_inexact = 0
    numlike = {ValueKind.NUMBER, ValueKind.PERCENT, ValueKind.BOOLEAN, ValueKind.DATE}
    for m in report.matched:
        kind = m.difference.kind
        if kind is DiffKind.EXACT:
            continue
        n_inexact += 1
        if kind is DiffKind.PARTIAL:
            partial_sum += m.difference.deviation
            continue
        ks = gt_graph.triplets[m.source_index].object.kind
        kt = g_var.triplets[m.table_index].object.kind
        if ks is kt is ValueKind.STRING:
            n_str += 1
        elif ks is kt and ks in numlike:
            n_numlike += 1
        elif ks is kt is ValueKind.LIST:
            n_list += 1
        else:
            n_other += 1
    affected = cell_missing + cell_extra + n_inexact
    return (
        col_missing,
        col_extra,
        row_missing,
        row_extra,
        cell_missing,
        cell_extra,
        partial_sum,
        n_str,
        n_numlike,
        n_list,
        n_other,
        affected,
        instance.spec.id,
    )


def rubric_rank(gt: Table, instances: list, subject_col: int = 0) -> list:
    """Reference ordering, least damaged first, mirroring a human review rubric.

    Lexicographic: column losses, then rows, then cells, then graded numeric
    deviation, then contextual mismatch counts (textual, numeric-like, list,
    other), tie-broken by affected-cell count and finally variant id.
    """
    gt_graph = table_to_graph(gt, subject_col)
    signatures = [_rubric_signature(gt_graph, inst, subject_col) for inst in instances]
    return [sig[-1] for sig in sorted(signatures)]


def write_bench(t: Table, seed: int, out_dir, subject_col: int = 0) -> dict:
    """Materialize a fan-out on disk: gt.md, variant_<id>.md, manifest.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    instances = fan_out(t, seed, subject_col)
    with (out / "gt.md").open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_markdown(t))
    entries = []
    for inst in instances:
        name = f"variant_{inst.spec.id}.md"
        with (out / name).open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(render_markdown(inst.table))
        entry = inst.to_json_dict()
        entry["file"] = name
        entry["subject_col"] = effective_subject_col(inst, subject_col)
        entries.append(entry)
    manifest = {
        "catalogue_version": 1,
        "seed": seed,
        "subject_col": subject_col,
        "gt_file": "gt.md",
        "entries": entries,
    }
    with (out / "manifest.json").open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
