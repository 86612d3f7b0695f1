"""Canonicalization of keys and cell values.

normalize_key maps header/entity text to a stable snake_case key.  parse_value
is a total function from raw cell text to a TypedValue; anything unrecognized
stays a string, so parsing never fails.  A UnitTable carries the recognized
scale suffixes, currency markers, boolean lexicon, and date formats, and can
be overridden from a JSON config file.
"""

from __future__ import annotations

import json
import math
import re
import unicodedata
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Optional

from .model import NUMERIC_KINDS, TypedValue, ValueKind

# '#' is retained because graph construction uses it to disambiguate
# repeated subjects; everything else non-alphanumeric collapses to '_'.
_KEY_KEEP = "#"


def normalize_key(s: str) -> str:
    """Lowercased, NFC-normalized snake_case key. Idempotent."""
    s = unicodedata.normalize("NFC", str(s)).casefold()
    out = []
    pending_sep = False
    for ch in s:
        if ch.isalnum() or ch in _KEY_KEEP:
            if pending_sep and out:
                out.append("_")
            pending_sep = False
            out.append(ch)
        else:
            pending_sep = True
    key = re.sub(r"#+", "#", "".join(out))
    # '#' survives only inside alnum#alnum (the repeat-subject marker); at an
    # edge it would collide with the fact-line comment prefix, so it becomes
    # a separator like any other symbol.
    chars = list(key)
    for i, ch in enumerate(chars):
        if ch != "#":
            continue
        left_ok = i > 0 and chars[i - 1].isalnum()
        right_ok = i + 1 < len(chars) and chars[i + 1].isalnum()
        if not (left_ok and right_ok):
            chars[i] = "_"
    return re.sub(r"_+", "_", "".join(chars)).strip("_")


def collapse_text(s: str) -> str:
    """Whitespace-collapsed casefolded text; canonical form for string values."""
    return " ".join(unicodedata.normalize("NFC", s).casefold().split())


@dataclass(frozen=True)
class UnitTable:
    """Recognized value markers. All maps are extensible via from_config."""

    scale_letters: dict = field(
        default_factory=lambda: {"k": 1e3, "M": 1e6, "B": 1e9}
    )
    scale_words: dict = field(
        default_factory=lambda: {
            "thousand": 1e3,
            "million": 1e6,
            "billion": 1e9,
            "trillion": 1e12,
        }
    )
    currency_symbols: dict = field(
        default_factory=lambda: {"$": "USD", "€": "EUR", "£": "GBP"}
    )
    currency_codes: frozenset = field(
        default_factory=lambda: frozenset({"USD", "EUR", "GBP"})
    )
    true_words: frozenset = field(default_factory=lambda: frozenset({"true", "yes"}))
    false_words: frozenset = field(default_factory=lambda: frozenset({"false", "no"}))
    date_formats: tuple = (
        "%Y-%m-%d",
        "%Y/%m/%d",
        "%B %d, %Y",
        "%b %d, %Y",
        "%d %B %Y",
        "%d %b %Y",
    )
    # When True, a bare number may be compared against a percent by
    # dividing the number by 100. Off by default: "12" is not "12%".
    coerce_percent_number: bool = False

    @classmethod
    def from_config(cls, path) -> "UnitTable":
        """Load overrides from a JSON file; absent keys keep their defaults.

        Recognized keys: scale_letters, scale_words, currency_symbols,
        currency_codes, true_words, false_words, date_formats,
        coerce_percent_number.
        """
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ValueError(f"{path}: unit config must be a JSON object")
        known = {
            "scale_letters", "scale_words", "currency_symbols", "currency_codes",
            "true_words", "false_words", "date_formats", "coerce_percent_number",
        }
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"{path}: unknown unit-config keys: {', '.join(unknown)}")
        base = cls()
        kwargs = {}
        for name in ("scale_letters", "scale_words", "currency_symbols"):
            if name in data:
                kwargs[name] = {str(k): v for k, v in data[name].items()}
        for name in ("currency_codes", "true_words", "false_words"):
            if name in data:
                kwargs[name] = frozenset(str(x) for x in data[name])
        if "date_formats" in data:
            kwargs["date_formats"] = tuple(data["date_formats"])
        if "coerce_percent_number" in data:
            kwargs["coerce_percent_number"] = bool(data["coerce_percent_number"])
        return cls(**{**base.__dict__, **kwargs})


DEFAULT_UNITS = UnitTable()

_NUMBER_RE = re.compile(
    r"^(?P<sign>[+-])?(?P<int>\d{1,3}(?:,\d{3})+|\d+)(?P<frac>\.\d+)?"
    r"(?P<exp>[eE][+-]?\d+)?(?P<rest>.*)$"
)


def _pow10_exponent(factor: float) -> Optional[int]:
    """k such that factor == 10**k for non-negative integer k, else None."""
    if factor < 1 or factor != int(factor):
        return None
    s = str(int(factor))
    if s[0] == "1" and set(s[1:]) <= {"0"}:
        return len(s) - 1
    return None


def _shift_decimal(base: str, places: int) -> str:
    """Move the decimal point `places` digits right; pure string arithmetic."""
    sign = ""
    if base[0] in "+-":
        sign, base = base[0], base[1:]
    int_part, _, frac_part = base.partition(".")
    frac_part = frac_part.ljust(places, "0")
    head, tail = int_part + frac_part[:places], frac_part[places:]
    return f"{sign}{head}.{tail}" if tail else f"{sign}{head}"


def _apply_scale(base: str, value: float, factor: float) -> float:
    """Scale a parsed mantissa. Power-of-ten factors shift the digit string so
    that e.g. "3.2M" and "3,200,000" parse to the same float bit-for-bit;
    anything else multiplies."""
    places = _pow10_exponent(factor)
    if places is None or "e" in base or "E" in base:
        return value * factor
    return float(_shift_decimal(base, places))


def _parse_number_body(text: str, units: UnitTable) -> Optional[tuple[float, Optional[str]]]:
    """(value, currency-code) for numeric text, else None."""
    m = _NUMBER_RE.match(text)
    if m is None:
        return None
    base = (m.group("sign") or "") + m.group("int").replace(",", "")
    base += m.group("frac") or ""
    base += m.group("exp") or ""
    value = float(base)
    rest = m.group("rest").strip()
    unit = None
    if rest:
        parts = rest.split()
        if parts and parts[0] in units.scale_letters:
            value = _apply_scale(base, value, units.scale_letters[parts[0]])
            parts = parts[1:]
        elif parts and parts[0].casefold() in units.scale_words:
            value = _apply_scale(base, value, units.scale_words[parts[0].casefold()])
            parts = parts[1:]
        if parts and parts[0] in units.currency_codes:
            unit = parts[0]
            parts = parts[1:]
        if parts:
            return None
    return value, unit


def parse_value(raw: str, units: UnitTable = DEFAULT_UNITS) -> TypedValue:
    """Total parser from raw cell text to a TypedValue."""
    raw = str(raw)
    text = raw.strip()
    if not text:
        return TypedValue(ValueKind.STRING, raw)

    folded = text.casefold()
    if folded in units.true_words:
        return TypedValue(ValueKind.BOOLEAN, raw, canonical="true")
    if folded in units.false_words:
        return TypedValue(ValueKind.BOOLEAN, raw, canonical="false")

    if text.endswith("%"):
        inner = text[:-1].strip()
        parsed = _parse_number_body(inner, units)
        if parsed is not None and parsed[1] is None:
            return TypedValue(ValueKind.PERCENT, raw, numeric_value=parsed[0] / 100.0)

    currency = None
    body = text
    if body and body[0] in units.currency_symbols:
        currency = units.currency_symbols[body[0]]
        body = body[1:].lstrip()
    parsed = _parse_number_body(body, units)
    if parsed is not None:
        value, code = parsed
        unit = currency or code
        if not (currency and code and currency != code):
            if math.isfinite(value):
                return TypedValue(ValueKind.NUMBER, raw, numeric_value=value, unit=unit)

    for fmt in units.date_formats:
        try:
            dt = datetime.strptime(text, fmt)
        except ValueError:
            continue
        return TypedValue(ValueKind.DATE, raw, canonical=dt.date().isoformat())

    if "," in text:
        items = [p.strip() for p in text.split(",")]
        if len(items) >= 2 and all(items):
            canonical = ",".join(collapse_text(i) for i in items)
            return TypedValue(ValueKind.LIST, raw, canonical=canonical)

    return TypedValue(ValueKind.STRING, raw)


# Tolerance absorbs float roundoff from non-power-of-ten scale factors and
# other representation drift; real numeric noise is orders of magnitude above.
_REL_TOL = 1e-9
_ABS_TOL = 1e-12


def _units_compatible(a: TypedValue, b: TypedValue) -> bool:
    return a.unit is None or b.unit is None or a.unit == b.unit


def values_equal(a: TypedValue, b: TypedValue) -> bool:
    """Equality after canonicalization; numeric equality is unit-aware."""
    if a.kind is not b.kind:
        return False
    if a.kind in NUMERIC_KINDS:
        if not _units_compatible(a, b):
            return False
        return math.isclose(a.numeric_value, b.numeric_value, rel_tol=_REL_TOL, abs_tol=_ABS_TOL)
    if a.canonical is not None or b.canonical is not None:
        return a.canonical == b.canonical
    return collapse_text(a.raw) == collapse_text(b.raw)


def values_comparable(a: TypedValue, b: TypedValue, *, coerce_percent: bool = False) -> bool:
    """True when a graded numeric deviation between a and b is meaningful."""
    if a.kind in NUMERIC_KINDS and b.kind in NUMERIC_KINDS:
        if a.kind is b.kind:
            return _units_compatible(a, b)
        return bool(coerce_percent)
    return a.kind is b.kind


def comparable_numbers(a: TypedValue, b: TypedValue) -> tuple[float, float]:
    """Numeric pair for deviation math; coerces a bare number next to a percent."""
    va, vb = a.numeric_value, b.numeric_value
    if a.kind is ValueKind.NUMBER and b.kind is ValueKind.PERCENT:
        va = va / 100.0
    elif a.kind is ValueKind.PERCENT and b.kind is ValueKind.NUMBER:
        vb = vb / 100.0
    return va, vb
