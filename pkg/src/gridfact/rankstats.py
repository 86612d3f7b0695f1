"""Rank agreement statistics for meta-evaluating the scorer.

Hot loops live in a compiled extension when available (``gridfact._kernels``)
with a pure-Python twin selected at import time; set GRIDFACT_PURE_PYTHON=1
to force the fallback.  All statistics compare two Rankings over the same id
set; rankings carry ties via their score vectors.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import (
    DegenerateRanking,
    InvalidPersistence,
    LengthMismatch,
    MismatchedIds,
)

if os.environ.get("GRIDFACT_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _K
else:
    try:
        from . import _kernels as _K  # compiled extension
    except ImportError:
        from . import _kernels_py as _K


def kernel_backend() -> str:
    """Which kernel implementation is active: 'compiled' or 'pure'."""
    return _K.BACKEND


@dataclass(frozen=True)
class Ranking:
    """Items best-first; optional parallel scores, ascending (lower is better).

    Ties are expressed through equal scores; the item order is the
    tie-resolved order used by order-sensitive statistics.
    """

    items: tuple
    scores: Optional[tuple] = None

    def __post_init__(self):
        if len(set(self.items)) != len(self.items):
            raise ValueError("ranking items must be unique")
        if self.scores is not None:
            if len(self.scores) != len(self.items):
                raise ValueError("scores must parallel items")
            for i in range(1, len(self.scores)):
                if self.scores[i] < self.scores[i - 1]:
                    raise ValueError("scores must be ascending to match item order")

    def __len__(self) -> int:
        return len(self.items)

    @classmethod
    def from_scores(cls, ids: Sequence[str], scores: Sequence[float]) -> "Ranking":
        """Rank by ascending score (penalty convention); ties break by id."""
        if len(ids) != len(scores):
            raise LengthMismatch(f"{len(ids)} ids vs {len(scores)} scores")
        order = sorted(zip(scores, ids))
        return cls(tuple(i for _, i in order), tuple(s for s, _ in order))

    def rank_vector(self) -> list:
        """Fractional 1-based ranks aligned with items; tied scores share a rank."""
        n = len(self.items)
        if self.scores is None:
            return [float(i + 1) for i in range(n)]
        ranks = [0.0] * n
        i = 0
        while i < n:
            j = i
            while j + 1 < n and self.scores[j + 1] == self.scores[i]:
                j += 1
            avg = (i + 1 + j + 1) / 2.0
            for k in range(i, j + 1):
                ranks[k] = avg
            i = j + 1
        return ranks

    def ranks_by_id(self) -> dict:
        vec = self.rank_vector()
        return {item: vec[i] for i, item in enumerate(self.items)}


def _paired_ranks(a: Ranking, b: Ranking) -> tuple:
    if set(a.items) != set(b.items):
        raise MismatchedIds("rankings cover different id sets")
    ra = a.rank_vector()
    rb_map = b.ranks_by_id()
    rb = [rb_map[item] for item in a.items]
    return ra, rb


def spearman_rho(a: Ranking, b: Ranking) -> float:
    """Rank correlation in [-1, 1]; ties use fractional ranks."""
    ra, rb = _paired_ranks(a, b)
    v = _K.rho(ra, rb)
    if v != v:
        raise DegenerateRanking("a ranking with all-equal ranks has no correlation")
    return v


def kendall_tau(a: Ranking, b: Ranking) -> float:
    """Tie-corrected pairwise agreement in [-1, 1]."""
    ra, rb = _paired_ranks(a, b)
    v = _K.tau_b(ra, rb)
    if v != v:
        raise DegenerateRanking("a ranking with all-equal ranks has no tau")
    return v


def weighted_kendall(reference: Ranking, other: Ranking) -> float:
    """Top-weighted agreement: pair (i, j) weighs 1/rank_i + 1/rank_j on the reference."""
    ra, rb = _paired_ranks(reference, other)
    v = _K.weighted_tau(ra, rb)
    if v != v:
        raise DegenerateRanking("weighted tau undefined for fewer than two items")
    return v


def footrule(a: Ranking, b: Ranking) -> float:
    """Normalized total rank displacement, scaled to [0, 100]."""
    ra, rb = _paired_ranks(a, b)
    n = len(ra)
    max_sum = (n * n) // 2
    if max_sum == 0:
        return 0.0
    return _K.footrule_sum(ra, rb) / max_sum * 100.0


def rbo(a: Ranking, b: Ranking, p: float = 0.9) -> float:
    """Extrapolated rank-biased overlap in [0, 1]; p is top-weightedness.

    Uses each ranking's tie-resolved item order (ties already broken by id
    in from_scores).  As p approaches 0 this tends to the top-1 indicator.
    """
    if not (0.0 < p < 1.0):
        raise InvalidPersistence(f"persistence must be in (0, 1), got {p}")
    if set(a.items) != set(b.items):
        raise MismatchedIds("rankings cover different id sets")
    pos_b = {item: i for i, item in enumerate(b.items)}
    pos = [pos_b[item] for item in a.items]
    return _K.rbo_ext(pos, p)


def tie_ratio(scores: Sequence[float]) -> float:
    """Fraction of score pairs that are exactly equal; needs n >= 2."""
    if len(scores) < 2:
        raise ValueError("tie_ratio needs at least two scores")
    return _K.tie_pair_fraction([float(s) for s in scores])


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def sensitivity(self) -> Optional[float]:
        d = self.tp + self.fn
        return self.tp / d if d else None

    @property
    def specificity(self) -> Optional[float]:
        d = self.tn + self.fp
        return self.tn / d if d else None

    def to_json_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "sensitivity": None if self.sensitivity is None else repr(self.sensitivity),
            "specificity": None if self.specificity is None else repr(self.specificity),
        }


def sens_spec(scores: Sequence[float], labels: Sequence[int], threshold: float) -> ConfusionCounts:
    """Detection counts: predict altered (label 1) iff score > threshold."""
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} scores vs {len(labels)} labels")
    tp = fp = tn = fn = 0
    for s, y in zip(scores, labels):
        if y not in (0, 1):
            raise ValueError(f"labels must be 0 or 1, got {y!r}")
        predicted = s > threshold
        if y == 1:
            tp, fn = (tp + 1, fn) if predicted else (tp, fn + 1)
        else:
            fp, tn = (fp + 1, tn) if predicted else (fp, tn + 1)
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)
