"""Pure-Python rank-statistic kernels.

Fallback twin of the compiled extension ``gridfact._kernels``; both expose
the same functions over plain sequences.  Inputs are fractional rank vectors
(1-based, ties averaged) unless stated otherwise.  Kernels return nan where
a statistic is undefined; the wrappers in ``rankstats`` turn that into
typed errors.
"""

from __future__ import annotations

from math import sqrt

BACKEND = "pure"


def rho(ra, rb) -> float:
    """Pearson correlation of two rank vectors; nan when variance vanishes."""
    n = len(ra)
    ma = sum(ra) / n
    mb = sum(rb) / n
    sab = saa = sbb = 0.0
    for i in range(n):
        da = ra[i] - ma
        db = rb[i] - mb
        sab += da * db
        saa += da * da
        sbb += db * db
    if saa == 0.0 or sbb == 0.0:
        return float("nan")
    return sab / sqrt(saa * sbb)


def tau_b(ra, rb) -> float:
    """Tie-corrected Kendall correlation; nan when either side is all ties."""
    n = len(ra)
    conc = disc = ties_a = ties_b = 0
    for i in range(n):
        rai = ra[i]
        rbi = rb[i]
        for j in range(i + 1, n):
            da = rai - ra[j]
            db = rbi - rb[j]
            if da == 0.0:
                ties_a += 1
                if db == 0.0:
                    ties_b += 1
            elif db == 0.0:
                ties_b += 1
            elif (da > 0.0) == (db > 0.0):
                conc += 1
            else:
                disc += 1
    n0 = n * (n - 1) // 2
    denom = sqrt(float(n0 - ties_a)) * sqrt(float(n0 - ties_b))
    if denom == 0.0:
        return float("nan")
    return (conc - disc) / denom


def weighted_tau(ra, rb) -> float:
    """Kendall agreement with additive hyperbolic weights on the reference.

    Pair (i, j) weighs 1/ra[i] + 1/ra[j]; ties in either vector contribute
    zero agreement but keep their weight, so ties cap the attainable value.
    """
    n = len(ra)
    num = den = 0.0
    for i in range(n):
        rai = ra[i]
        rbi = rb[i]
        wi = 1.0 / rai
        for j in range(i + 1, n):
            w = wi + 1.0 / ra[j]
            den += w
            da = rai - ra[j]
            db = rbi - rb[j]
            if da == 0.0 or db == 0.0:
                continue
            if (da > 0.0) == (db > 0.0):
                num += w
            else:
                num -= w
    if den == 0.0:
        return float("nan")
    return num / den


def footrule_sum(ra, rb) -> float:
    """Total absolute rank displacement."""
    total = 0.0
    for i in range(len(ra)):
        d = ra[i] - rb[i]
        total += d if d >= 0.0 else -d
    return total


def tie_pair_fraction(values) -> float:
    """Fraction of unordered pairs with exactly equal values."""
    n = len(values)
    ties = 0
    for i in range(n):
        vi = values[i]
        for j in range(i + 1, n):
            if vi == values[j]:
                ties += 1
    return ties / (n * (n - 1) // 2)


def rbo_ext(pos, p: float) -> float:
    """Extrapolated rank-biased overlap for two same-set orderings.

    pos[i] is the 0-based position in the second ordering of the item at
    position i in the first.  Agreement beyond the list end is extrapolated
    at the final overlap ratio.
    """
    n = len(pos)
    if n == 0:
        return 1.0
    placed = [False] * n
    overlap = 0
    acc = 0.0
    pd = 1.0
    for d in range(1, n + 1):
        k = pos[d - 1]
        placed[k] = True
        if k < d:
            overlap += 1
        if k != d - 1 and placed[d - 1]:
            overlap += 1
        pd *= p
        acc += (overlap / d) * pd
    return (1.0 - p) / p * acc + (overlap / n) * pd
