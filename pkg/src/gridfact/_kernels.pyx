# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled rank-statistic kernels; twin of gridfact._kernels_py."""

from array import array

from libc.math cimport sqrt

BACKEND = "compiled"


cdef inline double[::1] _doubles(object seq):
    return array("d", seq)


cdef inline long[::1] _longs(object seq):
    return array("l", seq)


def rho(ra, rb):
    """Pearson correlation of two rank vectors; nan when variance vanishes."""
    cdef double[::1] a = _doubles(ra)
    cdef double[::1] b = _doubles(rb)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    cdef double ma = 0.0, mb = 0.0, sab = 0.0, saa = 0.0, sbb = 0.0, da, db
    for i in range(n):
        ma += a[i]
        mb += b[i]
    ma /= n
    mb /= n
    for i in range(n):
        da = a[i] - ma
        db = b[i] - mb
        sab += da * db
        saa += da * da
        sbb += db * db
    if saa == 0.0 or sbb == 0.0:
        return float("nan")
    return sab / sqrt(saa * sbb)


def tau_b(ra, rb):
    """Tie-corrected Kendall correlation; nan when either side is all ties."""
    cdef double[::1] a = _doubles(ra)
    cdef double[::1] b = _doubles(rb)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j
    cdef long conc = 0, disc = 0, ties_a = 0, ties_b = 0, n0
    cdef double da, db
    for i in range(n):
        for j in range(i + 1, n):
            da = a[i] - a[j]
            db = b[i] - b[j]
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
    cdef double denom = sqrt(<double> (n0 - ties_a)) * sqrt(<double> (n0 - ties_b))
    if denom == 0.0:
        return float("nan")
    return (conc - disc) / denom


def weighted_tau(ra, rb):
    """Kendall agreement with additive hyperbolic weights on the reference."""
    cdef double[::1] a = _doubles(ra)
    cdef double[::1] b = _doubles(rb)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j
    cdef double num = 0.0, den = 0.0, w, da, db
    for i in range(n):
        for j in range(i + 1, n):
            w = 1.0 / a[i] + 1.0 / a[j]
            den += w
            da = a[i] - a[j]
            db = b[i] - b[j]
            if da == 0.0 or db == 0.0:
                continue
            if (da > 0.0) == (db > 0.0):
                num += w
            else:
                num -= w
    if den == 0.0:
        return float("nan")
    return num / den


def footrule_sum(ra, rb):
    """Total absolute rank displacement."""
    cdef double[::1] a = _doubles(ra)
    cdef double[::1] b = _doubles(rb)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    cdef double total = 0.0, d
    for i in range(n):
        d = a[i] - b[i]
        total += d if d >= 0.0 else -d
    return total


def tie_pair_fraction(values):
    """Fraction of unordered pairs with exactly equal values."""
    cdef double[::1] v = _doubles(values)
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i, j
    cdef long ties = 0
    for i in range(n):
        for j in range(i + 1, n):
            if v[i] == v[j]:
                ties += 1
    return ties / <double> (n * (n - 1) // 2)


def rbo_ext(pos, p):
    """Extrapolated rank-biased overlap; pos maps first-order positions to second."""
    cdef long[::1] q = _longs(pos)
    cdef Py_ssize_t n = q.shape[0]
    if n == 0:
        return 1.0
    cdef Py_ssize_t d
    cdef long k, overlap = 0
    cdef double pp = <double> p, acc = 0.0, pd = 1.0
    placed = [False] * n
    for d in range(1, n + 1):
        k = q[d - 1]
        placed[k] = True
        if k < d:
            overlap += 1
        if k != d - 1 and placed[d - 1]:
            overlap += 1
        pd *= pp
        acc += (overlap / <double> d) * pd
    return (1.0 - pp) / pp * acc + (overlap / <double> n) * pd
