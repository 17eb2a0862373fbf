"""Exact finite unions of closed intervals with rational endpoints.

Endpoints are stored as integer numerators over one common denominator, so
sums only add integers.  Arrays use ``int64`` while every value provably
fits and fall back to Python integers (``object`` dtype) otherwise.
"""

from __future__ import annotations

import csv
import math
from fractions import Fraction

import numpy as np

from .errors import BlowupError

MAX_PIECES = 10_000_000
_SAFE = 2**62
_CHUNK = 1 << 20


def as_fraction(x) -> Fraction:
    """Parse ``x`` (int, Fraction, ``"p/q"`` string or ``[p, q]`` pair) exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (list, tuple)):
        return Fraction(int(x[0]), int(x[1]))
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or a 'p/q' string")
    return Fraction(x)


def _int_array(values, bound):
    if bound < _SAFE:
        return np.asarray(values, dtype=np.int64)
    return np.asarray([int(v) for v in values], dtype=object)


def _normalize(lo, hi):
    """Sort and merge overlapping or touching intervals."""
    if len(lo) == 0:
        return lo, hi
    order = np.lexsort((hi, lo)) if lo.dtype != object else np.asarray(sorted(range(len(lo)), key=lambda i: (lo[i], hi[i])))
    lo, hi = lo[order], hi[order]
    reach = np.maximum.accumulate(hi)
    starts = np.ones(len(lo), dtype=bool)
    starts[1:] = lo[1:] > reach[:-1]
    idx = np.flatnonzero(starts)
    ends = np.append(idx[1:] - 1, len(lo) - 1)
    return lo[idx], reach[ends]


class IntervalUnion:
    """Sorted, pairwise disjoint closed intervals ``[lo_i / den, hi_i / den]``.

    The normal form is unique: intervals that overlap or touch are merged and
    the common denominator is reduced, so ``==`` compares sets.
    """

    __slots__ = ("lo", "hi", "den")

    def __init__(self, lo, hi, den: int = 1, *, normalized: bool = False):
        den = int(den)
        if den <= 0:
            raise ValueError("denominator must be positive")
        lo = np.asarray(lo)
        hi = np.asarray(hi)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lo and hi must be 1D arrays of equal length")
        if np.any(lo > hi):
            raise ValueError("every interval needs lo <= hi")
        if not normalized:
            lo, hi = _normalize(lo, hi)
        g = den
        for arr in (lo, hi):
            if len(arr) and g > 1:
                g = math.gcd(g, *(int(v) for v in np.unique(arr)))
        if g > 1:
            lo, hi, den = lo // g, hi // g, den // g
        bound = max([abs(int(lo.min())), abs(int(hi.max()))] if len(lo) else [0])
        self.lo = _int_array(lo, bound)
        self.hi = _int_array(hi, bound)
        self.den = den
        self.lo.setflags(write=False)
        self.hi.setflags(write=False)

    # constructors
    @classmethod
    def empty(cls) -> IntervalUnion:
        return cls(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))

    @classmethod
    def from_pairs(cls, pairs) -> IntervalUnion:
        """Build from ``(lo, hi)`` pairs of anything :func:`as_fraction` accepts."""
        fr = [(as_fraction(a), as_fraction(b)) for a, b in pairs]
        if not fr:
            return cls.empty()
        den = math.lcm(*(x.denominator for ab in fr for x in ab))
        lo = [a.numerator * (den // a.denominator) for a, _ in fr]
        hi = [b.numerator * (den // b.denominator) for _, b in fr]
        bound = max(max(map(abs, lo)), max(map(abs, hi)))
        return cls(_int_array(lo, bound), _int_array(hi, bound), den)

    @classmethod
    def interval(cls, lo, hi) -> IntervalUnion:
        return cls.from_pairs([(lo, hi)])

    @classmethod
    def point(cls, x) -> IntervalUnion:
        return cls.from_pairs([(x, x)])

    # views
    def __len__(self):
        return len(self.lo)

    def __repr__(self):
        shown = ", ".join(f"[{a}, {b}]" for a, b in self.intervals[:4])
        more = f", ... ({len(self)} pieces)" if len(self) > 4 else ""
        return f"IntervalUnion({shown}{more})"

    def __eq__(self, other):
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        return self.den == other.den and len(self) == len(other) and np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    def __hash__(self):
        return hash((self.den, tuple(int(v) for v in self.lo), tuple(int(v) for v in self.hi)))

    @property
    def intervals(self) -> list[tuple[Fraction, Fraction]]:
        return [(Fraction(int(a), self.den), Fraction(int(b), self.den)) for a, b in zip(self.lo, self.hi)]

    def bounds(self) -> tuple[Fraction, Fraction]:
        if not len(self):
            raise ValueError("empty union has no bounds")
        return Fraction(int(self.lo[0]), self.den), Fraction(int(self.hi[-1]), self.den)

    def _over(self, den: int):
        """Numerators over a multiple ``den`` of the own denominator."""
        f = den // self.den
        bound = max(abs(int(self.lo[0])), abs(int(self.hi[-1]))) * f if len(self) else 0
        if bound >= _SAFE or self.lo.dtype == object:
            lo = np.asarray([int(v) * f for v in self.lo], dtype=object)
            hi = np.asarray([int(v) * f for v in self.hi], dtype=object)
            return lo, hi
        return self.lo * f, self.hi * f

    # set operations
    def union(self, other: IntervalUnion) -> IntervalUnion:
        den = math.lcm(self.den, other.den)
        a_lo, a_hi = self._over(den)
        b_lo, b_hi = other._over(den)
        return IntervalUnion(np.concatenate([a_lo, b_lo]), np.concatenate([a_hi, b_hi]), den)

    def issubset(self, other: IntervalUnion) -> bool:
        """Exact containment ``self ⊆ other``."""
        if not len(self):
            return True
        if not len(other):
            return False
        den = math.lcm(self.den, other.den)
        a_lo, a_hi = self._over(den)
        b_lo, b_hi = other._over(den)
        k = np.searchsorted(b_lo, a_lo, side="right") - 1
        if np.any(k < 0):
            return False
        return bool(np.all(b_hi[k] >= a_hi))

    def scaled(self, s) -> IntervalUnion:
        s = as_fraction(s)
        if s < 0:
            raise ValueError("only nonnegative scalings keep the interval order")
        den = self.den * s.denominator
        return IntervalUnion(
            np.asarray([int(v) * s.numerator for v in self.lo], dtype=object),
            np.asarray([int(v) * s.numerator for v in self.hi], dtype=object),
            den,
        )

    def translated(self, v) -> IntervalUnion:
        v = as_fraction(v)
        den = math.lcm(self.den, v.denominator)
        lo, hi = self._over(den)
        shift = v.numerator * (den // v.denominator)
        return IntervalUnion(
            np.asarray([int(x) + shift for x in lo], dtype=object),
            np.asarray([int(x) + shift for x in hi], dtype=object),
            den,
        )

    def to_json(self):
        """List of intervals, each a pair of ``[numerator, denominator]`` endpoints."""
        out = []
        for a, b in self.intervals:
            out.append([[a.numerator, a.denominator], [b.numerator, b.denominator]])
        return out

    @classmethod
    def from_json(cls, obj) -> IntervalUnion:
        return cls.from_pairs([(tuple(a), tuple(b)) for a, b in obj])


# ---------------------------------------------------------------------------


def cantor_stage(lam, depth: int) -> IntervalUnion:
    """Stage ``depth`` of the Cantor-type set with ratio ``lam``.

    ``C0 = [0, 1]`` and ``C(j+1) = lam*Cj ∪ (1 - lam + lam*Cj)``: 2**depth
    intervals of length ``lam**depth``.
    """
    lam = as_fraction(lam)
    if not 0 < lam < Fraction(1, 2):
        raise ValueError(f"lambda must lie in (0, 1/2), got {lam}")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    p, q = lam.numerator, lam.denominator
    lo, hi = [0], [1]
    for j in range(depth):
        step = (q - p) * q**j
        lo = [p * v for v in lo] + [step + p * v for v in lo]
        hi = [p * v for v in hi] + [step + p * v for v in hi]
    bound = q**depth
    return IntervalUnion(_int_array(lo, bound), _int_array(hi, bound), q**depth, normalized=True)


def interval_sum(a: IntervalUnion, b: IntervalUnion) -> IntervalUnion:
    """Exact Minkowski sum in normal form."""
    if not len(a) or not len(b):
        return IntervalUnion.empty()
    if len(a) < len(b):
        a, b = b, a
    den = math.lcm(a.den, b.den)
    a_lo, a_hi = a._over(den)
    b_lo, b_hi = b._over(den)
    if a_lo.dtype != object and b_lo.dtype != object:
        top = int(max(abs(a_lo).max(), abs(a_hi).max())) + int(max(abs(b_lo).max(), abs(b_hi).max()))
        if top >= _SAFE:
            a_lo, a_hi, b_lo, b_hi = (x.astype(object) for x in (a_lo, a_hi, b_lo, b_hi))
    rows = max(1, _CHUNK // len(b_lo))
    lo_parts, hi_parts = [], []
    for i in range(0, len(a_lo), rows):
        lo = (a_lo[i : i + rows, None] + b_lo[None, :]).ravel()
        hi = (a_hi[i : i + rows, None] + b_hi[None, :]).ravel()
        lo, hi = _normalize(lo, hi)
        lo_parts.append(lo)
        hi_parts.append(hi)
    lo, hi = _normalize(np.concatenate(lo_parts), np.concatenate(hi_parts))
    if len(lo) > MAX_PIECES:
        raise BlowupError(f"sum has {len(lo)} pieces, more than {MAX_PIECES}")
    return IntervalUnion(lo, hi, den, normalized=True)


def iterate_interval_sum(a: IntervalUnion, k: int) -> IntervalUnion:
    """Exact ``k``-fold sum ``a + ... + a`` by repeated doubling."""
    if k < 1:
        raise ValueError("k must be at least 1")
    result = None
    power = a
    while k:
        if k & 1:
            result = power if result is None else interval_sum(result, power)
        k >>= 1
        if k:
            power = interval_sum(power, power)
    return result


def measure(a: IntervalUnion) -> Fraction:
    return Fraction(int(np.sum(a.hi - a.lo)) if len(a) else 0, a.den)


def gaps(a: IntervalUnion) -> list[tuple[Fraction, Fraction]]:
    """Maximal open gaps between consecutive intervals."""
    return [(Fraction(int(h), a.den), Fraction(int(l), a.den)) for h, l in zip(a.hi[:-1], a.lo[1:])]


def equals_interval(a: IntervalUnion, lo, hi) -> bool:
    return a == IntervalUnion.interval(lo, hi)


def predicted_k(lam) -> int:
    """``k`` with ``lam`` in ``[1/(k+1), 1/k)``."""
    lam = as_fraction(lam)
    return math.ceil(1 / lam) - 1


def ssp_classify(lam, k_max: int, depth: int) -> dict:
    """Exact evidence for the strong Steinhaus class of ``C_lam``.

    For each ``k <= k_max``: whether ``S_k`` of the depth-``depth`` stage is
    exactly ``[0, k]``, and the measures of ``S_(k-1)`` over stages
    ``1..depth`` (strictly decreasing is the empty-interior evidence).
    """
    lam = as_fraction(lam)
    if depth < 4:
        raise ValueError("depth must be at least 4")
    stages = [cantor_stage(lam, d) for d in range(1, depth + 1)]
    per_k = []
    for k in range(1, k_max + 1):
        full = equals_interval(iterate_interval_sum(stages[-1], k), 0, k)
        if k > 1:
            seq = [measure(iterate_interval_sum(s, k - 1)) for s in stages]
            dec = all(b < a for a, b in zip(seq, seq[1:]))
        else:
            seq, dec = None, None
        per_k.append({"k": k, "sum_is_full_interval": full, "prev_sum_measures": seq, "prev_strictly_decreasing": dec})
    return {"lambda": lam, "depth": depth, "predicted_k": predicted_k(lam), "per_k": per_k}


def product_sumset_is_cube(factor_sum: IntervalUnion, k: int) -> bool:
    """``S_k(C × [0,1]^(n-1)) = S_k(C) × [0,k]^(n-1)`` equals ``[0,k]^n``
    exactly when the one-dimensional factor is ``[0, k]``."""
    return equals_interval(factor_sum, 0, k)


def write_measure_csv(path, rows, header=("lambda", "k", "depth", "measure_num", "measure_den", "measure")) -> None:
    """Write ``(lambda, k, depth, Fraction)`` rows as an RFC 4180 CSV table."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for lam, k, d, m in rows:
            w.writerow([str(lam), k, d, m.numerator, m.denominator, repr(float(m))])
