"""Tile classification for A = [[p, 0], [l, q]] and D = E_m x E_n with mn = |pq|.

D_{A,k} = { sum_{i<k} A^i d_i } has |pq|^k elements exactly when no two digit
strings of length k collide.  Here ``l`` is the literal lower-left entry, so
A^i = [[p^i, 0], [l * s_i, q^i]] with s_i = (p^i - q^i) / (p - q).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional

import numpy as np

from . import kernels
from .params import AffinePair, power

DEFAULT_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    pass


class NotCandidate(ValueError):
    """m * n != |p * q|: D cannot be a tile digit set."""


@dataclass(frozen=True)
class Collision:
    """Two distinct digit strings of length ``level`` with the same image."""

    level: int
    xs: tuple[int, ...]
    ys: tuple[int, ...]
    xs2: tuple[int, ...]
    ys2: tuple[int, ...]

    def digits(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(x_0..x_{k-1}, y_0..y_{k-1}) for each string."""
        return self.xs + self.ys, self.xs2 + self.ys2


def expansion_point(pair: AffinePair, xs, ys) -> tuple[Fraction, Fraction]:
    """sum_i A^i (x_i, y_i), exactly."""
    X = Y = Fraction(0)
    for i, (x, y) in enumerate(zip(xs, ys)):
        (a11, _), (a21, a22) = power(pair, i)
        X += a11 * x
        Y += a21 * x + a22 * y
    return X, Y


def check_collision(pair: AffinePair, c: Collision) -> bool:
    """Both strings are valid, distinct and map to one point."""
    k = c.level
    if not all(len(t) == k for t in (c.xs, c.ys, c.xs2, c.ys2)):
        return False
    if not all(0 <= x < pair.m for x in c.xs + c.xs2):
        return False
    if not all(0 <= y < pair.n for y in c.ys + c.ys2):
        return False
    if (c.xs, c.ys) == (c.xs2, c.ys2):
        return False
    return expansion_point(pair, c.xs, c.ys) == expansion_point(pair, c.xs2, c.ys2)


@dataclass(frozen=True)
class DigitPointSet:
    k: int
    xs: np.ndarray  # scaled by ``scale``
    ys: np.ndarray
    scale: int
    distinct: int
    collision: Optional[Collision] = None

    @property
    def points(self) -> set[tuple[Fraction, Fraction]]:
        return {(Fraction(int(x), self.scale), Fraction(int(y), self.scale)) for x, y in zip(self.xs, self.ys)}


def _tables(pair: AffinePair, k: int):
    scale = pair.a.denominator
    digits = pair.digits
    tx, ty = [], []
    # row 0 is the most significant digit in kernels.all_sums, i.e. A^{k-1}
    for i in range(k - 1, -1, -1):
        (a11, _), (a21, a22) = power(pair, i)
        tx.append([int(a11 * x * scale) for x, _ in digits])
        ty.append([int((a21 * x + a22 * y) * scale) for x, y in digits])
    return scale, digits, np.array(tx, dtype=object), np.array(ty, dtype=object)


def _decode(index: int, k: int, digits) -> tuple[tuple[int, ...], tuple[int, ...]]:
    B = len(digits)
    seq = []
    for _ in range(k):
        index, e = divmod(index, B)
        seq.append(digits[e])  # least significant first = A^0
    return tuple(d[0] for d in seq), tuple(d[1] for d in seq)


def _lex_order(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    if xs.dtype == object:
        return np.array(sorted(range(len(xs)), key=lambda t: (xs[t], ys[t])), dtype=np.int64)
    return np.lexsort((ys, xs))


def enumerate_digit_set(pair: AffinePair, k: int, budget: int = DEFAULT_BUDGET) -> DigitPointSet:
    """D_{A,k} with the first collision in (x, y)-lexicographic order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    count = (pair.m * pair.n) ** k
    if count > budget:
        raise BudgetExceeded(f"|D|^k = {count} exceeds the point budget {budget}")
    scale, digits, tx, ty = _tables(pair, k)
    xs, ys = kernels.all_sums(tx, ty)
    order = _lex_order(xs, ys)
    X, Y = xs[order], ys[order]
    dup = np.nonzero((X[1:] == X[:-1]) & (Y[1:] == Y[:-1]))[0]
    collision = None
    if len(dup):
        t = int(dup[0])
        i1, i2 = sorted((int(order[t]), int(order[t + 1])))
        a, b = _decode(i1, k, digits), _decode(i2, k, digits)
        collision = Collision(k, a[0], a[1], b[0], b[1])
    distinct = len(X) - len(dup)
    return DigitPointSet(k, xs, ys, scale, distinct, collision)


class ProbeStatus(enum.Enum):
    Pass = "pass"
    Fail = "fail"
    Unknown = "unknown"


@dataclass(frozen=True)
class CardinalityProbe:
    status: ProbeStatus
    k_max: int
    checked: tuple[tuple[int, int], ...]  # (k, distinct count)
    first_fail: Optional[int] = None
    witness: Optional[Collision] = None
    note: str = ""


def cardinality_probe(pair: AffinePair, k_max: int, budget: int = DEFAULT_BUDGET) -> CardinalityProbe:
    checked = []
    for k in range(1, k_max + 1):
        try:
            ds = enumerate_digit_set(pair, k, budget)
        except BudgetExceeded as exc:
            return CardinalityProbe(ProbeStatus.Unknown, k_max, tuple(checked), note=str(exc))
        checked.append((k, ds.distinct))
        if ds.collision is not None:
            return CardinalityProbe(ProbeStatus.Fail, k_max, tuple(checked), k, ds.collision)
    return CardinalityProbe(ProbeStatus.Pass, k_max, tuple(checked))


def min_distance(xs: np.ndarray, ys: np.ndarray) -> int:
    """Minimal pairwise max-norm distance of integer points (0 on repeats)."""
    if len(xs) < 2:
        raise ValueError("need at least two points")
    order = _lex_order(xs, ys)
    X, Y = xs[order], ys[order]
    same_col = X[1:] == X[:-1]
    if np.any(same_col & (Y[1:] == Y[:-1])):
        return 0
    best = None
    if same_col.any():
        best = int(np.abs(Y[1:] - Y[:-1])[same_col].min())
    cols, starts = np.unique(X, return_index=True)
    bounds = list(starts) + [len(X)]
    groups = {int(c): (int(bounds[t]), int(bounds[t + 1])) for t, c in enumerate(cols)}
    colvals = [int(c) for c in cols]
    for t, c in enumerate(colvals):
        lo, hi = groups[c]
        ys_here = Y[lo:hi]
        for c2 in colvals[t + 1 :]:
            dx = c2 - c
            if best is not None and dx >= best:
                break
            lo2, hi2 = groups[c2]
            other = Y[lo2:hi2]
            pos = np.searchsorted(other, ys_here)
            for cand in (np.clip(pos, 0, len(other) - 1), np.clip(pos - 1, 0, len(other) - 1)):
                d = int(np.abs(other[cand] - ys_here).min())
                d = max(d, dx)
                if best is None or d < best:
                    best = d
    return best


def discreteness_probe(pair: AffinePair, k_max: int, budget: int = DEFAULT_BUDGET) -> list[tuple[int, Fraction]]:
    """Exact minimal max-norm distance in D_{A,k} for k = 1..k_max.  Advisory only."""
    out = []
    for k in range(1, k_max + 1):
        ds = enumerate_digit_set(pair, k, budget)
        if len(ds.xs) < 2:
            break
        out.append((k, Fraction(min_distance(ds.xs, ds.ys), ds.scale)))
    return out


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


class TileStatus(enum.Enum):
    Tile = "Tile"
    NotTile = "NotTile"
    Unknown = "Unknown"


class TileCase(enum.Enum):
    MLessP = "MLessP"
    MEqualsP = "MEqualsP"
    MGreaterP_aZero = "MGreaterP_aZero"
    MGreaterP_aIntWideN = "MGreaterP_aIntWideN"
    OutsideClassification = "OutsideClassification"


@dataclass(frozen=True)
class TileVerdict:
    status: TileStatus
    case: TileCase
    witness: Optional[Collision] = None
    k0: Optional[int] = None
    probes: dict = field(default_factory=dict)


def least_k0(q: int, n: int, a: int) -> int:
    """Least k0 with (n-1)(|q|^(k0+1) - 1) / |q-1| >= |a|."""
    if n < 2:
        raise ValueError("needs n >= 2")
    k0 = 0
    while Fraction((n - 1) * (abs(q) ** (k0 + 1) - 1), abs(q - 1)) < abs(a):
        k0 += 1
    return k0


def balanced_digits(t: int, q: int, n: int, max_len: int = 200) -> Optional[list[int]]:
    """e_0..e_r in [-(n-1), n-1] with sum e_i q^i = t, by greedy; None if it stalls."""
    out = []
    while t != 0:
        if len(out) >= max_len:
            return None
        reps = [e for e in range(-(n - 1), n) if (t - e) % q == 0]
        if not reps:
            return None
        # smallest |e|, ties broken towards the sign of t so |t| shrinks
        e = min(reps, key=lambda e: (abs(e), -e * (1 if t > 0 else -1)))
        out.append(e)
        t = (t - e) // q
    return out


def _search_digits(t: int, q: int, n: int, length: int) -> Optional[list[int]]:
    for es in product(range(-(n - 1), n), repeat=length):
        if sum(e * q**i for i, e in enumerate(es)) == t:
            return list(es)
    return None


def _x_swap(p: int, k: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Two x-strings with equal sum x_i p^i: (p, 0, ...) vs (0, 1, ...), or (|p|, 1, ...) vs 0 for p < 0."""
    pad = (0,) * (k - 2)
    if p > 0:
        return (p, 0) + pad, (0, 1) + pad
    return (-p, 1) + pad, (0, 0) + pad


def _shear(pair: AffinePair, xs) -> Fraction:
    return sum((power(pair, i)[1][0] * x for i, x in enumerate(xs)), Fraction(0))


def level_two_witness(pair: AffinePair) -> Collision:
    """(x_0, x_1, y_0, y_1) = (0, 0, q, 0) vs (0, 0, 0, 1); (0, 0, |q|, 1) vs zeros if q < 0."""
    q = pair.q
    if q > 0:
        return Collision(2, (0, 0), (q, 0), (0, 0), (0, 1))
    return Collision(2, (0, 0), (-q, 1), (0, 0), (0, 0))


def integer_shear_witness(pair: AffinePair) -> tuple[Collision, int]:
    """Collision for m > |p|, integer nonzero l and 2n - 1 >= |q|."""
    l = pair.a
    if l.denominator != 1 or l == 0:
        raise ValueError("needs a nonzero integer lower-left entry")
    k0 = least_k0(pair.q, pair.n, int(l))
    k = max(k0, 1) + 1
    x1, x2 = _x_swap(pair.p, k)
    t = _shear(pair, x2) - _shear(pair, x1)
    es = balanced_digits(int(t), pair.q, pair.n)
    if es is None or len(es) > k:
        es = _search_digits(int(t), pair.q, pair.n, k)
    if es is None:
        raise RuntimeError(f"no y-digit solution for {t} at level {k}")
    es = list(es) + [0] * (k - len(es))
    y1 = tuple(max(e, 0) for e in es)
    y2 = tuple(max(-e, 0) for e in es)
    return Collision(k, x1, y1, x2, y2), k0


def classify_tile(pair: AffinePair, probe_k: int = 4, budget: int = DEFAULT_BUDGET) -> TileVerdict:
    P, Q = abs(pair.p), abs(pair.q)
    if pair.m * pair.n != P * Q:
        raise NotCandidate(f"not a candidate tile digit set: m*n = {pair.m * pair.n} != |pq| = {P * Q}")
    if pair.m < P:
        return TileVerdict(TileStatus.NotTile, TileCase.MLessP, level_two_witness(pair))
    if pair.m == P:
        return TileVerdict(TileStatus.Tile, TileCase.MEqualsP)
    if pair.a == 0:
        x1, x2 = _x_swap(pair.p, 2)
        return TileVerdict(TileStatus.NotTile, TileCase.MGreaterP_aZero, Collision(2, x1, (0, 0), x2, (0, 0)))
    if pair.a.denominator == 1 and 2 * pair.n - 1 >= Q:
        witness, k0 = integer_shear_witness(pair)
        return TileVerdict(TileStatus.NotTile, TileCase.MGreaterP_aIntWideN, witness, k0)
    probes = {"cardinality": cardinality_probe(pair, probe_k, budget)}
    try:
        probes["discreteness"] = discreteness_probe(pair, probe_k, budget)
    except BudgetExceeded:
        pass
    return TileVerdict(TileStatus.Unknown, TileCase.OutsideClassification, probes=probes)

