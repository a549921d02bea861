"""Affine pairs (A, D) with A = [[p, 0], [l, q]] and D = E_m x E_n.

All arithmetic is exact (``fractions.Fraction``).  The lower-left entry ``l``
of A is stored literally as ``AffinePair.a``; the connectedness criteria only
depend on ``|a|``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]

_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")
_RATIO = re.compile(r"^[+-]?\d+/[+-]?\d+$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"3/2"``, ``"-7"`` or a terminating decimal such as ``"0.25"``.

    Exponent notation, repeating decimals and anything else are rejected so
    that boundary values are never silently rounded.
    """
    s = str(text).strip()
    if _RATIO.match(s):
        num, den = s.split("/")
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den))
    if _DECIMAL.match(s):
        return Fraction(s)
    raise ValueError(f"not an exact rational: {text!r}")


def as_fraction(value: Rational | str) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval ``[lo, hi]`` with exact endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_fraction(self.lo), as_fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: Rational) -> "RationalInterval":
        return cls(x, x)

    @classmethod
    def hull(cls, *xs: Rational) -> "RationalInterval":
        return cls(min(xs), max(xs))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        if isinstance(x, RationalInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def intersects(self, other: "RationalInterval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def scale(self, c: Rational) -> "RationalInterval":
        return RationalInterval.hull(self.lo * c, self.hi * c)

    def shift(self, c: Rational) -> "RationalInterval":
        return RationalInterval(self.lo + c, self.hi + c)

    def widen(self, r: Rational) -> "RationalInterval":
        return RationalInterval(self.lo - r, self.hi + r)

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


class InvalidPair(ValueError):
    """Parameters that do not define an expanding affine pair."""


@dataclass(frozen=True)
class AffinePair:
    p: int
    q: int
    a: Fraction
    m: int
    n: int

    def __post_init__(self):
        for name in ("p", "q", "m", "n"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise InvalidPair(f"{name} must be an integer, got {v!r}")
        object.__setattr__(self, "a", as_fraction(self.a))
        if abs(self.p) < 2 or abs(self.q) < 2:
            raise InvalidPair(f"|p| and |q| must be >= 2 (got p={self.p}, q={self.q})")
        if self.m < 1 or self.n < 1:
            raise InvalidPair(f"m and n must be >= 1 (got m={self.m}, n={self.n})")

    @property
    def abs_a(self) -> Fraction:
        return abs(self.a)

    @property
    def digits(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.m) for j in range(self.n)]

    def matrix(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        return ((Fraction(self.p), Fraction(0)), (self.a, Fraction(self.q)))

    def with_a(self, a: Rational) -> "AffinePair":
        return AffinePair(self.p, self.q, as_fraction(a), self.m, self.n)

    def __str__(self) -> str:
        return f"(p={self.p}, q={self.q}, a={self.a}, m={self.m}, n={self.n})"


@dataclass(frozen=True)
class HypothesisReport:
    main_theorem_ok: bool
    deng_lau_ok: bool
    tile_dimension_ok: bool
    messages: tuple[str, ...] = field(default_factory=tuple)


def main_hypotheses_hold(pair: AffinePair) -> bool:
    P = abs(pair.p)
    return P + 1 < pair.m < 2 * P - 1 and 2 * pair.n >= abs(pair.q) + 1


def validate(pair: AffinePair) -> HypothesisReport:
    P, Q = abs(pair.p), abs(pair.q)
    msgs = []
    m_ok = P + 1 < pair.m < 2 * P - 1
    n_ok = 2 * pair.n >= Q + 1
    if not m_ok:
        msgs.append(f"m={pair.m} outside open interval ({P + 1}, {2 * P - 1})")
    if not n_ok:
        msgs.append(f"n={pair.n} < (|q|+1)/2 = {Fraction(Q + 1, 2)}")
    deng_lau = pair.m == P and pair.n == Q
    if not deng_lau:
        msgs.append(f"(m, n)=({pair.m}, {pair.n}) != (|p|, |q|)=({P}, {Q})")
    tile_dim = pair.m * pair.n == P * Q
    if not tile_dim:
        msgs.append(f"m*n={pair.m * pair.n} != |pq|={P * Q}")
    return HypothesisReport(m_ok and n_ok, deng_lau, tile_dim, tuple(msgs))


def normalize_sign(pair: AffinePair) -> AffinePair:
    """Return the pair for -A when p < 0 (T(A, D) and T(-A, D) share connectedness)."""
    if pair.p > 0:
        return pair
    return AffinePair(-pair.p, -pair.q, -pair.a, pair.m, pair.n)


def r_k(p: int, q: int, k: int) -> Fraction:
    """Coefficient of the lower-left entry of A^-k (for A with entry -a)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if p == q:
        return Fraction(k, q ** (k + 1))
    return (Fraction(1, p**k) - Fraction(1, q**k)) / (q - p)


def R_k(p: int, q: int, k: int) -> Fraction:
    """Coefficient of the lower-left entry of A^k (for A with entry -a)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if p == q:
        return Fraction(-k * q ** (k - 1)) if k else Fraction(0)
    return Fraction(p**k - q**k, q - p)


def inverse_power(pair: AffinePair, k: int) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    """Exact A^-k for the literal matrix [[p, 0], [a, q]]."""
    return (
        (Fraction(1, pair.p**k), Fraction(0)),
        (-pair.a * r_k(pair.p, pair.q, k), Fraction(1, pair.q**k)),
    )


def power(pair: AffinePair, k: int) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    """Exact A^k for the literal matrix [[p, 0], [a, q]]."""
    return (
        (Fraction(pair.p**k), Fraction(0)),
        (-pair.a * R_k(pair.p, pair.q, k), Fraction(pair.q**k)),
    )


def delta_digits(count: int) -> list[int]:
    if count < 1:
        raise ValueError("count must be >= 1")
    return list(range(-(count - 1), count))


def geometric_tail_bound(base_abs: int, depth: int, max_coeff: Rational) -> Fraction:
    """Upper bound on |sum_{k>depth} c_k b^-k| when |c_k| <= max_coeff and |b| = base_abs."""
    if base_abs < 2:
        raise ValueError("base_abs must be >= 2")
    return as_fraction(max_coeff) / (Fraction(base_abs) ** depth * (base_abs - 1))
