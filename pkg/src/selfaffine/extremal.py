"""Extreme values of series over digit sequences with a fixed base-p sum.

The sequence spaces are

    A = {(a_k) : sum a_k p^-k = 1, a_k in {-(m-1), ..., m-1}}
    B = the same with sum 0

and the value functionals are linear in the sequence.  Closed forms for the
maximum and minimum are given by ``closed_extremes_*``; ``enumerate_extremes``
and ``attainable`` are an independent branch-and-bound over sequence prefixes.

Prefixes are tracked through the integer state s_d = p*s_{d-1} - a_d, which
equals p^d (c - sum_{k<=d} a_k p^-k).  A prefix extends to a full member of
the space iff every state satisfies |s_d| <= (m-1)/(p-1), so the search never
needs the infinite tail.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import kernels
from .params import RationalInterval, as_fraction, delta_digits

DEFAULT_DEPTH = 12


class ExtremesUnproven(ValueError):
    pass


class SpaceKind(enum.Enum):
    A_space = "A"
    B_space = "B"


@dataclass(frozen=True)
class SequenceSpace:
    """Digit sequences over {-(m-1), ..., m-1} whose base-p sum is ``constraint``."""

    p: int
    m: int
    constraint: int = 1

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("sequence spaces need p >= 2 (normalize the pair first)")
        if self.m < 2 or 2 * self.m - 1 < self.p:
            # below this the digit sums form a Cantor set and the state bound
            # no longer characterizes completable prefixes
            raise ValueError(f"need m >= 2 and 2m-1 >= p (got p={self.p}, m={self.m})")
        if abs(self.constraint) > self.state_bound:
            raise ValueError(f"constraint {self.constraint} is unreachable with these digits")

    @classmethod
    def A(cls, p: int, m: int) -> "SequenceSpace":
        return cls(p, m, 1)

    @classmethod
    def B(cls, p: int, m: int) -> "SequenceSpace":
        return cls(p, m, 0)

    @property
    def kind(self) -> Optional[SpaceKind]:
        return {1: SpaceKind.A_space, 0: SpaceKind.B_space}.get(self.constraint)

    @property
    def amax(self) -> int:
        return self.m - 1

    @property
    def alphabet(self) -> list[int]:
        return delta_digits(self.m)

    @property
    def state_bound(self) -> int:
        return (self.m - 1) // (self.p - 1)

    def successors(self, state: int):
        """(digit, next_state) pairs that keep the prefix completable."""
        b = self.state_bound
        out = []
        for s2 in range(-b, b + 1):
            a = self.p * state - s2
            if abs(a) <= self.amax:
                out.append((a, s2))
        return out

    def states_along(self, digits: Sequence[int]) -> list[int]:
        s = self.constraint
        out = [s]
        for a in digits:
            s = self.p * s - a
            out.append(s)
        return out


@dataclass(frozen=True)
class _Term:
    # weight contribution (c0 + c1*k) * rho**k
    c0: Fraction
    c1: Fraction
    rho: Fraction


class FunctionalKind(enum.Enum):
    geometric_q = "geometric_q"
    weighted_p = "weighted_p"
    affine_combination = "affine_combination"


@dataclass(frozen=True)
class ValueFunctional:
    """c = (c_1, c_2, ...) |-> offset + sum_k w_k c_k."""

    kind: FunctionalKind
    params: tuple
    offset: Fraction
    terms: tuple

    @classmethod
    def geometric(cls, q: int) -> "ValueFunctional":
        """sum c_k q^-k"""
        return cls(FunctionalKind.geometric_q, (q,), Fraction(0), (_Term(Fraction(1), Fraction(0), Fraction(1, q)),))

    @classmethod
    def weighted(cls, p: int) -> "ValueFunctional":
        """sum k c_k p^-k"""
        return cls(FunctionalKind.weighted_p, (p,), Fraction(0), (_Term(Fraction(0), Fraction(1), Fraction(1, p)),))

    @classmethod
    def affine(cls, p: int, q: int, alpha, beta) -> "ValueFunctional":
        """alpha + beta * sum r_{k+1} c_k."""
        alpha, beta = as_fraction(alpha), as_fraction(beta)
        if p == q:
            # r_{k+1} = (k+1) q^-(k+2)
            c = beta / (q * q)
            terms = (_Term(c, c, Fraction(1, q)),)
        else:
            terms = (
                _Term(beta / (p * (q - p)), Fraction(0), Fraction(1, p)),
                _Term(-beta / (q * (q - p)), Fraction(0), Fraction(1, q)),
            )
        terms = tuple(t for t in terms if t.c0 or t.c1)
        return cls(FunctionalKind.affine_combination, (p, q, alpha, beta), alpha, terms)

    def weight(self, k: int) -> Fraction:
        return sum(((t.c0 + t.c1 * k) * t.rho**k for t in self.terms), Fraction(0))

    def tail_bound(self, depth: int, amax: int) -> Fraction:
        """Bound on |sum_{k>depth} w_k c_k| for |c_k| <= amax."""
        total = Fraction(0)
        K = depth
        for t in self.terms:
            r = abs(t.rho)
            geo = r ** (K + 1) / (1 - r)
            lin = r ** (K + 1) * ((K + 1) - K * r) / (1 - r) ** 2
            total += abs(t.c0) * geo + abs(t.c1) * lin
        return total * amax

    def prefix_value(self, coeffs: Sequence[int]) -> Fraction:
        return self.offset + sum((self.weight(k) * c for k, c in enumerate(coeffs, 1)), Fraction(0))

    def periodic_value(self, preperiod: Sequence[int], period: Sequence[int]) -> Fraction:
        """Exact value of the sequence preperiod + period + period + ..."""
        value = self.prefix_value(preperiod)
        L, P = len(preperiod), len(period)
        if P == 0 or not any(period):
            return value
        for t in self.terms:
            g = t.rho**P
            s0 = 1 / (1 - g)
            s1 = g / (1 - g) ** 2
            for i, c in enumerate(period, 1):
                if c:
                    k = L + i
                    value += c * t.rho**k * ((t.c0 + t.c1 * k) * s0 + t.c1 * P * s1)
        return value

    def scaled_weights(self, depth: int) -> tuple[int, list[int]]:
        """Common denominator D and integer weights D*w_k for k = 1..depth."""
        ws = [self.weight(k) for k in range(1, depth + 1)]
        D = 1
        for w in ws:
            D = math.lcm(D, w.denominator)
        return D, [int(w * D) for w in ws]


@dataclass(frozen=True)
class Witness:
    """An eventually periodic member of a sequence space."""

    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def digits(self, count: int) -> list[int]:
        out = list(self.preperiod)
        while len(out) < count:
            out.extend(self.period or (0,))
        return out[:count]

    def __str__(self) -> str:
        pre = ",".join(map(str, self.preperiod))
        per = ",".join(map(str, self.period))
        return f"({pre})({per})*"


def is_member(space: SequenceSpace, witness: Witness) -> bool:
    """Exact check that the eventually periodic sequence lies in the space."""
    amax = space.amax
    if any(abs(c) > amax for c in witness.preperiod + witness.period):
        return False
    total = ValueFunctional.geometric(space.p).periodic_value(witness.preperiod, witness.period)
    return total == space.constraint


def constraint_gap(space: SequenceSpace, coeffs: Sequence[int]) -> Fraction:
    """|c - sum_{k<=d} a_k p^-k| for a finite prefix."""
    s = space.states_along(coeffs)[-1]
    return abs(Fraction(s, space.p ** len(coeffs)))


def self_loop_completion(space: SequenceSpace, prefix: Sequence[int]) -> Witness:
    """Complete an admissible prefix by repeating the state's self-loop digit."""
    s = space.states_along(prefix)[-1]
    if abs(s) > space.state_bound:
        raise ValueError("prefix is not completable")
    return Witness(tuple(int(c) for c in prefix), ((space.p - 1) * s,))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def _require_band(p: int, m: int) -> None:
    if p < 2:
        raise ValueError("p must be >= 2 (normalize the pair first)")
    if not p + 1 < m < 2 * p - 1:
        raise ExtremesUnproven(f"extremes formulas unproven for this m (need {p + 1} < m={m} < {2 * p - 1})")


def closed_extremes_S(p: int, q: int, m: int) -> tuple[Fraction, Fraction]:
    """(max, min) of sum a_k q^-k over A."""
    _require_band(p, m)
    if p == q:
        return Fraction(1), Fraction(1)
    lo_hi = (Fraction(p - 1, q - 1), Fraction(p * q + q - 2 * p, q * (q - 1)))
    if q > 0:
        return lo_hi if p >= q else lo_hi[::-1]
    return Fraction(p * q + 2 * p - q, q * (q + 1)), Fraction(p + 1, q + 1)


def closed_extremes_Sprime(p: int, m: int) -> tuple[Fraction, Fraction]:
    """(max, min) of sum k a_k p^-k over A."""
    _require_band(p, m)
    return Fraction(p, p - 1), Fraction(p - 2, p - 1)


def closed_extremes_Q(p: int, q: int, m: int) -> tuple[Fraction, Fraction]:
    """(max, min) of sum b_k q^-k over B."""
    _require_band(p, m)
    M = Fraction(abs(p - q), abs(q) * (abs(q) - 1))
    return M, -M


def closed_extremes_Qprime(p: int, m: int) -> tuple[Fraction, Fraction]:
    """(max, min) of sum k b_k p^-k over B."""
    _require_band(p, m)
    M = Fraction(1, p - 1)
    return M, -M


# ---------------------------------------------------------------------------
# branch-and-bound oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtremeEnclosure:
    interval: RationalInterval
    sense: str
    depth: int
    certified: bool
    witness: Optional[Witness] = None
    witness_value: Optional[Fraction] = None
    nodes: int = 0


def a_priori_interval(space: SequenceSpace, functional: ValueFunctional) -> RationalInterval:
    r = functional.tail_bound(0, space.amax)
    return RationalInterval(functional.offset - r, functional.offset + r)


def enumerate_extremes(
    space: SequenceSpace,
    functional: ValueFunctional,
    depth: int = DEFAULT_DEPTH,
    sense: str = "max",
) -> ExtremeEnclosure:
    """Certified enclosure of the max (or min) of ``functional`` over ``space``.

    The lower end (for a max) is the exact value of an actual member, the
    upper end is the best prefix value plus the functional's tail bound.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if sense not in ("max", "min"):
        raise ValueError("sense must be 'max' or 'min'")
    sign = 1 if sense == "max" else -1
    D, W = functional.scaled_weights(depth)
    found, best, path, nodes = kernels.prefix_extreme(
        [sign * w for w in W], space.p, space.constraint, space.state_bound, space.amax
    )
    if not found:
        return ExtremeEnclosure(a_priori_interval(space, functional), sense, depth, False, nodes=nodes)
    tail = functional.tail_bound(depth, space.amax)
    prefix_best = functional.offset + Fraction(sign * best, D)
    witness = self_loop_completion(space, path.tolist())
    exact = functional.periodic_value(witness.preperiod, witness.period)
    if sense == "max":
        interval = RationalInterval(exact, prefix_best + tail)
    else:
        interval = RationalInterval(prefix_best - tail, exact)
    return ExtremeEnclosure(interval, sense, depth, True, witness, exact, nodes)


class Attainability(enum.Enum):
    Attainable = "Attainable"
    Unattainable = "Unattainable"
    Unknown = "Unknown"


@dataclass(frozen=True)
class AttainabilityResult:
    status: Attainability
    depth_used: int
    witness: Optional[Witness] = None
    value: Optional[Fraction] = None
    nodes: int = 0
    note: str = ""

    def __bool__(self):
        raise TypeError("AttainabilityResult is three-valued; inspect .status")


def lassos(space: SequenceSpace, max_preperiod: int, max_period: int):
    """Eventually periodic members: admissible paths ending in a cycle."""
    out = []

    def cycles(start):
        res = []

        def walk(s, digits):
            for a, s2 in space.successors(s):
                d2 = digits + (a,)
                if s2 == start:
                    res.append(d2)
                if len(d2) < max_period:
                    walk(s2, d2)

        walk(start, ())
        return res

    cyc_cache = {}

    def pre(s, digits):
        if s not in cyc_cache:
            cyc_cache[s] = cycles(s)
        for c in cyc_cache[s]:
            out.append(Witness(digits, c))
        if len(digits) < max_preperiod:
            for a, s2 in space.successors(s):
                pre(s2, digits + (a,))

    pre(space.constraint, ())
    return out


def attainable(
    space: SequenceSpace,
    functional: ValueFunctional,
    target: RationalInterval,
    depth: int = DEFAULT_DEPTH,
    max_preperiod: int = 4,
    max_period: int = 2,
    max_nodes: int = 50_000_000,
) -> AttainabilityResult:
    """Is some member's value inside ``target``?

    Prefix search first; prefix value intervals that straddle the target
    boundary are resolved by exact evaluation of short eventually periodic
    members (extremes of these functionals are attained by such sequences).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    D0, W0 = functional.scaled_weights(depth)
    tail = functional.tail_bound(depth, space.amax)
    D = D0
    for x in (functional.offset, target.lo, target.hi, tail):
        D = math.lcm(D, x.denominator)
    W = [w * (D // D0) for w in W0]
    status, path, nodes = kernels.prefix_hit(
        W,
        space.p,
        space.constraint,
        space.state_bound,
        space.amax,
        int(functional.offset * D),
        int(target.lo * D),
        int(target.hi * D),
        int(tail * D),
        max_nodes,
    )
    if status == kernels.FOUND:
        witness = self_loop_completion(space, path.tolist())
        value = functional.periodic_value(witness.preperiod, witness.period)
        assert value in target
        return AttainabilityResult(Attainability.Attainable, depth, witness, value, nodes)
    if status == kernels.EXHAUSTED:
        return AttainabilityResult(Attainability.Unattainable, depth, nodes=nodes)
    for w in lassos(space, max_preperiod, max_period):
        value = functional.periodic_value(w.preperiod, w.period)
        if value in target:
            return AttainabilityResult(Attainability.Attainable, depth, w, value, nodes, "periodic witness")
    note = "node budget exhausted" if status == kernels.BUDGET else "prefix intervals straddle the target"
    return AttainabilityResult(Attainability.Unknown, depth, nodes=nodes, note=note)


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

SYMBOLS = ("M1", "m1", "M1p", "m1p", "M2", "m2", "M2p", "m2p")


@dataclass(frozen=True)
class ExtremesReport:
    p: int
    q: int
    m: int
    depth: int
    closed: dict = field(default_factory=dict)
    enclosures: dict = field(default_factory=dict)

    def __getattr__(self, name):
        if name in SYMBOLS:
            return self.closed[name]
        raise AttributeError(name)

    def contained(self) -> dict:
        return {s: self.closed[s] in self.enclosures[s].interval for s in SYMBOLS}

    def tail_bounds(self) -> dict:
        g = ValueFunctional.geometric(self.q).tail_bound(self.depth, self.m - 1)
        w = ValueFunctional.weighted(self.p).tail_bound(self.depth, self.m - 1)
        return {s: (w if s.endswith("p") else g) for s in SYMBOLS}


def extremes_report(p: int, q: int, m: int, depth: int = DEFAULT_DEPTH) -> ExtremesReport:
    M1, m1 = closed_extremes_S(p, q, m)
    M1p, m1p = closed_extremes_Sprime(p, m)
    M2, m2 = closed_extremes_Q(p, q, m)
    M2p, m2p = closed_extremes_Qprime(p, m)
    closed = dict(M1=M1, m1=m1, M1p=M1p, m1p=m1p, M2=M2, m2=m2, M2p=M2p, m2p=m2p)
    A, B = SequenceSpace.A(p, m), SequenceSpace.B(p, m)
    geo, wtd = ValueFunctional.geometric(q), ValueFunctional.weighted(p)
    plan = {
        "M1": (A, geo, "max"),
        "m1": (A, geo, "min"),
        "M1p": (A, wtd, "max"),
        "m1p": (A, wtd, "min"),
        "M2": (B, geo, "max"),
        "m2": (B, geo, "min"),
        "M2p": (B, wtd, "max"),
        "m2p": (B, wtd, "min"),
    }
    enclosures = {s: enumerate_extremes(sp, f, depth, sense) for s, (sp, f, sense) in plan.items()}
    return ExtremesReport(p, q, m, depth, closed, enclosures)
