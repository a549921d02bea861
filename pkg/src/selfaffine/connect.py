"""Connectedness of T(A, D) from exact band inequalities.

Piece intersections S_{i,j}(T) & S_{i+c,j+d}(T) reduce to membership of an
affine series in a rational interval; see ``intersection_condition``.  The
series is written with the coefficient ``s = -a`` (the sign under which the
inverse matrix has lower-left entry r_1 * s); all verdicts depend on |a| only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import extremal
from .extremal import Attainability, SequenceSpace, ValueFunctional
from .params import AffinePair, HypothesisReport, RationalInterval, main_hypotheses_hold, validate


class NotNormalized(ValueError):
    pass


class Status(enum.Enum):
    Connected = "Connected"
    Disconnected = "Disconnected"
    OutOfScope = "OutOfScope"


class Branch(enum.Enum):
    QAbs2 = "QAbs2"
    MainBandOuter = "MainBandOuter"
    MainBandInner = "MainBandInner"
    DengLau = "DengLau"
    NONE = "None"


@dataclass(frozen=True)
class ConnectVerdict:
    status: Status
    branch: Branch
    satisfied_inequality: str
    bands: dict = field(default_factory=dict)
    hypotheses: Optional[HypothesisReport] = None
    reason: str = ""

    def __post_init__(self):
        if self.status is Status.Connected and self.branch is Branch.NONE:
            raise ValueError("a connected verdict needs a branch")
        if self.status is Status.OutOfScope and self.branch is not Branch.NONE:
            raise ValueError("out-of-scope verdicts carry no branch")


def outer_band(pair: AffinePair) -> RationalInterval:
    Q, n = abs(pair.q), pair.n
    return RationalInterval(max(Q * (Q - n), 0), Fraction(Q * Q * (n - 1), Q - 2))


def inner_band(pair: AffinePair) -> RationalInterval:
    Q, n = abs(pair.q), pair.n
    return RationalInterval(max(Q - n, 0), Fraction(Q * (n - 1), Q - 2))


def _require_main(pair: AffinePair) -> None:
    if not main_hypotheses_hold(pair):
        rep = validate(pair)
        raise ValueError("main-theorem hypotheses fail: " + "; ".join(rep.messages[:2]))


def _require_normalized(pair: AffinePair) -> None:
    if pair.p < 0:
        raise NotNormalized("p < 0: apply normalize_sign first")


def _fmt(lo, x, hi) -> str:
    return f"{lo} <= |a|={x} <= {hi}"


def decide(pair: AffinePair) -> ConnectVerdict:
    _require_normalized(pair)
    rep = validate(pair)
    x = pair.abs_a
    p, q, m, n = pair.p, pair.q, pair.m, pair.n
    Q = abs(q)
    if rep.main_theorem_ok:
        if Q == 2:
            return ConnectVerdict(Status.Connected, Branch.QAbs2, "|q| = 2", {}, rep)
        outer, inner = outer_band(pair), inner_band(pair)
        bands = {"outer": outer, "inner": inner}
        if x in outer:
            return ConnectVerdict(Status.Connected, Branch.MainBandOuter, _fmt(outer.lo, x, outer.hi), bands, rep)
        if x in inner:
            return ConnectVerdict(Status.Connected, Branch.MainBandInner, _fmt(inner.lo, x, inner.hi), bands, rep)
        text = f"|a|={x} outside {outer} and {inner}"
        return ConnectVerdict(Status.Disconnected, Branch.NONE, text, bands, rep)
    if rep.deng_lau_ok:
        bound = Fraction(abs(q * (q - (1 if p > 0 else -1))))
        bands = {"deng_lau": RationalInterval(0, bound)}
        if x <= bound:
            return ConnectVerdict(Status.Connected, Branch.DengLau, f"|a|={x} <= {bound}", bands, rep)
        return ConnectVerdict(Status.Disconnected, Branch.NONE, f"|a|={x} > {bound}", bands, rep)
    return ConnectVerdict(Status.OutOfScope, Branch.NONE, "", {}, rep, "; ".join(rep.messages))


def horizontal_gap_bound(pair: AffinePair) -> tuple[int, RationalInterval]:
    """Pieces S_{i1,j1}, S_{i2,j2} can only meet if |i1 - i2| <= 1."""
    _require_normalized(pair)
    _require_main(pair)
    w = Fraction(pair.m - 1, pair.p - 1)
    assert 1 < w < 2
    return 1, RationalInterval(-w, w)


def column_adjacent(pair: AffinePair) -> bool:
    Q = abs(pair.q)
    return pair.abs_a * (Q - 2) <= Q * Q * (pair.n - 1)


def vertical_adjacent(pair: AffinePair) -> bool:
    """Band test for (column adjacency) and (S_{i,j} meets S_{i,j+1})."""
    if abs(pair.q) == 2:
        return True
    return pair.abs_a in outer_band(pair)


def horizontal_adjacent(pair: AffinePair) -> bool:
    Q = abs(pair.q)
    if Q == 2:
        return True
    return pair.abs_a <= Fraction(Q * (pair.n - 1), Q - 2)


def diagonal_adjacent(pair: AffinePair) -> bool:
    if abs(pair.q) < 3:
        raise ValueError("diagonal band needs |q| >= 3")
    return pair.abs_a in inner_band(pair)


# ---------------------------------------------------------------------------
# interval conditions
# ---------------------------------------------------------------------------


class Case(enum.Enum):
    same_column = "same_column"
    next_column_same_row = "next_column_same_row"
    next_column_next_row = "next_column_next_row"
    next_column_prev_row = "next_column_prev_row"
    column_crossing = "column_crossing"


_CASE_OFFSETS = {
    Case.same_column: (0, 1),
    Case.next_column_same_row: (1, 0),
    Case.next_column_next_row: (1, 1),
    Case.next_column_prev_row: (1, -1),
}


def digit_sum_radius(pair: AffinePair) -> Fraction:
    """sum j_k q^-k over j_k in dE_n fills [-w, w] when 2n-1 >= |q|."""
    return Fraction(pair.n - 1, abs(pair.q) - 1)


def offset_condition(pair: AffinePair, dcol: int, drow: int):
    """(functional, space, target) for S_{i,j}(T) & S_{i+dcol, j+drow}(T) != empty.

    With s = -a, equal x-coordinates force a base-p digit-difference sequence
    summing to dcol, and equal y-coordinates force

        dcol*s/p - q*s*sum r_{k+1} c_k  in  [-drow - w, -drow + w].
    """
    _require_normalized(pair)
    if 2 * pair.n - 1 < abs(pair.q):
        raise ValueError("digit sums are not an interval (need 2n-1 >= |q|)")
    s = -pair.a
    p, q = pair.p, pair.q
    w = digit_sum_radius(pair)
    space = SequenceSpace(p, pair.m, dcol)
    functional = ValueFunctional.affine(p, q, Fraction(dcol) * s / p, -q * s)
    return functional, space, RationalInterval(-drow - w, -drow + w)


def intersection_condition_interval(pair: AffinePair, case: Case):
    """Exact triple whose attainability decides the named intersection."""
    if case is Case.column_crossing:
        # some S_{i,j} meets some S_{i+1,k}: the row offset is absorbed into
        # the digit sum, which now starts at index 0
        _require_normalized(pair)
        s = -pair.a
        p, q = pair.p, pair.q
        w = digit_sum_radius(pair)
        space = SequenceSpace.A(p, pair.m)
        functional = ValueFunctional.affine(p, q, s / (p * q), -s)
        return functional, space, RationalInterval(-w, w)
    dcol, drow = _CASE_OFFSETS[case]
    return offset_condition(pair, dcol, drow)


def closed_form_range(pair: AffinePair, case: Case) -> RationalInterval:
    """Hull of the functional's values, from the closed-form extremes."""
    p, q, m = pair.p, pair.q, pair.m
    s = -pair.a
    if case is Case.same_column:
        if p == q:
            M, mn = extremal.closed_extremes_Qprime(p, m)
            return RationalInterval(mn, M).scale(s / q)
        M, mn = extremal.closed_extremes_Q(p, q, m)
        return RationalInterval(mn, M).scale(-s / (q - p))
    if p == q:
        M, mn = extremal.closed_extremes_Sprime(p, m)
        base = RationalInterval(mn, M).scale(-s / q)
    else:
        M, mn = extremal.closed_extremes_S(p, q, m)
        base = RationalInterval(mn - 1, M - 1).scale(s / (q - p))
    if case is Case.column_crossing:
        return base.scale(Fraction(1, q))
    return base


def closed_form_condition(pair: AffinePair, case: Case) -> bool:
    _, _, target = intersection_condition_interval(pair, case)
    return closed_form_range(pair, case).intersects(target)


def crossing_offsets(pair: AffinePair) -> list[int]:
    """Row offsets d = k - j for which S_{i,j} can meet S_{i+1,k} (closed form)."""
    rng = closed_form_range(pair, Case.next_column_same_row)
    w = digit_sum_radius(pair)
    return [d for d in range(-(pair.n - 1), pair.n) if rng.intersects(RationalInterval(-d - w, -d + w))]


@dataclass(frozen=True)
class AdjacencyMatrix:
    """Translation-invariant adjacency families of the pieces S_{i,j}(T)."""

    m: int
    n: int
    horizontal: bool
    vertical: bool
    diag_up: bool
    diag_down: bool
    column: bool

    def adjacent(self, u: tuple[int, int], v: tuple[int, int]) -> bool:
        (i1, j1), (i2, j2) = sorted([u, v])
        di, dj = i2 - i1, j2 - j1
        if di == 0:
            return abs(dj) == 1 and self.vertical
        if di != 1:
            return False
        return {0: self.horizontal, 1: self.diag_up, -1: self.diag_down}.get(dj, False)

    def edges(self):
        nodes = [(i, j) for i in range(self.m) for j in range(self.n)]
        return [(u, v) for k, u in enumerate(nodes) for v in nodes[k + 1 :] if self.adjacent(u, v)]


def adjacency_matrix(pair: AffinePair) -> AdjacencyMatrix:
    _require_normalized(pair)
    _require_main(pair)
    return AdjacencyMatrix(
        pair.m,
        pair.n,
        horizontal=horizontal_adjacent(pair),
        vertical=vertical_adjacent(pair),
        diag_up=closed_form_condition(pair, Case.next_column_next_row),
        diag_down=closed_form_condition(pair, Case.next_column_prev_row),
        column=column_adjacent(pair),
    )


# ---------------------------------------------------------------------------
# chains of pieces
# ---------------------------------------------------------------------------


class ChainError(ValueError):
    pass


@dataclass(frozen=True)
class ChainWitness:
    order: tuple
    links: tuple
    crossing: Optional[tuple] = None  # (j, k) used between columns

    def covers(self, m: int, n: int) -> bool:
        return set(self.order) == {(i, j) for i in range(m) for j in range(n)}


def _link_kind(u, v) -> str:
    (i1, j1), (i2, j2) = u, v
    if i1 == i2:
        return "vertical"
    if j1 == j2:
        return "horizontal"
    return "diagonal"


def crossing_rows(pair: AffinePair, depth: int = extremal.DEFAULT_DEPTH) -> tuple[int, int]:
    """(j, k) with S_{i,j}(T) & S_{i+1,k}(T) != empty, certified by the oracle."""
    for d in sorted(range(-(pair.n - 1), pair.n), key=lambda d: (abs(d), d)):
        functional, space, target = offset_condition(pair, 1, d)
        res = extremal.attainable(space, functional, target, depth)
        if res.status is Attainability.Attainable:
            return (max(-d, 0), max(d, 0))
    raise ChainError("no certified column crossing")


def _zigzag(pair: AffinePair, j: int, k: int):
    m, n = pair.m, pair.n
    order = []
    for i in range(m):
        start = 0 if i == 0 else k
        col = list(range(start, n)) + list(range(n - 2, -1, -1))
        if i < m - 1:
            col += list(range(1, j + 1))
        # trim the tail back to j so the crossing starts there
        if i < m - 1:
            while col[-1] != j:
                col.pop()
        order.extend((i, r) for r in col)
    return order


def _boustrophedon(pair: AffinePair, up: bool):
    m, n = pair.m, pair.n
    flip = (lambda r: r) if up else (lambda r: n - 1 - r)
    order = []
    for c in range(m - 1):
        if c % 2 == 0:
            for r in range(n - 1, -1, -1):
                order += [(c, flip(r)), (c + 1, flip(r))]
        else:
            for r in range(n):
                order.append((c + 1, flip(r)))
                if r < n - 1:
                    order.append((c, flip(r)))
    # drop consecutive repeats
    out = [order[0]]
    for u in order[1:]:
        if u != out[-1]:
            out.append(u)
    return out


def chain_witness(pair: AffinePair, depth: int = extremal.DEFAULT_DEPTH) -> ChainWitness:
    verdict = decide(pair)
    if verdict.status is not Status.Connected or verdict.branch is Branch.DengLau:
        raise ChainError(f"no chain for verdict {verdict.status.value}/{verdict.branch.value}")
    if verdict.branch in (Branch.MainBandOuter, Branch.QAbs2):
        j, k = crossing_rows(pair, depth)
        order = _zigzag(pair, j, k)
        links = tuple("vertical" if u[0] == v[0] else "column-crossing" for u, v in zip(order, order[1:]))
        return ChainWitness(tuple(order), links, (j, k))
    adj = adjacency_matrix(pair)
    order = _boustrophedon(pair, up=adj.diag_up)
    links = tuple(_link_kind(u, v) for u, v in zip(order, order[1:]))
    return ChainWitness(tuple(order), links)


def check_chain(pair: AffinePair, chain: ChainWitness, depth: int = extremal.DEFAULT_DEPTH) -> bool:
    """Every piece appears and every consecutive link's predicate holds."""
    if not chain.covers(pair.m, pair.n):
        return False
    adj = adjacency_matrix(pair)
    for (u, v), kind in zip(zip(chain.order, chain.order[1:]), chain.links):
        if kind == "column-crossing":
            if u[0] + 1 != v[0] or not adj.column:
                return False
            functional, space, target = offset_condition(pair, 1, v[1] - u[1])
            res = extremal.attainable(space, functional, target, depth)
            if res.status is not Attainability.Attainable:
                return False
        elif kind == "vertical":
            if not (u[0] == v[0] and abs(u[1] - v[1]) == 1 and adj.vertical):
                return False
        elif kind != _link_kind(u, v) or not adj.adjacent(u, v):
            return False
    return True


# ---------------------------------------------------------------------------
# oracle verdict
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleVerdict:
    """Connectedness from attainability of every piece-intersection condition.

    ``status`` is Connected when the Attainable offsets already connect all
    pieces, Disconnected when even Attainable plus Unknown offsets do not, and
    None otherwise.
    """

    status: Optional[Status]
    offsets: dict  # (dcol, drow) -> AttainabilityResult


def oracle_offsets(pair: AffinePair) -> list[tuple[int, int]]:
    gap = SequenceSpace(pair.p, pair.m).state_bound
    if main_hypotheses_hold(pair):
        gap = 1
    out = [(0, d) for d in range(1, pair.n)]
    out += [(c, d) for c in range(1, min(gap, pair.m - 1) + 1) for d in range(-(pair.n - 1), pair.n)]
    return out


def oracle_verdict(pair: AffinePair, depth: int = extremal.DEFAULT_DEPTH) -> OracleVerdict:
    from .geometry import UnionFind

    _require_normalized(pair)
    results = {}
    for dcol, drow in oracle_offsets(pair):
        functional, space, target = offset_condition(pair, dcol, drow)
        results[(dcol, drow)] = extremal.attainable(space, functional, target, depth)
    nodes = pair.digits

    def joined(accept) -> bool:
        uf = UnionFind(nodes)
        for (dcol, drow), res in results.items():
            if res.status not in accept:
                continue
            for i, j in nodes:
                if i + dcol < pair.m and 0 <= j + drow < pair.n:
                    uf.union((i, j), (i + dcol, j + drow))
        return len({uf.find(x) for x in nodes}) == 1

    if joined({Attainability.Attainable}):
        status = Status.Connected
    elif not joined({Attainability.Attainable, Attainability.Unknown}):
        status = Status.Disconnected
    else:
        status = None
    return OracleVerdict(status, results)
