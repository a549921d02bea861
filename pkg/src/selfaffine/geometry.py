"""Point clouds, piece adjacency and rendering for the attractor T(A, D).

A depth-K cloud of the piece S_{i,j}(T) is the set of sums
sum_{k=1..K} A^-k d_k with d_1 = (i, j), i.e. the images of the origin (the
fixed point of S_{0,0}) under all K-fold compositions starting with S_{i,j}.
Every cloud point lies in the piece, and every point of the piece lies within
``error_radius(pair, K)`` of a cloud point (max-norm).

Points are stored as integers over one common denominator ``scale``.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import kernels
from .params import AffinePair, RationalInterval, inverse_power, main_hypotheses_hold

DEFAULT_BUDGET = 10**6
DEFAULT_RASTER = 512
_HEAD = 40


class CloudBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class PieceMap:
    """S_{i,j}: v -> A^-1 (v + (i, j))."""

    i: int
    j: int
    pair: AffinePair

    def __post_init__(self):
        if not (0 <= self.i < self.pair.m and 0 <= self.j < self.pair.n):
            raise ValueError(f"digit ({self.i}, {self.j}) not in E_m x E_n")

    def __call__(self, point):
        x, y = Fraction(point[0]) + self.i, Fraction(point[1]) + self.j
        (a11, _), (a21, a22) = inverse_power(self.pair, 1)
        return (a11 * x, a21 * x + a22 * y)

    def contraction(self) -> tuple[Fraction, Fraction]:
        return Fraction(1, abs(self.pair.p)), Fraction(1, abs(self.pair.q))


def _level_extent(pair: AffinePair, k: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """(xlo, xhi, ylo, yhi) of A^-k D."""
    (c11, _), (c21, c22) = inverse_power(pair, k)
    xs = (Fraction(0), c11 * (pair.m - 1))
    shear = (Fraction(0), c21 * (pair.m - 1))
    vert = (Fraction(0), c22 * (pair.n - 1))
    return min(xs), max(xs), min(shear) + min(vert), max(shear) + max(vert)


def _tail_bounds(pair: AffinePair, after: int) -> tuple[Fraction, Fraction]:
    """Sums over k > after of per-level bounds on |x| and |y| of A^-k D."""
    P, Q = abs(pair.p), abs(pair.q)
    geo = lambda b: Fraction(1, b**after * (b - 1))
    tx = (pair.m - 1) * geo(P)
    if pair.p == pair.q:
        x = Fraction(1, Q)
        # |r_k| = k x^(k+1); sum_{k>h} k x^k = x^(h+1) ((h+1) - h x) / (1-x)^2
        r = x ** (after + 1) * ((after + 1) - after * x) / (1 - x) ** 2 * x
    else:
        r = (geo(P) + geo(Q)) / abs(pair.q - pair.p)
    return tx, abs(pair.a) * (pair.m - 1) * r + (pair.n - 1) * geo(Q)


def tail_extent(pair: AffinePair, depth: int) -> tuple[RationalInterval, RationalInterval]:
    """Per-axis hull of A^-depth T(A, D) = {sum_{k>depth} A^-k d_k}.

    Digits are chosen independently per level, so each coordinate's range is
    the sum of per-level ranges: exact in closed form when p, q > 0 (every r_k
    is then positive), otherwise 40 exact levels plus a geometric tail bound.
    """
    p, q, m, n, l = pair.p, pair.q, pair.m, pair.n, pair.a
    if p > 0 and q > 0:
        sx = Fraction(1, p**depth * (p - 1))
        sq = Fraction(1, q**depth * (q - 1))
        if p == q:
            x = Fraction(1, q)
            sr = x ** (depth + 1) * ((depth + 1) - depth * x) / (1 - x) ** 2 * x
        else:
            sr = (sx - sq) / (q - p)
        shear = -l * (m - 1) * sr
        return (
            RationalInterval(0, (m - 1) * sx),
            RationalInterval(min(shear, 0), max(shear, 0) + (n - 1) * sq),
        )
    xlo = xhi = ylo = yhi = Fraction(0)
    for k in range(depth + 1, depth + _HEAD + 1):
        a, b, c, d = _level_extent(pair, k)
        xlo, xhi, ylo, yhi = xlo + a, xhi + b, ylo + c, yhi + d
    tx, ty = _tail_bounds(pair, depth + _HEAD)
    return RationalInterval(xlo - tx, xhi + tx), RationalInterval(ylo - ty, yhi + ty)


def bounding_box(pair: AffinePair) -> tuple[RationalInterval, RationalInterval]:
    """A rectangle containing T(A, D), exact when p, q > 0."""
    return tail_extent(pair, 0)


def error_radius(pair: AffinePair, depth: int) -> Fraction:
    """sup of |A^-depth t|_inf over t in T: the distance from a piece point to its truncation."""
    bx, by = tail_extent(pair, depth)
    return max(-bx.lo, bx.hi, -by.lo, by.hi)


def separation_box(pair: AffinePair, depth: int) -> tuple[Fraction, Fraction]:
    """Half-widths of the hull of A^-depth (T - T).

    Two depth-``depth`` pieces can only meet if some difference of their cloud
    points lies in this box.
    """
    bx, by = tail_extent(pair, depth)
    return bx.width, by.width


def _common_scale(pair: AffinePair, depth: int) -> int:
    dens = [1]
    for k in range(1, depth + 1):
        (c11, _), (c21, c22) = inverse_power(pair, k)
        dens += [c11.denominator, c21.denominator, c22.denominator]
    return math.lcm(*dens)


def _scaled(value: Fraction, scale: int) -> int:
    v = value * scale
    assert v.denominator == 1
    return int(v)


def digit_tables(pair: AffinePair, levels: int, scale: int, digits):
    """Integer tables tx[k-1, e], ty[k-1, e] of scale * A^-k d_e."""
    tx, ty = [], []
    for k in range(1, levels + 1):
        (c11, _), (c21, c22) = inverse_power(pair, k)
        tx.append([_scaled(c11 * i, scale) for i, _ in digits])
        ty.append([_scaled(c21 * i + c22 * j, scale) for i, j in digits])
    return tx, ty


@dataclass(frozen=True)
class PieceCloud:
    xs: np.ndarray
    ys: np.ndarray
    scale: int
    error_radius: Fraction
    depth: int
    piece: Optional[tuple[int, int]]  # None for the whole set

    def __len__(self) -> int:
        return len(self.xs)

    @property
    def points(self) -> list[tuple[Fraction, Fraction]]:
        return [(Fraction(int(x), self.scale), Fraction(int(y), self.scale)) for x, y in zip(self.xs, self.ys)]


def _cloud(pair: AffinePair, first, depth: int, budget: int, piece) -> PieceCloud:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    count = len(first) * (pair.m * pair.n) ** (depth - 1)
    if count > budget:
        raise CloudBudgetExceeded(f"{count} points exceed the point budget {budget}")
    scale = _common_scale(pair, depth)
    tx, ty = digit_tables(pair, depth, scale, pair.digits)
    fx, fy = digit_tables(pair, 1, scale, first)
    if depth == 1:
        xs, ys = np.array(fx[0], dtype=object), np.array(fy[0], dtype=object)
    else:
        rx, ry = kernels.all_sums(np.array(tx[1:], dtype=object), np.array(ty[1:], dtype=object))
        xs = np.concatenate([rx + x0 for x0 in fx[0]])
        ys = np.concatenate([ry + y0 for y0 in fy[0]])
    return PieceCloud(xs, ys, scale, error_radius(pair, depth), depth, piece)


def piece_cloud(pair: AffinePair, i: int, j: int, depth: int, budget: int = DEFAULT_BUDGET) -> PieceCloud:
    PieceMap(i, j, pair)
    return _cloud(pair, [(i, j)], depth, budget, (i, j))


def attractor_cloud(pair: AffinePair, depth: int, budget: int = DEFAULT_BUDGET) -> PieceCloud:
    return _cloud(pair, pair.digits, depth, budget, None)


# ---------------------------------------------------------------------------
# adjacency
# ---------------------------------------------------------------------------


class EdgeLabel(enum.Enum):
    certified_disjoint = "certified_disjoint"
    plausible = "plausible"


@dataclass(frozen=True)
class AdjacencyGraph:
    nodes: tuple
    edges: dict  # (u, v) -> EdgeLabel, u < v
    depth: int
    error_radius: Fraction
    gap: int
    budget_hit: frozenset = field(default_factory=frozenset)  # offsets labeled plausible for lack of budget

    def plausible_edges(self):
        return [e for e, lab in self.edges.items() if lab is EdgeLabel.plausible]

    def certified_edges(self):
        return [e for e, lab in self.edges.items() if lab is EdgeLabel.certified_disjoint]


def horizontal_gap(pair: AffinePair) -> int:
    """Largest |i1 - i2| for which the x-extents of two pieces can overlap."""
    return (pair.m - 1) // (abs(pair.p) - 1)


@functools.lru_cache(maxsize=64)
def _difference_tables(pair: AffinePair, depth: int):
    """Scaled digit-difference tables of levels 2..depth and their suffix spans."""
    scale = _common_scale(pair, depth)
    diffs = [(i, j) for i in range(-(pair.m - 1), pair.m) for j in range(-(pair.n - 1), pair.n)]
    tx, ty = digit_tables(pair, depth, scale, diffs)
    spanx = [0] * depth
    spany = [0] * depth
    for L in range(depth - 2, -1, -1):
        spanx[L] = spanx[L + 1] + max(abs(v) for v in tx[L + 1])
        spany[L] = spany[L + 1] + max(abs(v) for v in ty[L + 1])
    dtx = np.array(tx[1:], dtype=object).reshape(depth - 1, len(diffs))
    dty = np.array(ty[1:], dtype=object).reshape(depth - 1, len(diffs))
    return scale, dtx, dty, spanx, spany


def offset_separated(pair: AffinePair, di: int, dj: int, depth: int, max_nodes: int = 20_000_000):
    """kernels.near_pair result for pieces whose first digits differ by (di, dj).

    EXHAUSTED means no cloud difference falls in ``separation_box``, which
    proves the two pieces disjoint.
    """
    scale, dtx, dty, spanx, spany = _difference_tables(pair, depth)
    wx, wy = separation_box(pair, depth)
    # differences are integers after scaling, so the box edges can be floored
    thrx, thry = math.floor(wx * scale), math.floor(wy * scale)
    c = inverse_power(pair, 1)
    dx0 = _scaled(c[0][0] * di, scale)
    dy0 = _scaled(c[1][0] * di + c[1][1] * dj, scale)
    return kernels.near_pair(dtx, dty, spanx, spany, dx0, dy0, thrx, thry, max_nodes)


def adjacency_graph(pair: AffinePair, depth: int, max_nodes: int = 20_000_000) -> AdjacencyGraph:
    """Label each candidate piece pair certified_disjoint or plausible.

    A pair is certified_disjoint iff no difference of points of its two
    depth-``depth`` clouds lies in ``separation_box``.  Labels depend only on the digit offset, so one
    search per offset class suffices.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    gap = 1 if main_hypotheses_hold(pair) else horizontal_gap(pair)
    nodes = tuple(pair.digits)
    labels, budget_hit = {}, set()
    edges = {}
    for u_idx, u in enumerate(nodes):
        for v in nodes[u_idx + 1 :]:
            di, dj = u[0] - v[0], u[1] - v[1]
            if abs(di) > gap:
                continue
            key = (di, dj)
            if key not in labels:
                status = offset_separated(pair, di, dj, depth, max_nodes)[0]
                if status == kernels.BUDGET:
                    budget_hit.add(key)
                labels[key] = EdgeLabel.certified_disjoint if status == kernels.EXHAUSTED else EdgeLabel.plausible
            edges[(u, v)] = labels[key]
    return AdjacencyGraph(nodes, edges, depth, error_radius(pair, depth), gap, frozenset(budget_hit))


class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True


def components(graph: AdjacencyGraph) -> list[list]:
    uf = UnionFind(graph.nodes)
    for u, v in graph.plausible_edges():
        uf.union(u, v)
    groups: dict = {}
    for x in graph.nodes:
        groups.setdefault(uf.find(x), []).append(x)
    return sorted(groups.values())


def graph_connected(graph: AdjacencyGraph, edge_policy: str = "plausible_only") -> bool:
    if edge_policy != "plausible_only":
        raise ValueError(f"unknown edge policy {edge_policy!r}")
    return len(components(graph)) <= 1


def certified_cut(graph: AdjacencyGraph) -> Optional[tuple[list, list]]:
    """A split of the pieces with only certified_disjoint pairs across it."""
    comps = components(graph)
    if len(comps) < 2:
        return None
    side = comps[0]
    rest = [x for c in comps[1:] for x in c]
    return side, rest


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


RENDER_CHUNKS = 16  # a render may visit at most this many budgets worth of points


def _cells(vals: np.ndarray, scale: int, iv: RationalInterval, cells: int) -> np.ndarray:
    """floor((v/scale - lo) / width * (cells-1)) for scaled integer points, exactly."""
    if iv.width == 0:
        return np.zeros(len(vals), dtype=np.int64)
    mul = iv.lo.denominator * iv.width.denominator * (cells - 1)
    off = iv.lo.numerator * scale * iv.width.denominator * (cells - 1)
    den = scale * iv.lo.denominator * iv.width.numerator
    peak = int(np.abs(vals).max()) * mul + abs(off) if len(vals) else 0
    if kernels.fits_int64(peak, den):
        return (np.asarray(vals, dtype=np.int64) * mul - off) // den
    out = (np.asarray(vals, dtype=object) * mul - off) // den
    return np.array([int(v) for v in out], dtype=np.int64)


def raster(pair: AffinePair, depth: int, size: int = DEFAULT_RASTER, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Occupancy image (row 0 at the top, y up) of the depth-``depth`` cloud of T.

    Leading digits are split off until each chunk has at most ``budget``
    points; the total is capped at RENDER_CHUNKS * budget.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    B = pair.m * pair.n
    total = B**depth
    if total > RENDER_CHUNKS * budget:
        raise CloudBudgetExceeded(f"{total} points exceed {RENDER_CHUNKS} x the point budget {budget}")
    split = 0
    while B ** (depth - split) > budget:
        split += 1
    box = bounding_box(pair)
    scale = _common_scale(pair, depth)
    tx, ty = digit_tables(pair, depth, scale, pair.digits)
    table = lambda rows: np.array(rows, dtype=object).reshape(len(rows), B)
    if split < depth:
        rx, ry = kernels.all_sums(table(tx[split:]), table(ty[split:]))
    else:
        rx, ry = np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64)
    if split:
        px, py = kernels.all_sums(table(tx[:split]), table(ty[:split]))
    else:
        px, py = [0], [0]
    img = np.full((size, size), 255, dtype=np.uint8)
    for x0, y0 in zip(px, py):
        cx = _cells(rx + x0, scale, box[0], size)
        cy = _cells(ry + y0, scale, box[1], size)
        img[size - 1 - cy, cx] = 0
    return img


def render(
    pair: AffinePair,
    depth: int,
    fmt: str,
    out_path,
    size: int = DEFAULT_RASTER,
    budget: int = DEFAULT_BUDGET,
) -> Path:
    """Write the depth-``depth`` attractor cloud as P5 graymap or SVG.

    Coordinates are normalized to the bounding box, origin at its lower-left
    corner, y up.  Graymap: 255 background, 0 for each occupied pixel.  SVG:
    one 1x1 ``rect`` per occupied pixel, in row-major order.
    """
    if fmt in ("pgm", "portable_graymap"):
        fmt = "pgm"
    elif fmt in ("svg", "scalable_vector"):
        fmt = "svg"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    img = raster(pair, depth, size, budget)
    out_path = Path(out_path)
    if fmt == "pgm":
        data = f"P5\n{size} {size}\n255\n".encode("ascii") + img.tobytes()
        out_path.write_bytes(data)
        return out_path
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    r, c = np.nonzero(img == 0)
    lines += [f'<rect x="{x}" y="{y}" width="1" height="1"/>' for y, x in zip(r.tolist(), c.tolist())]
    lines.append("</svg>")
    out_path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return out_path


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary graymap")
    w, h = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w)
