import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from selfaffine import geometry, kernels
from selfaffine.connect import Status, decide
from selfaffine.geometry import (
    CloudBudgetExceeded,
    EdgeLabel,
    PieceMap,
    adjacency_graph,
    attractor_cloud,
    bounding_box,
    certified_cut,
    error_radius,
    graph_connected,
    offset_separated,
    piece_cloud,
    read_pgm,
    render,
    separation_box,
    tail_extent,
)
from selfaffine.params import AffinePair, RationalInterval


def P(p, q, a, m, n):
    return AffinePair(p, q, Fraction(a), m, n)


def _random_pairs(count, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        p = rng.choice([-5, -4, -3, -2, 2, 3, 4, 5])
        q = rng.choice([-5, -4, -3, -2, 2, 3, 4, 5])
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        if (m * n) ** 6 <= 200_000:
            out.append(P(p, q, Fraction(rng.randint(-30, 30), rng.randint(1, 4)), m, n))
    return out


def test_box_example():
    bx, by = bounding_box(P(4, 3, 0, 6, 2))
    assert bx == RationalInterval(0, Fraction(5, 3))
    assert by == RationalInterval(0, Fraction(1, 2))


def test_singleton_attractor():
    pair = P(4, 3, 5, 1, 1)
    bx, by = bounding_box(pair)
    assert bx == by == RationalInterval(0, 0)
    for depth in (1, 4, 9):
        cloud = piece_cloud(pair, 0, 0, depth)
        assert cloud.points == [(0, 0)]
        assert cloud.error_radius == 0


def test_piece_map_fixes_origin():
    pair = P(4, 3, 2, 6, 2)
    assert PieceMap(0, 0, pair)((0, 0)) == (0, 0)
    assert PieceMap(1, 1, pair)((0, 0)) == (Fraction(1, 4), Fraction(-2, 12) + Fraction(1, 3))
    with pytest.raises(ValueError):
        PieceMap(6, 0, pair)


def test_depth_one_cloud_is_the_piece_image_of_the_seed():
    pair = P(4, 3, 0, 6, 2)
    for i, j in pair.digits:
        assert piece_cloud(pair, i, j, 1).points == [PieceMap(i, j, pair)((0, 0))]


def _inside(pt, box):
    return pt[0] in box[0] and pt[1] in box[1]


@pytest.mark.parametrize("pair", _random_pairs(20, 11), ids=str)
def test_cloud_lies_in_box(pair):
    box = bounding_box(pair)
    assert all(_inside(pt, box) for pt in attractor_cloud(pair, 6).points)


@pytest.mark.parametrize("pair", _random_pairs(8, 5), ids=str)
def test_tail_extent_is_the_exact_hull_of_truncations(pair):
    # for p, q > 0 the hull is attained, so deep clouds approach it from inside
    box = tail_extent(pair, 0)
    pts = attractor_cloud(pair, 6).points
    xs = [x for x, _ in pts]
    ys = [y for _, y in pts]
    if pair.p > 0 and pair.q > 0:
        assert box[0].hi - max(xs) <= error_radius(pair, 6)
        assert box[1].hi - max(ys) <= error_radius(pair, 6)
        assert min(ys) - box[1].lo <= error_radius(pair, 6)


def _hausdorff(a, b):
    def one_side(u, v):
        return max(min(max(abs(x - x2), abs(y - y2)) for x2, y2 in v) for x, y in u)

    return max(one_side(a, b), one_side(b, a))


@pytest.mark.parametrize("pair", [P(4, 3, 2, 3, 2), P(3, -2, Fraction(5, 2), 2, 2), P(-2, 3, -1, 2, 2)], ids=str)
def test_net_property(pair):
    for d in (1, 2, 3):
        small = piece_cloud(pair, 1, 1, d).points
        big = piece_cloud(pair, 1, 1, d + 1).points
        assert set(small) <= set(big)
        assert _hausdorff(small, big) <= error_radius(pair, d)


def test_error_radius_shrinks():
    pair = P(4, -3, 7, 6, 2)
    rs = [error_radius(pair, d) for d in range(0, 12)]
    assert all(b < a for a, b in zip(rs, rs[1:]))


def test_budget_guard():
    with pytest.raises(CloudBudgetExceeded):
        piece_cloud(P(4, 3, 2, 6, 2), 0, 0, 8, budget=10**5)


def _brute_separated(pair, u, v, depth):
    cu = piece_cloud(pair, *u, depth).points
    cv = piece_cloud(pair, *v, depth).points
    wx, wy = separation_box(pair, depth)
    return not any(abs(x - x2) <= wx and abs(y - y2) <= wy for x, y in cu for x2, y2 in cv)


@pytest.mark.parametrize("pair", [P(4, 3, 2, 6, 2), P(4, 3, 10, 6, 2), P(4, -3, 5, 6, 2), P(-3, 2, Fraction(7, 3), 4, 2)], ids=str)
def test_separation_search_matches_brute_force(pair, backend):
    for depth in (2, 3):
        for v in [(1, 0), (0, 1), (1, 1), (1, -1) if pair.n > 1 else (1, 0)]:
            u = (0, 0) if v[1] >= 0 else (0, 1)
            v = (u[0] + v[0], u[1] + v[1])
            status = offset_separated(pair, u[0] - v[0], u[1] - v[1], depth)[0]
            assert (status == kernels.EXHAUSTED) == _brute_separated(pair, u, v, depth)


def test_separation_backends_agree():
    from selfaffine import _accel

    if not _accel.numba_available():
        pytest.skip("numba not installed")
    prev = _accel.get_backend()
    try:
        out = {}
        for b in ("numba", "numpy"):
            _accel.set_backend(b)
            out[b] = [adjacency_graph(P(4, 3, a, 6, 2), d).edges for a in (2, 10) for d in (3, 6)]
    finally:
        _accel.set_backend(prev)
    assert out["numba"] == out["numpy"]


@pytest.mark.parametrize("a", [0, Fraction(1, 2), 2, 3, 9, Fraction(19, 2), 10, 20])
@pytest.mark.parametrize("q", [3, -3])
def test_certification_is_monotone_in_depth(q, a):
    pair = P(4, q, a, 6, 2)
    certified = set()
    for d in range(2, 8):
        g = adjacency_graph(pair, d)
        now = set(g.certified_edges())
        assert certified <= now
        certified = now


@pytest.mark.parametrize("q", [3, -3])
@pytest.mark.parametrize("a", [0, Fraction(1, 2), 1, 2, 3, 5, 9, Fraction(19, 2), 10, 12, 20])
def test_formula_and_geometry_agree(q, a):
    pair = P(4, q, a, 6, 2)
    graphs = [adjacency_graph(pair, d) for d in range(2, 9)]
    if decide(pair).status is Status.Connected:
        assert all(graph_connected(g) for g in graphs)
    else:
        assert not all(graph_connected(g) for g in graphs)


def test_adjacency_examples():
    g = adjacency_graph(P(4, 3, 10, 6, 2), 6)
    cut = certified_cut(g)
    assert cut is not None
    left, right = cut
    for u in left:
        for v in right:
            key = (u, v) if u < v else (v, u)
            assert g.edges.get(key, EdgeLabel.certified_disjoint) is EdgeLabel.certified_disjoint
    assert graph_connected(adjacency_graph(P(4, 3, 2, 6, 2), 6))


def test_single_column_graph_has_only_vertical_pairs():
    g = adjacency_graph(P(4, 3, 2, 1, 3), 4)
    assert all(u[0] == v[0] for u, v in g.edges)
    assert len(g.edges) == 3


def test_graph_connected_trivial_cases():
    nodes = ((0, 0), (0, 1), (1, 0))
    full = geometry.AdjacencyGraph(nodes, {e: EdgeLabel.plausible for e in itertools.combinations(nodes, 2)}, 1, Fraction(0), 1)
    assert graph_connected(full)
    cut = dict(full.edges)
    cut[((0, 0), (1, 0))] = cut[((0, 1), (1, 0))] = EdgeLabel.certified_disjoint
    assert not graph_connected(geometry.AdjacencyGraph(nodes, cut, 1, Fraction(0), 1))
    with pytest.raises(ValueError):
        graph_connected(full, "all")


def test_render_is_deterministic(tmp_path):
    pair = P(4, 3, 2, 6, 2)
    for fmt in ("pgm", "svg"):
        a = render(pair, 4, fmt, tmp_path / f"a.{fmt}", size=64)
        b = render(pair, 4, fmt, tmp_path / f"b.{fmt}", size=64)
        assert a.read_bytes() == b.read_bytes()


def test_render_square_coverage(tmp_path):
    path = render(P(2, 2, 0, 2, 2), 10, "pgm", tmp_path / "sq.pgm")
    data = path.read_bytes()
    assert data.startswith(b"P5\n512 512\n255\n")
    img = read_pgm(path)
    assert img.shape == (512, 512)
    assert (img == 0).mean() >= 0.99


def test_render_singleton(tmp_path):
    img = read_pgm(render(P(4, 3, 1, 1, 1), 5, "pgm", tmp_path / "one.pgm", size=32))
    assert (img == 0).sum() == 1
    svg = render(P(4, 3, 1, 1, 1), 5, "svg", tmp_path / "one.svg", size=32).read_text()
    assert svg.count("<rect") == 2  # background plus one marker


def test_render_orientation(tmp_path):
    # a = 0, m = p, n = 1: points fill the bottom row only, since y is up
    img = read_pgm(render(P(2, 2, 0, 2, 1), 8, "pgm", tmp_path / "row.pgm", size=16))
    assert (img[:-1] == 255).all()
    assert (img[-1] == 0).sum() >= 15


def test_render_unwritable(tmp_path):
    with pytest.raises(OSError):
        render(P(4, 3, 2, 6, 2), 2, "pgm", tmp_path / "missing" / "x.pgm", size=16)
