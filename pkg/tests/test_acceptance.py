"""Acceptance criteria 1-8, each printing one pass/fail line."""

import random
import subprocess
import sys
import time
from fractions import Fraction

from selfaffine import geometry, tiling
from selfaffine.connect import Case, Status, decide, diagonal_adjacent, horizontal_adjacent, intersection_condition_interval, vertical_adjacent
from selfaffine.extremal import Attainability, attainable, extremes_report
from selfaffine.params import AffinePair, normalize_sign

SWEEP_A = [0, Fraction(1, 2), 1, 2, 3, 5, 9, Fraction(19, 2), 10]


def P(p, q, a, m, n):
    return AffinePair(p, q, Fraction(a), m, n)


def test_extremes_equivalence(report):
    t0 = time.perf_counter()
    failures = []
    cases = [(p, q, m) for p in (4, 5, 6) for q in (-4, -3, 3, 4, 5) for m in range(p + 2, 2 * p - 1)]
    for p, q, m in cases:
        rep = extremes_report(p, q, m, depth=12)
        bounds = rep.tail_bounds()
        for sym, ok in rep.contained().items():
            if not ok or rep.enclosures[sym].interval.width > 2 * bounds[sym]:
                failures.append((p, q, m, sym))
    dt = time.perf_counter() - t0
    ok = not failures and dt < 60
    report(1, ok, f"{len(cases)} (p,q,m) x 8 extremes inside depth-12 enclosures, failures={failures}", dt)
    assert ok


def test_decision_band(report):
    t0 = time.perf_counter()
    expected = ["Disconnected"] * 2 + ["Connected"] * 5 + ["Disconnected"] * 2
    got = [decide(P(4, 3, a, 6, 2)).status.value for a in SWEEP_A]
    dt = time.perf_counter() - t0
    ok = got == expected and dt < 1
    report(2, ok, f"decide over a={[str(a) for a in SWEEP_A]} -> {got}", dt)
    assert ok


def test_oracle_agreement(report):
    t0 = time.perf_counter()
    mismatches, unknowns = [], []
    for a in SWEEP_A:
        pair = P(4, 3, a, 6, 2)
        hit = {}
        for case in (Case.same_column, Case.column_crossing, Case.next_column_next_row, Case.next_column_prev_row):
            f, space, target = intersection_condition_interval(pair, case)
            res = attainable(space, f, target, depth=12)
            if res.status is Attainability.Unknown:
                unknowns.append((a, case.value))
            hit[case] = res.status is Attainability.Attainable
        if vertical_adjacent(pair) != (hit[Case.same_column] and hit[Case.column_crossing]):
            mismatches.append((a, "vertical"))
        diag = hit[Case.next_column_next_row] or hit[Case.next_column_prev_row]
        if diagonal_adjacent(pair) != (horizontal_adjacent(pair) and diag):
            mismatches.append((a, "diagonal"))
    dt = time.perf_counter() - t0
    ok = not mismatches and not unknowns and dt < 120
    report(3, ok, f"depth-12 oracle vs vertical/diagonal predicates, mismatches={mismatches}, unknowns={unknowns}", dt)
    assert ok


def test_geometric_certification(report):
    t0 = time.perf_counter()
    cut_depth = None
    for d in range(1, 9):
        if geometry.certified_cut(geometry.adjacency_graph(P(4, 3, 10, 6, 2), d)) is not None:
            cut_depth = d
            break
    connected = [geometry.graph_connected(geometry.adjacency_graph(P(4, 3, 2, 6, 2), d)) for d in range(3, 9)]
    dt = time.perf_counter() - t0
    ok = cut_depth is not None and all(connected) and dt < 120
    report(4, ok, f"a=10 certified cut at depth {cut_depth}; a=2 connected at depths 3-8: {all(connected)}", dt)
    assert ok


def _first_cut(pair, max_depth):
    for d in range(1, max_depth + 1):
        if geometry.certified_cut(geometry.adjacency_graph(pair, d)) is not None:
            return d
    return None


def test_deng_lau_branch(report):
    t0 = time.perf_counter()
    values = [0, 1, 6, -6, Fraction(6001, 1000), Fraction(49, 8), 7, -7, 12]
    verdicts = {a: decide(P(3, 3, a, 3, 3)).status for a in values}
    formula_ok = all((v is Status.Connected) == (abs(a) <= 6) for a, v in verdicts.items())
    at_six = all(geometry.graph_connected(geometry.adjacency_graph(P(3, 3, 6, 3, 3), d)) for d in range(1, 11))
    near = _first_cut(P(3, 3, Fraction(49, 8), 3, 3), 10)
    seven = _first_cut(P(3, 3, 7, 3, 3), 10)
    dt = time.perf_counter() - t0
    ok = formula_ok and at_six and seven is not None
    near_text = f"cut at depth {near}" if near else "inconclusive (within 1/2 of the boundary)"
    report(5, ok, f"Connected iff |a|<=6: {formula_ok}; a=6 connected to depth 10: {at_six}; a=49/8 {near_text}; a=7 cut at depth {seven}", dt)
    assert ok


def test_tile_classification(report):
    t0 = time.perf_counter()
    checks = {}
    v = tiling.classify_tile(P(4, 3, 1, 3, 4))
    checks["(4,3,.,3,4)"] = (
        v.status is tiling.TileStatus.NotTile
        and v.witness.digits() == ((0, 0, 3, 0), (0, 0, 0, 1))
        and tiling.check_collision(P(4, 3, 1, 3, 4), v.witness)
    )
    v = tiling.classify_tile(P(2, 6, 1, 2, 6))
    probe = tiling.cardinality_probe(P(2, 6, 1, 2, 6), 3)
    checks["(2,6,.,2,6)"] = (
        v.status is tiling.TileStatus.Tile and probe.status is tiling.ProbeStatus.Pass and probe.checked[-1] == (3, 1728)
    )
    v = tiling.classify_tile(P(2, 3, 1, 3, 2))
    checks["(2,3,1,3,2)"] = v.status is tiling.TileStatus.NotTile and tiling.check_collision(P(2, 3, 1, 3, 2), v.witness)
    v = tiling.classify_tile(P(2, 3, 0, 3, 2))
    checks["(2,3,0,3,2)"] = v.status is tiling.TileStatus.NotTile and tiling.check_collision(P(2, 3, 0, 3, 2), v.witness)
    dt = time.perf_counter() - t0
    ok = all(checks.values()) and dt < 30
    report(6, ok, f"tile verdicts and exact witness checks: {checks}", dt)
    assert ok


def test_sign_invariance(report):
    t0 = time.perf_counter()
    rng = random.Random(20240607)
    bad = []
    negative = 0
    for _ in range(50):
        p = rng.choice([-6, -5, -4, -3, 3, 4, 5, 6])
        q = rng.choice([-5, -4, -3, -2, 2, 3, 4, 5])
        P_ = abs(p)
        m = rng.choice([P_, rng.randint(P_ + 2, 2 * P_ - 2) if P_ > 3 else P_])
        n = rng.choice([abs(q), rng.randint((abs(q) + 1) // 2 + 1, abs(q))])
        a = Fraction(rng.randint(-80, 80), rng.randint(1, 4))
        pair = P(p, q, a, m, n)
        negative += p < 0
        v = decide(normalize_sign(pair)).status
        flipped = AffinePair(-p, -q, -a, m, n)
        if p < 0 and v is not decide(flipped).status:
            bad.append((str(pair), "negation"))
        if decide(normalize_sign(normalize_sign(pair))).status is not v:
            bad.append((str(pair), "idempotence"))
        if decide(normalize_sign(pair.with_a(-a))).status is not v:
            bad.append((str(pair), "a -> -a"))
        if p < 0 and v is Status.Connected:
            # the raw pair's pieces must not separate either
            if geometry.certified_cut(geometry.adjacency_graph(pair, 3)) is not None:
                bad.append((str(pair), "geometry"))
    dt = time.perf_counter() - t0
    ok = not bad and negative > 0 and dt < 5
    report(7, ok, f"50 random pairs ({negative} with p<0), violations={bad}", dt)
    assert ok


def _cli(*args, cwd):
    cmd = [sys.executable, "-m", "selfaffine.cli", *map(str, args)]
    subprocess.run(cmd, cwd=cwd, check=True, capture_output=True)


def test_determinism(report, tmp_path):
    t0 = time.perf_counter()
    outputs = {}
    for jobs in (1, 8):
        d = tmp_path / f"jobs{jobs}"
        d.mkdir()
        _cli("sweep", 4, 3, 6, 2, 0, 10, 41, "--jobs", jobs, "--oracle-depth", 8, "--out", "s.csv", "--phase-image", "s.pgm", cwd=d)
        _cli("render", 4, 3, 2, 6, 2, "--depth", 5, "--out", "r.pgm", "--size", 128, cwd=d)
        outputs[jobs] = {name: (d / name).read_bytes() for name in ("s.csv", "s.pgm", "r.pgm")}
    same = {name: outputs[1][name] == outputs[8][name] for name in outputs[1]}
    dt = time.perf_counter() - t0
    ok = all(same.values())
    report(8, ok, f"byte-identical outputs for jobs=1 and jobs=8: {same}", dt)
    assert ok
