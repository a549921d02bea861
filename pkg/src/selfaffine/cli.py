"""Command-line interface.

Subcommands print ``key=value`` records (see ``records``) on stdout.

Exit codes:
  0  a verdict was produced (Unknown included)
  2  invalid input
  3  a point or node budget was exceeded

Examples:
  selfaffine decide 4 3 2 6 2
  selfaffine verify 4 3 10 6 2 --depth 8
  selfaffine extremes 5 3 7
  selfaffine tile 2 3 1 3 2
  selfaffine sweep 4 3 6 2 0 10 41 --out sweep.csv --phase-image strip.pgm
  selfaffine render 4 3 2 6 2 --depth 6 --format pgm --out t.pgm
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import connect, extremal, geometry, tiling
from .config import ConfigError, RunConfig, load_config
from .params import AffinePair, InvalidPair, normalize_sign, parse_rational, validate
from .records import format_record, write_csv

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3

PHASE_SHADE = {"Connected": 0, "Disconnected": 255, "OutOfScope": 128}


class InputError(ValueError):
    pass


def _int(name: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise InputError(f"{name}: expected an integer, got {text!r}") from None


def _rat(name: str, text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError:
        raise InputError(f"{name}: expected an exact rational such as 3/2, -7 or 0.25, got {text!r}") from None


def _pair(ns) -> AffinePair:
    try:
        return AffinePair(_int("p", ns.p), _int("q", ns.q), _rat("a", ns.a), _int("m", ns.m), _int("n", ns.n))
    except InvalidPair as exc:
        raise InputError(str(exc)) from None


def _params(pair: AffinePair) -> list:
    return [("p", pair.p), ("q", pair.q), ("a", pair.a), ("m", pair.m), ("n", pair.n)]


def _hypotheses(pair: AffinePair) -> list:
    rep = validate(pair)
    items = [
        ("main_theorem_ok", rep.main_theorem_ok),
        ("deng_lau_ok", rep.deng_lau_ok),
        ("tile_dimension_ok", rep.tile_dimension_ok),
    ]
    return items + [(f"message.{k}", msg) for k, msg in enumerate(rep.messages)]


def decide_items(pair: AffinePair) -> list:
    norm = normalize_sign(pair)
    v = connect.decide(norm)
    items = [("command", "decide")] + _params(pair) + [("normalized", norm != pair)]
    items += [("status", v.status), ("branch", v.branch), ("inequality", v.satisfied_inequality or "none")]
    items += [(f"band.{name}", band) for name, band in v.bands.items()]
    if v.reason:
        items.append(("reason", v.reason))
    return items + _hypotheses(pair)


def _tri(status) -> str:
    return status.value if status is not None else "Unknown"


def verify_items(pair: AffinePair, cfg: RunConfig) -> list:
    norm = normalize_sign(pair)
    formula = connect.decide(norm)
    items = [("command", "verify")] + _params(pair) + [("depth", cfg.depth), ("formula", formula.status)]
    try:
        oracle = connect.oracle_verdict(norm, cfg.depth)
    except ValueError as exc:
        oracle = None
        items += [("oracle", "NotApplicable"), ("oracle.reason", str(exc))]
    if oracle is not None:
        items.append(("oracle", _tri(oracle.status)))
        for (dc, dr), res in sorted(oracle.offsets.items()):
            items.append((f"oracle.offset.{dc}.{dr}", res.status))
            if res.witness is not None:
                items.append((f"oracle.witness.{dc}.{dr}", str(res.witness)))
    graph = geometry.adjacency_graph(norm, cfg.depth)
    geo_disconnected = not geometry.graph_connected(graph)
    items += [
        ("geometric", "Disconnected" if geo_disconnected else "NotSeparated"),
        ("geometric.certified_pairs", len(graph.certified_edges())),
        ("geometric.plausible_pairs", len(graph.plausible_edges())),
    ]
    if formula.status is connect.Status.OutOfScope:
        agree_oracle = agree_geo = "none"
    else:
        agree_oracle = "none" if oracle is None or oracle.status is None else oracle.status is formula.status
        if formula.status is connect.Status.Connected:
            agree_geo = not geo_disconnected
        else:
            agree_geo = True if geo_disconnected else "inconclusive"
    return items + [("agree.oracle", agree_oracle), ("agree.geometric", agree_geo)]


def extremes_items(p: int, q: int, m: int, depth: int) -> list:
    rep = extremal.extremes_report(p, q, m, depth)
    items = [("command", "extremes"), ("p", p), ("q", q), ("m", m), ("depth", depth)]
    contained = rep.contained()
    for sym in extremal.SYMBOLS:
        items += [
            (sym, rep.closed[sym]),
            (f"{sym}.enclosure", rep.enclosures[sym].interval),
            (f"{sym}.contained", contained[sym]),
        ]
    return items


def adjacency_items(pair: AffinePair, cfg: RunConfig) -> list:
    norm = normalize_sign(pair)
    items = [("command", "adjacency")] + _params(pair) + [("depth", cfg.depth)]
    try:
        adj = connect.adjacency_matrix(norm)
        items += [
            ("formula.horizontal", adj.horizontal),
            ("formula.vertical", adj.vertical),
            ("formula.diag_up", adj.diag_up),
            ("formula.diag_down", adj.diag_down),
            ("formula.column", adj.column),
        ]
    except ValueError as exc:
        items.append(("formula", f"unavailable: {exc}"))
    graph = geometry.adjacency_graph(norm, cfg.depth)
    items += [("error_radius", graph.error_radius), ("connected", geometry.graph_connected(graph))]
    for (u, v), label in graph.edges.items():
        items.append((f"edge.{u[0]}.{u[1]}.{v[0]}.{v[1]}", label))
    return items


def _collision_items(prefix: str, c: Optional[tiling.Collision]) -> list:
    if c is None:
        return [(prefix, None)]
    first, second = c.digits()
    return [(f"{prefix}.level", c.level), (f"{prefix}.first", first), (f"{prefix}.second", second)]


def tile_items(pair: AffinePair, k_max: int, budget: int) -> list:
    v = tiling.classify_tile(pair, probe_k=k_max, budget=budget)
    items = [("command", "tile")] + _params(pair) + [("status", v.status), ("case", v.case)]
    items += _collision_items("witness", v.witness)
    if v.witness is not None:
        items.append(("witness.valid", tiling.check_collision(pair, v.witness)))
    if v.k0 is not None:
        items.append(("k0", v.k0))
    probe = v.probes.get("cardinality")
    if probe is None and v.status is not tiling.TileStatus.Unknown:
        probe = tiling.cardinality_probe(pair, k_max, budget)
    if probe is not None:
        items += [("probe.status", probe.status), ("probe.checked", [f"{k}:{c}" for k, c in probe.checked])]
        items += _collision_items("probe.witness", probe.witness)
    for k, d in v.probes.get("discreteness", []):
        items.append((f"probe.min_distance.{k}", d))
    return items


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    a: Fraction
    verdict: connect.ConnectVerdict
    oracle_agrees: Optional[bool]
    seconds: float

    def as_dict(self) -> dict:
        bands = self.verdict.bands
        row = {"a": self.a, "verdict": self.verdict.status, "branch": self.verdict.branch}
        row["in_outer_band"] = abs(self.a) in bands["outer"] if "outer" in bands else None
        row["in_inner_band"] = abs(self.a) in bands["inner"] if "inner" in bands else None
        row["oracle"] = self.oracle_agrees
        return row


def sweep_values(a_min: Fraction, a_max: Fraction, steps: int) -> list[Fraction]:
    if steps < 1:
        raise InputError("steps must be >= 1")
    if steps == 1:
        return [a_min]
    h = (a_max - a_min) / (steps - 1)
    return [a_min + k * h for k in range(steps)]


def sweep(p, q, m, n, a_values, jobs: int = 1, oracle_depth: Optional[int] = None) -> list[SweepRow]:
    def one(a):
        t0 = time.perf_counter()
        pair = normalize_sign(AffinePair(p, q, a, m, n))
        verdict = connect.decide(pair)
        agrees = None
        if oracle_depth is not None and verdict.status is not connect.Status.OutOfScope:
            o = connect.oracle_verdict(pair, oracle_depth)
            agrees = None if o.status is None else o.status is verdict.status
        return SweepRow(a, verdict, agrees, time.perf_counter() - t0)

    if jobs <= 1:
        return [one(a) for a in a_values]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(one, a_values))


def phase_strip(rows: Sequence[SweepRow], height: int = 16) -> bytes:
    """P5 image, one column per sweep row: 0 Connected, 255 Disconnected, 128 OutOfScope."""
    shades = np.array([PHASE_SHADE[r.verdict.status.value] for r in rows], dtype=np.uint8)
    img = np.tile(shades, (height, 1))
    return f"P5\n{len(rows)} {height}\n255\n".encode("ascii") + img.tobytes()


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

_NEGATIVE = re.compile(r"^-(\d+(/\d+)?|\d*\.\d+)$")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selfaffine",
        description="Connectedness and tile tests for planar self-affine sets T(A, D).",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("Exit codes:")[1],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def pair_args(sp):
        for name in ("p", "q", "a", "m", "n"):
            sp.add_argument(name)

    sp = sub.add_parser("decide", help="closed-form connectedness verdict")
    pair_args(sp)

    sp = sub.add_parser("verify", help="formula vs sequence oracle vs geometric graph")
    pair_args(sp)
    sp.add_argument("--depth", type=int)

    sp = sub.add_parser("extremes", help="closed-form extremes and oracle enclosures")
    for name in ("p", "q", "m"):
        sp.add_argument(name)
    sp.add_argument("--depth", type=int)

    sp = sub.add_parser("adjacency", help="adjacency predicates and geometric piece graph")
    pair_args(sp)
    sp.add_argument("--depth", type=int)

    sp = sub.add_parser("tile", help="tile classification with collision witness")
    pair_args(sp)
    sp.add_argument("k_max", nargs="?", default="4")
    sp.add_argument("--point-budget", type=int)

    sp = sub.add_parser("sweep", help="decide over an exact grid of a")
    for name in ("p", "q", "m", "n", "a_min", "a_max", "steps"):
        sp.add_argument(name)
    sp.add_argument("--out", help="CSV path (default: stdout)")
    sp.add_argument("--phase-image", help="write a P5 phase strip here")
    sp.add_argument("--jobs", type=int)
    sp.add_argument("--oracle-depth", type=int, help="also check each row against the sequence oracle")

    sp = sub.add_parser("render", help="render the attractor cloud")
    pair_args(sp)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--format", choices=["pgm", "svg"], default="pgm")
    sp.add_argument("--out", required=True)
    sp.add_argument("--size", type=int, dest="raster_size")
    sp.add_argument("--point-budget", type=int)

    for action in sub.choices.values():
        action._negative_number_matcher = _NEGATIVE
    parser._negative_number_matcher = _NEGATIVE
    return parser


def render_depth(pair: AffinePair, cfg: RunConfig) -> int:
    """Without --depth: the configured depth, lowered until the cloud fits the budget."""
    depth = cfg.depth
    while depth > 1 and (pair.m * pair.n) ** depth > cfg.point_budget:
        depth -= 1
    return depth


def _output_path(cfg: RunConfig, name: str) -> Path:
    """``name`` under the configured output directory, which is created on demand."""
    base = Path(cfg.output_dir)
    base.mkdir(parents=True, exist_ok=True)
    return base / name


def _emit(items, out) -> None:
    out.write(format_record(items))


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = _parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    flags = {k: getattr(ns, k, None) for k in ("depth", "point_budget", "raster_size", "jobs")}
    try:
        cfg = load_config(flags)
        return _dispatch(ns, cfg, out)
    except (InputError, ConfigError, InvalidPair, extremal.ExtremesUnproven, tiling.NotCandidate) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID
    except (geometry.CloudBudgetExceeded, tiling.BudgetExceeded) as exc:
        err.write(f"budget exceeded: {exc}\n")
        return EXIT_BUDGET
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID


def _dispatch(ns, cfg: RunConfig, out) -> int:
    cmd = ns.command
    if cmd == "decide":
        _emit(decide_items(_pair(ns)), out)
    elif cmd == "verify":
        _emit(verify_items(_pair(ns), cfg), out)
    elif cmd == "extremes":
        p, q, m = _int("p", ns.p), _int("q", ns.q), _int("m", ns.m)
        _emit(extremes_items(p, q, m, cfg.depth), out)
    elif cmd == "adjacency":
        _emit(adjacency_items(_pair(ns), cfg), out)
    elif cmd == "tile":
        _emit(tile_items(_pair(ns), _int("k_max", ns.k_max), cfg.point_budget), out)
    elif cmd == "sweep":
        p, q, m, n = (_int(k, getattr(ns, k)) for k in ("p", "q", "m", "n"))
        values = sweep_values(_rat("a_min", ns.a_min), _rat("a_max", ns.a_max), _int("steps", ns.steps))
        AffinePair(p, q, values[0], m, n)
        rows = sweep(p, q, m, n, values, cfg.jobs, ns.oracle_depth)
        text = write_csv(r.as_dict() for r in rows)
        if ns.out:
            path = _output_path(cfg, ns.out)
            path.write_text(text)
            _emit([("command", "sweep"), ("rows", len(rows)), ("csv", path)], out)
        else:
            out.write(text)
        if ns.phase_image:
            _output_path(cfg, ns.phase_image).write_bytes(phase_strip(rows))
    elif cmd == "render":
        pair = _pair(ns)
        depth = ns.depth if ns.depth is not None else render_depth(pair, cfg)
        path = geometry.render(pair, depth, ns.format, _output_path(cfg, ns.out), cfg.raster_size, cfg.point_budget)
        items = [("command", "render"), ("format", ns.format), ("depth", depth), ("size", cfg.raster_size)]
        _emit(items + [("path", path)], out)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
