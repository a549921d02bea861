"""Numba vs pure-numpy timings for the hot kernels.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Each workload runs once untimed per backend (compilation, caches), then the
best of N timed runs is reported.  Results of both backends are compared so
the table never shows a speedup bought with a wrong answer.
"""

import argparse
import time
from fractions import Fraction

import numpy as np

from selfaffine import _accel, geometry, tiling
from selfaffine.extremal import SequenceSpace, ValueFunctional, attainable, enumerate_extremes
from selfaffine.params import AffinePair, RationalInterval


def extremes():
    enc = enumerate_extremes(SequenceSpace.A(7, 12), ValueFunctional.affine(7, -6, 0, 1), 30, "max")
    return enc.interval


def attainability():
    # boundary target: the prefix search has to exhaust every straddling prefix
    f = ValueFunctional.affine(5, 3, 0, 1)
    res = attainable(SequenceSpace.B(5, 8), f, RationalInterval(Fraction(1, 3), 1), 13)
    return res.status


def cloud():
    c = geometry.attractor_cloud(AffinePair(4, 3, 2, 6, 2), 6, budget=3 * 10**6)
    return int(np.sum(c.xs)), int(np.sum(c.ys))


def separation():
    g = geometry.adjacency_graph(AffinePair(6, 5, 100, 10, 5), 8)
    return sorted(g.certified_edges())



def digit_set():
    ds = tiling.enumerate_digit_set(AffinePair(2, 6, 1, 2, 6), 5)
    return ds.distinct


WORKLOADS = {
    "extremes (depth 30)": extremes,
    "attainability (depth 13)": attainability,
    "attractor cloud (3M points)": cloud,
    "separation search (10x5 digits)": separation,
    "digit set D_k (k=5)": digit_set,
}


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = ["numpy"] + (["numba"] if _accel.numba_available() else [])
    rows = []
    for name, fn in WORKLOADS.items():
        timing, answers = {}, {}
        for b in backends:
            _accel.set_backend(b)
            answers[b] = fn()
            timing[b] = best_of(fn, args.repeat)
        agree = len({repr(v) for v in answers.values()}) == 1
        rows.append((name, timing, agree))
    print(f"{'workload':32s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}  agree")
    for name, timing, agree in rows:
        nb = timing.get("numba")
        speed = f"{timing['numpy'] / nb:8.1f}" if nb else "     n/a"
        nb_text = f"{nb:10.4f}" if nb else "       n/a"
        print(f"{name:32s} {timing['numpy']:10.4f} {nb_text} {speed}  {agree}")
    if not all(agree for _, _, agree in rows):
        raise SystemExit("backends disagree")


if __name__ == "__main__":
    main()
