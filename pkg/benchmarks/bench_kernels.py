"""Compare the numba and numpy kernel backends on realistic inputs.

    python benchmarks/bench_kernels.py [--repeat N]

Inputs are metric jets of the S2 x R warped chart (m = 4) at sample points
and a radial Dirichlet operator at several grid sizes.  First calls are
timed separately so JIT compilation does not pollute the steady state.
"""

import argparse
import time

import numpy as np

from einstype.constructions import corpus_entry
from einstype.kernels import backend
from einstype.spectral import RadialModel, radial_operator


def _timeit(fn, args_list, repeat):
    t0 = time.perf_counter()
    fn(*args_list[0])
    first = time.perf_counter() - t0
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for a in args_list:
            fn(*a)
        best = min(best, (time.perf_counter() - t0) / len(args_list))
    return first, best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--points", type=int, default=200)
    args = ap.parse_args()

    chart, _ = corpus_entry("warp4_s2r").build()
    jets = []
    for p in chart.sample_points(args.points, seed=0):
        g, dg, d2g, d3g = chart.metric_jet_at(p, 3)
        jets.append((g, np.linalg.inv(g), dg, d2g, d3g))

    np_mod, nb_mod = backend("numpy"), backend("numba")
    ref = np_mod.curvature_jet(*jets[0])
    got = nb_mod.curvature_jet(*jets[0])
    diff = max(float(np.abs(a - b).max()) for a, b in zip(ref, got))

    print(f"curvature_jet, m = 4, {len(jets)} points (max backend difference {diff:.1e})")
    for name, mod in (("numpy", np_mod), ("numba", nb_mod)):
        first, best = _timeit(mod.curvature_jet, jets, args.repeat)
        print(f"  {name:<6} first call {first * 1e3:8.2f} ms   steady {best * 1e6:8.1f} us/point")

    model = RadialModel.flat(3)
    for n in (1000, 4000, 16000):
        d, e = radial_operator(model, 1.0, n)
        print(f"tridiag_min_eig, n = {n}")
        vals = {}
        for name, mod in (("numpy", np_mod), ("numba", nb_mod)):
            first, best = _timeit(mod.tridiag_min_eig, [(d, e)], args.repeat)
            vals[name] = mod.tridiag_min_eig(d, e)
            print(f"  {name:<6} first call {first * 1e3:8.2f} ms   steady {best * 1e3:8.2f} ms")
        print(f"  eigenvalues agree to {abs(vals['numpy'] - vals['numba']):.1e}")


if __name__ == "__main__":
    main()
