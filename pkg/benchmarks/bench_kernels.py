"""Benchmark the compiled grid kernels against the numpy fallback.

Run:  python3 benchmarks/bench_kernels.py [--repeat N]

Covers the two hot paths: basis-state evaluation for density sweeps and the
Wigner phase-space grid (uniform p-grid, which the compiled core accelerates
with a per-node phase recurrence).
"""

import argparse
import time

import numpy as np

from susyosc import coherent
from susyosc import _kernels as kernels
from susyosc._kernels import _fallback

try:
    from susyosc._kernels import _core
except ImportError:
    _core = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def report(label, numpy_s, cython_s):
    if cython_s is None:
        print(f"{label:<34} numpy {numpy_s * 1e3:9.2f} ms   cython (not built)")
    else:
        print(f"{label:<34} numpy {numpy_s * 1e3:9.2f} ms   "
              f"cython {cython_s * 1e3:9.2f} ms   speedup {numpy_s / cython_s:5.2f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3,
                        help="repetitions per case; best time is reported")
    args = parser.parse_args()

    state = coherent.make_coherent(1e5)
    herm, resid, den = kernels.basis_arrays(state.K)
    B, R, den_p = kernels.packet_arrays(state, 0.07)
    nodes, weights = kernels.gauss_legendre_base(64)

    print(f"active backend: {kernels.backend_name()}")
    print(f"packet size: K={state.K}, hermite width {herm.shape[1]}")
    print()

    xs_dense = np.linspace(0.0, 14.0, 20000)
    report("eval_states 16 states x 20k pts",
           best_of(lambda: _fallback.eval_states(herm, resid, den, xs_dense),
                   args.repeat),
           None if _core is None else
           best_of(lambda: _core.eval_states(herm, resid, den, xs_dense),
                   args.repeat))

    report("eval_packet 20k pts",
           best_of(lambda: _fallback.eval_packet(B, R, den_p, xs_dense),
                   args.repeat),
           None if _core is None else
           best_of(lambda: _core.eval_packet(B, R, den_p, xs_dense),
                   args.repeat))

    state_w = coherent.make_coherent(500.0)
    Bw, Rw, den_w = kernels.packet_arrays(state_w)
    xg = np.linspace(0.0, 6.0, 121)
    pg = np.linspace(-6.0, 6.0, 121)
    report("wigner_grid 121 x 121",
           best_of(lambda: _fallback.wigner_grid(Bw, Rw, den_w, xg, pg,
                                                 nodes, weights), args.repeat),
           None if _core is None else
           best_of(lambda: _core.wigner_grid(Bw, Rw, den_w, xg, pg,
                                             nodes, weights), args.repeat))

    pg_wide = np.linspace(-40.0, 40.0, 161)
    report("wigner_grid 121 x 161 wide p",
           best_of(lambda: _fallback.wigner_grid(Bw, Rw, den_w, xg, pg_wide,
                                                 nodes, weights), args.repeat),
           None if _core is None else
           best_of(lambda: _core.wigner_grid(Bw, Rw, den_w, xg, pg_wide,
                                             nodes, weights), args.repeat))


if __name__ == "__main__":
    main()
