"""Benchmark the numba-jitted kernels against their pure-numpy fallbacks.

Usage:
    python benchmarks/bench_kernels.py

The same workloads run on both paths; the script reports wall times, the
speedup, and checks that the two paths agree numerically. Setting
NETREDUCE_PURE_NUMPY=1 in the package environment selects the numpy path
package-wide; this script imports both implementations directly and does
not depend on the flag.
"""

import time

import numpy as np

from netreduce import _kernels
from netreduce.cli import main  # noqa: F401  (ensures package import side effects)
from netreduce.graphs import WsbmParams, laplacian, sample_adjacency
from netreduce.simulate import close_loop
from netreduce.spectral import bottom_k_eig
from netreduce.transfer import RationalTF, sample_swing_nodes
from netreduce.transfer import NetworkModel


def _timeit(fn, repeat=3):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_rk4():
    params = WsbmParams(
        (20, 40, 20),
        [[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]],
        [[20.0, 0.4, 0.8], [0.4, 20.0, 0.7], [0.8, 0.7, 20.0]],
    )
    lap = laplacian(sample_adjacency(params, 0))
    nodes, _, _ = sample_swing_nodes(params.n, np.random.default_rng(0))
    model = NetworkModel(nodes=nodes, coupling=RationalTF((1.0,), (0.0, 1.0)), laplacian=lap)
    loop = close_loop(model.nodes, model.coupling, model.laplacian)
    a = np.ascontiguousarray(loop.a)
    b = np.ascontiguousarray(loop.b[:, 1])
    c = np.ascontiguousarray(loop.c)
    d_u = np.ascontiguousarray(loop.d[:, 1])
    steps = 30000

    if _kernels.USING_NUMBA:
        _kernels.rk4_lti(a, b, c, d_u, 1e-3, 10, 1e12)  # warm the JIT cache
    t_fast, (out_fast, _) = _timeit(lambda: _kernels.rk4_lti(a, b, c, d_u, 1e-3, steps, 1e12))
    t_np, (out_np, _) = _timeit(lambda: _kernels.rk4_lti_numpy(a, b, c, d_u, 1e-3, steps, 1e12))
    agree = np.allclose(out_fast, out_np, rtol=1e-10, atol=1e-13)
    return ("rk4_lti (160 states, 30k steps)", t_fast, t_np, agree)


def bench_lloyd():
    params = WsbmParams(
        (160, 320, 160),
        [[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]],
        [[20.0, 0.4, 0.8], [0.4, 20.0, 0.7], [0.8, 0.7, 20.0]],
    )
    lap = laplacian(sample_adjacency(params, 0))
    x = bottom_k_eig(lap, 3).v_k
    rng = np.random.default_rng(0)
    inits = [x[rng.choice(x.shape[0], 3, replace=False)].copy() for _ in range(50)]

    def run(fn):
        total = 0.0
        for init in inits:
            _, _, wcss, _ = fn(x, init.copy(), 300)
            total += wcss
        return total

    if _kernels.USING_NUMBA:
        run(_kernels.lloyd)  # warm the JIT cache
    t_fast, w_fast = _timeit(lambda: run(_kernels.lloyd))
    t_np, w_np = _timeit(lambda: run(_kernels.lloyd_numpy))
    agree = abs(w_fast - w_np) <= 1e-9 * (1 + abs(w_np))
    return ("lloyd (640 rows, 50 restarts)", t_fast, t_np, agree)


def main_bench():
    rows = [bench_rk4(), bench_lloyd()]
    path = "numba" if _kernels.USING_NUMBA else "numpy (numba unavailable or disabled)"
    print(f"kernel path under test: {path}")
    print(f"{'kernel':38s} {'jit/active':>12s} {'numpy':>12s} {'speedup':>9s} {'agree':>6s}")
    for name, t_fast, t_np, agree in rows:
        print(f"{name:38s} {t_fast:12.4f} {t_np:12.4f} {t_np / t_fast:9.2f} {str(agree):>6s}")
    if not all(r[3] for r in rows):
        raise SystemExit("kernel paths disagree")


if __name__ == "__main__":
    main_bench()
