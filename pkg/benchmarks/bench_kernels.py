"""Numba versus numpy timings for the polynomial kernels.

Kernel timings run in-process against both implementations. The end-to-end
timing runs a weak block constant in a fresh interpreter per backend, since
the backend is fixed at import by MUNTZLAB_BACKEND.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--points 200000]
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from muntzlab import kernels
from muntzlab._accel import HAVE_NUMBA

END_TO_END = """
import time
from muntzlab.exponents import ExponentSequence, validate_quasi_lacunary
from muntzlab.measures import jacobi
from muntzlab.operators import identity
from muntzlab.typeconst import InterpolationConfig, block_constant
from muntzlab._accel import BACKEND
seq = ExponentSequence([1, 1.3, 4, 5.2, 16, 20.8, 64, 83.2])
part = validate_quasi_lacunary(seq, [2, 2, 2, 2], 2.0)
cfg = InterpolationConfig(1.5, 4.0, 2.0, 1.0, 1.0, jacobi(1.0), part)
block_constant(identity(seq), 1, 2.0, cfg, "weak")  # warm the jit cache
t0 = time.perf_counter()
for k in range(4):
    block_constant(identity(seq), k, 2.0, cfg, "weak")
print(BACKEND, time.perf_counter() - t0)
"""


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_rows(points, repeat):
    rng = np.random.default_rng(0)
    lams = np.array([1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0])
    coefs = rng.standard_normal(lams.size)
    u = np.exp(rng.uniform(-12, 3, points))
    lo, hi = np.full(256, -12.0), np.full(256, 3.0)
    cases = [
        ("eval_u", lambda: kernels.eval_u_np(lams, coefs, u),
         lambda: kernels._eval_u_dispatch(lams, coefs, u)),
        ("log_abs_eval_u", lambda: kernels.log_abs_eval_u_np(lams, coefs, u),
         lambda: kernels._log_abs_dispatch(lams, coefs, u)),
        ("bisect_crossings", lambda: kernels.bisect_crossings_np(lams, coefs, lo, hi, 0.1, 60),
         lambda: kernels._bisect_dispatch(lams, coefs, lo, hi, 0.1, 60)),
    ]
    for name, f_np, f_nb in cases:
        t_np = best(f_np, repeat)
        if HAVE_NUMBA:
            f_nb()
            t_nb = best(f_nb, repeat)
            yield name, t_np, t_nb
        else:
            yield name, t_np, float("nan")


def end_to_end(backend):
    env = dict(os.environ, MUNTZLAB_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True,
                         text=True, check=True).stdout.split()
    return out[0], float(out[1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args(argv)

    print(f"{'kernel':<18}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, t_np, t_nb in kernel_rows(args.points, args.repeat):
        print(f"{name:<18}{t_np:12.4f}{t_nb:12.4f}{t_np / t_nb:10.1f}")
    if not args.skip_end_to_end:
        print("\nweak block constants, 4 blocks of size 2")
        for backend in ("numpy", "numba"):
            used, t = end_to_end(backend)
            print(f"  {backend:<6} (active: {used:<5}) {t:8.3f} s")


if __name__ == "__main__":
    main()
