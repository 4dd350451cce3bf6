"""Numba vs pure-numpy kernels, on identical inputs, plus an end-to-end run.

    python benchmarks/bench_kernels.py [--trials N] [--repeat R]

Kernel timings call both implementations directly in one process.  The
end-to-end timing runs ``outage_mc`` in a subprocess per backend, since the
backend is chosen from ``OVERLAYTC_DISABLE_NUMBA`` at import time.
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from overlaytc import _kernels
from overlaytc.channel import FadingModel
from overlaytc.rng import StreamKey
from overlaytc.scenario import sample_chunk

E2E = """
import json, time
from overlaytc import _kernels
from overlaytc.outage import outage_mc, invert_outage_to_density
from overlaytc.scenario import SystemParams, AD_HOC
p = SystemParams(lambda_a=2e-4)
outage_mc(p, AD_HOC, 4096, 0)  # warm-up / JIT
t = time.perf_counter(); est = outage_mc(p, AD_HOC, {trials}, 1); t_mc = time.perf_counter() - t
t = time.perf_counter(); lam = invert_outage_to_density(p, AD_HOC, "lambda_a", 0.05, {trials}, 1)
t_inv = time.perf_counter() - t
print(json.dumps(dict(backend=_kernels.backend(), outage_mc=t_mc, invert=t_inv, p_hat=est.p_hat, lam=lam)))
"""


def kernel_inputs(trials):
    g = StreamKey(0, "bench").generator()
    signal, counts, r2, gains = sample_chunk(g, trials, 2e-4, 250.0, 5.0, FadingModel.exponential(), 4.0)
    marks = g.random(r2.size)
    return counts, marks, r2, gains, signal


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAS_NUMBA:
        sys.exit("numba is not installed; nothing to compare")

    counts, marks, r2, gains, signal = kernel_inputs(args.trials)
    print(f"{args.trials} trials, {r2.size} interferers")
    sums = (counts, r2, gains, 2.0)
    crit = (counts, marks, r2, gains, signal, 3.0, 2.0, 2e-4)
    _kernels.interference_sums_numba(*sums)  # compile
    _kernels.critical_densities_numba(*crit)
    # summation order differs, so sums agree to rounding only
    np.testing.assert_allclose(
        _kernels.interference_sums_numba(*sums), _kernels.interference_sums_numpy(*sums), rtol=1e-13
    )
    assert np.array_equal(_kernels.critical_densities_numba(*crit), _kernels.critical_densities_numpy(*crit))

    print(f"{'kernel':<22}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, a in (("interference_sums", sums), ("critical_densities", crit)):
        t_np = best(lambda: getattr(_kernels, f"{name}_numpy")(*a), args.repeat)
        t_nb = best(lambda: getattr(_kernels, f"{name}_numba")(*a), args.repeat)
        print(f"{name:<22}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}")

    print(f"\n{'end to end':<22}{'outage_mc [s]':>15}{'invert [s]':>12}  results")
    for disable in ("1", "0"):
        env = dict(os.environ, OVERLAYTC_DISABLE_NUMBA=disable)
        out = subprocess.run(
            [sys.executable, "-c", E2E.format(trials=args.trials)],
            env=env, check=True, capture_output=True, text=True,
        ).stdout
        r = json.loads(out.strip().splitlines()[-1])
        print(f"{r['backend']:<22}{r['outage_mc']:>15.3f}{r['invert']:>12.3f}  p_hat={r['p_hat']!r} lam={r['lam']!r}")


if __name__ == "__main__":
    main()
