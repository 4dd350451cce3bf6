"""Hot inner loops of the Monte Carlo engine.

Two kernels, each with a numba implementation and a pure-numpy one:

``interference_sums``
    Per-trial sum of ``G * r**-alpha`` over ragged interferer segments.
``critical_densities``
    Per-trial interferer density at which the trial first goes into outage,
    when interferers are admitted in increasing order of a uniform thinning
    mark.  Used to evaluate a whole outage-vs-density curve from one sample.

Set ``OVERLAYTC_DISABLE_NUMBA=1`` to force the numpy path.  Both paths add
contributions in the same order, so they agree bit-for-bit whenever the
underlying ``pow`` calls do.  ``alpha = 4`` skips ``pow`` altogether.
"""
from __future__ import annotations

import os

import numpy as np

DISABLE_ENV = "OVERLAYTC_DISABLE_NUMBA"

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get(DISABLE_ENV, "").strip().lower() not in {
    "1",
    "true",
    "yes",
}


def _segment_ids(counts: np.ndarray) -> np.ndarray:
    return np.repeat(np.arange(counts.size), counts)


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------


def _pathloss_numpy(r2, half_alpha):
    if half_alpha == 2.0:
        return 1.0 / (r2 * r2)
    return np.power(r2, -half_alpha)


def interference_sums_numpy(counts, r2, gains, half_alpha):
    contrib = gains * _pathloss_numpy(r2, half_alpha)
    return np.bincount(_segment_ids(counts), weights=contrib, minlength=counts.size)


def critical_densities_numpy(counts, marks, r2, gains, signal, theta, half_alpha, rho_max):
    n = counts.size
    out = np.full(n, np.inf)
    if r2.size == 0:
        return out
    seg = _segment_ids(counts)
    order = np.lexsort((marks, seg))
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    col = np.arange(r2.size) - starts[seg]
    width = int(counts.max())

    # padded rows keep the running sum strictly sequential per trial
    contrib = np.zeros((n, width))
    contrib[seg, col] = gains[order] * _pathloss_numpy(r2[order], half_alpha)
    mark_rows = np.zeros((n, width))
    mark_rows[seg, col] = marks[order]
    running = np.cumsum(contrib, axis=1)
    crossed = theta * running > signal[:, None]
    hit = crossed.any(axis=1)
    first = np.argmax(crossed, axis=1)
    rows = np.flatnonzero(hit)
    out[rows] = mark_rows[rows, first[rows]] * rho_max
    return out


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True, nogil=True, inline="always")
    def _pathloss_numba(x, half_alpha):
        if half_alpha == 2.0:
            return 1.0 / (x * x)
        return x ** (-half_alpha)

    @njit(cache=True, nogil=True)
    def interference_sums_numba(counts, r2, gains, half_alpha):
        n = counts.size
        out = np.empty(n)
        j = 0
        for i in range(n):
            acc = 0.0
            for _ in range(counts[i]):
                acc += gains[j] * _pathloss_numba(r2[j], half_alpha)
                j += 1
            out[i] = acc
        return out

    @njit(cache=True, nogil=True)
    def critical_densities_numba(counts, marks, r2, gains, signal, theta, half_alpha, rho_max):
        n = counts.size
        out = np.full(n, np.inf)
        start = 0
        for i in range(n):
            c = counts[i]
            if c > 0:
                order = np.argsort(marks[start:start + c], kind="mergesort")
                acc = 0.0
                for k in range(c):
                    j = start + order[k]
                    acc += gains[j] * _pathloss_numba(r2[j], half_alpha)
                    if theta * acc > signal[i]:
                        out[i] = marks[j] * rho_max
                        break
            start += c
        return out

else:  # pragma: no cover
    interference_sums_numba = interference_sums_numpy
    critical_densities_numba = critical_densities_numpy


def interference_sums(counts, r2, gains, half_alpha):
    """Sum ``gains * r2**-half_alpha`` over consecutive segments of ``counts``."""
    if USE_NUMBA:
        return interference_sums_numba(counts, r2, gains, float(half_alpha))
    return interference_sums_numpy(counts, r2, gains, float(half_alpha))


def critical_densities(counts, marks, r2, gains, signal, theta, half_alpha, rho_max):
    """Smallest density at which each trial is in outage (``inf`` if never).

    Within a trial, interferer ``j`` is present at density ``rho`` iff
    ``marks[j] < rho / rho_max``; the trial is in outage once
    ``theta * interference > signal``.
    """
    args = (counts, marks, r2, gains, signal, float(theta), float(half_alpha), float(rho_max))
    if USE_NUMBA:
        return critical_densities_numba(*args)
    return critical_densities_numpy(*args)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
