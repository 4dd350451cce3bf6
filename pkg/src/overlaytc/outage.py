"""Outage probability: analytic forms, Monte Carlo estimation and inversion."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammainc

from . import scenario
from .channel import FadingModel, frac_moment_neg, frac_moment_pos
from .errors import InfeasibleError, IntegrationError, InvalidParameterError
from .rng import StreamKey, map_chunks
from .scenario import ReceiverKind, SystemParams

log = logging.getLogger(__name__)

__all__ = [
    "OutageEstimate",
    "KappaMoment",
    "Lemma1Bounds",
    "OutageCurve",
    "kappa_moment",
    "outage_asymptotic",
    "lemma1_bounds",
    "exact_rayleigh_outage",
    "outage_mc",
    "outage_curve",
    "invert_outage_to_density",
]

Z95 = 1.96
MIN_TRIALS = 1000
MIN_EVENTS = 50


def ci_half_width(p_hat: float, trials: int) -> float:
    return Z95 * math.sqrt(p_hat * (1.0 - p_hat) / trials)


@dataclass(frozen=True)
class OutageEstimate:
    """Monte Carlo outage probability with a 95% normal-approximation CI."""

    p_hat: float
    trials: int
    ci_half_width: float
    seed: int
    outages: int
    reportable: bool = True

    @classmethod
    def from_counts(cls, outages: int, trials: int, seed: int, target: float) -> "OutageEstimate":
        p = outages / trials
        return cls(
            p_hat=p,
            trials=trials,
            ci_half_width=ci_half_width(p, trials),
            seed=seed,
            outages=outages,
            reportable=trials * max(p, target) >= MIN_EVENTS,
        )

    @property
    def interval(self) -> tuple[float, float]:
        return self.p_hat - self.ci_half_width, self.p_hat + self.ci_half_width


@dataclass(frozen=True)
class KappaMoment:
    """Mean of ``kappa = pi * E[G**delta] * X**-delta * l**2`` over the data fading ``X``."""

    value: float

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class Lemma1Bounds:
    lower: float
    upper: float
    #: Probability mass of data-fading states where the upper bound's
    #: correction term is clamped (the bound degenerates to 1 there).
    clamp_mass: float = 0.0

    @property
    def clamp_active(self) -> bool:
        return self.clamp_mass > 0.0


def kappa_moment(
    link_distance: float,
    data_fading: FadingModel,
    interference_fading: FadingModel,
    delta: float,
) -> KappaMoment:
    value = (
        math.pi
        * frac_moment_pos(interference_fading, delta)
        * frac_moment_neg(data_fading, delta)
        * link_distance**2
    )
    return KappaMoment(value)


def _receiver_kappa(params: SystemParams, receiver: ReceiverKind) -> float:
    link_distance, fading = scenario.data_link(params, receiver)
    return kappa_moment(link_distance, fading, params.interference_fading, params.delta).value


def outage_asymptotic(params: SystemParams, receiver: ReceiverKind) -> float:
    """First-order small-outage approximation ``E[kappa] * density * theta**delta``."""
    density = scenario.interferer_density(params, receiver)
    if density == 0:
        return 0.0
    return _receiver_kappa(params, receiver) * density * params.sir_threshold**params.delta


def exact_rayleigh_outage(density: float, link_distance: float, delta: float, theta: float) -> float:
    """Closed-form outage with Rayleigh data link and Rayleigh interferers.

    ``1 - exp(-density * pi * Gamma(1+delta) * Gamma(1-delta) * l**2 * theta**delta)``
    """
    if density == 0:
        return 0.0
    rate = density * math.pi * math.gamma(1 + delta) * math.gamma(1 - delta)
    return -math.expm1(-rate * link_distance**2 * theta**delta)


# --------------------------------------------------------------------------
# analytic outage bounds
# --------------------------------------------------------------------------

_NODES = 64


def _gamma_expectation(
    h: Callable[[np.ndarray], np.ndarray],
    shape: int,
    w_lo: float,
    panels: int,
) -> float:
    """``E[h(W); W > w_lo]`` for ``W ~ Gamma(shape, 1)``.

    Composite 64-node Gauss-Legendre in ``s = log w``.  In log coordinates the
    integrand is smooth even when ``h`` switches sharply near ``w = 0``.
    """
    s_lo = math.log(w_lo)
    s_hi = math.log(60.0 + 3.0 * shape)
    if s_hi <= s_lo:
        return 0.0
    x, wts = leggauss(_NODES)
    edges = np.linspace(s_lo, s_hi, panels + 1)
    a, b = edges[:-1, None], edges[1:, None]
    s = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    weights = (0.5 * (b - a) * wts).ravel()
    w = np.exp(s)
    log_density = shape * s - w - math.lgamma(shape)
    return float(np.sum(weights * np.exp(log_density) * h(w)))


def _checked_expectation(h, shape: int, w_lo: float) -> float:
    coarse = _gamma_expectation(h, shape, w_lo, panels=8)
    fine = _gamma_expectation(h, shape, w_lo, panels=16)
    if not math.isfinite(fine) or abs(fine - coarse) > 1e-10 + 1e-7 * abs(fine):
        raise IntegrationError(
            f"expectation over Gamma({shape}) did not converge: {coarse!r} vs {fine!r}"
        )
    return fine


def lemma1_bounds(
    density: float,
    link_distance: float,
    data_fading: FadingModel,
    interference_fading: FadingModel,
    delta: float,
    theta: float,
) -> Lemma1Bounds:
    """Lower and upper bounds on outage for a PPP of interferers of ``density``.

    With ``x = pi E[G^delta] W^-delta l^2 density theta^delta``::

        lower = 1 - E[exp(-x)]
        upper = 1 - E[(1 - a x / (1 - b x)**2)^+ exp(-x)],
                a = delta / (2 - delta),  b = delta / (1 - delta)

    The upper bound comes from a Chebyshev argument that needs ``b x < 1``;
    outside that range, and wherever the bracket is negative, the success
    term is taken as zero.
    """
    if not 0 < delta < 1:
        raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")
    if density < 0:
        raise InvalidParameterError("density must be >= 0")
    if density == 0:
        return Lemma1Bounds(0.0, 0.0, 0.0)
    L = data_fading.shape
    c = (
        math.pi
        * frac_moment_pos(interference_fading, delta)
        * link_distance**2
        * density
        * theta**delta
    )
    w_floor = 1e-18 ** (1.0 / L)

    def lower_h(w):
        return -np.expm1(-c * w**-delta)

    lower = gammainc(L, w_floor) + _checked_expectation(lower_h, L, w_floor)

    a = delta / (2.0 - delta)
    b = delta / (1.0 - delta)
    # smallest x with a x = (1 - b x)^2; the success term is zero for x >= x_clamp
    x_clamp = 2.0 / (2.0 * b + a + math.sqrt(a * (4.0 * b + a)))
    w_clamp = (c / x_clamp) ** (1.0 / delta)
    clamp_mass = float(gammainc(L, w_clamp))

    def upper_h(w):
        x = c * w**-delta
        q = a * x / (1.0 - b * x) ** 2
        return -np.expm1(-x) + q * np.exp(-x)

    w_start = max(w_clamp, w_floor)
    upper = float(gammainc(L, w_start)) + _checked_expectation(upper_h, L, w_start)
    return Lemma1Bounds(float(min(lower, 1.0)), float(min(upper, 1.0)), clamp_mass)


# --------------------------------------------------------------------------
# Monte Carlo
# --------------------------------------------------------------------------


def outage_mc(
    params: SystemParams,
    receiver: ReceiverKind,
    trials: int,
    seed: int,
    *,
    threads: int | None = None,
    window_radius: float | None = None,
    purpose: str = "sir",
) -> OutageEstimate:
    """Fraction of independent typical-receiver trials with ``sir < theta``.

    Trials are split into fixed-size chunks, each with its own substream of
    ``seed``; the result is identical for any ``threads``.
    """
    if trials < MIN_TRIALS:
        raise InvalidParameterError(f"need at least {MIN_TRIALS} trials, got {trials}")
    target = params.outage_target
    density = scenario.interferer_density(params, receiver)
    if density == 0:
        return OutageEstimate.from_counts(0, trials, seed, target)
    link_distance, fading = scenario.data_link(params, receiver)
    radius = window_radius or scenario.scenario_radius(params, receiver, density)
    alpha, theta = params.pathloss_exponent, params.sir_threshold
    key = StreamKey(seed, purpose)

    def run(index, start, stop):
        g = key.child(index).generator()
        return scenario.chunk_outages(
            g, stop - start, density, radius, link_distance, fading, alpha, theta
        )

    outages = sum(map_chunks(run, trials, threads))
    est = OutageEstimate.from_counts(outages, trials, seed, target)
    if not est.reportable:
        log.warning(
            "low-confidence outage estimate: %d trials x max(p_hat, target) < %d",
            trials,
            MIN_EVENTS,
        )
    return est


@dataclass(frozen=True)
class OutageCurve:
    """Coupled Monte Carlo outage estimates for every density up to ``rho_max``.

    All densities share one sample of interferer fields (thinned from
    ``rho_max``), so ``p_hat`` is a non-decreasing step function of density.
    """

    rho_max: float
    radius: float
    trials: int
    seed: int
    critical: np.ndarray  # sorted per-trial outage-onset densities

    def outages(self, density: float) -> int:
        if density > self.rho_max * (1 + 1e-12):
            raise InvalidParameterError(f"density {density} exceeds curve range {self.rho_max}")
        return int(np.searchsorted(self.critical, density, side="left"))

    def p_hat(self, density: float) -> float:
        return self.outages(density) / self.trials

    def estimate(self, density: float, target: float) -> OutageEstimate:
        return OutageEstimate.from_counts(self.outages(density), self.trials, self.seed, target)


def outage_curve(
    params: SystemParams,
    receiver: ReceiverKind,
    rho_max: float,
    trials: int,
    seed: int,
    *,
    threads: int | None = None,
    purpose: str = "curve",
) -> OutageCurve:
    """Sample an :class:`OutageCurve` over interferer densities ``[0, rho_max]``."""
    if trials < MIN_TRIALS:
        raise InvalidParameterError(f"need at least {MIN_TRIALS} trials, got {trials}")
    if not (math.isfinite(rho_max) and rho_max > 0):
        raise InvalidParameterError(f"rho_max must be finite and > 0, got {rho_max}")
    link_distance, fading = scenario.data_link(params, receiver)
    radius = scenario.scenario_radius(params, receiver, rho_max)
    alpha, theta = params.pathloss_exponent, params.sir_threshold
    key = StreamKey(seed, purpose)

    def run(index, start, stop):
        g = key.child(index).generator()
        return scenario.chunk_critical_densities(
            g, stop - start, rho_max, radius, link_distance, fading, alpha, theta
        )

    critical = np.sort(np.concatenate(map_chunks(run, trials, threads)))
    critical.setflags(write=False)
    return OutageCurve(rho_max, radius, trials, seed, critical)


FREE_VARIABLES = ("lambda_a", "lambda_u")


def invert_outage_to_density(
    params: SystemParams,
    receiver: ReceiverKind,
    free_variable: str,
    target: float | None = None,
    trials: int = 200_000,
    seed: int = 0,
    *,
    threads: int | None = None,
    rtol: float = 1e-9,
) -> float:
    """Largest value of ``free_variable`` whose simulated outage stays <= ``target``.

    The other density is held at its value in ``params``.  Bisection runs on
    a coupled outage curve, starting from ``[0, 4 x first-order inverse]`` and
    doubling the upper end while it is still feasible.  Returns ``inf`` when
    the free variable does not affect this receiver and the target is met.
    """
    if free_variable not in FREE_VARIABLES:
        raise InvalidParameterError(f"free_variable must be one of {FREE_VARIABLES}")
    target = params.outage_target if target is None else target
    if not 0 < target < 1:
        raise InvalidParameterError(f"target must be in (0, 1), got {target}")

    base = params.replace(**{free_variable: 0.0})
    c_u, c_a = scenario.density_coefficients(params, receiver)
    coef = c_a if free_variable == "lambda_a" else c_u
    rho0 = scenario.interferer_density(base, receiver)

    if coef == 0:
        est = outage_mc(base, receiver, trials, seed, threads=threads, purpose="invert")
        if est.p_hat > target:
            raise InfeasibleError(
                f"outage {est.p_hat:.4g} exceeds target {target} independently of {free_variable}"
            )
        return math.inf

    rho_first_order = target / (_receiver_kappa(params, receiver) * params.sir_threshold**params.delta)
    guess = (rho_first_order - rho0) / coef
    hi = 4.0 * (guess if guess > 0 else rho_first_order / coef)

    for _ in range(40):
        curve = outage_curve(
            params, receiver, rho0 + coef * hi, trials, seed, threads=threads, purpose="invert"
        )
        if curve.p_hat(rho0) > target:
            raise InfeasibleError(
                f"outage {curve.p_hat(rho0):.4g} at {free_variable}=0 already exceeds target {target}"
            )
        if curve.p_hat(curve.rho_max) > target:
            break
        hi *= 2.0
    else:  # pragma: no cover
        raise InfeasibleError("could not bracket the outage target")

    lo = 0.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if curve.p_hat(rho0 + coef * mid) <= target:
            lo = mid
        else:
            hi = mid

    est = curve.estimate(rho0 + coef * lo, target)
    if abs(est.p_hat - target) > max(est.ci_half_width, 0.05 * target):
        log.warning(
            "inverted %s=%.6g has p_hat=%.5g, further than tolerance from target %.5g",
            free_variable,
            lo,
            est.p_hat,
            target,
        )
    return lo
