"""Typical-receiver interference scenarios for the two overlay methods.

The typical receiver sits at the origin.  Its own transmitter is placed at
the data-link distance and is never part of the interferer process; the
interferers (other-cell mobile users and co-channel ad hoc transmitters) form
one homogeneous PPP whose density depends on the overlay method and receiver
kind.  Only distances to the origin matter, so batched sampling stores squared
radii and skips the angle.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channel import FadingModel, pathloss, sample_gain
from .errors import InvalidParameterError, NoChannelError
from .geometry import DiscWindow, sample_ppp, truncation_radius
from .rng import RngLike, as_generator

__all__ = [
    "Overlay",
    "Receiver",
    "ReceiverKind",
    "SystemParams",
    "SirSample",
    "BASE_STATION",
    "AD_HOC",
    "interferer_density",
    "density_coefficients",
    "data_link",
    "scenario_radius",
    "sample_sir",
]

#: Interferers closer than this (metres) are redrawn to avoid overflow.
MIN_DISTANCE = 1e-9
#: Default fraction of the threshold-scaled signal allowed in the truncated tail.
BIAS_TOLERANCE = 1e-3


class Overlay(enum.Enum):
    BLIND = "blind"
    EXCLUSION = "exclusion"


class Receiver(enum.Enum):
    BASE_STATION = "base_station"
    AD_HOC = "ad_hoc"


@dataclass(frozen=True)
class ReceiverKind:
    """Which typical receiver is observed.

    ``in_cellular_set`` only matters for an ad hoc receiver under blind
    transmission: ``True`` means its sub-channel is also used by mobile users.
    ``None`` resolves to the worst case for the overlay method.
    """

    kind: Receiver
    in_cellular_set: bool | None = None

    def resolve(self, overlay: Overlay) -> bool:
        if self.kind is Receiver.BASE_STATION:
            return True
        if overlay is Overlay.EXCLUSION:
            if self.in_cellular_set:
                raise InvalidParameterError(
                    "under frequency mutual exclusion ad hoc nodes never use cellular sub-channels"
                )
            return False
        return True if self.in_cellular_set is None else bool(self.in_cellular_set)

    @property
    def label(self) -> str:
        if self.kind is Receiver.BASE_STATION:
            return "base_station"
        if self.in_cellular_set is None:
            return "ad_hoc"
        return "ad_hoc_in_cellular" if self.in_cellular_set else "ad_hoc_free"


BASE_STATION = ReceiverKind(Receiver.BASE_STATION)
AD_HOC = ReceiverKind(Receiver.AD_HOC)


@dataclass(frozen=True)
class SystemParams:
    """Parameters of the overlaid cellular-uplink and ad hoc networks.

    Densities are per m^2 and distances in metres.  ``num_cellular_subchannels``
    (``M``) of the ``num_subchannels`` (``K``) sub-channels carry mobile users;
    each base station serves ``M`` users, so the base-station density is
    ``lambda_u / M``.
    """

    lambda_a: float = 0.0
    lambda_u: float = 0.0
    num_subchannels: int = 1
    num_cellular_subchannels: int = 1
    ad_hoc_distance: float = 5.0
    cellular_distance: float = 5.0
    pathloss_exponent: float = 4.0
    sir_threshold: float = 3.0
    outage_target: float = 0.01
    diversity_adhoc: int = 1
    diversity_cellular: int = 1
    overlay: Overlay = Overlay.BLIND

    def __post_init__(self):
        if isinstance(self.overlay, str):
            object.__setattr__(self, "overlay", Overlay(self.overlay))
        for name in ("lambda_a", "lambda_u"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InvalidParameterError(f"{name} must be finite and >= 0, got {v}")
        for name in ("ad_hoc_distance", "cellular_distance", "sir_threshold"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidParameterError(f"{name} must be finite and > 0, got {v}")
        for name in ("num_subchannels", "num_cellular_subchannels", "diversity_adhoc", "diversity_cellular"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise InvalidParameterError(f"{name} must be an integer >= 1, got {v}")
            object.__setattr__(self, name, int(v))
        if self.num_cellular_subchannels > self.num_subchannels:
            raise InvalidParameterError("num_cellular_subchannels cannot exceed num_subchannels")
        if not (math.isfinite(self.pathloss_exponent) and self.pathloss_exponent > 2):
            raise InvalidParameterError(
                f"pathloss_exponent must exceed 2, got {self.pathloss_exponent}"
            )
        if not 0 < self.outage_target < 1:
            raise InvalidParameterError(f"outage_target must be in (0, 1), got {self.outage_target}")

    @property
    def lambda_b(self) -> float:
        return self.lambda_u / self.num_cellular_subchannels

    @property
    def delta(self) -> float:
        return 2.0 / self.pathloss_exponent

    @property
    def channel_fraction(self) -> float:
        return self.num_cellular_subchannels / self.num_subchannels

    @property
    def adhoc_fading(self) -> FadingModel:
        return FadingModel.gamma(self.diversity_adhoc)

    @property
    def cellular_fading(self) -> FadingModel:
        return FadingModel.gamma(self.diversity_cellular)

    @property
    def interference_fading(self) -> FadingModel:
        return FadingModel.exponential()

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class SirSample:
    signal: float
    interference: float

    @property
    def sir(self) -> float:
        if self.interference == 0:
            return math.inf
        return self.signal / self.interference

    def in_outage(self, threshold: float) -> bool:
        return threshold * self.interference > self.signal


def density_coefficients(params: SystemParams, receiver: ReceiverKind) -> tuple[float, float]:
    """Weights ``(c_u, c_a)`` with interferer density ``c_u*lambda_u + c_a*lambda_a``."""
    K, M = params.num_subchannels, params.num_cellular_subchannels
    in_set = receiver.resolve(params.overlay)
    if params.overlay is Overlay.BLIND:
        return (1.0 / M if in_set else 0.0, 1.0 / K)
    if receiver.kind is Receiver.BASE_STATION:
        return (1.0 / M, 0.0)
    if K == M:
        raise NoChannelError("no sub-channels are left for ad hoc nodes under mutual exclusion")
    return (0.0, 1.0 / (K - M))


def interferer_density(params: SystemParams, receiver: ReceiverKind) -> float:
    """Density of the interferer PPP seen by the typical receiver on its sub-channel."""
    c_u, c_a = density_coefficients(params, receiver)
    return c_u * params.lambda_u + c_a * params.lambda_a


def data_link(params: SystemParams, receiver: ReceiverKind) -> tuple[float, FadingModel]:
    """Distance and fading model of the receiver's own data link."""
    if receiver.kind is Receiver.BASE_STATION:
        return params.cellular_distance, params.cellular_fading
    return params.ad_hoc_distance, params.adhoc_fading


def scenario_radius(params: SystemParams, receiver: ReceiverKind, density: float | None = None) -> float:
    """Truncation radius for the receiver's interferer field."""
    if density is None:
        density = interferer_density(params, receiver)
    link_distance, _ = data_link(params, receiver)
    return truncation_radius(
        density, params.pathloss_exponent, link_distance, params.sir_threshold, BIAS_TOLERANCE
    )


def sample_sir(
    params: SystemParams,
    receiver: ReceiverKind,
    stream: RngLike,
    window_radius: float | None = None,
) -> SirSample:
    """Draw one SIR realisation at the typical receiver."""
    g = as_generator(stream)
    link_distance, fading = data_link(params, receiver)
    signal = float(sample_gain(fading, g)) * pathloss(link_distance, params.pathloss_exponent)
    density = interferer_density(params, receiver)
    if density == 0:
        return SirSample(signal, 0.0)
    radius = window_radius or scenario_radius(params, receiver, density)
    pattern = sample_ppp(density, DiscWindow(radius), g)
    dist = pattern.distances.copy()
    while np.any(close := dist < MIN_DISTANCE):
        dist[close] = radius * np.sqrt(g.random(int(close.sum())))
    gains = g.standard_exponential(dist.size)
    interference = float(np.sum(gains * dist ** -params.pathloss_exponent))
    return SirSample(signal, interference)


# --------------------------------------------------------------------------
# batched samplers used by the Monte Carlo engine
# --------------------------------------------------------------------------


def _squared_radii(g: np.random.Generator, n: int, radius: float) -> np.ndarray:
    r2 = radius**2 * g.random(n)
    floor = MIN_DISTANCE**2
    while np.any(close := r2 < floor):
        r2[close] = radius**2 * g.random(int(close.sum()))
    return r2


def sample_chunk(
    g: np.random.Generator,
    n: int,
    density: float,
    radius: float,
    link_distance: float,
    fading: FadingModel,
    alpha: float,
):
    """Signals and ragged interferer fields for ``n`` independent trials.

    Returns ``(signal, counts, r2, gains)``; ``counts[i]`` interferers belong to
    trial ``i`` and are stored consecutively in ``r2`` (squared distances) and
    ``gains``.
    """
    signal = sample_gain(fading, g, n) * link_distance**-alpha
    counts = g.poisson(density * math.pi * radius**2, n)
    total = int(counts.sum())
    r2 = _squared_radii(g, total, radius)
    gains = g.standard_exponential(total)
    return signal, counts, r2, gains


def chunk_outages(g, n, density, radius, link_distance, fading, alpha, theta) -> int:
    """Number of trials in outage (``sir < theta``) among ``n`` fresh trials."""
    signal, counts, r2, gains = sample_chunk(g, n, density, radius, link_distance, fading, alpha)
    interference = _kernels.interference_sums(counts, r2, gains, alpha / 2.0)
    return int(np.count_nonzero(theta * interference > signal))


def chunk_critical_densities(g, n, rho_max, radius, link_distance, fading, alpha, theta) -> np.ndarray:
    """Per-trial outage-onset densities on a field sampled at ``rho_max``.

    Each interferer carries a uniform thinning mark; the field at density
    ``rho <= rho_max`` keeps the points with ``mark < rho / rho_max``.  All
    densities therefore share one realisation and the outage indicator is
    monotone in ``rho`` per trial.
    """
    signal, counts, r2, gains = sample_chunk(g, n, rho_max, radius, link_distance, fading, alpha)
    marks = g.random(r2.size)
    return _kernels.critical_densities(counts, marks, r2, gains, signal, theta, alpha / 2.0, rho_max)
