"""Fading distributions, pathloss and fractional fading moments."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergentMomentError, InvalidParameterError, SingularityError
from .rng import RngLike, as_generator

__all__ = [
    "FadingKind",
    "FadingModel",
    "LinkGeometry",
    "sample_gain",
    "pathloss",
    "frac_moment_pos",
    "frac_moment_neg",
]


class FadingKind(enum.Enum):
    UNIT_EXPONENTIAL = "exponential"
    GAMMA_SHAPE = "gamma"


@dataclass(frozen=True)
class FadingModel:
    """Power-gain distribution: ``Exp(1)`` or ``Gamma(shape, 1)``.

    A gamma gain with integer shape ``L`` is what one-sided beamforming over
    ``L`` i.i.d. Rayleigh antennas produces; its mean is ``L``.
    """

    kind: FadingKind = FadingKind.UNIT_EXPONENTIAL
    shape: int = 1

    def __post_init__(self):
        if int(self.shape) != self.shape or self.shape < 1:
            raise InvalidParameterError(f"fading shape must be an integer >= 1, got {self.shape}")
        if self.kind is FadingKind.UNIT_EXPONENTIAL and self.shape != 1:
            raise InvalidParameterError("unit-exponential fading has shape 1")
        object.__setattr__(self, "shape", int(self.shape))

    @classmethod
    def exponential(cls) -> "FadingModel":
        return cls(FadingKind.UNIT_EXPONENTIAL, 1)

    @classmethod
    def gamma(cls, shape: int) -> "FadingModel":
        return cls(FadingKind.GAMMA_SHAPE, shape)

    @property
    def mean(self) -> float:
        return float(self.shape)


@dataclass(frozen=True)
class LinkGeometry:
    distance: float
    pathloss_exponent: float

    def __post_init__(self):
        if not self.distance > 0:
            raise InvalidParameterError(f"link distance must be > 0, got {self.distance}")
        if not self.pathloss_exponent > 2:
            raise InvalidParameterError(
                f"pathloss exponent must exceed 2, got {self.pathloss_exponent}"
            )

    @property
    def delta(self) -> float:
        return 2.0 / self.pathloss_exponent

    @property
    def attenuation(self) -> float:
        return pathloss(self.distance, self.pathloss_exponent)


def sample_gain(model: FadingModel, stream: RngLike, size=None):
    """Draw power gain(s) from ``model``; ``size=None`` returns a float."""
    g = as_generator(stream)
    if model.shape == 1:
        return g.standard_exponential(size)
    return g.standard_gamma(model.shape, size)


def pathloss(distance, alpha: float):
    """``distance ** -alpha``; accepts scalars or arrays."""
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise SingularityError("pathloss is singular at distance 0")
    out = d**-alpha
    return float(out) if out.ndim == 0 else out


def _check_delta(delta: float) -> None:
    if not 0 < delta < 1:
        raise InvalidParameterError(f"fractional exponent must lie in (0, 1), got {delta}")


def frac_moment_pos(model: FadingModel, delta: float) -> float:
    """``E[G**delta] = Gamma(L + delta) / Gamma(L)``."""
    _check_delta(delta)
    L = model.shape
    return math.exp(math.lgamma(L + delta) - math.lgamma(L))


def frac_moment_neg(model: FadingModel, delta: float) -> float:
    """``E[W**-delta] = Gamma(L - delta) / Gamma(L)``; finite only for ``L > delta``."""
    _check_delta(delta)
    L = model.shape
    if L - delta <= 0:
        raise DivergentMomentError(f"E[W^-{delta}] diverges for shape {L}")
    return math.exp(math.lgamma(L - delta) - math.lgamma(L))
