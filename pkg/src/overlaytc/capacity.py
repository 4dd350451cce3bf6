"""Capacity tradeoff regions for blind transmission and mutual exclusion."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import frac_moment_neg, frac_moment_pos
from .errors import InvalidParameterError, PreconditionError
from .scenario import Overlay, SystemParams

__all__ = [
    "RegionShape",
    "CapacityLine",
    "gamma_ratio",
    "capacity_line_blind",
    "capacity_line_exclusion",
    "diversity_capacity",
    "region_contains",
    "throughput_per_area",
]


class RegionShape(enum.Enum):
    LINE = "line"
    RECTANGLE_CORNER = "rectangle_corner"


@dataclass(frozen=True)
class CapacityLine:
    """Region ``coeff_u * lambda_u + coeff_a * lambda_a <= bound`` in the positive quadrant.

    For ``RECTANGLE_CORNER`` the feasible set is instead the rectangle
    ``coeff_u * lambda_u <= bound_u`` and ``coeff_a * lambda_a <= bound_a``,
    whose far corner lies on the line (``bound_u + bound_a == bound``).
    ``coeff_a`` is ``inf`` when no sub-channel is left for ad hoc nodes.
    """

    coeff_u: float
    coeff_a: float
    bound: float
    method: Overlay
    exact_shape: RegionShape = RegionShape.LINE
    bound_u: float | None = None
    bound_a: float | None = None

    def as_line(self) -> "CapacityLine":
        return replace(self, exact_shape=RegionShape.LINE)

    @property
    def max_lambda_u(self) -> float:
        """Largest admissible ``lambda_u`` with ``lambda_a = 0``."""
        b = self.bound if self.exact_shape is RegionShape.LINE else self.bound_u
        return b / self.coeff_u

    @property
    def max_lambda_a(self) -> float:
        b = self.bound if self.exact_shape is RegionShape.LINE else self.bound_a
        return 0.0 if math.isinf(self.coeff_a) else b / self.coeff_a

    def boundary(self) -> list[tuple[float, float]]:
        """Boundary polyline as ``(lambda_u, lambda_a)`` vertices, axis to axis."""
        u, a = self.max_lambda_u, self.max_lambda_a
        if self.exact_shape is RegionShape.LINE:
            return [(0.0, a), (u, 0.0)]
        return [(0.0, a), (u, a), (u, 0.0)]


def _weighted(coeff: float, value: float) -> float:
    # inf * 0 must count as 0 for the degenerate all-cellular split
    return 0.0 if value == 0 else coeff * value


def region_contains(line: CapacityLine, lambda_u: float, lambda_a: float) -> bool:
    if lambda_u < 0 or lambda_a < 0:
        raise InvalidParameterError("densities must be non-negative")
    tol = 1e-12
    u = _weighted(line.coeff_u, lambda_u)
    a = _weighted(line.coeff_a, lambda_a)
    if line.exact_shape is RegionShape.LINE:
        return u + a <= line.bound * (1 + tol)
    return u <= line.bound_u * (1 + tol) and a <= line.bound_a * (1 + tol)


def gamma_ratio(L: int, delta: float) -> float:
    """``Gamma(L) / Gamma(L - delta)``, strictly increasing in ``L`` for ``delta > 0``."""
    if int(L) != L or L < 1:
        raise InvalidParameterError(f"L must be an integer >= 1, got {L}")
    if not 0 <= delta < 1 or L - delta <= 0:
        raise InvalidParameterError(f"need 0 <= delta < 1 and L > delta, got L={L}, delta={delta}")
    return math.exp(math.lgamma(L) - math.lgamma(L - delta))


def _link_capacities(params: SystemParams) -> tuple[float, float]:
    """Per-receiver first-order capacity terms ``(cellular, ad hoc)``.

    Each is ``K eps theta^-delta / (pi E[G^delta] l^2 E[X^-delta])`` for the
    respective link distance ``l`` and data fading ``X``.
    """
    delta = params.delta
    scale = (
        params.num_subchannels
        * params.outage_target
        * params.sir_threshold**-delta
        / (math.pi * frac_moment_pos(params.interference_fading, delta))
    )
    cellular = scale / (params.cellular_distance**2 * frac_moment_neg(params.cellular_fading, delta))
    adhoc = scale / (params.ad_hoc_distance**2 * frac_moment_neg(params.adhoc_fading, delta))
    return cellular, adhoc


def capacity_line_blind(params: SystemParams) -> CapacityLine:
    """``lambda_u / channel_fraction + lambda_a <= C1``."""
    cellular, adhoc = _link_capacities(params)
    return CapacityLine(
        coeff_u=1.0 / params.channel_fraction,
        coeff_a=1.0,
        bound=min(cellular, adhoc),
        method=Overlay.BLIND,
    )


def capacity_line_exclusion(params: SystemParams) -> CapacityLine:
    """``lambda_u / channel_fraction + lambda_a / (1 - channel_fraction) <= C2``.

    The two receivers see disjoint interferer sets, so the exact region is a
    rectangle with one constraint per axis; the line passes through its corner.
    """
    cellular, adhoc = _link_capacities(params)
    frac = params.channel_fraction
    return CapacityLine(
        coeff_u=1.0 / frac,
        coeff_a=math.inf if frac == 1 else 1.0 / (1.0 - frac),
        bound=cellular + adhoc,
        method=Overlay.EXCLUSION,
        exact_shape=RegionShape.RECTANGLE_CORNER,
        bound_u=cellular,
        bound_a=adhoc,
    )


def diversity_capacity(params: SystemParams) -> tuple[float, float]:
    """Closed-form ``(C1, C2)`` for beamforming diversity orders, equal link lengths."""
    d, r = params.ad_hoc_distance, params.cellular_distance
    if not math.isclose(d, r, rel_tol=1e-12):
        raise PreconditionError(f"diversity closed forms need equal link distances, got d={d}, r={r}")
    delta = params.delta
    c_tilde = (
        params.num_subchannels
        * params.outage_target
        * params.sir_threshold**-delta
        / (math.pi * d**2 * math.gamma(1 + delta))
    )
    g1 = gamma_ratio(params.diversity_adhoc, delta)
    g2 = gamma_ratio(params.diversity_cellular, delta)
    l_min = min(params.diversity_adhoc, params.diversity_cellular)
    return c_tilde * gamma_ratio(l_min, delta), c_tilde * (g1 + g2)


def throughput_per_area(density, theta: float, epsilon: float):
    """Successful bits/s/Hz per m^2: ``(1 - eps) * log2(1 + theta) * density``."""
    return (1.0 - epsilon) * np.log2(1.0 + theta) * density
