"""Outage and transmission-capacity analysis of ad hoc networks overlaid on a
cellular uplink, with Monte Carlo validation on Poisson point processes."""

__version__ = "0.1.0"

from .capacity import (
    CapacityLine,
    RegionShape,
    capacity_line_blind,
    capacity_line_exclusion,
    diversity_capacity,
    gamma_ratio,
    region_contains,
    throughput_per_area,
)
from .channel import FadingModel, LinkGeometry, frac_moment_neg, frac_moment_pos, pathloss, sample_gain
from .errors import (
    DivergentMomentError,
    DivergentTailError,
    InfeasibleError,
    IntegrationError,
    InvalidParameterError,
    NoChannelError,
    OverlayError,
    PreconditionError,
    SingularityError,
)
from .geometry import DiscWindow, PointPattern, mark_uniform, sample_ppp, superpose, thin, truncation_radius
from .outage import (
    KappaMoment,
    OutageEstimate,
    exact_rayleigh_outage,
    invert_outage_to_density,
    kappa_moment,
    lemma1_bounds,
    outage_asymptotic,
    outage_curve,
    outage_mc,
)
from .rng import StreamKey
from .scenario import (
    AD_HOC,
    BASE_STATION,
    Overlay,
    Receiver,
    ReceiverKind,
    SirSample,
    SystemParams,
    interferer_density,
    sample_sir,
)
