"""Homogeneous Poisson point processes on a disc window.

Patterns are immutable snapshots: every operation returns a new
:class:`PointPattern`.  Randomness is supplied explicitly as a
:class:`~overlaytc.rng.StreamKey` (reproducible) or a numpy ``Generator``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergentTailError, InvalidParameterError
from .rng import RngLike, as_generator

__all__ = [
    "DiscWindow",
    "PointPattern",
    "sample_ppp",
    "thin",
    "mark_uniform",
    "select_mark",
    "superpose",
    "truncation_radius",
]


@dataclass(frozen=True)
class DiscWindow:
    radius: float
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InvalidParameterError(f"window radius must be finite and > 0, got {self.radius}")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    def contains(self, points: np.ndarray) -> np.ndarray:
        offset = np.asarray(points, dtype=float) - np.asarray(self.center)
        return np.hypot(offset[:, 0], offset[:, 1]) <= self.radius


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PointPattern:
    """One realisation of a planar point process inside ``window``.

    ``marks`` holds 1-based sub-channel indices aligned with ``points``;
    ``num_marks`` is the size of the mark alphabet (``K``).
    """

    window: DiscWindow
    points: np.ndarray
    density_used: float
    marks: np.ndarray | None = None
    num_marks: int | None = field(default=None)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "points", _frozen(pts))
        if self.density_used < 0 or not math.isfinite(self.density_used):
            raise InvalidParameterError("density_used must be finite and non-negative")
        if self.marks is not None:
            marks = np.asarray(self.marks, dtype=np.int64)
            if marks.shape != (pts.shape[0],):
                raise InvalidParameterError("marks must align with points")
            if self.num_marks is None or self.num_marks < 1:
                raise InvalidParameterError("marked patterns need num_marks >= 1")
            if marks.size and (marks.min() < 1 or marks.max() > self.num_marks):
                raise InvalidParameterError("marks must lie in [1, num_marks]")
            object.__setattr__(self, "marks", _frozen(marks))

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def distances(self) -> np.ndarray:
        """Distances of the points from the window centre."""
        offset = self.points - np.asarray(self.window.center)
        return np.hypot(offset[:, 0], offset[:, 1])

    def empirical_density(self) -> float:
        return len(self) / self.window.area


def _uniform_in_disc(g: np.random.Generator, n: int, window: DiscWindow) -> np.ndarray:
    r = window.radius * np.sqrt(g.random(n))
    phi = 2.0 * math.pi * g.random(n)
    cx, cy = window.center
    return np.column_stack((cx + r * np.cos(phi), cy + r * np.sin(phi)))


def sample_ppp(density: float, window: DiscWindow, stream: RngLike) -> PointPattern:
    """Sample a homogeneous PPP of intensity ``density`` (per m^2) on ``window``."""
    if not (math.isfinite(density) and density >= 0):
        raise InvalidParameterError(f"density must be finite and >= 0, got {density}")
    if density == 0:
        return PointPattern(window, np.empty((0, 2)), 0.0)
    g = as_generator(stream)
    n = int(g.poisson(density * window.area))
    return PointPattern(window, _uniform_in_disc(g, n, window), float(density))


def thin(pattern: PointPattern, retain_prob: float, stream: RngLike) -> PointPattern:
    """Keep each point independently with probability ``retain_prob``."""
    if not (0.0 <= retain_prob <= 1.0):
        raise InvalidParameterError(f"retain_prob must be in [0, 1], got {retain_prob}")
    if retain_prob == 1.0:
        return pattern
    keep = as_generator(stream).random(len(pattern)) < retain_prob
    marks = None if pattern.marks is None else pattern.marks[keep]
    return PointPattern(
        pattern.window,
        pattern.points[keep],
        pattern.density_used * retain_prob,
        marks,
        pattern.num_marks,
    )


def mark_uniform(pattern: PointPattern, num_marks: int, stream: RngLike) -> PointPattern:
    """Attach an independent uniform mark in ``{1..num_marks}`` to every point."""
    if num_marks < 1:
        raise InvalidParameterError(f"num_marks must be >= 1, got {num_marks}")
    marks = as_generator(stream).integers(1, num_marks + 1, size=len(pattern))
    return PointPattern(pattern.window, pattern.points, pattern.density_used, marks, num_marks)


def select_mark(pattern: PointPattern, mark: int) -> PointPattern:
    """Sub-pattern of points carrying ``mark``; a PPP of density ``density / K``."""
    if pattern.marks is None:
        raise InvalidParameterError("pattern carries no marks")
    if not 1 <= mark <= pattern.num_marks:
        raise InvalidParameterError(f"mark {mark} outside [1, {pattern.num_marks}]")
    keep = pattern.marks == mark
    return PointPattern(
        pattern.window,
        pattern.points[keep],
        pattern.density_used / pattern.num_marks,
    )


def superpose(a: PointPattern, b: PointPattern) -> PointPattern:
    """Union of two patterns on the same window; marks are dropped."""
    if a.window != b.window:
        raise InvalidParameterError("cannot superpose patterns on different windows")
    return PointPattern(
        a.window,
        np.concatenate((a.points, b.points)),
        a.density_used + b.density_used,
    )


def truncation_radius(
    total_density: float,
    pathloss_exponent: float,
    signal_distance: float,
    sir_threshold: float,
    bias_tolerance: float = 1e-3,
) -> float:
    """Radius beyond which the mean interference tail is negligible.

    The mean unit-fading interference from outside radius ``R`` is
    ``2*pi*density*R**(2 - alpha) / (alpha - 2)``.  The returned radius keeps
    that below ``bias_tolerance`` times the threshold-scaled signal
    ``signal_distance**-alpha / sir_threshold``, and is never smaller than
    fifty link lengths.
    """
    alpha = pathloss_exponent
    if not alpha > 2:
        raise DivergentTailError(f"interference tail diverges for pathloss exponent {alpha} <= 2")
    for name, value in (
        ("total_density", total_density),
        ("signal_distance", signal_distance),
        ("sir_threshold", sir_threshold),
        ("bias_tolerance", bias_tolerance),
    ):
        if not (math.isfinite(value) and value > 0):
            raise InvalidParameterError(f"{name} must be finite and > 0, got {value}")
    tail = (
        2 * math.pi * total_density * sir_threshold * signal_distance**alpha
        / ((alpha - 2) * bias_tolerance)
    ) ** (1.0 / (alpha - 2))
    return max(50.0 * signal_distance, tail)
