"""Geometry of the sensing scenario: attenuation, delay and resolution.

Distances use the exact speed of light by default.  The reference delay
table was evidently produced with c ~ 3e8 m/s; for the distances of
interest both conventions truncate to the same integer shot delays
(difference 0.07%), and ``speed_of_light`` is a parameter for callers who
want the rounded convention explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError
from .quantum_optics import _require_finite, _require_nonneg, _require_range

SPEED_OF_LIGHT = 299792458.0


@dataclass(frozen=True)
class GeometryParams:
    """Physical layout: monostatic detector, diffuse target at ``distance`` metres."""

    distance: float
    object_reflectivity: float = 1.0
    detector_area: float = 1.0
    rep_rate: float = 5e8
    coincidence_window: float | None = None  # shot duration for CW operation; informational

    def __post_init__(self):
        _require_finite("distance", self.distance)
        if self.distance <= 0:
            raise ParameterError(f"distance must be > 0, got {self.distance!r}")
        _require_range("object_reflectivity", self.object_reflectivity, 0.0, 1.0)
        _require_finite("detector_area", self.detector_area)
        if self.detector_area <= 0:
            raise ParameterError(f"detector_area must be > 0, got {self.detector_area!r}")
        _require_finite("rep_rate", self.rep_rate)
        if self.rep_rate <= 0:
            raise ParameterError(f"rep_rate must be > 0, got {self.rep_rate!r}")
        if self.coincidence_window is not None:
            _require_nonneg("coincidence_window", self.coincidence_window)


@dataclass(frozen=True)
class RangeHypothesis:
    """One inspected distance: its delay, attenuation and shots-to-confidence."""

    distance: float
    delay_shots: int
    attenuation: float
    shots_required: int


def lambertian_attenuation(geom: GeometryParams) -> float:
    """Collected signal fraction for a diffuse reflector: xi_obj * A_d / (4 pi D^2)."""
    xi = geom.object_reflectivity * geom.detector_area / (4.0 * math.pi * geom.distance**2)
    if xi > 1.0:
        raise ParameterError(
            f"attenuation {xi:.3g} > 1: object at {geom.distance} m is too close for the far-field model"
        )
    return xi


def delay_shots(distance: float, rep_rate: float, speed_of_light: float = SPEED_OF_LIGHT) -> int:
    """Round-trip signal delay in whole shots, int(2 D f_rep / c), truncated."""
    if distance <= 0 or rep_rate <= 0:
        raise ParameterError("distance and rep_rate must be > 0")
    return int(2.0 * distance * rep_rate / speed_of_light)


def spatial_resolution(rep_rate: float, speed_of_light: float = SPEED_OF_LIGHT) -> float:
    """Smallest distance step resolvable by one shot of delay: c / (2 f_rep)."""
    if rep_rate <= 0:
        raise ParameterError("rep_rate must be > 0")
    return speed_of_light / (2.0 * rep_rate)


def temporal_resolution(n_t: int, rep_rate: float) -> float:
    """Wall-clock time to collect one confident measurement: N_t / f_rep."""
    if n_t < 0 or rep_rate <= 0:
        raise ParameterError("n_t must be >= 0 and rep_rate > 0")
    return n_t / rep_rate


def realistic_resolution(samples: int, n_t: int, rep_rate: float) -> float:
    """Time to a confident *decision*: S samples of one measurement each."""
    if samples < 1:
        raise ParameterError(f"samples must be >= 1, got {samples!r}")
    return samples * temporal_resolution(n_t, rep_rate)
