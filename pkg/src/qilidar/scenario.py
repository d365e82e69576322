"""Aggregate of every physical knob of a sensing scenario.

Bundles source, detectors, channel (either a fixed attenuation or target
geometry for a diffuse reflector) and the pulse repetition rate, and exposes
the derived per-shot probabilities and figures of merit.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ParameterError
from .llv_stats import Regime, fom_crlb
from .quantum_optics import (
    ChannelParams,
    ClickProbabilities,
    DetectorParams,
    SourceParams,
    click_probabilities,
)
from .scene import GeometryParams, delay_shots, lambertian_attenuation


@dataclass(frozen=True)
class ScenarioParams:
    source: SourceParams
    signal_detector: DetectorParams
    idler_detector: DetectorParams
    rep_rate_hz: float = 5e8
    attenuation: float | None = None  # fixed round-trip attenuation, or None for geometry
    object_reflectivity: float = 1.0
    detector_area_m2: float = 1.0

    def __post_init__(self):
        if self.rep_rate_hz <= 0:
            raise ParameterError(f"rep_rate_hz must be > 0, got {self.rep_rate_hz!r}")
        if self.attenuation is not None:
            ChannelParams(self.attenuation)  # range check

    def geometry(self, distance_m: float) -> GeometryParams:
        return GeometryParams(
            distance=distance_m,
            object_reflectivity=self.object_reflectivity,
            detector_area=self.detector_area_m2,
            rep_rate=self.rep_rate_hz,
        )

    def attenuation_at(self, distance_m: float | None = None) -> float:
        if self.attenuation is not None:
            return self.attenuation
        if distance_m is None:
            raise ParameterError("scenario uses geometry; a distance is required")
        return lambertian_attenuation(self.geometry(distance_m))

    def probabilities(
        self, distance_m: float | None = None, object_present: bool = True
    ) -> ClickProbabilities:
        chan = ChannelParams(self.attenuation_at(distance_m) if object_present else 0.0)
        return click_probabilities(
            self.source, self.signal_detector, self.idler_detector, chan, object_present
        )

    def probabilities_at_attenuation(self, xi: float) -> ClickProbabilities:
        return click_probabilities(
            self.source, self.signal_detector, self.idler_detector, ChannelParams(xi), True
        )

    def delay_shots(self, distance_m: float) -> int:
        return delay_shots(distance_m, self.rep_rate_hz)

    def with_source_mean(self, mean_photons: float) -> "ScenarioParams":
        return replace(self, source=replace(self.source, mean_photons=mean_photons))

    def with_signal_background(self, background_mean: float) -> "ScenarioParams":
        return replace(
            self, signal_detector=replace(self.signal_detector, background_mean=background_mean)
        )

    def crlb_db(
        self, xi_hat: float, n: int, regime: Regime = Regime.QI, rel_step: float = 1e-4
    ) -> float:
        """Attenuation-estimator CRLB in dB; see ``llv_stats.fom_crlb``."""
        return fom_crlb(self.probabilities_at_attenuation, xi_hat, n, regime, rel_step)
