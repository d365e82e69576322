"""Single-shot click probabilities for noisy threshold detection.

A Geiger-mode detector with combined loss ``zeta`` and measured background
mean photon number ``b`` has the diagonal no-click weight

    w(n) = 1/(b+1) * ((b+1-zeta)/(b+1))**n

on the n-photon component of the incident state.  Every probability in this
module is the resummation of that weight against a source's photon-number
diagonal: geometric for thermal/pair sources, Poissonian for the coherent
state (whose off-diagonals the detectors cannot see).  The closed forms are
the production path; the test suite checks them against truncated Fock sums.

All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy import constants

from .errors import ParameterError

# Probabilities may stray outside [0,1] by at most this much before we error
# instead of clamping.
_CLAMP_TOL = 1e-15


class SourceKind(Enum):
    THERMAL = "thermal"
    TMSV = "tmsv"
    COHERENT = "coherent"


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")
    return value


def _require_range(name: str, value: float, lo: float, hi: float) -> float:
    value = _require_finite(name, value)
    if not lo <= value <= hi:
        raise ParameterError(f"{name} must be in [{lo}, {hi}], got {value!r}")
    return value


def _require_nonneg(name: str, value: float) -> float:
    value = _require_finite(name, value)
    if value < 0:
        raise ParameterError(f"{name} must be >= 0, got {value!r}")
    return value


def _as_probability(name: str, value: float) -> float:
    """Clamp floating-point dust at the [0,1] boundary; error beyond it."""
    if -_CLAMP_TOL <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + _CLAMP_TOL:
        return 1.0
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} out of [0,1] by more than {_CLAMP_TOL}: {value!r}")
    return value


@dataclass(frozen=True)
class SourceParams:
    """Light source: mean photon number and statistics family.

    ``amplitude_sq`` (|alpha|^2) is required for the coherent kind and
    forbidden otherwise.
    """

    mean_photons: float
    kind: SourceKind = SourceKind.TMSV
    amplitude_sq: float | None = None

    def __post_init__(self):
        _require_nonneg("mean_photons", self.mean_photons)
        if self.kind is SourceKind.COHERENT:
            if self.amplitude_sq is None:
                raise ParameterError("coherent source requires amplitude_sq")
            _require_nonneg("amplitude_sq", self.amplitude_sq)
        elif self.amplitude_sq is not None:
            raise ParameterError(f"amplitude_sq only applies to coherent sources, not {self.kind.value}")


@dataclass(frozen=True)
class DetectorParams:
    """Detector channel: system loss and measured background mean photon number."""

    efficiency: float
    background_mean: float = 0.0

    def __post_init__(self):
        _require_range("efficiency", self.efficiency, 0.0, 1.0)
        _require_nonneg("background_mean", self.background_mean)


@dataclass(frozen=True)
class ChannelParams:
    """Round-trip signal attenuation from probing the target."""

    attenuation: float

    def __post_init__(self):
        _require_range("attenuation", self.attenuation, 0.0, 1.0)


@dataclass(frozen=True)
class ClickProbabilities:
    """The per-shot Bernoulli probabilities driving every statistic downstream.

    ``p_i``       idler click probability (0 for sources with no idler beam)
    ``p_h1_i1``   signal click probability given an idler click, object present
    ``p_h1_i0``   signal click probability given no idler click, object present
    ``p_h0``      signal click probability, object absent (either idler outcome)
    ``p_h1_ci``   unconditional signal click probability, object present
    """

    p_i: float
    p_h1_i1: float
    p_h1_i0: float
    p_h0: float
    p_h1_ci: float

    def __post_init__(self):
        for name in ("p_i", "p_h1_i1", "p_h1_i0", "p_h0", "p_h1_ci"):
            object.__setattr__(self, name, _as_probability(name, _require_finite(name, getattr(self, name))))


def povm_noclick_weight(n: int, loss: float, background_mean: float) -> float:
    """Diagonal no-click weight on the n-photon component.

    ``loss`` collects every loss factor between source and detector
    (detector efficiency times any channel attenuation); ``background_mean``
    is the measured background photon number, unaffected by the loss.
    """
    if n != int(n) or n < 0:
        raise ParameterError(f"n must be a nonnegative integer, got {n!r}")
    _require_range("loss", loss, 0.0, 1.0)
    _require_nonneg("background_mean", background_mean)
    b1 = background_mean + 1.0
    return (1.0 / b1) * ((b1 - loss) / b1) ** int(n)


def click_probability_coherent(amplitude_sq: float, det: DetectorParams, chan: ChannelParams) -> float:
    """Click probability for the diagonal (Poissonian) coherent-state approximation."""
    _require_nonneg("amplitude_sq", amplitude_sq)
    b1 = det.background_mean + 1.0
    return _as_probability(
        "coherent click probability",
        1.0 - math.exp(-amplitude_sq * det.efficiency * chan.attenuation / b1) / b1,
    )


def planck_background(angular_frequency: float, temperature: float) -> float:
    """Thermal background mean photon number at ``angular_frequency`` (rad/s) and ``temperature`` (K)."""
    _require_finite("angular_frequency", angular_frequency)
    _require_finite("temperature", temperature)
    if angular_frequency <= 0:
        raise ParameterError(f"angular_frequency must be > 0, got {angular_frequency!r}")
    if temperature <= 0:
        raise ParameterError(f"temperature must be > 0, got {temperature!r}")
    ratio = constants.hbar * angular_frequency / (constants.k * temperature)
    try:
        return 1.0 / math.expm1(ratio)
    except OverflowError:
        return 0.0


def click_probabilities(
    src: SourceParams,
    signal_det: DetectorParams,
    idler_det: DetectorParams | None,
    chan: ChannelParams,
    object_present: bool = True,
) -> ClickProbabilities:
    """All five per-shot click probabilities for a source/detector/channel setup.

    For the pair source the joint no-click probability over both detectors is

        P(x,x) = 1 / [(1+b_I)(1+b_S)(nbar+1 - nbar*a*b)]

    with a = 1 - eta_I/(1+b_I) and b = 1 - eta_S*xi/(1+b_S); the conditional
    click probabilities follow from it and the two marginals.  Thermal and
    coherent sources have no idler beam: ``p_i`` is 0 and both conditional
    probabilities equal the unconditional one.  When the object is absent the
    returned signal is lost to the environment, so every signal probability
    collapses to ``p_h0`` regardless of the source.

    ``idler_det`` is ignored (and may be None) for sources without an idler.
    """
    bg_s = signal_det.background_mean
    bs1 = bg_s + 1.0
    p_h0 = bg_s / bs1

    xi = chan.attenuation if object_present else 0.0
    zeta_s = signal_det.efficiency * xi

    if src.kind is SourceKind.COHERENT:
        mu = src.amplitude_sq
        p_h1_ci = 1.0 - math.exp(-mu * zeta_s / bs1) / bs1
        return ClickProbabilities(0.0, p_h1_ci, p_h1_ci, p_h0, p_h1_ci)

    nbar = src.mean_photons
    p_h1_ci = 1.0 - 1.0 / (1.0 + bg_s + nbar * zeta_s)

    if src.kind is SourceKind.THERMAL:
        return ClickProbabilities(0.0, p_h1_ci, p_h1_ci, p_h0, p_h1_ci)

    if idler_det is None:
        raise ParameterError("pair source requires idler detector parameters")
    bg_i = idler_det.background_mean
    bi1 = bg_i + 1.0
    p_i = 1.0 - 1.0 / (1.0 + bg_i + nbar * idler_det.efficiency)

    if zeta_s == 0.0:
        # No returned signal: idler and signal clicks are exactly independent.
        return ClickProbabilities(p_i, p_h0, p_h0, p_h0, p_h0)

    a = 1.0 - idler_det.efficiency / bi1
    b = 1.0 - zeta_s / bs1
    p_joint_noclick = 1.0 / (bi1 * bs1 * (nbar + 1.0 - nbar * a * b))
    p_signal_noclick = 1.0 - p_h1_ci
    p_h1_i1 = 1.0 - (p_signal_noclick - p_joint_noclick) / p_i if p_i > 0.0 else p_h1_ci
    p_h1_i0 = 1.0 - p_joint_noclick / (1.0 - p_i) if p_i < 1.0 else p_h1_ci
    return ClickProbabilities(p_i, p_h1_i1, p_h1_i0, p_h0, p_h1_ci)
