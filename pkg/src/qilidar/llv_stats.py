"""Log-likelihood-value statistics: coefficients, moments, distinguishability, shot budgets.

Click counts over N shots are binomial; in the Gaussian regime every count
distribution maps through the linear log-likelihood transform to a Gaussian
LLV distribution.  Positive LLV favours object present.  The two-detector
transform is

    LLV(x, y, k, N) = M1*x + C1*k + M2*y + C2*(N - k)

with x coincidence clicks out of k idler clicks and y non-coincidence clicks
out of N - k idler no-clicks.  The single-detector case is the same with the
whole shot budget as "k" and no second channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import bisect
from scipy.special import erf, erfc

from .errors import (
    DegenerateRegimeError,
    GaussianRegimeError,
    IndistinguishableError,
    ParameterError,
)
from .quantum_optics import ClickProbabilities

# Binomial skew bound below which the Gaussian approximation is accepted.
GAUSSIAN_SKEW_LIMIT = 0.3


class Regime(Enum):
    CI = "ci"
    QI = "qi"


@dataclass(frozen=True)
class LlvCoefficients:
    """Linear LLV transform constants.

    For the single-detector (CI) regime only ``m1``/``c1`` are populated and
    are exposed as ``m``/``c``; the second channel is identically zero.
    """

    m1: float
    c1: float
    m2: float
    c2: float
    regime: Regime = Regime.QI

    @property
    def m(self) -> float:
        return self.m1

    @property
    def c(self) -> float:
        return self.c1


@dataclass(frozen=True)
class GaussianMoments:
    mean: float
    std: float

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.std)):
            raise ParameterError(f"moments must be finite, got ({self.mean!r}, {self.std!r})")
        # std == 0 only arises for identical hypotheses (the LLV is then
        # identically zero); the tail functions treat it as a point mass.
        if self.std < 0:
            raise ParameterError(f"std must be >= 0, got {self.std!r}")


@dataclass(frozen=True)
class LlvDistributionPair:
    """Object present (h1) and absent (h0) LLV Gaussians for one shot budget."""

    h1: GaussianMoments
    h0: GaussianMoments
    shots: int
    idler_clicks: float


@dataclass(frozen=True)
class RocPoint:
    d_llv: float
    p_d: float
    p_fa: float


@dataclass(frozen=True)
class RocCurve:
    points: tuple[RocPoint, ...]
    operating_point: RocPoint  # the self-calibrating d_llv = 0 point


def _strict_probability(name: str, p: float) -> float:
    if not 0.0 < p < 1.0:
        raise DegenerateRegimeError(
            f"{name} = {p!r} is at the boundary of (0,1); log-likelihood coefficients diverge"
        )
    return p


def _log_odds(p1: float, p0: float) -> float:
    # ln[p1(1-p0) / (p0(1-p1))], stable for probabilities near 0.
    return math.log(p1) - math.log(p0) + math.log1p(-p0) - math.log1p(-p1)


def _log_survival_ratio(p1: float, p0: float) -> float:
    # ln[(1-p1)/(1-p0)]
    return math.log1p(-p1) - math.log1p(-p0)


def llv_coefficients(probs: ClickProbabilities, regime: Regime = Regime.QI) -> LlvCoefficients:
    """LLV transform constants from the per-shot click probabilities."""
    if regime is Regime.CI:
        p1 = _strict_probability("p_h1_ci", probs.p_h1_ci)
        p0 = _strict_probability("p_h0", probs.p_h0)
        return LlvCoefficients(_log_odds(p1, p0), _log_survival_ratio(p1, p0), 0.0, 0.0, Regime.CI)
    p11 = _strict_probability("p_h1_i1", probs.p_h1_i1)
    p10 = _strict_probability("p_h1_i0", probs.p_h1_i0)
    p0 = _strict_probability("p_h0", probs.p_h0)
    return LlvCoefficients(
        _log_odds(p11, p0),
        _log_survival_ratio(p11, p0),
        _log_odds(p10, p0),
        _log_survival_ratio(p10, p0),
        Regime.QI,
    )


def llv_value(coeffs: LlvCoefficients, x, y, k, n):
    """Evaluate the linear LLV transform; accepts scalars or numpy arrays.

    Equals the log of the ratio of the object present/absent binomial
    likelihoods of the counts. Count bounds 0 <= x <= k <= n, 0 <= y <= n-k
    are enforced.
    """
    x, y, k, n = (np.asarray(v, dtype=float) for v in (x, y, k, n))
    if np.any(x < 0) or np.any(y < 0) or np.any(x > k) or np.any(k > n) or np.any(y > n - k):
        raise ParameterError("count bounds violated: need 0 <= x <= k <= n and 0 <= y <= n-k")
    out = coeffs.m1 * x + coeffs.c1 * k + coeffs.m2 * y + coeffs.c2 * (n - k)
    return float(out) if out.ndim == 0 else out


def gaussian_regime_ok(
    n: int, probs: ClickProbabilities, regime: Regime = Regime.QI
) -> tuple[bool, float]:
    """Check the binomial skew criterion (1-2p)/sqrt(Np(1-p)) < 0.3.

    Evaluated on the weakest count distribution of the setup: the
    object-absent coincidence counts after the 4-sigma minimum of idler
    clicks (two-detector regime), or the object-absent clicks over all N
    shots (single-detector regime).  Returns (ok, skew).
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n!r}")
    p = probs.p_h0
    if regime is Regime.QI:
        mu_i = n * probs.p_i
        sigma_i = math.sqrt(n * probs.p_i * (1.0 - probs.p_i))
        trials = int(mu_i - 4.0 * sigma_i)
        if trials < 1:
            return False, math.inf
    else:
        trials = n
    if p <= 0.0 or p >= 1.0:
        return False, math.inf
    skew = (1.0 - 2.0 * p) / math.sqrt(trials * p * (1.0 - p))
    return skew < GAUSSIAN_SKEW_LIMIT, skew


def _gaussian_pair(
    probs: ClickProbabilities, coeffs: LlvCoefficients, n: float, k: float | None
) -> tuple[float, float, float, float]:
    """Raw (mu1, sigma1, mu0, sigma0) without regime checks.

    ``k`` is a fixed idler click count; None means the mean-idler-click
    distributions, whose variance is the idler-click-probability-weighted
    combination of the two channel variances.
    """
    m1, c1, m2, c2 = coeffs.m1, coeffs.c1, coeffs.m2, coeffs.c2

    def moments(p_c: float, p_n: float) -> tuple[float, float]:
        if coeffs.regime is Regime.CI:
            mu = n * (m1 * p_c + c1)
            var = n * m1 * m1 * p_c * (1.0 - p_c)
        elif k is None:
            p_i = probs.p_i
            mu = n * (p_i * (m1 * p_c + c1 - m2 * p_n - c2) + m2 * p_n + c2)
            var = n * (
                p_i * (m1 * m1 * p_c * (1.0 - p_c) - m2 * m2 * p_n * (1.0 - p_n))
                + m2 * m2 * p_n * (1.0 - p_n)
            )
        else:
            mu = m1 * k * p_c + c1 * k + m2 * (n - k) * p_n + (n - k) * c2
            var = m1 * m1 * k * p_c * (1.0 - p_c) + m2 * m2 * (n - k) * p_n * (1.0 - p_n)
        if var < 0.0:
            raise ParameterError(f"negative LLV variance {var!r}; inputs outside the model's validity")
        return mu, math.sqrt(var)

    if coeffs.regime is Regime.CI:
        mu1, s1 = moments(probs.p_h1_ci, 0.0)
    else:
        mu1, s1 = moments(probs.p_h1_i1, probs.p_h1_i0)
    mu0, s0 = moments(probs.p_h0, probs.p_h0)
    return mu1, s1, mu0, s0


def llv_moments(
    probs: ClickProbabilities,
    coeffs: LlvCoefficients,
    n: int,
    k: float | None = None,
    check_regime: bool = True,
) -> LlvDistributionPair:
    """Gaussian LLV distributions under both hypotheses after ``n`` shots.

    ``k`` fixes the idler click count; by default the mean-idler-click
    distributions are returned.  Raises GaussianRegimeError when the
    underlying binomials are too skewed for the Gaussian approximation
    (no silent fallback).
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n!r}")
    if coeffs.regime is Regime.CI and k is not None:
        raise ParameterError("fixed idler click count has no meaning in the single-detector regime")
    if check_regime:
        ok, skew = gaussian_regime_ok(n, probs, coeffs.regime)
        if not ok:
            raise GaussianRegimeError(
                f"Gaussian approximation invalid at n={n}: skew {skew:.3g} >= {GAUSSIAN_SKEW_LIMIT}",
                skew,
            )
    mu1, s1, mu0, s0 = _gaussian_pair(probs, coeffs, n, k)
    idler_clicks = n * probs.p_i if k is None else float(k)
    if coeffs.regime is Regime.CI:
        idler_clicks = 0.0
    return LlvDistributionPair(GaussianMoments(mu1, s1), GaussianMoments(mu0, s0), int(n), idler_clicks)


def gaussian_upper_tail(d: float, mean: float, std: float) -> float:
    """Q(d, mu, sigma): probability mass above the threshold d."""
    if std == 0.0:
        return 1.0 if d < mean else (0.5 if d == mean else 0.0)
    return 0.5 * erfc((d - mean) / (std * math.sqrt(2.0)))


def detection_probabilities(pair: LlvDistributionPair, d_llv: float = 0.0) -> tuple[float, float]:
    """(P_D, P_FA) at an LLV decision threshold."""
    p_d = gaussian_upper_tail(d_llv, pair.h1.mean, pair.h1.std)
    p_fa = gaussian_upper_tail(d_llv, pair.h0.mean, pair.h0.std)
    return p_d, p_fa


def distinguishability(pair: LlvDistributionPair, d_llv: float = 0.0) -> float:
    """phi = 1 - [(1 - P_D) + P_FA]: overlap-based decision confidence in [-1, 1]."""
    p_d, p_fa = detection_probabilities(pair, d_llv)
    return p_d - p_fa


def average_distinguishability(pair: LlvDistributionPair, samples: int) -> float:
    """Distinguishability of the S-sample mean LLV; S=1 reduces to ``distinguishability``."""
    if samples < 1:
        raise ParameterError(f"samples must be >= 1, got {samples!r}")
    root = math.sqrt(samples)
    scaled = LlvDistributionPair(
        GaussianMoments(pair.h1.mean, pair.h1.std / root),
        GaussianMoments(pair.h0.mean, pair.h0.std / root),
        pair.shots,
        pair.idler_clicks,
    )
    return distinguishability(scaled, 0.0)


def roc_curve(pair: LlvDistributionPair, thresholds: Iterable[float]) -> RocCurve:
    """Receiver operating curve over a threshold sweep, with the d=0 point marked."""
    points = tuple(
        RocPoint(float(d), *detection_probabilities(pair, float(d))) for d in sorted(thresholds)
    )
    operating = RocPoint(0.0, *detection_probabilities(pair, 0.0))
    return RocCurve(points, operating)


def _erf_slopes(probs: ClickProbabilities, coeffs: LlvCoefficients) -> tuple[float, float]:
    """(G1, G0): per-sqrt-unit erf arguments of the two LLV distributions.

    The unit is idler-click count for the two-detector regime and shots for
    the single-detector regime, where the idler click probability is
    effectively 1 and the second channel empty.
    """
    m1, c1, m2, c2 = coeffs.m1, coeffs.c1, coeffs.m2, coeffs.c2
    inv = 1.0 / probs.p_i - 1.0 if coeffs.regime is Regime.QI else 0.0

    def slope(p_c: float, p_n: float) -> float:
        num = m1 * p_c + c1 + inv * (m2 * p_n + c2)
        var = m1 * m1 * p_c * (1.0 - p_c) + m2 * m2 * inv * p_n * (1.0 - p_n)
        if var <= 0.0:
            raise IndistinguishableError("zero LLV variance; hypotheses carry no evidence")
        return num / (math.sqrt(2.0) * math.sqrt(var))

    if coeffs.regime is Regime.CI:
        g1 = slope(probs.p_h1_ci, 0.0)
    else:
        g1 = slope(probs.p_h1_i1, probs.p_h1_i0)
    g0 = slope(probs.p_h0, probs.p_h0)
    return g1, g0


def shots_to_threshold(
    probs: ClickProbabilities, phi_t: float = 0.8, regime: Regime = Regime.QI
) -> int:
    """Shots needed for the distinguishability to reach ``phi_t``.

    Solves phi = 0.5*[Erf(-G0*sqrt(u)) + Erf(G1*sqrt(u))] for the
    idler-click budget u by bracketed bisection (the objective is monotone
    increasing in u for separated hypotheses, G1 > 0 > G0), then converts to
    shots.  Truncation to an integer shot count is rounded up by at most one
    shot so that the returned budget actually achieves phi_t.
    """
    if not 0.0 < phi_t < 1.0:
        raise ParameterError(f"phi_t must be in (0,1), got {phi_t!r}")
    coeffs = llv_coefficients(probs, regime)
    if regime is Regime.QI:
        _strict_probability("p_i", probs.p_i)
    g1, g0 = _erf_slopes(probs, coeffs)
    if not (g1 > 0.0 > g0):
        raise IndistinguishableError(
            f"hypotheses not distinguishable (G1={g1!r}, G0={g0!r}); no finite shot count reaches phi_t"
        )

    def phi_of(u: float) -> float:
        return 0.5 * (erf(-g0 * math.sqrt(u)) + erf(g1 * math.sqrt(u)))

    lo, hi = 1.0, 1e14
    if phi_of(hi) <= phi_t:
        raise IndistinguishableError(f"phi_t={phi_t} unreachable within {hi:.0e} per-channel units")
    while phi_of(lo) >= phi_t and lo > 1e-18:
        lo *= 0.1
    if phi_of(lo) >= phi_t:
        u = lo
    else:
        u = bisect(lambda v: phi_of(v) - phi_t, lo, hi, rtol=1e-10)
    per_shot = probs.p_i if regime is Regime.QI else 1.0
    n_t = max(int(u / per_shot), 1)
    if phi_of(n_t * per_shot) < phi_t:
        n_t += 1
    return n_t


def quantum_advantage(probs: ClickProbabilities, phi_t: float = 0.8) -> float:
    """Ratio of single- to two-detector shot budgets for the same physics."""
    return shots_to_threshold(probs, phi_t, Regime.CI) / shots_to_threshold(probs, phi_t, Regime.QI)


def discrepancy_ok(
    probs: ClickProbabilities, n: int, tol: float = 0.05
) -> tuple[bool, tuple[float, float, float]]:
    """Is the LLV test's effectiveness consistent across likely idler click counts?

    Compares the distinguishability at the 4-sigma extremes of the idler
    click distribution against the mean-idler-click value; both relative
    deviations must stay within ``tol``.  Returns (ok, (phi_mean, phi_at_min,
    phi_at_max)).
    """
    coeffs = llv_coefficients(probs, Regime.QI)
    pair = llv_moments(probs, coeffs, n)
    phi_mean = distinguishability(pair)
    if phi_mean == 0.0:
        raise DegenerateRegimeError("zero distinguishability; discrepancy ratio undefined")
    mu_i = n * probs.p_i
    sigma_i = math.sqrt(n * probs.p_i * (1.0 - probs.p_i))
    k_min = int(mu_i - 4.0 * sigma_i)
    k_max = int(mu_i + 4.0 * sigma_i)
    if k_min < 1 or k_max > n:
        raise ParameterError(f"idler click extremes [{k_min}, {k_max}] fall outside (0, {n})")
    phi_min = distinguishability(llv_moments(probs, coeffs, n, k=k_min))
    phi_max = distinguishability(llv_moments(probs, coeffs, n, k=k_max))
    ok = (
        abs(phi_mean - phi_min) / abs(phi_mean) <= tol
        and abs(phi_mean - phi_max) / abs(phi_mean) <= tol
    )
    return ok, (phi_mean, phi_min, phi_max)


def fom_snr(n_coincidences: float, n_noise: float) -> float:
    """Coincidence-to-noise click ratio; a crude, non-unique figure of merit."""
    if n_noise == 0:
        raise ParameterError("SNR undefined for zero noise clicks")
    return n_coincidences / n_noise


def fom_crlb(
    probs_of_attenuation,
    xi_hat: float,
    n: int,
    regime: Regime = Regime.QI,
    rel_step: float = 1e-4,
) -> float:
    """Cramer-Rao lower bound for an attenuation estimator, in dB re the estimate.

    ``probs_of_attenuation`` maps an attenuation value to ClickProbabilities.
    The Fisher information is taken at the Gaussian-moment level of the click
    counts: the expected log-likelihood surface ell(xi) of data drawn at
    xi_hat is differentiated twice by central finite differences with step
    ``rel_step * xi_hat``.  Returns 10*log10(var_bound / xi_hat).
    """
    if xi_hat <= 0:
        raise ParameterError(f"xi_hat must be > 0, got {xi_hat!r}")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n!r}")

    ref = probs_of_attenuation(xi_hat)

    def count_moments(probs: ClickProbabilities) -> list[tuple[float, float]]:
        if regime is Regime.CI:
            trials_p = [(float(n), probs.p_h1_ci)]
        else:
            mu_i = n * ref.p_i  # idler statistics do not depend on the target
            trials_p = [(mu_i, probs.p_h1_i1), (n - mu_i, probs.p_h1_i0)]
        return [(t * p, math.sqrt(t * p * (1.0 - p))) for t, p in trials_p]

    ref_moments = count_moments(ref)

    def expected_loglik(xi: float) -> float:
        total = 0.0
        for (mu_hat, s_hat), (mu, s) in zip(ref_moments, count_moments(probs_of_attenuation(xi))):
            total += -0.5 * math.log(2.0 * math.pi * s * s)
            total += -(s_hat * s_hat + (mu_hat - mu) ** 2) / (2.0 * s * s)
        return total

    h = rel_step * xi_hat
    info = -(expected_loglik(xi_hat + h) - 2.0 * expected_loglik(xi_hat) + expected_loglik(xi_hat - h)) / (h * h)
    if info <= 0:
        raise ParameterError(f"non-positive Fisher information {info!r} at xi_hat={xi_hat!r}")
    return 10.0 * math.log10((1.0 / info) / xi_hat)
