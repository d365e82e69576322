"""Detection and rangefinding protocols built on the LLV test.

A scan inspects an ordered set of candidate distances, each with its own
delay, attenuation and shot budget N_t(D).  One LLV sample per distance is
taken every N_t(D) shots (never from partial windows), the per-distance
sample means are tracked, and the decision rule names the nearest distance
whose running mean is strictly positive.  Far inspected distances can drift
positive when a nearer object is present; the protocol records such
positives rather than suppressing them, and relies on nearest-first
querying.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .llv_stats import LlvCoefficients, Regime, llv_coefficients, llv_value, shots_to_threshold
from .quantum_optics import ClickProbabilities
from .scenario import ScenarioParams
from .scene import RangeHypothesis
from .simulator import ClickStreams, StreamTruth, count_window, generate_streams, trial_seeds, unpack_bits


@dataclass(frozen=True)
class PlannedDistance:
    """One inspected distance with its statistics preresolved."""

    range_hypothesis: RangeHypothesis
    probs: ClickProbabilities
    coeffs: LlvCoefficients

    @property
    def distance(self) -> float:
        return self.range_hypothesis.distance

    @property
    def delay(self) -> int:
        return self.range_hypothesis.delay_shots

    @property
    def n_t(self) -> int:
        return self.range_hypothesis.shots_required


@dataclass(frozen=True)
class InspectionPlan:
    """Distances to inspect, ordered near to far, with decision thresholds."""

    hypotheses: tuple[PlannedDistance, ...]
    phi_t: float = 0.8
    p_correct_threshold: float = 0.95

    def __post_init__(self):
        if not self.hypotheses:
            raise ParameterError("plan needs at least one distance")
        dists = [h.distance for h in self.hypotheses]
        if any(b <= a for a, b in zip(dists, dists[1:])):
            raise ParameterError(f"distances must be strictly increasing, got {dists}")
        if not 0.0 < self.phi_t < 1.0:
            raise ParameterError(f"phi_t must be in (0,1), got {self.phi_t!r}")
        if not 0.0 < self.p_correct_threshold < 1.0:
            raise ParameterError(f"p_correct_threshold must be in (0,1), got {self.p_correct_threshold!r}")

    def entry_at(self, distance_m: float) -> PlannedDistance:
        for h in self.hypotheses:
            if math.isclose(h.distance, distance_m, rel_tol=1e-12):
                return h
        raise ParameterError(f"distance {distance_m!r} is not in the plan")


def build_inspection_plan(
    scenario: ScenarioParams,
    distances_m,
    phi_t: float = 0.8,
    p_correct_threshold: float = 0.95,
    regime: Regime = Regime.QI,
) -> InspectionPlan:
    """Resolve attenuation, delay, probabilities and N_t for every distance."""
    entries = []
    for d in distances_m:
        probs = scenario.probabilities(d)
        n_t = shots_to_threshold(probs, phi_t, regime)
        hyp = RangeHypothesis(
            distance=float(d),
            delay_shots=scenario.delay_shots(d),
            attenuation=scenario.attenuation_at(d),
            shots_required=n_t,
        )
        entries.append(PlannedDistance(hyp, probs, llv_coefficients(probs, regime)))
    return InspectionPlan(tuple(entries), phi_t, p_correct_threshold)


@dataclass
class SampleSeries:
    """LLV samples for one inspected distance, spaced exactly N_t(D) shots apart."""

    distance_m: float
    n_t: int
    samples: list[float] = field(default_factory=list)
    timestamps: list[int] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.samples)

    @property
    def mu_s(self) -> float | None:
        if not self.samples:
            return None
        return sum(self.samples) / len(self.samples)


@dataclass(frozen=True)
class Decision:
    present: bool
    distance_m: float | None = None

    def label(self) -> str:
        return f"{self.distance_m:g}" if self.present else "absent"


def rolling_llv_shots(
    streams: ClickStreams, n_t: int, coeffs: LlvCoefficients, delay: int = 0
) -> np.ndarray:
    """Per-shot rolling LLV over the trailing n_t shots.

    Returns R[z] for z = n_t .. Z (index 0 of the result is z = n_t); there
    is no output during the initialisation stage z < n_t.  Cumulative
    coincidence, non-coincidence and idler counts make each step O(1).
    """
    if n_t < 1:
        raise ParameterError(f"n_t must be >= 1, got {n_t!r}")
    if delay < 0 or delay >= streams.length:
        raise ParameterError(f"delay must be in [0, {streams.length}), got {delay!r}")
    idler = unpack_bits(streams.idler, streams.length)
    signal = unpack_bits(streams.signal, streams.length)
    m = streams.length - delay
    if m < n_t:
        return np.zeros(0)
    i = idler[:m]
    s = signal[delay:]
    cum_x = np.concatenate([[0], np.cumsum((i & s), dtype=np.int64)])
    cum_y = np.concatenate([[0], np.cumsum(((1 - i) & s), dtype=np.int64)])
    cum_k = np.concatenate([[0], np.cumsum(i, dtype=np.int64)])
    dx = cum_x[n_t:] - cum_x[:-n_t]
    dy = cum_y[n_t:] - cum_y[:-n_t]
    dk = cum_k[n_t:] - cum_k[:-n_t]
    return coeffs.m1 * dx + coeffs.c1 * dk + coeffs.m2 * dy + coeffs.c2 * (n_t - dk)


def sample_rolling_mean(samples, window: int, index: int) -> float:
    """Moving average of the trailing ``window`` samples ending at 1-based ``index``."""
    k = len(samples)
    if window < 1:
        raise ParameterError(f"window must be >= 1, got {window!r}")
    if not window <= index <= k:
        raise ParameterError(f"index must be in [{window}, {k}], got {index!r}")
    return float(sum(samples[index - window : index]) / window)


def scan_decision(plan: InspectionPlan, mu_by_distance) -> Decision:
    """Nearest inspected distance whose sample mean is strictly positive, else absent.

    ``mu_by_distance`` maps distance to its current sample mean; distances
    still in their initialisation stage (no full window yet) map to None and
    cannot vote.
    """
    for entry in plan.hypotheses:
        mu = mu_by_distance.get(entry.distance)
        if mu is not None and mu > 0.0:
            return Decision(True, entry.distance)
    return Decision(False)


@dataclass
class TrialResult:
    series: dict[float, SampleSeries]
    decisions: list[tuple[int, Decision]]  # (elapsed shots, running scan decision)
    truth: StreamTruth
    horizon: int
    seed: int

    def final_decision(self) -> Decision:
        return self.decisions[-1][1] if self.decisions else Decision(False)


def _default_horizon(plan: InspectionPlan, truth: StreamTruth) -> int:
    if not truth.object_present or truth.distance_m is None:
        raise ParameterError("horizon must be given explicitly when no object is present")
    entry = plan.entry_at(truth.distance_m)
    return shots_to_threshold(entry.probs, plan.phi_t, Regime.CI)


def run_rangefinding_trial(
    scenario: ScenarioParams,
    plan: InspectionPlan,
    seed: int,
    truth: StreamTruth,
    horizon: int | None = None,
) -> TrialResult:
    """One end-to-end simulated scan up to ``horizon`` shots.

    Default horizon is the single-detector shot budget at the true distance,
    the natural yardstick for how long a classical system would need.  The
    decision trace is re-evaluated at every sample arrival.
    """
    if horizon is None:
        horizon = _default_horizon(plan, truth)
    if horizon < 1:
        raise ParameterError(f"horizon must be >= 1, got {horizon!r}")
    max_delay = max(e.delay for e in plan.hypotheses)
    if truth.object_present:
        if truth.distance_m is None:
            raise ParameterError("truth distance required when the object is present")
        true_delay = scenario.delay_shots(truth.distance_m)
        probs_true = scenario.probabilities(truth.distance_m)
        max_delay = max(max_delay, true_delay)
    else:
        true_delay = 0
        probs_true = scenario.probabilities(plan.hypotheses[0].distance, object_present=False)
    streams = generate_streams(
        probs_true,
        horizon + max_delay,
        seed,
        object_present=truth.object_present,
        delay=true_delay,
        distance_m=truth.distance_m,
    )

    series = {e.distance: SampleSeries(e.distance, e.n_t) for e in plan.hypotheses}
    events = []  # (timestamp, plan order, entry)
    for order, e in enumerate(plan.hypotheses):
        for j in range(1, horizon // e.n_t + 1):
            events.append((j * e.n_t, order, e))
    events.sort(key=lambda t: (t[0], t[1]))

    decisions: list[tuple[int, Decision]] = []
    mu: dict[float, float | None] = {e.distance: None for e in plan.hypotheses}
    for timestamp, _, e in events:
        counts = count_window(streams, timestamp - e.n_t, e.n_t, e.delay)
        value = llv_value(e.coeffs, counts.x, counts.y, counts.k, counts.n)
        ser = series[e.distance]
        ser.samples.append(value)
        ser.timestamps.append(timestamp)
        mu[e.distance] = ser.mu_s
        decisions.append((timestamp, scan_decision(plan, mu)))
    return TrialResult(series, decisions, streams.truth, horizon, int(seed))


@dataclass
class PCorrectCurve:
    """P_correct against elapsed shots for one inspected distance."""

    distance_m: float
    elapsed_shots: np.ndarray  # sample s completes at s * N_t(D)
    p_correct: np.ndarray
    samples_to_threshold: int | None  # smallest S with P_correct >= threshold


@dataclass
class PCorrectResult:
    curves: dict[float, PCorrectCurve]
    mu_g: dict[float, float]  # converged mean LLV per distance, pooled over trials
    trials: int
    truth: StreamTruth
    horizon: int


def p_correct_curve(
    scenario: ScenarioParams,
    plan: InspectionPlan,
    truth: StreamTruth,
    trials: int,
    seed: int,
    horizon: int | None = None,
) -> PCorrectResult:
    """Monte-Carlo probability of a correct per-distance decision vs elapsed time.

    A decision about distance D after its s-th sample is correct when the
    running mean's sign matches the truth: positive at the true distance,
    non-positive elsewhere (and everywhere when no object is present).
    Refuses fewer than 100 trials; the estimator is too noisy for a 0.95
    threshold below that.
    """
    if trials < 100:
        raise ParameterError(f"at least 100 trials required for a stable estimate, got {trials!r}")
    if horizon is None:
        horizon = _default_horizon(plan, truth)
    n_samples = {e.distance: horizon // e.n_t for e in plan.hypotheses}
    correct = {d: np.zeros(n, dtype=np.int64) for d, n in n_samples.items()}
    llv_sum = {d: 0.0 for d in n_samples}
    llv_count = {d: 0 for d in n_samples}

    for trial_seed in trial_seeds(seed, trials):
        result = run_rangefinding_trial(scenario, plan, int(trial_seed), truth, horizon)
        for e in plan.hypotheses:
            samples = np.asarray(result.series[e.distance].samples)
            if samples.size == 0:
                continue
            running = np.cumsum(samples) / np.arange(1, samples.size + 1)
            is_true_distance = (
                truth.object_present
                and truth.distance_m is not None
                and math.isclose(e.distance, truth.distance_m, rel_tol=1e-12)
            )
            ok = running > 0.0 if is_true_distance else running <= 0.0
            correct[e.distance] += ok
            llv_sum[e.distance] += float(samples.sum())
            llv_count[e.distance] += samples.size

    curves = {}
    for e in plan.hypotheses:
        d = e.distance
        n = n_samples[d]
        p = correct[d] / trials if n else np.zeros(0)
        hits = np.nonzero(p >= plan.p_correct_threshold)[0]
        s_star = int(hits[0]) + 1 if hits.size else None
        curves[d] = PCorrectCurve(d, np.arange(1, n + 1) * e.n_t, p, s_star)
    mu_g = {d: llv_sum[d] / llv_count[d] for d in llv_sum if llv_count[d]}
    return PCorrectResult(curves, mu_g, trials, truth, horizon)
