"""Command-line front end: scenario config in, CSV analytics and simulations out.

Every command is a pure function of (config, seed): re-running reproduces
byte-identical CSV bodies.  The only non-reproducible content is a single
metadata header line prefixed '#'.  Exit codes: 0 success, 2 config error,
3 degenerate regime, 4 Gaussian-regime violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .errors import ConfigError, DegenerateRegimeError, GaussianRegimeError, ParameterError
from .llv_stats import Regime, llv_coefficients, llv_moments, quantum_advantage, roc_curve, shots_to_threshold
from .quantum_optics import DetectorParams, SourceKind, SourceParams
from .rangefinder import build_inspection_plan, p_correct_curve, rolling_llv_shots, run_rangefinding_trial
from .scenario import ScenarioParams
from .simulator import StreamTruth, generate_transition_streams

DEFAULT_CONFIG = {
    "source": {"mean_photons": 2.19e-2, "kind": "tmsv"},
    "detectors": {"eta_s": 0.5, "eta_i": 0.5, "bg_s": 5.06e-2, "bg_i": 4.49e-4},
    "channel": {"geometry": {"xi_obj": 1.0, "area_m2": 1.0, "distance_m": 3.0}},
    "timing": {"rep_rate_hz": 5.0e8},
    "protocol": {
        "phi_t": 0.8,
        "p_correct_t": 0.95,
        "distances_m": [1.2, 3.0, 3.3, 6.0],
        "trials": 200,
        "seed": None,
        "horizon_shots": None,
        "truth_present": True,
    },
}

_SCHEMA_KEYS = {
    "": {"source", "detectors", "channel", "timing", "protocol"},
    "source": {"mean_photons", "kind", "amplitude_sq"},
    "detectors": {"eta_s", "eta_i", "bg_s", "bg_i"},
    "channel": {"xi", "geometry"},
    "channel.geometry": {"xi_obj", "area_m2", "distance_m"},
    "timing": {"rep_rate_hz"},
    "protocol": {
        "phi_t",
        "p_correct_t",
        "distances_m",
        "trials",
        "seed",
        "horizon_shots",
        "truth_present",
    },
}


@dataclass
class ScenarioConfig:
    """Validated CLI configuration resolved into library parameter objects."""

    scenario: ScenarioParams
    distance_m: float | None  # geometry distance; doubles as the true target distance
    phi_t: float
    p_correct_t: float
    distances_m: list[float]
    trials: int
    seed: int | None
    horizon_shots: int | None
    truth_present: bool

    @property
    def uses_geometry(self) -> bool:
        return self.scenario.attenuation is None


def _check_keys(raw: dict, path: str) -> None:
    allowed = _SCHEMA_KEYS.get(path)
    if allowed is None:
        return
    for key in raw:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise ConfigError(where, f"unknown field (allowed: {sorted(allowed)})")


def _get(raw: dict, path: str, key: str, kind, required=True, default=None):
    if key not in raw or raw[key] is None:
        if required:
            raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
        return default
    value = raw[key]
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return int(value)
    if kind is bool and isinstance(value, bool):
        return value
    if kind is str and isinstance(value, str):
        return value
    if kind is list and isinstance(value, list):
        return value
    raise ConfigError(f"{path}.{key}" if path else key, f"expected {kind.__name__}, got {value!r}")


def parse_config(raw: dict) -> ScenarioConfig:
    _check_keys(raw, "")
    for section in ("source", "detectors", "channel", "timing", "protocol"):
        if section not in raw or not isinstance(raw[section], dict):
            raise ConfigError(section, "missing section")
        _check_keys(raw[section], section)

    src_raw, det_raw, chan_raw = raw["source"], raw["detectors"], raw["channel"]
    kind_name = _get(src_raw, "source", "kind", str, required=False, default="tmsv")
    try:
        kind = SourceKind(kind_name)
    except ValueError:
        raise ConfigError("source.kind", f"must be one of thermal/tmsv/coherent, got {kind_name!r}")
    try:
        source = SourceParams(
            _get(src_raw, "source", "mean_photons", float),
            kind,
            _get(src_raw, "source", "amplitude_sq", float, required=False),
        )
        signal_det = DetectorParams(
            _get(det_raw, "detectors", "eta_s", float), _get(det_raw, "detectors", "bg_s", float)
        )
        idler_det = DetectorParams(
            _get(det_raw, "detectors", "eta_i", float), _get(det_raw, "detectors", "bg_i", float)
        )
    except ParameterError as exc:
        raise ConfigError("source/detectors", str(exc))

    has_xi = chan_raw.get("xi") is not None
    has_geom = chan_raw.get("geometry") is not None
    if has_xi == has_geom:
        raise ConfigError("channel", "exactly one of 'xi' or 'geometry' must be set")
    distance_m = None
    if has_geom:
        geom_raw = chan_raw["geometry"]
        if not isinstance(geom_raw, dict):
            raise ConfigError("channel.geometry", "must be an object")
        _check_keys(geom_raw, "channel.geometry")
        xi_obj = _get(geom_raw, "channel.geometry", "xi_obj", float, required=False, default=1.0)
        area = _get(geom_raw, "channel.geometry", "area_m2", float, required=False, default=1.0)
        distance_m = _get(geom_raw, "channel.geometry", "distance_m", float)
        attenuation = None
    else:
        xi_obj, area = 1.0, 1.0
        attenuation = _get(chan_raw, "channel", "xi", float)

    rep_rate = _get(raw["timing"], "timing", "rep_rate_hz", float)
    try:
        scenario = ScenarioParams(
            source=source,
            signal_detector=signal_det,
            idler_detector=idler_det,
            rep_rate_hz=rep_rate,
            attenuation=attenuation,
            object_reflectivity=xi_obj,
            detector_area_m2=area,
        )
    except ParameterError as exc:
        raise ConfigError("channel/timing", str(exc))

    proto = raw["protocol"]
    phi_t = _get(proto, "protocol", "phi_t", float, required=False, default=0.8)
    if not 0.0 < phi_t < 1.0:
        raise ConfigError("protocol.phi_t", f"must be in (0,1), got {phi_t!r}")
    p_correct_t = _get(proto, "protocol", "p_correct_t", float, required=False, default=0.95)
    distances = _get(proto, "protocol", "distances_m", list, required=False, default=[])
    for i, d in enumerate(distances):
        if not isinstance(d, (int, float)) or isinstance(d, bool) or d <= 0:
            raise ConfigError(f"protocol.distances_m[{i}]", f"must be a positive number, got {d!r}")
    return ScenarioConfig(
        scenario=scenario,
        distance_m=distance_m,
        phi_t=phi_t,
        p_correct_t=p_correct_t,
        distances_m=[float(d) for d in sorted(distances)],
        trials=_get(proto, "protocol", "trials", int, required=False, default=200),
        seed=_get(proto, "protocol", "seed", int, required=False),
        horizon_shots=_get(proto, "protocol", "horizon_shots", int, required=False),
        truth_present=_get(proto, "protocol", "truth_present", bool, required=False, default=True),
    )


def _deep_merge(base: dict, override: dict) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _apply_set(raw: dict, assignment: str) -> None:
    if "=" not in assignment:
        raise ConfigError("--set", f"expected path=value, got {assignment!r}")
    path, _, text = assignment.partition("=")
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    node = raw
    parts = path.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(path, "path traverses a non-object value")
    node[parts[-1]] = value


def load_config(args) -> ScenarioConfig:
    raw = json.loads(json.dumps(DEFAULT_CONFIG))  # deep copy
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = _deep_merge(raw, json.load(fh))
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON in {args.config}: {exc}")
    for assignment in args.set or []:
        _apply_set(raw, assignment)
    if getattr(args, "seed", None) is not None:
        raw["protocol"]["seed"] = args.seed
    return parse_config(raw)


def _require_seed(config: ScenarioConfig) -> int:
    if config.seed is None:
        raise ConfigError("protocol.seed", "simulation commands require a seed (config or --seed)")
    return config.seed


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def _write_csv(path: str | None, command: str, seed, header: str, rows) -> None:
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    lines = [f"# qilidar {command} generated={stamp} seed={seed}", header]
    lines.extend(",".join(_fmt(v) if not isinstance(v, str) else v for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _probs_and_distance(config: ScenarioConfig):
    return config.scenario.probabilities(config.distance_m), config.distance_m


def cmd_probs(config: ScenarioConfig, args) -> None:
    probs, _ = _probs_and_distance(config)
    try:
        if probs.p_h1_ci <= probs.p_h0:
            raise DegenerateRegimeError(
                "object present and absent hypotheses coincide (no returned signal)"
            )
        qi = llv_coefficients(probs, Regime.QI)
        ci = llv_coefficients(probs, Regime.CI)
    except DegenerateRegimeError as exc:
        raise DegenerateRegimeError(
            f"{exc} (hint: zero attenuation or source power makes the hypotheses "
            "indistinguishable; adjust channel.xi / channel.geometry or source.mean_photons)"
        )
    rows = [
        ("pr_i", probs.p_i),
        ("pr_h1_i1", probs.p_h1_i1),
        ("pr_h1_i0", probs.p_h1_i0),
        ("pr_h0", probs.p_h0),
        ("pr_h1_ci", probs.p_h1_ci),
        ("m1", qi.m1),
        ("c1", qi.c1),
        ("m2", qi.m2),
        ("c2", qi.c2),
        ("m", ci.m),
        ("c", ci.c),
    ]
    _write_csv(args.output, "probs", config.seed, "quantity,value", rows)


def cmd_nt(config: ScenarioConfig, args) -> None:
    if not config.distances_m:
        raise ConfigError("protocol.distances_m", "at least one distance required")
    rows = []
    for d in config.distances_m:
        xi = config.scenario.attenuation_at(d)
        m_delay = config.scenario.delay_shots(d)
        probs = config.scenario.probabilities(d)
        for regime in (Regime.QI, Regime.CI):
            n_t = shots_to_threshold(probs, config.phi_t, regime)
            rows.append((_fmt(d), regime.value, xi, m_delay, n_t))
    _write_csv(args.output, "nt", config.seed, "distance_m,regime,xi,m_delay,n_t", rows)


def cmd_qa_grid(config: ScenarioConfig, args) -> None:
    if args.grid_n < 2:
        raise ConfigError("--grid-n", "grid must be at least 2x2")
    nbars = np.geomspace(args.nbar_min, args.nbar_max, args.grid_n)
    bgs = np.geomspace(args.bg_min, args.bg_max, args.grid_n)
    rows = []
    for nbar in nbars:
        for bg in bgs:
            scenario = config.scenario.with_source_mean(float(nbar)).with_signal_background(float(bg))
            qa = quantum_advantage(scenario.probabilities(config.distance_m), config.phi_t)
            rows.append((nbar, bg, qa))
    _write_csv(args.output, "qa_grid", config.seed, "n_bar,bg_s,qa", rows)


def cmd_roc(config: ScenarioConfig, args) -> None:
    probs, _ = _probs_and_distance(config)
    shots = args.shots or shots_to_threshold(probs, config.phi_t, Regime.QI)
    pairs = {}
    span_lo, span_hi = math.inf, -math.inf
    for regime in (Regime.QI, Regime.CI):
        pair = llv_moments(probs, llv_coefficients(probs, regime), shots)
        pairs[regime] = pair
        span_lo = min(span_lo, pair.h0.mean - 6.0 * pair.h0.std)
        span_hi = max(span_hi, pair.h1.mean + 6.0 * pair.h1.std)
    thresholds = np.linspace(span_lo, span_hi, args.points)
    thresholds = np.sort(np.append(thresholds, 0.0))  # always include the operating point
    rows = []
    for regime in (Regime.QI, Regime.CI):
        curve = roc_curve(pairs[regime], thresholds)
        rows.extend((p.d_llv, p.p_d, p.p_fa, regime.value) for p in curve.points)
    _write_csv(args.output, "roc", config.seed, "d_llv,p_d,p_fa,regime", rows)


def cmd_detect_sim(config: ScenarioConfig, args) -> None:
    seed = _require_seed(config)
    probs, _ = _probs_and_distance(config)
    coeffs = llv_coefficients(probs, Regime.QI)
    n_t = shots_to_threshold(probs, config.phi_t, Regime.QI)
    n_absent, n_present = args.pre_windows * n_t, args.post_windows * n_t
    streams = generate_transition_streams(probs, n_absent, n_present, seed)
    trace = rolling_llv_shots(streams, n_t, coeffs)
    stride = args.stride or max(1, trace.size // 4000)
    rows = [(n_t + i, trace[i]) for i in range(0, trace.size, stride)]
    _write_csv(args.output, "detect_sim", seed, "z,llv", rows)


def _rangefinding_setup(config: ScenarioConfig):
    if not config.uses_geometry:
        raise ConfigError("channel.geometry", "rangefinding commands need geometry, not a fixed xi")
    if not config.distances_m:
        raise ConfigError("protocol.distances_m", "at least one inspected distance required")
    plan = build_inspection_plan(
        config.scenario, config.distances_m, config.phi_t, config.p_correct_t
    )
    truth = StreamTruth(config.truth_present, config.distance_m if config.truth_present else None)
    return plan, truth


def cmd_rangefind(config: ScenarioConfig, args) -> None:
    seed = _require_seed(config)
    plan, truth = _rangefinding_setup(config)
    result = run_rangefinding_trial(config.scenario, plan, seed, truth, config.horizon_shots)
    cursor = {d: 0 for d in result.series}
    rows = []
    for (timestamp, decision) in result.decisions:
        for d, series in result.series.items():
            i = cursor[d]
            if i < len(series.timestamps) and series.timestamps[i] == timestamp:
                cursor[d] += 1
                mu = sum(series.samples[: i + 1]) / (i + 1)
                rows.append((timestamp, _fmt(d), mu, decision.label()))
                break
    _write_csv(args.output, "rangefind", seed, "elapsed_shots,distance_m,mu_s,decision", rows)


def cmd_pcorrect(config: ScenarioConfig, args) -> None:
    seed = _require_seed(config)
    plan, truth = _rangefinding_setup(config)
    result = p_correct_curve(
        config.scenario, plan, truth, config.trials, seed, config.horizon_shots
    )
    rows = []
    for d, curve in result.curves.items():
        rows.extend(
            (int(e), _fmt(d), p) for e, p in zip(curve.elapsed_shots, curve.p_correct)
        )
    rows.sort(key=lambda r: (r[0], float(r[1])))
    _write_csv(args.output, "pcorrect", seed, "elapsed_shots,distance_m,p_correct", rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qilidar",
        description="Click-detector illumination analytics and rangefinding simulations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_seed=False):
        p.add_argument("--config", help="JSON scenario config (defaults to the built-in reference scenario)")
        p.add_argument("--set", action="append", metavar="PATH=VALUE", help="override a config field")
        p.add_argument("-o", "--output", help="output CSV path (default stdout)")
        if needs_seed:
            p.add_argument("--seed", type=int, help="simulation seed (overrides protocol.seed)")

    common(sub.add_parser("probs", help="click probabilities and LLV coefficients"))
    common(sub.add_parser("nt", help="shots-to-confidence per distance and regime"))

    p = sub.add_parser("qa-grid", help="quantum advantage over a source/background grid")
    common(p)
    p.add_argument("--nbar-min", type=float, default=5e-3)
    p.add_argument("--nbar-max", type=float, default=5e-2)
    p.add_argument("--bg-min", type=float, default=1e-2)
    p.add_argument("--bg-max", type=float, default=2e-1)
    p.add_argument("--grid-n", type=int, default=5)

    p = sub.add_parser("roc", help="receiver operating curves for both regimes")
    common(p)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--shots", type=int, help="shot budget (default: the two-detector N_t)")

    p = sub.add_parser("detect-sim", help="rolling per-shot LLV trace with an appearing object")
    common(p, needs_seed=True)
    p.add_argument("--pre-windows", type=int, default=2, help="object-absent duration in N_t windows")
    p.add_argument("--post-windows", type=int, default=2, help="object-present duration in N_t windows")
    p.add_argument("--stride", type=int, help="emit every Nth time-bin (default: about 4000 rows)")

    common(sub.add_parser("rangefind", help="single rangefinding trial trajectory"), needs_seed=True)
    common(sub.add_parser("pcorrect", help="Monte-Carlo probability of correct decision"), needs_seed=True)
    return parser


_COMMANDS = {
    "probs": cmd_probs,
    "nt": cmd_nt,
    "qa-grid": cmd_qa_grid,
    "roc": cmd_roc,
    "detect-sim": cmd_detect_sim,
    "rangefind": cmd_rangefind,
    "pcorrect": cmd_pcorrect,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
        _COMMANDS[args.command](config, args)
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except GaussianRegimeError as exc:
        print(f"gaussian regime violation: {exc}", file=sys.stderr)
        return 4
    except DegenerateRegimeError as exc:
        print(f"degenerate regime: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
