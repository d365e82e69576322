"""Acceptance suite: every criterion at its stated tolerance, one PASS line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.
"""

import itertools
import math
import time

import numpy as np
import pytest

from qilidar import (
    ChannelParams,
    Regime,
    StreamTruth,
    click_probabilities,
    count_window,
    delay_shots,
    distinguishability,
    generate_streams,
    lambertian_attenuation,
    llv_coefficients,
    llv_moments,
    llv_value,
    p_correct_curve,
    quantum_advantage,
    roc_curve,
    sample_window_counts,
    shots_to_threshold,
)
from qilidar.quantum_optics import DetectorParams, SourceParams
from qilidar.scene import GeometryParams

import fock_oracle
from conftest import BG_I, BG_S, DISTANCES, ETA, NBAR

TABLE_NT_QI = {1.2: 5.29e4, 3.0: 1.76e6, 3.3: 2.56e6, 6.0: 2.73e7}
TABLE_NT_CI_3M = 3.91e7
TABLE_XI = {1.2: 5.53e-2, 3.0: 8.84e-3, 3.3: 7.31e-3, 6.0: 2.21e-3}
TABLE_DELAY = {1.2: 4, 3.0: 10, 3.3: 11, 6.0: 20}


def _finish(name: str, t0: float, budget: float | None = None) -> None:
    elapsed = time.perf_counter() - t0
    if budget is not None:
        assert elapsed < budget, f"{name}: runtime {elapsed:.1f}s exceeds budget {budget}s"
        print(f"[acceptance] PASS {name} ({elapsed:.2f}s < {budget}s)")
    else:
        print(f"[acceptance] PASS {name} ({elapsed:.2f}s)")


def test_criterion_1_reference_table_regression(reference_scenario):
    t0 = time.perf_counter()
    for d in DISTANCES:
        xi = lambertian_attenuation(GeometryParams(d))
        assert float(f"{xi:.3g}") == TABLE_XI[d], f"xi({d} m)"
        assert delay_shots(d, 5e8, speed_of_light=3e8) == TABLE_DELAY[d]
        probs = reference_scenario.probabilities(d)
        n_t = shots_to_threshold(probs, 0.8, Regime.QI)
        assert n_t == pytest.approx(TABLE_NT_QI[d], rel=0.02), f"N_t({d} m)"
    probs_3m = reference_scenario.probabilities(3.0)
    assert shots_to_threshold(probs_3m, 0.8, Regime.CI) == pytest.approx(TABLE_NT_CI_3M, rel=0.02)
    _finish("criterion 1: reference-table regression", t0, budget=1.0)


def test_criterion_2_idler_rate(reference_probs):
    t0 = time.perf_counter()
    assert 1.76e6 * reference_probs.p_i == pytest.approx(1.98e4, rel=0.01)
    _finish("criterion 2: idler click rate", t0)


def test_criterion_3_expected_present_mean_llv(reference_probs, reference_coeffs):
    t0 = time.perf_counter()
    n_t = shots_to_threshold(reference_probs, 0.8, Regime.QI)
    pair = llv_moments(reference_probs, reference_coeffs, n_t)
    assert pair.h1.mean == pytest.approx(3.36, abs=0.35)
    _finish("criterion 3: expected present mean LLV", t0)


def test_criterion_4_quantum_advantage(reference_scenario, reference_probs):
    t0 = time.perf_counter()
    assert quantum_advantage(reference_probs) == pytest.approx(22.2, rel=0.05)
    nbars = np.geomspace(5e-3, 5e-2, 5)
    bgs = np.geomspace(1e-2, 2e-1, 5)
    grid = np.empty((5, 5))
    for i, nbar in enumerate(nbars):
        for j, bg in enumerate(bgs):
            probs = (
                reference_scenario.with_source_mean(float(nbar))
                .with_signal_background(float(bg))
                .probabilities(3.0)
            )
            grid[i, j] = quantum_advantage(probs)
    assert np.all(np.diff(grid, axis=0) < 0), "advantage must grow as the source weakens"
    assert np.all(np.diff(grid, axis=1) > 0), "advantage must grow as the background brightens"
    _finish("criterion 4: quantum advantage", t0, budget=10.0)


def test_criterion_5_empirical_distinguishability(reference_probs, reference_coeffs):
    t0 = time.perf_counter()
    n_t = shots_to_threshold(reference_probs, 0.8, Regime.QI)
    rng = np.random.default_rng(314159)
    windows = 2000
    positives = {True: 0, False: 0}
    for present in (True, False):
        for _ in range(windows):
            c = sample_window_counts(reference_probs, n_t, rng, object_present=present)
            if llv_value(reference_coeffs, c.x, c.y, c.k, c.n) > 0:
                positives[present] += 1
    phi_hat = positives[True] / windows - positives[False] / windows
    assert phi_hat == pytest.approx(0.80, abs=0.03)
    _finish("criterion 5: empirical distinguishability", t0, budget=30.0)


def test_criterion_6_oracle_suites(reference_probs):
    t0 = time.perf_counter()

    # closed forms vs truncated Fock sums
    for nbar, eta_s, eta_i, xi, bg_s, bg_i in itertools.product(
        (0.0, 0.05, 0.2), (0.0, 0.5, 1.0), (0.0, 0.5, 1.0), (0.0, 0.3, 1.0), (0.0, 0.1, 0.2), (0.0, 0.02, 0.2)
    ):
        probs = click_probabilities(
            SourceParams(nbar),
            DetectorParams(eta_s, bg_s),
            DetectorParams(eta_i, bg_i),
            ChannelParams(xi),
        )
        oracle = fock_oracle.pair_source_probabilities(nbar, eta_s, bg_s, eta_i, bg_i, xi)
        got = (probs.p_i, probs.p_h1_i1, probs.p_h1_i0, probs.p_h0, probs.p_h1_ci)
        assert got == pytest.approx(oracle, abs=1e-10)

    # linear LLV vs binomial log-likelihood ratio on a 20^4 count grid
    for p11, p10, p0 in ((0.7, 0.35, 0.3), (0.05, 0.02, 0.015)):
        from qilidar import ClickProbabilities

        coeffs = llv_coefficients(ClickProbabilities(0.4, p11, p10, p0, 0.4))
        for n in np.linspace(20, 420, 20, dtype=int):
            for k in np.linspace(0, n, 20, dtype=int):
                x = np.linspace(0, k, 20, dtype=int)
                y = np.linspace(0, n - k, 20, dtype=int)
                xx, yy = np.meshgrid(x, y, indexing="ij")
                got = llv_value(coeffs, xx, yy, int(k), int(n))
                want = fock_oracle.binomial_llv(xx, yy, int(k), int(n), p11, p10, p0)
                assert np.allclose(got, want, rtol=1e-9, atol=1e-9)

    # per-shot counting vs binomial shortcut sampler
    from scipy.stats import chi2_contingency

    windows, n = 10_000, 4096
    streams = generate_streams(reference_probs, windows * n, seed=271828)
    per_shot = np.array([count_window(streams, j * n, n).x for j in range(windows)])
    rng = np.random.default_rng(161803)
    shortcut = np.array(
        [sample_window_counts(reference_probs, n, rng).x for _ in range(windows)]
    )
    hi = int(max(per_shot.max(), shortcut.max()))
    table = np.stack(
        [np.bincount(per_shot, minlength=hi + 1), np.bincount(shortcut, minlength=hi + 1)]
    )
    keep = table.sum(axis=0) >= 10
    pooled = np.column_stack([table[:, keep], table[:, ~keep].sum(axis=1)])
    _, p_value, _, _ = chi2_contingency(pooled)
    assert p_value > 0.01
    _finish("criterion 6: oracle suites", t0, budget=60.0)


def test_criterion_7_roc_dominance(reference_probs, tmp_path):
    t0 = time.perf_counter()
    n = 1_760_000
    thresholds = np.linspace(-25.0, 25.0, 200)
    curves = {}
    for regime in (Regime.QI, Regime.CI):
        pair = llv_moments(reference_probs, llv_coefficients(reference_probs, regime), n)
        curve = roc_curve(pair, thresholds)
        assert curve.operating_point.d_llv == 0.0
        pts = curve.points
        curves[regime] = (
            np.array([p.p_fa for p in pts])[::-1],
            np.array([p.p_d for p in pts])[::-1],
        )
    fa_ci, pd_ci = curves[Regime.CI]
    fa_qi, pd_qi = curves[Regime.QI]
    assert np.all(np.interp(fa_ci, fa_qi, pd_qi) >= pd_ci - 1e-9)

    # the CLI emits the d=0 operating rows for both regimes
    from qilidar.cli import main

    out = tmp_path / "roc.csv"
    assert main(["roc", "--points", "200", "-o", str(out)]) == 0
    rows = [line.split(",") for line in out.read_text().splitlines()[2:]]
    assert {r[3] for r in rows if float(r[0]) == 0.0} == {"qi", "ci"}
    _finish("criterion 7: ROC dominance", t0)


def test_criterion_8_rangefinding_monte_carlo(reference_scenario, reference_plan):
    t0 = time.perf_counter()
    truth = StreamTruth(True, 3.0)
    result = p_correct_curve(reference_scenario, reference_plan, truth, trials=200, seed=4711)

    entry = reference_plan.entry_at(3.0)
    mu_e = llv_moments(entry.probs, entry.coeffs, entry.n_t).h1.mean

    assert result.mu_g[3.0] == pytest.approx(3.36, abs=0.3)
    assert result.mu_g[1.2] == pytest.approx(-3.08, abs=0.3)
    assert result.curves[3.0].samples_to_threshold is not None, "P_correct(3 m) must cross 0.95"

    for d in (1.2, 3.3, 6.0):
        e = reference_plan.entry_at(d)
        h0_mean = llv_moments(e.probs, e.coeffs, e.n_t).h0.mean
        assert h0_mean < result.mu_g[d] < mu_e, f"mismatched mean at {d} m must sit between H0 and mu_E"
    _finish("criterion 8: rangefinding Monte Carlo", t0, budget=600.0)
