"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the collected lines are
printed in the terminal summary.
"""
import csv
import filecmp
import math
import os
import time

import numpy as np
import pytest
from scipy import stats

from cqedsim import (AtomParams, CavityParams, DetectionChain, ProbeParams,
                     RngStream, cooperativity, detected_rate, sample_poisson_counts,
                     scattering_rate, trap_depth_at, velocity_from_detuning)
from cqedsim.analysis import fit_least_squares, model_jacobian, model_value
from cqedsim.montecarlo import sample_arrival_times
from cqedsim.scenarios import SCENARIOS, run_scenario
from cqedsim.traps import default_conveyor_trap
from cqedsim.units import MHz, TWO_PI

SUITE_START = time.perf_counter()
KAPPA_MHZ = 7.0


def _run(tmp_path, name, **raw):
    raw.setdefault("scenario", name)
    tag = f"{name}_{raw.get('seed', 0)}_{raw.get('noise', True)}"
    return run_scenario(raw, output_dir=tmp_path / tag)


def _read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


def test_ac01_rate_matches_independent_oracle(criterion):
    rng = np.random.default_rng(20240601)
    n = 10_000
    draws = {
        "g0": rng.uniform(0.1, 50, n), "kappa": rng.uniform(0.1, 30, n),
        "gamma": rng.uniform(0.5, 20, n), "omega": rng.uniform(0.0, 40, n),
        "dc": rng.uniform(-60, 60, n), "da": rng.uniform(-200, 200, n),
        "stark": rng.uniform(-100, 100, n), "frac": rng.uniform(0, 1, n),
    }
    scale = TWO_PI * MHz
    worst = 0.0
    t0 = time.perf_counter()
    for i in range(n):
        g0, kappa, gamma = (draws[k][i] * scale for k in ("g0", "kappa", "gamma"))
        omega, dc, da, stark = (draws[k][i] * scale for k in ("omega", "dc", "da", "stark"))
        g = draws["frac"][i] * g0
        got = scattering_rate(CavityParams(g0=g0, kappa=kappa), AtomParams(gamma=gamma),
                              ProbeParams(rabi_frequency=omega, probe_atom_detuning_bare=da,
                                          cavity_probe_detuning=dc), g, stark)
        ref = (2.0 * kappa * g * g * omega * omega
               / ((dc * dc + kappa * kappa) * ((da + stark) ** 2 + gamma * gamma)))
        if ref != 0.0:
            worst = max(worst, abs(got - ref) / abs(ref))
        elif got != 0.0:
            worst = math.inf
    elapsed = time.perf_counter() - t0
    criterion(1, "scattering rate equals single-expression oracle on 1e4 draws",
              worst <= 1e-12 and elapsed < 1.0,
              f"max rel err {worst:.2e}, {elapsed:.3f} s")


def test_ac02_cooperativity(criterion):
    c = cooperativity(CavityParams(), AtomParams())
    criterion(2, "single-atom cooperativity 13.7 +/- 0.1", abs(c - 13.7) <= 0.1,
              f"C = {c:.4f}")


def test_ac03_detection_chain(criterion):
    chain = DetectionChain((0.5, 0.5, 0.5), dark_count_rate=0.0)
    per_ms = detected_rate(2400.0, chain)
    criterion(3, "0.5^3 x 2400 counts/ms = 300 counts/ms", per_ms == 300.0,
              f"{float(per_ms)!r} counts/ms")


def test_ac04_conveyor_velocity(criterion):
    v = velocity_from_detuning(50e3, 1064e-9)
    rel = abs(v - 0.026) / 0.026
    criterion(4, "50 kHz at 1064 nm gives 26.6 mm/s, within 3% of 2.6 cm/s",
              abs(v - 0.0266) < 1e-12 and rel <= 0.03,
              f"v = {v * 1e3:.4f} mm/s, {100 * rel:.2f}% from 2.6 cm/s")


def test_ac05_trap_depth_at_mot(criterion):
    trap = default_conveyor_trap()
    depth = trap_depth_at(trap, trap.beam.focus_position - 8.5e-3)
    z_r = math.pi * 34e-6 ** 2 / 1064e-9
    oracle = 1e-3 * 34e-6 ** 2 / (34e-6 ** 2 * (1 + (8.5e-3 / z_r) ** 2))
    ratio = depth / 100e-6
    criterion(5, "conveyor depth 8.5 mm from focus = 0.139 mK, within x1.5 of 100 uK",
              abs(depth - oracle) <= 1e-12 * oracle and round(depth * 1e3, 3) == 0.139
              and 1 / 1.5 <= ratio <= 1.5,
              f"{depth * 1e3:.4f} mK (oracle {oracle * 1e3:.4f} mK), ratio {ratio:.3f}")


def test_ac06_detuning_scan(criterion, tmp_path):
    t0 = time.perf_counter()
    off = _run(tmp_path, "detuning_scan", noise=False)
    on = _run(tmp_path, "detuning_scan", seed=2024)
    elapsed = time.perf_counter() - t0
    center_ok = abs(off.metric("fit_center")) <= 0.01 * KAPPA_MHZ
    hwhm_off = off.metric("hwhm_relative_error")
    hwhm_on = on.metric("hwhm_relative_error")
    criterion(6, "detuning scan Lorentzian: HWHM = kappa (0.1% clean, 15% noisy)",
              center_ok and abs(hwhm_off) <= 1e-3 and abs(hwhm_on) <= 0.15
              and on.metric("points_fitted") == 20 and elapsed < 10.0,
              f"clean centre {off.metric('fit_center'):.2e} MHz, HWHM err {hwhm_off:.1e}; "
              f"noisy HWHM {on.metric('fit_hwhm'):.3f} MHz ({100 * hwhm_on:+.1f}%); "
              f"{elapsed:.2f} s")


def test_ac07_power_scan(criterion, tmp_path):
    off = _run(tmp_path, "power_scan", noise=False)
    r2_on, consistent = [], True
    for seed in (1, 2, 3):
        rep = _run(tmp_path, "power_scan", seed=seed)
        r2_on.append(rep.metric("r_squared"))
        rows = _read_rows(os.path.join(rep.output_dir, "power_scan_points.csv"))
        threshold = rep.metric("dark_threshold")
        flagged = [int(r["excluded"]) == 1 for r in rows]
        below = [float(r["mean_counts"]) <= threshold for r in rows]
        consistent &= flagged == below and sum(flagged) == rep.metric("points_excluded")
    criterion(7, "power scan linear: R^2 = 1 clean, > 0.99 noisy after dark exclusion",
              off.metric("r_squared") == pytest.approx(1.0, abs=1e-12)
              and min(r2_on) > 0.99 and consistent,
              f"clean R^2 = {off.metric('r_squared'):.15f}, noisy R^2 min "
              f"{min(r2_on):.4f}, exclusions match 3-sigma threshold: {consistent}")


def test_ac08_transverse_scan(criterion, tmp_path):
    t0 = time.perf_counter()
    on = _run(tmp_path, "transverse_scan", seed=17)
    off = _run(tmp_path, "transverse_scan", noise=False)
    elapsed = time.perf_counter() - t0
    err_on, err_off = on.metric("width_relative_error"), off.metric("width_relative_error")
    criterion(8, "transverse scan Gaussian width = w/sqrt(2) (5% noisy, 0.1% clean)",
              on.metric("runs_averaged") == 17 and abs(err_on) <= 0.05
              and abs(err_off) < 1e-3 and "implied_mode_waist" in on.values
              and elapsed < 30.0,
              f"w_s {on.metric('fit_width'):.3f} um ({100 * err_on:+.2f}%), clean "
              f"{100 * err_off:+.3f}%, implied waist {on.metric('implied_mode_waist'):.2f} um; "
              f"{elapsed:.2f} s")


def test_ac09_multipass_sweeps(criterion, tmp_path):
    fractions = {}
    for passes, speed in ((10, "440 um/s"), (75, "4.4 mm/s")):
        rep = _run(tmp_path, "multipass_sweep", seed=passes, repetitions=100,
                   params={"passes": passes, "speed": speed})
        fractions[passes] = rep.metric("fraction_exact")
    criterion(9, "peak count equals commanded passes on >= 95% of 100 runs",
              min(fractions.values()) >= 0.95,
              f"10 @ 440 um/s: {fractions[10]:.2f}, 75 @ 4.4 mm/s: {fractions[75]:.2f}")


def test_ac10_mot_counting(criterion, tmp_path):
    rep = _run(tmp_path, "mot_counting", seed=10, repetitions=1000)
    acc = rep.metric("count_accuracy")
    levels = rep.metric("resolved_atom_levels")
    criterion(10, "MOT atom counting >= 99% per bin over 1000 traces; 0-5 atom peaks",
              acc >= 0.99 and levels >= 6 and rep.metric("snr_design") >= 10,
              f"accuracy {100 * acc:.2f}% (worst trace "
              f"{100 * rep.metric('count_accuracy_min'):.1f}%), {levels} levels resolved, "
              f"median SNR {rep.metric('snr_median'):.1f}")


def test_ac11_stochastic_engine(criterion):
    rate = 3000.0
    tr = sample_poisson_counts(lambda t: np.full_like(t, rate), 100.0, 1e-3, RngStream(11, 0))
    counts = tr.counts
    dispersion = counts.var(ddof=1) / counts.mean()

    def shape(t):
        return 4000.0 * (0.5 + 0.5 * np.sin(2 * np.pi * t / 0.02) ** 2)

    duration, n_samples = 0.05, 4000
    rng = RngStream(11, 1)
    thinned = np.array([len(sample_arrival_times(shape, duration, 4000.0, rng))
                        for _ in range(n_samples)])
    # oracle: independent Bernoulli trials on a 1 us grid with p = rate * dt
    dt = 1e-6
    grid = (np.arange(int(duration / dt)) + 0.5) * dt
    p = shape(grid) * dt
    gen = RngStream(11, 2).generator
    oracle = np.array([np.count_nonzero(gen.random(p.size) < p) for _ in range(n_samples)])
    ks = stats.ks_2samp(thinned, oracle)
    criterion(11, "Poisson dispersion in [0.9, 1.1]; thinning totals pass KS vs Bernoulli",
              len(counts) == 100_000 and 0.9 <= dispersion <= 1.1 and ks.pvalue > 0.01,
              f"dispersion {dispersion:.4f} over {len(counts)} bins, KS p = {ks.pvalue:.3f}")


def test_ac12_fitter(criterion):
    worst = 0.0
    x = np.linspace(-5, 5, 51)
    for model, p in (("gaussian", [3.0, 0.3, 1.4, 0.5]), ("lorentzian", [2.0, 0.1, 0.9, 0.2]),
                     ("linear", [1.7, -0.4])):
        p = np.array(p)
        jac = model_jacobian(model, x, p)
        for k in range(len(p)):
            h = 1e-6 * max(abs(p[k]), 1.0)
            dp = np.zeros_like(p)
            dp[k] = h
            fd = (model_value(model, x, p + dp) - model_value(model, x, p - dp)) / (2 * h)
            scale = np.max(np.abs(fd)) or 1.0
            worst = max(worst, float(np.max(np.abs(jac[:, k] - fd)) / scale))

    gen = RngStream(12, 0).generator
    truth = np.array([100.0, 1.5, 14.0, 10.0])
    xs = np.linspace(-60, 60, 49)
    clean = model_value("gaussian", xs, truth)
    covered = total = 0
    for _ in range(1000):
        sigma = np.sqrt(clean)
        y = clean + gen.normal(0, sigma)
        fit = fit_least_squares("gaussian", xs, y, sigma)
        inside = np.abs(fit.values - truth) <= 3 * np.array(
            [fit.uncertainties[k] for k in ("A", "x0", "w", "B")])
        covered += int(inside.sum())
        total += inside.size
    coverage = covered / total
    criterion(12, "analytic Jacobians match finite differences; 3-sigma coverage >= 95%",
              worst < 1e-6 and coverage >= 0.95,
              f"max Jacobian rel diff {worst:.1e}, coverage {100 * coverage:.1f}% "
              f"over 1000 fits")


def test_ac13_determinism(criterion, tmp_path):
    small = {"mot_counting": {"repetitions": 3}, "detuning_scan": {"repetitions": 3},
             "lifetime_study": {"repetitions": 50}, "multipass_sweep": {"repetitions": 5},
             "power_scan": {"repetitions": 5}, "transverse_scan": {"repetitions": 5},
             "deliver_and_hold": {"repetitions": 5}}
    identical, n_files = True, 0
    for name in SCENARIOS:
        raw = dict(small[name], scenario=name, seed=1234)
        a = run_scenario(raw, output_dir=tmp_path / name / "a")
        b = run_scenario(raw, output_dir=tmp_path / name / "b")
        files = sorted(os.listdir(a.output_dir))
        _, mismatch, errors = filecmp.cmpfiles(a.output_dir, b.output_dir, files,
                                               shallow=False)
        identical &= files == sorted(os.listdir(b.output_dir)) and not mismatch and not errors
        n_files += len(files)
    criterion(13, "same config and seed give byte-identical outputs for every scenario",
              identical, f"{n_files} files compared across {len(SCENARIOS)} scenarios")


def test_ac14_suite_runtime(criterion):
    elapsed = time.perf_counter() - SUITE_START
    criterion(14, "acceptance suite finishes in under 5 minutes", elapsed < 300.0,
              f"{elapsed:.1f} s")
