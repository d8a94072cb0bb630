"""End-to-end scenarios: simulate an experiment, then analyse it like the lab would.

Each scenario draws one :class:`~cqedsim.montecarlo.RngStream` per run
attempt, numbered in a fixed order, so results do not depend on scheduling.
Scans post-select runs in which the atom was delivered and stayed trapped
for the whole measurement; the number of rejected attempts is reported.
"""
import math
import os
from dataclasses import replace

import numpy as np

from ..analysis import (average_runs, count_peaks, detect_steps, estimate_snr,
                        fit_least_squares, histogram_peaks, r_squared,
                        signal_histogram)
from ..conveyor import integrate_plan, make_sweep_plan, make_transport_plan
from ..cqed import scattering_rate
from ..errors import ScenarioRuntimeError
from ..montecarlo import (RngStream, sample_poisson_counts, sample_survival,
                          simulate_cavity_run, simulate_mot_trace,
                          single_atom_signal_rate)
from ..units import MHz, TWO_PI, um
from .config import ScenarioConfig, validate_config
from .report import ScenarioReport, write_csv

SCENARIO_DESCRIPTIONS = {
    "mot_counting": "count atoms in a MOT fluorescence trace by step detection",
    "deliver_and_hold": "transport counted atoms into the cavity and record emission",
    "transverse_scan": "slow single-pass scan across the mode, averaged, Gaussian fit",
    "multipass_sweep": "repeated sweeps across the mode, count the passes",
    "power_scan": "probe power ramp, linear fit of the count rate",
    "detuning_scan": "cavity detuning grid, Lorentzian fit of the count rate",
    "lifetime_study": "storage lifetime versus number of atoms",
}


def run_scenario(config, seed=None, output_dir=None, noise=None, emit_plots=None):
    """Run a scenario from a :class:`ScenarioConfig`, TOML text or mapping."""
    if not isinstance(config, ScenarioConfig):
        config = validate_config(config, seed=seed, output_dir=output_dir, noise=noise)
    else:
        config = _override(config, seed, output_dir, noise)
    if emit_plots is not None:
        config = replace(config, emit_plots=bool(emit_plots))
    os.makedirs(config.output_dir, exist_ok=True)
    report = ScenarioReport(scenario=config.scenario, digest=config.digest,
                            seed=config.seed, noise=config.noise,
                            provenance=list(config.provenance),
                            output_dir=config.output_dir)
    try:
        _RUNNERS[config.scenario](config, report)
    except ScenarioRuntimeError:
        raise
    except Exception as exc:  # replay information must survive
        raise ScenarioRuntimeError(f"{config.scenario} failed: {exc}", config.seed) from exc
    if config.emit_plots:
        _emit_plot_script(report)
    report.check_expectations(config.expectations)
    report.write()
    return report


def _override(config, seed, output_dir, noise):
    """Copy of an already validated config with command-line overrides applied."""
    changes, resolved = {}, dict(config.resolved)
    if seed is not None:
        changes["seed"] = resolved["seed"] = int(seed)
    if noise is not None:
        changes["noise"] = resolved["noise"] = bool(noise)
    if output_dir is not None:
        changes["output_dir"] = str(output_dir)
    if not changes:
        return config
    return replace(config, resolved=resolved, **changes)


def _stream_counter(cfg):
    state = {"next": 0}

    def next_stream():
        rng = RngStream(cfg.seed, state["next"])
        state["next"] += 1
        return rng

    return next_stream


def _survives(cfg, rng, duration, n_atoms=1):
    """Draw loss for ``n_atoms`` over ``duration``; True if none is lost."""
    if not cfg.noise:
        return True
    sign = np.sign(cfg.physics.probe.cavity_probe_detuning)
    return all(sample_survival(cfg.loss, (sign, n_atoms), duration, rng) is None
               for _ in range(n_atoms))


def _delivered(cfg, rng, n_atoms):
    if not cfg.noise:
        return n_atoms
    return int(rng.generator.binomial(n_atoms, cfg.physics.transfer_mot_to_cavity))


def _post_selected_runs(cfg, make_run, duration, wanted, max_attempts, next_stream):
    """Collect ``wanted`` runs in which one atom arrives and survives ``duration``."""
    runs, rejected = [], 0
    while len(runs) < wanted:
        if rejected + len(runs) >= max_attempts:
            raise ScenarioRuntimeError(
                f"only {len(runs)} of {wanted} runs survived in {max_attempts} attempts",
                cfg.seed)
        rng = next_stream()
        if _delivered(cfg, rng, 1) == 1 and _survives(cfg, rng, duration):
            runs.append(make_run(rng))
        else:
            rejected += 1
    return runs, rejected


# --------------------------------------------------------------- mot_counting

def _mot_counting(cfg, report):
    s = cfg.settings
    bw = s["bin_width"]
    empty = replace(cfg.mot, loading_rate=0.0)
    accuracies, snrs, ncps, units, backgrounds, values = [], [], [], [], [], []
    first = None
    for rep in range(cfg.repetitions):
        rng = RngStream(cfg.seed, rep)
        cal, _ = simulate_mot_trace(empty, s["calibration_frames"] * bw, bw, rng,
                                    noise=cfg.noise, scenario_id=cfg.scenario)
        trace, truth = simulate_mot_trace(cfg.mot, s["duration"], bw, rng,
                                          noise=cfg.noise, scenario_id=cfg.scenario)
        fit = detect_steps(trace, min_segment=s["min_segment"], penalty=s["penalty"],
                           background=float(np.mean(cal.counts)))
        accuracies.append(float(np.mean(fit.per_bin() == truth.per_bin)))
        snr = estimate_snr(trace, fit)
        snrs.append(np.nan if snr is None else snr)
        ncps.append(len(fit.change_points))
        units.append(np.nan if fit.single_atom_unit is None else fit.single_atom_unit)
        backgrounds.append(fit.background)
        values.append(np.asarray(trace.counts, dtype=float))
        if first is None:
            first = (trace, truth, fit)

    trace, truth, fit = first
    trace.to_csv(report.register(report.path("trace")))
    write_csv(report.register(report.path("steps")),
              ["bin", "t_start_s", "counts", "fitted_level", "atom_count", "true_count"],
              zip(range(len(trace)), trace.t_start, trace.counts, fit.reconstructed(),
                  fit.per_bin(), truth.per_bin))
    write_csv(report.register(report.path("runs")),
              ["repetition", "accuracy", "snr", "change_points", "unit", "background"],
              zip(range(cfg.repetitions), accuracies, snrs, ncps, units, backgrounds))

    pooled = np.concatenate(values)
    unit = float(np.nanmedian(units)) if np.any(np.isfinite(units)) else float("nan")
    background = float(np.median(backgrounds))
    peaks = np.empty(0)
    levels_resolved = 0
    if cfg.noise and np.isfinite(unit):
        hist, edges = signal_histogram(pooled, s["histogram_bin"])
        write_csv(report.register(report.path("histogram")), ["bin_center", "frames"],
                  zip(0.5 * (edges[:-1] + edges[1:]), hist))
        peaks = histogram_peaks(pooled, s["histogram_bin"])
        k = 0
        while np.any(np.abs(peaks - (background + k * unit)) < 0.25 * unit):
            k += 1
        levels_resolved = k
    mot = cfg.mot
    design_snr = (mot.fluorescence_per_atom * bw
                  / math.sqrt(mot.background_rate * bw + mot.read_noise_sigma ** 2))
    report.add("count_accuracy", float(np.mean(accuracies)))
    report.add("count_accuracy_min", float(np.min(accuracies)))
    report.add("snr_median", float(np.nanmedian(snrs)) if np.any(~np.isnan(snrs)) else None)
    report.add("snr_design", design_snr)
    report.add("single_atom_unit", unit, unit="counts/frame")
    report.add("background_level", background, unit="counts/frame")
    report.add("histogram_peaks", int(len(peaks)))
    report.add("resolved_atom_levels", int(levels_resolved))
    report.add("max_true_atoms_first_run", int(np.max(truth.numbers)))


# ----------------------------------------------------------- deliver_and_hold

def _deliver_and_hold(cfg, report):
    s = cfg.settings
    p = cfg.physics
    if cfg.plan is not None:
        plan = replace(cfg.plan, drift_speed=cfg.drift_speed)
    else:
        plan = make_transport_plan(p.cavity_position, s["transport_detuning"],
                                   s["ramp_time"], p.lattice_wavelength,
                                   drift_speed=cfg.drift_speed)
    t_rest = plan.duration
    probe_on = t_rest + s["probe_delay"]
    total = probe_on + s["hold"]
    traj = integrate_plan(plan, 1e-3, total)
    n = s["n_atoms"]
    bw = s["bin_width"]
    traces, rows = [], []
    loss_durations, losses = 0.0, 0
    for rep in range(cfg.repetitions):
        rng = RngStream(cfg.seed, rep)
        k = _delivered(cfg, rng, n)
        trace, loss_times = simulate_cavity_run(p, traj, cfg.loss, k, rng, bw, total,
                                                probe_on=probe_on, noise=cfg.noise,
                                                scenario_id=cfg.scenario)
        traces.append(trace)
        held = np.minimum(loss_times, total) - probe_on
        loss_durations += float(np.sum(held))
        losses += int(np.sum(np.isfinite(loss_times)))
        first_loss = float(np.min(loss_times)) if k else float("inf")
        rows.append((rep, n, k, int(np.sum(np.isfinite(loss_times))), first_loss))

    traces[0].to_csv(report.register(report.path("trace")))
    mean = average_runs(traces)
    mean.to_csv(report.register(report.path("mean_trace")))
    write_csv(report.register(report.path("runs")),
              ["repetition", "atoms_counted", "atoms_delivered", "atoms_lost",
               "first_loss_s"], rows)

    window = min(1.0, s["hold"])
    t = traces[0].t_start
    early = (t >= probe_on) & (t < probe_on + window)
    late = t >= total - window
    dark = p.detection.dark_count_rate * bw
    delivered = np.array([r[2] for r in rows])
    signal_early = np.array([np.mean(tr.counts[early]) - dark for tr in traces])
    signal_late = np.array([np.mean(tr.counts[late]) - dark for tr in traces])
    has_atoms = delivered > 0
    per_atom = (np.sum(signal_early[has_atoms]) / np.sum(delivered[has_atoms]) / (bw * 1e3)
                if has_atoms.any() else float("nan"))
    predicted = float(single_atom_signal_rate(p, plan.position_at(probe_on))) / 1e3
    intact = np.array([r[3] == 0 for r in rows]) & has_atoms
    ratio = (float(np.sum(signal_late[intact]) / np.sum(signal_early[intact]))
             if intact.any() and np.sum(signal_early[intact]) > 0 else float("nan"))
    predicted_ratio = float(single_atom_signal_rate(p, plan.position_at(total - window / 2))
                            / single_atom_signal_rate(p, plan.position_at(probe_on + window / 2)))
    lifetime = loss_durations / losses if losses else float("inf")
    report.add("transport_time", t_rest, unit="s")
    report.add("stop_position_error", float(plan.position_at(t_rest) - p.cavity_position),
               unit="m")
    report.add("delivered_fraction", float(np.mean(delivered) / n) if n else float("nan"))
    report.add("per_atom_rate", float(per_atom), unit="counts/ms")
    report.add("predicted_per_atom_rate", predicted, unit="counts/ms")
    report.add("late_to_early_signal_ratio", ratio)
    report.add("predicted_late_to_early_ratio", predicted_ratio)
    report.add("drift_displacement", cfg.drift_speed * total, unit="m")
    report.add("storage_lifetime", lifetime,
               lifetime / math.sqrt(losses) if losses else None, unit="s")
    report.add("atoms_lost", losses)


# ------------------------------------------------------------ transverse_scan

def _transverse_scan(cfg, report):
    s = cfg.settings
    p = cfg.physics
    plan = make_sweep_plan(s["amplitude"], s["speed"], 1, p.lattice_wavelength,
                           center=p.cavity_position, drift_speed=cfg.drift_speed)
    traj = integrate_plan(plan, 1e-3)
    duration = plan.duration
    next_stream = _stream_counter(cfg)

    def one_run(rng):
        trace, _ = simulate_cavity_run(p, traj, None, 1, rng, s["bin_width"], duration,
                                       noise=cfg.noise, scenario_id=cfg.scenario)
        return trace

    runs, rejected = _post_selected_runs(cfg, one_run, duration, cfg.repetitions,
                                         s["max_attempts"], next_stream)
    mean = average_runs(runs)
    x_um = (plan.position_at(mean.t_center) - p.cavity_position) / um
    sigma = mean.stderr if mean.stderr is not None and np.all(mean.stderr > 0) else None
    fit = fit_least_squares("gaussian", x_um, mean.counts, sigma)
    write_csv(report.register(report.path("average")),
              ["position_um", "mean_counts", "stderr", "fit"],
              zip(x_um, mean.counts,
                  mean.stderr if mean.stderr is not None else [None] * len(x_um),
                  fit(x_um)))
    _write_fit(report, fit)
    w_s = fit.params["w"]
    expected = p.cavity.mode_waist / math.sqrt(2.0) / um
    report.add("fit_width", w_s, fit.uncertainties["w"], unit="um")
    report.add("expected_width", expected, unit="um")
    report.add("width_relative_error", w_s / expected - 1.0)
    report.add("implied_mode_waist", w_s * math.sqrt(2.0),
               fit.uncertainties["w"] * math.sqrt(2.0), unit="um")
    report.add("configured_mode_waist", p.cavity.mode_waist / um, unit="um")
    report.add("fit_center", fit.params["x0"], fit.uncertainties["x0"], unit="um")
    report.add("fit_amplitude", fit.params["A"], fit.uncertainties["A"], unit="counts/bin")
    report.add("fit_offset", fit.params["B"], fit.uncertainties["B"], unit="counts/bin")
    report.add("fit_converged", bool(fit.converged))
    report.add("runs_averaged", len(runs))
    report.add("runs_rejected", rejected)


# ------------------------------------------------------------ multipass_sweep

def _multipass_sweep(cfg, report):
    s = cfg.settings
    p = cfg.physics
    passes = s["passes"]
    plan = make_sweep_plan(s["amplitude"], s["speed"], passes, p.lattice_wavelength,
                           center=p.cavity_position, drift_speed=cfg.drift_speed)
    traj = integrate_plan(plan, 1e-3)
    duration = plan.duration
    bw = s["bin_width"]
    crossing = p.cavity.mode_waist / s["speed"]
    # a box one crossing time wide roughly matches the pulse shape
    smooth = max(1, int(round(crossing / bw)))
    next_stream = _stream_counter(cfg)

    def one_run(rng):
        trace, _ = simulate_cavity_run(p, traj, None, 1, rng, bw, duration,
                                       noise=cfg.noise, scenario_id=cfg.scenario)
        return trace

    runs, rejected = _post_selected_runs(cfg, one_run, duration, cfg.repetitions,
                                         s["max_attempts"], next_stream)
    found = [count_peaks(tr.counts, smooth=smooth)[0] for tr in runs]
    runs[0].to_csv(report.register(report.path("trace")))
    write_csv(report.register(report.path("runs")),
              ["repetition", "passes_commanded", "peaks_found"],
              [(i, passes, f) for i, f in enumerate(found)])
    report.add("passes_commanded", passes)
    report.add("fraction_exact", float(np.mean(np.array(found) == passes)))
    report.add("mean_peaks_found", float(np.mean(found)))
    report.add("sweep_duration", duration, unit="s")
    report.add("smoothing_bins", smooth)
    report.add("runs_rejected", rejected)


# ----------------------------------------------------------------- power_scan

def _power_scan(cfg, report):
    s = cfg.settings
    p = cfg.physics
    configured = p.probe.cavity_probe_detuning
    sign = 1 if configured >= 0 else -1
    p = p.with_probe(cavity_probe_detuning=abs(configured),
                     rabi_frequency=s["rabi_at_power_end"])
    cfg_used = replace(cfg, physics=p)
    if sign < 0:
        report.notes.append("configured cavity detuning is negative; its magnitude is "
                            "used so the atom is cooled")
    p0, p1, ramp = s["power_start"], s["power_end"], s["ramp_time"]
    bw = s["bin_width"]
    rate_end = float(single_atom_signal_rate(p, p.cavity_position))
    dark_rate = p.detection.dark_count_rate

    def power(t):
        return p0 + (p1 - p0) * np.asarray(t) / ramp

    def signal(t):
        return rate_end * power(t) / p1 + dark_rate

    next_stream = _stream_counter(cfg)

    def one_run(rng):
        return sample_poisson_counts(signal, ramp, bw, rng, noise=cfg.noise,
                                     scenario_id=cfg.scenario)

    runs, rejected = _post_selected_runs(cfg_used, one_run, ramp, cfg.repetitions,
                                         s["max_attempts"], next_stream)
    dark_runs = [sample_poisson_counts(lambda t: np.full_like(t, dark_rate),
                                       s["dark_duration"], bw, next_stream(),
                                       noise=cfg.noise) for _ in range(cfg.repetitions)]
    mean = average_runs(runs)
    dark_all = np.concatenate([np.asarray(d.counts, dtype=float) for d in dark_runs])
    dark_level = float(dark_all.mean())
    dark_sem = (float(dark_all.std(ddof=1)) / math.sqrt(cfg.repetitions)
                if cfg.noise and dark_all.size > 1 else 0.0)
    threshold = dark_level + s["dark_threshold_sigma"] * dark_sem
    powers = power(mean.t_center)
    excluded = mean.counts <= threshold
    keep = ~excluded
    x_uw = powers / 1e-6
    sigma = (mean.stderr[keep] if mean.stderr is not None and np.all(mean.stderr[keep] > 0)
             else None)
    fit = fit_least_squares("linear", x_uw[keep], mean.counts[keep], sigma)
    r2 = r_squared(x_uw[keep], mean.counts[keep], fit)
    rabi = s["rabi_at_power_end"] * np.sqrt(powers / p1)
    write_csv(report.register(report.path("points")),
              ["power_uW", "rabi_MHz", "mean_counts", "stderr", "excluded", "fit"],
              zip(x_uw, rabi / (TWO_PI * MHz), mean.counts,
                  mean.stderr if mean.stderr is not None else [None] * len(x_uw),
                  excluded.astype(int), fit(x_uw)))
    _write_fit(report, fit)
    report.add("slope", fit.params["m"], fit.uncertainties["m"], unit="counts/bin/uW")
    report.add("intercept", fit.params["B"], fit.uncertainties["B"], unit="counts/bin")
    report.add("r_squared", r2)
    report.add("points_excluded", int(excluded.sum()))
    report.add("points_fitted", int(keep.sum()))
    report.add("dark_level", dark_level, dark_sem, unit="counts/bin")
    report.add("dark_threshold", threshold, unit="counts/bin")
    report.add("cavity_detuning_used", abs(configured) / (TWO_PI * MHz), unit="MHz")
    report.add("cavity_detuning_configured_sign", sign)
    report.add("rabi_min", float(rabi.min() / (TWO_PI * MHz)), unit="MHz")
    report.add("rabi_max", float(rabi.max() / (TWO_PI * MHz)), unit="MHz")
    report.add("runs_rejected", rejected)


# -------------------------------------------------------------- detuning_scan

def _detuning_scan(cfg, report):
    s = cfg.settings
    p = cfg.physics
    grid = np.linspace(s["grid_start"], s["grid_stop"], s["grid_points"])
    if s["extra_points"]:
        grid = np.concatenate([grid, s["extra_points"]])
    dwell = s["dwell"]
    dark = p.detection.dark_count_rate
    next_stream = _stream_counter(cfg)
    means, sems, losses_neg = [], [], []
    for delta_c in grid:
        pp = p.with_probe(cavity_probe_detuning=float(delta_c))
        rate = float(single_atom_signal_rate(pp, pp.cavity_position))
        cfg_pt = replace(cfg, physics=pp)
        if delta_c >= 0:
            def one_run(rng, rate=rate):
                return sample_poisson_counts(lambda t: np.full_like(t, rate + dark),
                                             dwell, dwell, rng, noise=cfg.noise).counts[0]
            counts, _ = _post_selected_runs(cfg_pt, one_run, dwell, cfg.repetitions,
                                            s["max_attempts"], next_stream)
            losses_neg.append(0)
        else:
            # heating side: the atom is usually lost during the dwell
            counts, lost = [], 0
            for _ in range(cfg.repetitions):
                rng = next_stream()
                t_loss = (sample_survival(cfg.loss, (-1, 1), dwell, rng)
                          if cfg.noise else None)
                stay = dwell if t_loss is None else t_loss
                lost += t_loss is not None
                mean_counts = rate * stay + dark * dwell
                counts.append(rng.generator.poisson(mean_counts) if cfg.noise
                              else mean_counts)
            losses_neg.append(lost)
        counts = np.asarray(counts, dtype=float)
        means.append(counts.mean())
        sems.append(counts.std(ddof=1) / math.sqrt(len(counts)) if len(counts) > 1 else 0.0)
    means, sems = np.array(means), np.array(sems)
    x_mhz = grid / (TWO_PI * MHz)
    used = grid >= 0
    sigma = sems[used] if cfg.noise and np.all(sems[used] > 0) else None
    fit = fit_least_squares("lorentzian", x_mhz[used], means[used], sigma)
    write_csv(report.register(report.path("points")),
              ["cavity_detuning_MHz", "mean_counts", "stderr", "in_fit", "atoms_lost", "fit"],
              zip(x_mhz, means, sems, used.astype(int), losses_neg, fit(x_mhz)))
    _write_fit(report, fit)
    kappa = p.cavity.kappa / (TWO_PI * MHz)
    report.add("fit_center", fit.params["x0"], fit.uncertainties["x0"], unit="MHz")
    report.add("fit_hwhm", fit.params["h"], fit.uncertainties["h"], unit="MHz")
    report.add("kappa", kappa, unit="MHz")
    report.add("hwhm_relative_error", fit.params["h"] / kappa - 1.0)
    report.add("center_over_kappa", fit.params["x0"] / kappa)
    report.add("fit_amplitude", fit.params["A"], fit.uncertainties["A"], unit="counts")
    report.add("fit_offset", fit.params["B"], fit.uncertainties["B"], unit="counts")
    report.add("fit_converged", bool(fit.converged))
    report.add("points_fitted", int(used.sum()))
    report.add("points_heating_side", int((~used).sum()))
    peak_rate = scattering_rate(p.cavity, p.atom, p.with_probe(cavity_probe_detuning=0.0).probe,
                                p.cavity.g0, p.trap.stark_shift_at_focus)
    report.add("peak_scattering_rate_g0", float(peak_rate), unit="photons/s")


# ------------------------------------------------------------- lifetime_study

def _lifetime_study(cfg, report):
    s = cfg.settings
    hold = s["hold"]
    sign = 1 if cfg.physics.probe.cavity_probe_detuning >= 0 else -1
    grid = np.linspace(0.0, hold, s["survival_grid"])
    curves = {}
    stream = 0
    for n in s["atom_numbers"]:
        tau = cfg.loss.lifetime_for(sign, n)
        if cfg.noise:
            times = []
            for _ in range(cfg.repetitions):
                rng = RngStream(cfg.seed, stream)
                stream += 1
                for _ in range(n):
                    t = sample_survival(cfg.loss, (sign, n), hold, rng)
                    times.append(np.inf if t is None else t)
            times = np.array(times)
            lost = np.isfinite(times)
            exposure = float(np.sum(np.minimum(times, hold)))
            est = exposure / lost.sum() if lost.any() else float("inf")
            unc = est / math.sqrt(lost.sum()) if lost.any() else None
            curve = np.array([np.mean(times > g) for g in grid])
        else:
            curve = np.exp(-grid / tau) if np.isfinite(tau) else np.ones_like(grid)
            if np.isfinite(tau):
                fit = fit_least_squares("linear", grid, np.log(curve))
                est = -1.0 / fit.params["m"]
            else:
                est = float("inf")
            unc = None
        curves[n] = curve
        report.add(f"lifetime_n{n}", est, unc, unit="s")
        report.add(f"configured_lifetime_n{n}", tau, unit="s")
    write_csv(report.register(report.path("survival")),
              ["t_s"] + [f"surviving_fraction_n{n}" for n in curves],
              zip(grid, *curves.values()))


def _write_fit(report, fit):
    rows = [(name, value, unc) for name, value, unc in fit.to_rows()]
    rows += [("residual_norm", fit.residual_norm, None), ("chi2", fit.chi2, None),
             ("dof", fit.dof, None), ("iterations", fit.iterations, None),
             ("converged", int(fit.converged), None)]
    write_csv(report.register(report.path("fit")), ["parameter", "value", "uncertainty"],
              rows, comments=[f"model={fit.model}"])


_PLOT_COLUMNS = {
    "mot_counting": ("steps", "t_start_s", "counts"),
    "deliver_and_hold": ("mean_trace", "t_start_s", "counts"),
    "transverse_scan": ("average", "position_um", "mean_counts"),
    "multipass_sweep": ("trace", "t_start_s", "counts"),
    "power_scan": ("points", "power_uW", "mean_counts"),
    "detuning_scan": ("points", "cavity_detuning_MHz", "mean_counts"),
    "lifetime_study": ("survival", "t_s", "surviving_fraction_n1"),
}


def _emit_plot_script(report):
    artifact, xcol, ycol = _PLOT_COLUMNS[report.scenario]
    csv_name = f"{report.scenario}_{artifact}.csv"
    script = f'''"""Plot {csv_name}. Requires pandas and matplotlib."""
import pandas as pd
import matplotlib.pyplot as plt

df = pd.read_csv("{csv_name}", comment="#")
ax = df.plot(x="{xcol}", y="{ycol}", marker=".", linestyle="none")
if "fit" in df:
    df.plot(x="{xcol}", y="fit", ax=ax)
ax.set_title("{report.scenario}")
plt.savefig("{report.scenario}.png", dpi=150)
'''
    path = report.register(report.path("plot", "py"))
    with open(path, "w", newline="\n") as fh:
        fh.write(script)


_RUNNERS = {
    "mot_counting": _mot_counting,
    "deliver_and_hold": _deliver_and_hold,
    "transverse_scan": _transverse_scan,
    "multipass_sweep": _multipass_sweep,
    "power_scan": _power_scan,
    "detuning_scan": _detuning_scan,
    "lifetime_study": _lifetime_study,
}
