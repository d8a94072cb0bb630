"""Stochastic generation: photon counting, atom loss and MOT fluorescence.

Every random draw goes through an explicit :class:`RngStream`; there is no
module-level random state. Streams with the same ``(seed, stream_id)``
reproduce the same sequence regardless of how runs are scheduled.
"""
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .cqed import effective_axial_coupling, scattering_rate
from .errors import InputError, ModelError
from .traps import stark_shift_at


class RngStream:
    """Independent random stream keyed by ``(seed, stream_id)``."""

    def __init__(self, seed, stream_id=0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


@dataclass
class CountTrace:
    """Time-binned detector counts.

    ``counts`` holds integers for sampled traces and floats for expected
    (noise-free) traces and run averages. ``stderr`` is only set on averages.
    """
    bin_width: float
    counts: np.ndarray
    t0: float = 0.0
    seed: Optional[int] = None
    scenario_id: str = ""
    stderr: Optional[np.ndarray] = None

    def __post_init__(self):
        self.counts = np.asarray(self.counts)
        if self.counts.ndim != 1 or len(self.counts) < 1:
            raise InputError("a trace needs at least one bin")
        if not self.bin_width > 0:
            raise InputError("bin_width must be positive")
        if np.any(self.counts < 0):
            raise InputError("counts must be non-negative")

    def __len__(self):
        return len(self.counts)

    @property
    def t_start(self):
        return self.t0 + self.bin_width * np.arange(len(self.counts))

    @property
    def t_center(self):
        return self.t_start + 0.5 * self.bin_width

    @property
    def rate(self):
        return self.counts / self.bin_width

    def to_csv(self, path):
        header = [f"# bin_width={self.bin_width!r}",
                  f"# seed={self.seed}",
                  f"# scenario={self.scenario_id}"]
        cols = ["t_start_s", "counts"]
        rows = [self.t_start, self.counts]
        if self.stderr is not None:
            cols.append("stderr")
            rows.append(self.stderr)
        lines = header + [",".join(cols)]
        for values in zip(*rows):
            lines.append(",".join(_fmt(v) for v in values))
        with open(path, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path):
        meta = {}
        data = []
        columns = None
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, value = line[1:].strip().partition("=")
                    meta[key.strip()] = value.strip()
                elif columns is None:
                    columns = line.split(",")
                else:
                    data.append([float(v) for v in line.split(",")])
        arr = np.array(data, dtype=float).reshape(-1, len(columns))
        counts = arr[:, columns.index("counts")]
        if np.all(counts == np.round(counts)):
            counts = counts.astype(np.int64)
        seed = meta.get("seed")
        return cls(bin_width=float(meta["bin_width"]), counts=counts,
                   t0=float(arr[0, 0]) if len(arr) else 0.0,
                   seed=None if seed in (None, "None") else int(seed),
                   scenario_id=meta.get("scenario", ""),
                   stderr=arr[:, columns.index("stderr")] if "stderr" in columns else None)


def _fmt(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def integrate_rate(rate_fn, duration, bin_width, t0=0.0, substeps=8):
    """Expected counts per bin, by fixed-step midpoint integration of ``rate_fn``.

    ``rate_fn`` must accept an array of times. Raises :class:`ModelError` at
    the first negative rate.
    """
    if not bin_width > 0:
        raise InputError("bin_width must be positive")
    if substeps < 8:
        raise InputError("need at least 8 sub-steps per bin")
    n_bins = max(int(round(duration / bin_width)), 1)
    h = bin_width / substeps
    t = t0 + h * (np.arange(n_bins * substeps) + 0.5)
    rate = np.broadcast_to(np.asarray(rate_fn(t), dtype=float), t.shape)
    bad = np.flatnonzero(rate < 0)
    if bad.size:
        raise ModelError(f"negative rate {rate[bad[0]]:g} at t={t[bad[0]]:.9g} s")
    return rate.reshape(n_bins, substeps).sum(axis=1) * h


def sample_poisson_counts(rate_fn, duration, bin_width, rng, t0=0.0,
                          substeps=8, noise=True, scenario_id=""):
    """Poisson counts per bin with mean equal to the integrated rate.

    With ``noise=False`` the expected counts are returned unchanged.
    """
    mean = integrate_rate(rate_fn, duration, bin_width, t0=t0, substeps=substeps)
    counts = rng.generator.poisson(mean) if noise else mean
    return CountTrace(bin_width=bin_width, counts=counts, t0=t0,
                      seed=rng.seed if rng is not None else None,
                      scenario_id=scenario_id)


def sample_arrival_times(rate_fn, duration, rate_max, rng, t0=0.0):
    """Photon arrival times of an inhomogeneous Poisson process by thinning.

    Candidates are drawn from a homogeneous process at ``rate_max`` and kept
    with probability rate(t) / rate_max.
    """
    gen = rng.generator
    n = gen.poisson(rate_max * duration)
    t = np.sort(t0 + duration * gen.random(n))
    rate = np.asarray(rate_fn(t), dtype=float)
    if np.any(rate < 0):
        raise ModelError("negative rate encountered while thinning")
    if np.any(rate > rate_max * (1 + 1e-12)):
        raise ModelError("rate exceeds the thinning envelope rate_max")
    keep = gen.random(n) * rate_max < rate
    return t[keep]


@dataclass(frozen=True)
class LossModel:
    """Phenomenological exponential storage lifetimes.

    ``multiatom_lifetime_map`` maps an atom number to the per-atom lifetime
    used when at least that many atoms share the cavity. ``np.inf`` disables
    loss for a branch.
    """
    cooling_lifetime: float = 15.0
    heating_lifetime: float = 0.05
    multiatom_lifetime_map: Dict[int, float] = field(
        default_factory=lambda: {4: 0.5})

    def __post_init__(self):
        lifetimes = [self.cooling_lifetime, self.heating_lifetime,
                     *self.multiatom_lifetime_map.values()]
        if any(not tau > 0 for tau in lifetimes):
            raise ValueError("all lifetimes must be positive")

    def lifetime_for(self, detuning_sign, n_atoms):
        if detuning_sign < 0:
            return self.heating_lifetime
        eligible = [k for k in self.multiatom_lifetime_map if k <= n_atoms]
        if eligible:
            return self.multiatom_lifetime_map[max(eligible)]
        return self.cooling_lifetime

    @classmethod
    def disabled(cls):
        return cls(np.inf, np.inf, {})


def sample_survival(loss, condition, duration, rng):
    """Loss time of one atom within ``duration``, or ``None`` if it survives.

    ``condition`` is ``(detuning_sign, n_atoms)``.
    """
    tau = loss.lifetime_for(*condition)
    if not np.isfinite(tau):
        return None
    t = rng.generator.exponential(tau)
    return float(t) if t < duration else None


def single_atom_signal_rate(params, positions):
    """Detected count rate (counts/s, no dark counts) of one atom on the conveyor.

    ``positions`` are conveyor-axis coordinates; the transverse distance to
    the cavity axis is ``|x - cavity_position|``.
    """
    x = np.asarray(positions, dtype=float)
    g_axial = effective_axial_coupling(params.cavity, params.atom,
                                       params.axial_model, params.axial_z)
    rho = x - params.cavity_position
    g = g_axial * np.exp(-(rho / params.cavity.mode_waist) ** 2)
    stark = stark_shift_at(params.trap, x)
    r = scattering_rate(params.cavity, params.atom, params.probe, g, stark)
    return params.detection.efficiency * params.signal_reduction * r


def simulate_cavity_run(params, trajectory, loss, n_atoms, rng, bin_width=1e-3,
                        duration=None, probe_on=0.0, loss_start=None, noise=True,
                        scenario_id=""):
    """Photon-count trace for ``n_atoms`` atoms riding ``trajectory``.

    Probe light (and hence signal) starts at ``probe_on``; the storage-loss
    clock starts at ``loss_start`` (default ``probe_on``). Returns
    ``(trace, loss_times)`` with one absolute loss time per atom, ``inf``
    for survivors. With ``noise=False`` there are no losses and the trace
    holds expected counts.
    """
    if duration is None:
        duration = trajectory.duration
    if duration > trajectory.duration + 1e-9:
        raise InputError("trajectory is shorter than the requested duration")
    if loss_start is None:
        loss_start = probe_on
    loss_times = np.full(int(n_atoms), np.inf)
    if noise and loss is not None and n_atoms > 0:
        sign = np.sign(params.probe.cavity_probe_detuning)
        for i in range(int(n_atoms)):
            t_loss = sample_survival(loss, (sign, n_atoms), duration - loss_start, rng)
            if t_loss is not None:
                loss_times[i] = loss_start + t_loss
    dark = params.detection.dark_count_rate

    def rate(t):
        present = (loss_times[None, :] > t[:, None]).sum(axis=1) if n_atoms else 0
        per_atom = single_atom_signal_rate(params, trajectory.position_at(t))
        return np.where(t >= probe_on, present * per_atom, 0.0) + dark

    trace = sample_poisson_counts(rate, duration, bin_width, rng, noise=noise,
                                  scenario_id=scenario_id)
    return trace, loss_times


@dataclass(frozen=True)
class MotModel:
    """High-gradient MOT holding a handful of atoms.

    Defaults give a single-atom step of 800 counts per 500 ms frame against
    a background noise of about 60 counts (SNR ~13) and a steady-state mean
    of 2.5 atoms. The loading rate and background level are not calibrated
    against a real camera.
    """
    loading_rate: float = 0.025
    per_atom_loss_rate: float = 0.01
    fluorescence_per_atom: float = 1600.0
    background_rate: float = 4000.0
    read_noise_sigma: float = 40.0

    def __post_init__(self):
        for name in ("loading_rate", "per_atom_loss_rate", "fluorescence_per_atom",
                     "background_rate", "read_noise_sigma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass
class AtomTimeline:
    """Ground truth for a MOT trace.

    ``event_times``/``numbers`` describe the step function (number after each
    event, starting from ``numbers[0]`` at t=0). ``per_bin`` is the atom
    number occupying the largest part of each bin; ``mean_occupancy`` the
    time-averaged number per bin.
    """
    event_times: np.ndarray
    numbers: np.ndarray
    per_bin: np.ndarray
    mean_occupancy: np.ndarray

    def number_at(self, t):
        idx = np.searchsorted(self.event_times, t, side="right")
        return self.numbers[idx]


def birth_death_events(loading_rate, loss_rate, duration, rng, n_initial=0):
    """Gillespie simulation of immigration (rate L) with per-atom loss (rate n*g)."""
    gen = rng.generator
    t, n = 0.0, int(n_initial)
    times, numbers = [], [n]
    while True:
        total = loading_rate + n * loss_rate
        if total <= 0:
            break
        t += gen.exponential(1.0 / total)
        if t >= duration:
            break
        n += 1 if gen.random() * total < loading_rate else -1
        times.append(t)
        numbers.append(n)
    return np.array(times), np.array(numbers, dtype=np.int64)


def _bin_occupancy(event_times, numbers, n_bins, bin_width):
    edges = bin_width * np.arange(n_bins + 1)
    cuts = np.union1d(edges, event_times[event_times < edges[-1]])
    left, right = cuts[:-1], cuts[1:]
    n_piece = numbers[np.searchsorted(event_times, left, side="right")]
    b = np.minimum((left / bin_width + 1e-9).astype(np.int64), n_bins - 1)
    time_in = np.zeros((n_bins, int(numbers.max()) + 1))
    np.add.at(time_in, (b, n_piece), right - left)
    mean = (time_in * np.arange(time_in.shape[1])).sum(axis=1) / bin_width
    return np.argmax(time_in, axis=1), mean


def simulate_mot_trace(mot, duration, bin_width, rng, n_initial=0, noise=True,
                       scenario_id=""):
    """Camera signal of a MOT whose atom number follows a birth-death process.

    Each frame is a Poisson sample of (n * fluorescence + background) *
    exposure, plus Gaussian read noise, rounded and clipped at zero.
    Returns ``(trace, timeline)``.
    """
    if not bin_width > 0:
        raise InputError("bin_width must be positive")
    n_bins = max(int(round(duration / bin_width)), 1)
    events, numbers = birth_death_events(mot.loading_rate, mot.per_atom_loss_rate,
                                         n_bins * bin_width, rng, n_initial)
    per_bin, occupancy = _bin_occupancy(events, numbers, n_bins, bin_width)
    mean = (occupancy * mot.fluorescence_per_atom + mot.background_rate) * bin_width
    if noise:
        gen = rng.generator
        signal = gen.poisson(mean) + gen.normal(0.0, mot.read_noise_sigma, n_bins)
        counts = np.clip(np.rint(signal), 0, None).astype(np.int64)
    else:
        counts = mean
    trace = CountTrace(bin_width=bin_width, counts=counts, seed=rng.seed,
                       scenario_id=scenario_id)
    return trace, AtomTimeline(events, numbers, per_bin, occupancy)
