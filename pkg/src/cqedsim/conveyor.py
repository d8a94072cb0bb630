"""Optical conveyor kinematics.

A frequency difference ``delta_f`` between the two counter-propagating
lattice beams moves the standing wave at v = delta_f * lambda / 2. The atom
is assumed to ride the lattice rigidly, so a ramp program of linearly
interpolated detunings integrates to an exactly piecewise-quadratic path.
"""
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import InvalidPlanError


def velocity_from_detuning(delta_f, lattice_wavelength):
    """Lattice velocity (m/s) for a beam frequency difference ``delta_f`` (Hz)."""
    return np.asarray(delta_f) * lattice_wavelength / 2.0


@dataclass(frozen=True)
class RampSegment:
    duration: float
    detuning_start: float
    detuning_end: float
    interpolation: str = "linear"

    def __post_init__(self):
        if not self.duration > 0:
            raise InvalidPlanError("segment duration must be positive")
        if self.interpolation != "linear":
            raise InvalidPlanError(f"unsupported interpolation {self.interpolation!r}")

    @classmethod
    def hold(cls, duration, detuning=0.0):
        return cls(duration, detuning, detuning)


@dataclass(frozen=True)
class TransportPlan:
    segments: Tuple[RampSegment, ...] = ()
    start_position: float = 0.0
    drift_speed: float = 0.0
    lattice_wavelength: float = 1064e-9

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not np.isfinite(self.drift_speed):
            raise InvalidPlanError("drift_speed must be finite")

    @property
    def duration(self):
        return float(sum(s.duration for s in self.segments))

    def _tables(self):
        """Segment start times and lattice displacement at each start."""
        starts = [0.0]
        offsets = [0.0]
        half_lambda = self.lattice_wavelength / 2.0
        for seg in self.segments:
            area = 0.5 * (seg.detuning_start + seg.detuning_end) * seg.duration
            starts.append(starts[-1] + seg.duration)
            offsets.append(offsets[-1] + half_lambda * area)
        return np.array(starts), np.array(offsets)

    def detuning_at(self, t):
        t = np.asarray(t, dtype=float)
        if not self.segments:
            return np.zeros_like(t)
        starts, _ = self._tables()
        idx = np.clip(np.searchsorted(starts, t, side="right") - 1,
                      0, len(self.segments) - 1)
        a = np.array([s.detuning_start for s in self.segments])[idx]
        b = np.array([s.detuning_end for s in self.segments])[idx]
        d = np.array([s.duration for s in self.segments])[idx]
        tau = t - starts[idx]
        df = a + (b - a) * tau / d
        return np.where((t >= 0) & (t < starts[-1]), df, 0.0)

    def position_at(self, t):
        """Closed-form position start + drift*t + (lambda/2) * int delta_f dt."""
        t = np.asarray(t, dtype=float)
        pos = self.start_position + self.drift_speed * t
        if not self.segments:
            return pos
        starts, offsets = self._tables()
        n = len(self.segments)
        idx = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, n - 1)
        a = np.array([s.detuning_start for s in self.segments])[idx]
        b = np.array([s.detuning_end for s in self.segments])[idx]
        d = np.array([s.duration for s in self.segments])[idx]
        tau = np.clip(t - starts[idx], 0.0, d)
        area = a * tau + 0.5 * (b - a) * tau ** 2 / d
        lattice = offsets[idx] + self.lattice_wavelength / 2.0 * area
        lattice = np.where(t >= starts[-1], offsets[-1], lattice)
        lattice = np.where(t <= 0.0, 0.0, lattice)
        return pos + lattice

    def velocity_at(self, t):
        return (velocity_from_detuning(self.detuning_at(t), self.lattice_wavelength)
                + self.drift_speed)


@dataclass(frozen=True)
class Trajectory:
    """Sampled atom path along the conveyor axis.

    ``plan`` is kept so callers can evaluate the exact path between samples.
    """
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    sample_interval: float
    plan: Optional[TransportPlan] = field(default=None, compare=False)

    def position_at(self, t):
        if self.plan is not None:
            return self.plan.position_at(t)
        return np.interp(t, self.times, self.positions)

    @property
    def duration(self):
        return float(self.times[-1])


def integrate_plan(plan, sample_interval=1e-3, duration=None):
    """Sample the trajectory of ``plan`` every ``sample_interval`` seconds.

    ``duration`` defaults to the plan length; an empty plan with no
    duration yields a single sample at t = 0.
    """
    if not sample_interval > 0:
        raise InvalidPlanError("sample_interval must be positive")
    if duration is None:
        duration = plan.duration
    n = int(np.floor(duration / sample_interval + 1e-9))
    times = np.arange(n + 1) * sample_interval
    if duration - times[-1] > 1e-12 * max(duration, 1.0):
        times = np.append(times, duration)
    return Trajectory(times=times, positions=plan.position_at(times),
                      velocities=plan.velocity_at(times),
                      sample_interval=sample_interval, plan=plan)


def make_sweep_plan(amplitude, speed, passes, lattice_wavelength=1064e-9,
                    center=0.0, drift_speed=0.0):
    """Triangle-wave plan crossing ``center`` ``passes`` times at constant speed.

    The atom starts at ``center - amplitude`` and alternates legs of length
    ``2 * amplitude``, so it ends at ``center + amplitude`` after an odd
    number of passes and back at the start after an even number.
    """
    if not speed > 0:
        raise InvalidPlanError("sweep speed must be positive")
    if not amplitude > 0:
        raise InvalidPlanError("sweep amplitude must be positive")
    if passes < 1:
        raise InvalidPlanError("need at least one pass")
    delta_f = 2.0 * speed / lattice_wavelength
    leg = 2.0 * amplitude / speed
    segments = [RampSegment.hold(leg, delta_f if i % 2 == 0 else -delta_f)
                for i in range(int(passes))]
    return TransportPlan(segments=segments, start_position=center - amplitude,
                         drift_speed=drift_speed,
                         lattice_wavelength=lattice_wavelength)


def make_transport_plan(distance, delta_f=50e3, ramp_time=20e-3,
                        lattice_wavelength=1064e-9, start_position=0.0,
                        drift_speed=0.0):
    """Cruise at ``delta_f`` then ramp linearly to zero, stopping at ``distance``."""
    v = float(velocity_from_detuning(delta_f, lattice_wavelength))
    if v == 0:
        raise InvalidPlanError("transport needs a non-zero detuning")
    cruise = distance / v - ramp_time / 2.0
    if cruise <= 0:
        raise InvalidPlanError("ramp is longer than the transport distance allows")
    segments = [RampSegment.hold(cruise, delta_f),
                RampSegment(ramp_time, delta_f, 0.0)]
    return TransportPlan(segments=segments, start_position=start_position,
                         drift_speed=drift_speed,
                         lattice_wavelength=lattice_wavelength)
