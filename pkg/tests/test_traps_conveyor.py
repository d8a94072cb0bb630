import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from cqedsim import (GaussianBeam, LatticeTrap, RampSegment, TransportPlan,
                     beam_radius_at, integrate_plan, make_sweep_plan,
                     make_transport_plan, stark_shift_at, trap_depth_at,
                     transfer_efficiency, velocity_from_detuning)
from cqedsim.errors import ConfigError, InvalidPlanError
from cqedsim.traps import default_conveyor_trap
from cqedsim.units import MHz, TWO_PI


# ---- Gaussian beam / trap ---------------------------------------------------

def test_rayleigh_range_and_radius():
    beam = GaussianBeam(1064e-9, 34e-6, 4.0)
    z_r = math.pi * 34e-6 ** 2 / 1064e-9
    assert beam.rayleigh_range == pytest.approx(z_r)
    assert beam_radius_at(beam, z_r) == pytest.approx(34e-6 * math.sqrt(2))
    assert beam_radius_at(beam, 0.0) == pytest.approx(34e-6)


def test_conveyor_depth_at_mot():
    trap = default_conveyor_trap()
    # hand value: 1 mK / (1 + (8.5 mm / z_R)^2), z_R = 3.4131 mm
    z_r = math.pi * 34e-6 ** 2 / 1064e-9
    expected = 1e-3 / (1 + (8.5e-3 / z_r) ** 2)
    assert trap_depth_at(trap, 0.0) == pytest.approx(expected, rel=1e-12)
    assert trap_depth_at(trap, 0.0) == pytest.approx(0.13886e-3, rel=1e-4)
    assert trap_depth_at(trap, 8.5e-3) == pytest.approx(1e-3)


def test_stark_shift_scales_with_depth():
    trap = default_conveyor_trap()
    assert stark_shift_at(trap, 8.5e-3) == pytest.approx(TWO_PI * 83 * MHz)
    ratio = stark_shift_at(trap, 0.0) / stark_shift_at(trap, 8.5e-3)
    assert ratio == pytest.approx(trap_depth_at(trap, 0.0) / 1e-3)
    assert stark_shift_at(trap, depth=0.5e-3) == pytest.approx(TWO_PI * 41.5 * MHz)
    with pytest.raises(TypeError):
        stark_shift_at(trap)


def test_trap_validation():
    with pytest.raises(ValueError):
        GaussianBeam(1064e-9, 0.0, 1.0)
    with pytest.raises(ValueError):
        LatticeTrap(GaussianBeam(1064e-9, 1e-5, 1.0), depth_at_focus=-1e-3)


def test_transfer_efficiency():
    assert transfer_efficiency("mot_to_lattice") == 0.9
    assert transfer_efficiency("mot_to_cavity") == 0.8
    with pytest.raises(ConfigError):
        transfer_efficiency("lattice_to_moon")


# ---- conveyor ---------------------------------------------------------------

def test_velocity_from_detuning():
    assert velocity_from_detuning(50e3, 1064e-9) == pytest.approx(0.0266)
    assert velocity_from_detuning(0.0, 1064e-9) == 0.0
    assert velocity_from_detuning(-1e3, 1064e-9) == pytest.approx(-0.532e-3)


def _quadrature_position(plan, t):
    half = plan.lattice_wavelength / 2
    total, _ = quad(lambda s: float(plan.detuning_at(s)), 0.0, t, limit=500,
                    points=np.cumsum([s.duration for s in plan.segments])[:-1])
    return plan.start_position + plan.drift_speed * t + half * total


def test_position_matches_quadrature():
    plan = TransportPlan([RampSegment(0.1, 0.0, 40e3), RampSegment.hold(0.2, 40e3),
                          RampSegment(0.05, 40e3, -10e3)],
                         start_position=1e-3, drift_speed=2e-5)
    for t in (0.0, 0.03, 0.1, 0.17, 0.3, 0.33, 0.35):
        assert plan.position_at(t) == pytest.approx(_quadrature_position(plan, t),
                                                    rel=1e-10, abs=1e-15)


def test_position_after_plan_end_is_frozen_except_drift():
    plan = TransportPlan([RampSegment.hold(0.1, 10e3)], drift_speed=1e-6)
    end = plan.position_at(0.1)
    assert plan.position_at(0.5) == pytest.approx(end + 0.4e-6)


def test_transport_plan_stops_on_target():
    plan = make_transport_plan(8.5e-3, delta_f=50e3, ramp_time=20e-3)
    assert plan.position_at(plan.duration) == pytest.approx(8.5e-3, abs=1e-12)
    assert plan.velocity_at(plan.duration + 1e-3) == 0.0
    assert plan.velocity_at(0.01) == pytest.approx(0.0266)


def test_sweep_plan_turning_points():
    plan = make_sweep_plan(60e-6, 440e-6, 4, center=8.5e-3)
    leg = 120e-6 / 440e-6
    assert plan.duration == pytest.approx(4 * leg)
    for k in range(5):
        expected = 8.5e-3 + (-60e-6 if k % 2 == 0 else 60e-6)
        assert plan.position_at(k * leg) == pytest.approx(expected, abs=1e-12)


def test_sweep_plan_rejects_zero_speed():
    with pytest.raises(InvalidPlanError):
        make_sweep_plan(60e-6, 0.0, 3)


def test_ramp_segment_validation():
    with pytest.raises(InvalidPlanError):
        RampSegment(-1.0, 0.0, 0.0)


def test_integrate_plan_samples_exact_path():
    plan = make_transport_plan(1e-3)
    traj = integrate_plan(plan, 1e-3)
    assert np.allclose(traj.positions, plan.position_at(traj.times), atol=1e-15)
    assert traj.position_at(0.0123) == pytest.approx(plan.position_at(0.0123))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(1e-3, 0.5), st.floats(-1e5, 1e5), st.floats(-1e5, 1e5)),
                min_size=1, max_size=5),
       st.floats(0, 1))
def test_position_is_continuous_and_matches_velocity(segs, frac):
    plan = TransportPlan([RampSegment(d, a, b) for d, a, b in segs])
    t = frac * plan.duration
    h = 1e-7
    if 2 * h < t < plan.duration - 2 * h:
        slope = (plan.position_at(t + h) - plan.position_at(t - h)) / (2 * h)
        assert slope == pytest.approx(plan.velocity_at(t), rel=1e-4, abs=1e-9)
    assert plan.position_at(t) == pytest.approx(_quadrature_position(plan, t),
                                                rel=1e-8, abs=1e-12)
