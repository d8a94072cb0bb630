import numpy as np
import pytest
from scipy import stats

from cqedsim import (CountTrace, ExperimentParams, LossModel, MotModel, RngStream,
                     integrate_plan, make_sweep_plan, sample_poisson_counts,
                     sample_survival, simulate_cavity_run, simulate_mot_trace)
from cqedsim.errors import InputError, ModelError
from cqedsim.montecarlo import (birth_death_events, integrate_rate,
                                sample_arrival_times, single_atom_signal_rate)


def test_streams_are_reproducible_and_independent():
    a = RngStream(5, 0).generator.random(4)
    b = RngStream(5, 0).generator.random(4)
    c = RngStream(5, 1).generator.random(4)
    d = RngStream(6, 0).generator.random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_integrate_rate_exact_for_linear_rate():
    counts = integrate_rate(lambda t: 100.0 + 50.0 * t, 2.0, 0.5)
    # int_a^b (100 + 50 t) dt
    edges = np.array([0, 0.5, 1.0, 1.5, 2.0])
    expected = 100 * np.diff(edges) + 25 * np.diff(edges ** 2)
    assert np.allclose(counts, expected, rtol=1e-14)


def test_integrate_rate_guards():
    with pytest.raises(ModelError, match="t="):
        integrate_rate(lambda t: 1.0 - t, 2.0, 0.5)
    with pytest.raises(InputError):
        integrate_rate(lambda t: t, 1.0, 0.1, substeps=4)
    with pytest.raises(InputError):
        integrate_rate(lambda t: t, 1.0, 0.0)


def test_noise_off_returns_expected_counts():
    tr = sample_poisson_counts(lambda t: np.full_like(t, 200.0), 1.0, 0.1,
                               RngStream(0), noise=False)
    assert np.allclose(tr.counts, 20.0)


def test_poisson_dispersion_index():
    tr = sample_poisson_counts(lambda t: np.full_like(t, 5000.0), 100.0, 1e-3,
                               RngStream(1, 2))
    d = tr.counts.var(ddof=1) / tr.counts.mean()
    assert 0.95 < d < 1.05
    assert tr.counts.mean() == pytest.approx(5.0, rel=0.01)


def test_thinning_matches_rate_shape():
    rate = lambda t: 2000.0 * (1 + np.sin(2 * np.pi * t))  # noqa: E731
    rng = RngStream(3)
    times = np.concatenate([sample_arrival_times(rate, 1.0, 4000.0, rng) for _ in range(50)])
    assert len(times) / 50 == pytest.approx(2000.0, rel=0.02)
    # first half of the period is brighter: 1/2 + 1/pi of the photons
    assert np.mean(times < 0.5) == pytest.approx(0.5 + 1 / np.pi, abs=0.01)


def test_thinning_rejects_envelope_violation():
    with pytest.raises(ModelError):
        sample_arrival_times(lambda t: np.full_like(t, 10.0), 1.0, 5.0, RngStream(0))


def test_count_trace_csv_roundtrip(tmp_path):
    tr = CountTrace(0.01, np.array([3, 0, 7]), t0=0.5, seed=9, scenario_id="x",
                    stderr=np.array([0.1, 0.2, 0.3]))
    path = tmp_path / "t.csv"
    tr.to_csv(path)
    back = CountTrace.from_csv(path)
    assert back.bin_width == 0.01 and back.seed == 9 and back.scenario_id == "x"
    assert np.array_equal(back.counts, tr.counts)
    assert np.allclose(back.t_start, tr.t_start)
    assert np.allclose(back.stderr, tr.stderr)


def test_count_trace_validation():
    with pytest.raises(InputError):
        CountTrace(0.01, np.array([]))
    with pytest.raises(InputError):
        CountTrace(0.01, np.array([1, -1]))


def test_loss_model_branches():
    loss = LossModel()
    assert loss.lifetime_for(+1, 1) == 15.0
    assert loss.lifetime_for(+1, 3) == 15.0
    assert loss.lifetime_for(+1, 4) == 0.5
    assert loss.lifetime_for(+1, 7) == 0.5
    assert loss.lifetime_for(-1, 1) == 0.05
    off = LossModel.disabled()
    assert sample_survival(off, (1, 1), 1e9, RngStream(0)) is None


def test_survival_exponential_mean():
    rng = RngStream(11)
    times = [sample_survival(LossModel(), (1, 1), np.inf, rng) for _ in range(20000)]
    assert np.mean(times) == pytest.approx(15.0, rel=0.03)


def test_signal_rate_peaks_at_cavity():
    p = ExperimentParams()
    x = p.cavity_position + np.array([-20e-6, 0.0, 20e-6])
    r = single_atom_signal_rate(p, x)
    assert r[1] > r[0] and r[0] == pytest.approx(r[2], rel=1e-3)


def test_cavity_run_noise_off_equals_closed_form():
    p = ExperimentParams()
    plan = make_sweep_plan(60e-6, 440e-6, 1, center=p.cavity_position)
    traj = integrate_plan(plan, 1e-3)
    trace, lost = simulate_cavity_run(p, traj, LossModel(), 1, RngStream(0), 1e-3,
                                      noise=False)
    assert np.all(np.isinf(lost))
    expected = integrate_rate(
        lambda t: single_atom_signal_rate(p, plan.position_at(t)) + 100.0,
        plan.duration, 1e-3)
    assert np.allclose(trace.counts, expected, rtol=1e-12)


def test_cavity_run_probe_gate_and_losses():
    p = ExperimentParams()
    plan = make_sweep_plan(1e-6, 1e-6, 1, center=p.cavity_position)  # parked atom
    traj = integrate_plan(plan, 1e-3)
    short = LossModel(cooling_lifetime=0.05)
    trace, lost = simulate_cavity_run(p, traj, short, 2, RngStream(4), 1e-2,
                                      probe_on=0.5, noise=False)
    assert np.allclose(trace.counts[:50], 1.0)
    trace, lost = simulate_cavity_run(p, traj, short, 2, RngStream(4), 1e-2,
                                      probe_on=0.5)
    assert np.all(lost >= 0.5) and np.all(np.isfinite(lost))


def test_birth_death_stationary_mean():
    rng = RngStream(8)
    times, numbers = birth_death_events(0.5, 0.1, 20000.0, rng)
    durations = np.diff(np.concatenate([[0.0], times, [20000.0]]))
    mean = np.sum(durations * numbers) / 20000.0
    assert mean == pytest.approx(5.0, rel=0.05)
    assert np.all(np.abs(np.diff(numbers)) == 1)


def test_mot_trace_noise_off_levels():
    mot = MotModel()
    trace, truth = simulate_mot_trace(mot, 200.0, 0.5, RngStream(2), noise=False)
    expected = (truth.mean_occupancy * mot.fluorescence_per_atom + mot.background_rate) * 0.5
    assert np.allclose(trace.counts, expected)
    whole = truth.mean_occupancy == np.round(truth.mean_occupancy)
    assert np.array_equal(truth.per_bin[whole], truth.mean_occupancy[whole])


def test_mot_frame_noise_matches_model():
    mot = MotModel(loading_rate=0.0)
    trace, _ = simulate_mot_trace(mot, 2000.0, 0.5, RngStream(6))
    expected_sd = np.sqrt(mot.background_rate * 0.5 + mot.read_noise_sigma ** 2)
    assert trace.counts.std() == pytest.approx(expected_sd, rel=0.05)
    assert stats.normaltest(trace.counts).pvalue > 1e-4
