"""Simulation and analysis of single atoms delivered into a high-finesse cavity.

The package is organised bottom-up:

- :mod:`cqedsim.params`, :mod:`cqedsim.cqed` -- parameters and closed-form
  coupling / scattering-rate formulas
- :mod:`cqedsim.traps` -- Gaussian beams, trap depth and light shift
- :mod:`cqedsim.conveyor` -- frequency-ramp programs and atom trajectories
- :mod:`cqedsim.montecarlo` -- seeded photon counting, losses, MOT traces
- :mod:`cqedsim.analysis` -- step detection, fitting, averaging
- :mod:`cqedsim.scenarios` -- declarative end-to-end experiments
"""
from .conveyor import (RampSegment, TransportPlan, Trajectory, integrate_plan,
                       make_sweep_plan, make_transport_plan, velocity_from_detuning)
from .cqed import (coupling_at, cooperativity, detected_rate,
                   effective_axial_coupling, scattering_rate)
from .montecarlo import (CountTrace, LossModel, MotModel, RngStream,
                         sample_poisson_counts, sample_survival,
                         simulate_cavity_run, simulate_mot_trace)
from .params import (AtomParams, CavityParams, DetectionChain, ExperimentParams,
                     Position, ProbeParams)
from .traps import (GaussianBeam, LatticeTrap, beam_radius_at, stark_shift_at,
                    trap_depth_at, transfer_efficiency)

__all__ = [
    "RampSegment", "TransportPlan", "Trajectory", "integrate_plan", "make_sweep_plan",
    "make_transport_plan", "velocity_from_detuning",
    "coupling_at", "cooperativity", "detected_rate", "effective_axial_coupling",
    "scattering_rate",
    "CountTrace", "LossModel", "MotModel", "RngStream", "sample_poisson_counts",
    "sample_survival", "simulate_cavity_run", "simulate_mot_trace",
    "AtomParams", "CavityParams", "DetectionChain", "ExperimentParams", "Position",
    "ProbeParams",
    "GaussianBeam", "LatticeTrap", "beam_radius_at", "stark_shift_at", "trap_depth_at",
    "transfer_efficiency",
]

__version__ = "0.1.0"
