"""
Moving atoms with an optical conveyor
=====================================

A frequency difference between the two lattice beams makes the standing
wave move at v = delta_f * lambda / 2. Ramp programs are piecewise linear
in delta_f, so positions are exact piecewise quadratics.
"""
import numpy as np

from cqedsim import (RampSegment, TransportPlan, integrate_plan, make_sweep_plan,
                     make_transport_plan, trap_depth_at, velocity_from_detuning)
from cqedsim.traps import beam_radius_at, default_conveyor_trap

print(f"50 kHz detuning -> {velocity_from_detuning(50e3, 1064e-9) * 1e3:.1f} mm/s")

# %%
# Deliver an atom over 8.5 mm: cruise at 50 kHz, then ramp to rest in 20 ms.
plan = make_transport_plan(8.5e-3, delta_f=50e3, ramp_time=20e-3)
print(f"transport takes {plan.duration * 1e3:.1f} ms and ends at "
      f"{plan.position_at(plan.duration) * 1e3:.6f} mm")
for t in np.linspace(0, plan.duration, 6):
    print(f"t = {t * 1e3:6.1f} ms   x = {plan.position_at(t) * 1e3:6.3f} mm   "
          f"v = {plan.velocity_at(t) * 1e3:5.1f} mm/s")

# %%
# The conveyor beams are focused at the cavity, so the trap is much
# shallower back at the MOT.
trap = default_conveyor_trap()
for x in (0.0, 4.25e-3, 8.5e-3):
    print(f"x = {x * 1e3:5.2f} mm   w = {beam_radius_at(trap.beam, x) * 1e6:6.1f} um   "
          f"depth = {trap_depth_at(trap, x) * 1e3:.3f} mK")

# %%
# Sweeps back and forth across the cavity mode, and a hand-written plan.
sweep = make_sweep_plan(60e-6, 440e-6, passes=4, center=8.5e-3)
traj = integrate_plan(sweep, sample_interval=10e-3)
print(f"sweep: {len(traj.times)} samples, x range "
      f"{(traj.positions.min() - 8.5e-3) * 1e6:.1f} .. {(traj.positions.max() - 8.5e-3) * 1e6:.1f} um")

custom = TransportPlan([RampSegment(0.1, 0.0, 20e3), RampSegment.hold(0.3, 20e3),
                        RampSegment(0.1, 20e3, 0.0)])
print(f"custom plan moves {custom.position_at(custom.duration) * 1e3:.3f} mm "
      f"in {custom.duration:.1f} s")
