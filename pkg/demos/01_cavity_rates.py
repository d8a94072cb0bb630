"""
Cavity QED rates for one atom
=============================

How bright is a single atom sitting in the cavity mode? This walk-through
evaluates the closed-form scattering rate, the cooperativity and the
expected detector count rate for the default parameter set.
"""
import numpy as np

from cqedsim import (AtomParams, CavityParams, DetectionChain, ExperimentParams,
                     ProbeParams, cooperativity, coupling_at, detected_rate,
                     effective_axial_coupling, scattering_rate)
from cqedsim.traps import stark_shift_at
from cqedsim.units import MHz, TWO_PI

cavity, atom = CavityParams(), AtomParams()
print(f"g0 / 2pi     = {cavity.g0 / TWO_PI / MHz:.1f} MHz")
print(f"kappa / 2pi  = {cavity.kappa / TWO_PI / MHz:.1f} MHz")
print(f"gamma / 2pi  = {atom.gamma / TWO_PI / MHz:.1f} MHz")
print(f"cooperativity C = g0^2 / (kappa gamma / 2) = {cooperativity(cavity, atom):.2f}")

# %%
# The coupling follows the mode: a cos(kz) standing wave along the axis and
# a Gaussian transverse profile. Across the mode waist g drops to g0/e.
rho = np.array([0, 10, 20, 30]) * 1e-6
g = coupling_at(cavity, atom, (np.zeros_like(rho), rho))
for r, gi in zip(rho, g):
    print(f"rho = {r * 1e6:4.0f} um   g / g0 = {gi / cavity.g0:.3f}")

# The conveyor lattice does not fix the axial phase, so by default we use
# the rms coupling over one standing-wave period, g0 / sqrt(2).
g_eff = effective_axial_coupling(cavity, atom)
print(f"axially averaged g / g0 = {g_eff / cavity.g0:.4f}")

# %%
# Scattering rate into the cavity. The trap light shifts the atomic
# resonance by 2pi x 83 MHz at the focus, which pushes the atom far from
# the probe and suppresses the rate.
probe = ProbeParams()
params = ExperimentParams()
stark = float(stark_shift_at(params.trap, params.cavity_position))
for label, shift in (("no light shift", 0.0), ("in the trap", stark)):
    r = scattering_rate(cavity, atom, probe, g_eff, shift)
    print(f"{label:15s} R = {r / 1e3:9.1f} photons/ms")

# %%
# Scan the cavity detuning: the response is a Lorentzian of half-width kappa.
detunings = TWO_PI * MHz * np.array([0, 3.5, 7, 14, 21.5])
for dc in detunings:
    r = scattering_rate(cavity, atom, ProbeParams(cavity_probe_detuning=dc), g_eff, stark)
    print(f"Delta_C = {dc / TWO_PI / MHz:5.1f} MHz   R = {r / 1e3:7.1f} photons/ms")

# %%
# Three 50 % stages between the cavity and the counter leave 1/8 of the
# photons; dark counts add a floor.
chain = DetectionChain((0.5, 0.5, 0.5), dark_count_rate=0.0)
print(f"2400 photons/ms -> {detected_rate(2400.0, chain):.0f} counts/ms")
