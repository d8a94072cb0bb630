"""Closed-form cavity QED rates.

All functions are pure and accept numpy arrays wherever a scalar position,
coupling or detuning is expected.
"""
import numpy as np

from .params import Position


def coupling_at(cavity, atom, pos):
    """Coherent coupling of the TEM00 standing-wave mode at ``pos``.

    g = g0 * cos(k z) * exp(-rho**2 / w**2), with k the wavenumber of the
    atomic transition and w the mode waist.
    """
    z = np.asarray(pos.z if isinstance(pos, Position) else pos[0], dtype=float)
    rho = np.asarray(pos.rho if isinstance(pos, Position) else pos[1], dtype=float)
    g = (cavity.g0 * np.cos(atom.wavenumber * z)
         * np.exp(-(rho / cavity.mode_waist) ** 2))
    return g if g.ndim else float(g)


def effective_axial_coupling(cavity, atom, axial_model="uniform_average", z=0.0):
    """Coupling amplitude on the cavity axis (rho = 0).

    The 1064 nm conveyor lattice is incommensurate with the 780 nm cavity
    standing wave, so an atom's axial phase is not controlled. ``fixed_z``
    evaluates the standing wave at ``z``; ``uniform_average`` returns the
    rms value g0/sqrt(2) over one period.
    """
    if axial_model == "fixed_z":
        return coupling_at(cavity, atom, Position(z=z, rho=0.0))
    if axial_model == "uniform_average":
        return cavity.g0 / np.sqrt(2.0)
    raise ValueError(f"unknown axial model {axial_model!r}")


def atom_probe_detuning(probe, stark_shift=0.0):
    """omega_0 - omega_p + Stark shift."""
    return probe.probe_atom_detuning_bare + stark_shift


def scattering_rate(cavity, atom, probe, g, stark_shift=0.0):
    """Rate (photons/s) at which one atom scatters probe light into the cavity.

    R = 2 kappa * g**2 / (Delta_C**2 + kappa**2) * Omega**2 / (Delta_a**2 + gamma**2)

    with Delta_C = omega_c - omega_p taken from ``probe`` and
    Delta_a = omega_0 - omega_p + ``stark_shift``. ``gamma`` is the full
    natural linewidth. The drive term uses ``probe.drive_squared`` so the
    two-beam convention is set on the probe, not here.
    """
    g = np.asarray(g, dtype=float)
    kappa = cavity.kappa
    delta_c = np.asarray(probe.cavity_probe_detuning, dtype=float)
    delta_a = atom_probe_detuning(probe, np.asarray(stark_shift, dtype=float))
    cavity_term = g ** 2 / (delta_c ** 2 + kappa ** 2)
    atom_term = probe.drive_squared / (delta_a ** 2 + atom.gamma ** 2)
    rate = 2.0 * kappa * cavity_term * atom_term
    return rate if rate.ndim else float(rate)


def detected_rate(rate, chain):
    """Count rate at the detector: total efficiency * rate + dark counts."""
    return chain.efficiency * np.asarray(rate) + chain.dark_count_rate


def cooperativity(cavity, atom):
    """Single-atom cooperativity g0**2 / (kappa * gamma/2)."""
    return cavity.g0 ** 2 / (cavity.kappa * atom.gamma / 2.0)
