"""Gaussian-beam propagation and calibrated dipole-trap depth / Stark shift."""
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .units import TWO_PI, MHz


@dataclass(frozen=True)
class GaussianBeam:
    wavelength: float
    waist_at_focus: float
    power: float
    focus_position: float = 0.0

    def __post_init__(self):
        for name in ("wavelength", "waist_at_focus", "power"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def rayleigh_range(self):
        return np.pi * self.waist_at_focus ** 2 / self.wavelength


@dataclass(frozen=True)
class LatticeTrap:
    """A lattice whose depth is calibrated at the focus.

    ``depth_at_focus`` is U/k_B in kelvin. The light shift of the probed
    transition is taken to be linear in the local depth, pinned by
    ``stark_shift_at_focus`` (rad/s).
    """
    beam: GaussianBeam
    depth_at_focus: float
    stark_shift_at_focus: float = 0.0

    def __post_init__(self):
        if not self.depth_at_focus > 0:
            raise ValueError("depth_at_focus must be positive")

    @property
    def stark_coefficient(self):
        """Stark shift per kelvin of trap depth (rad/s/K)."""
        return self.stark_shift_at_focus / self.depth_at_focus


def default_conveyor_trap():
    """Conveyor lattice: 34 um waist at 1064 nm, 4 W/beam, 1 mK, 2pi*83 MHz."""
    beam = GaussianBeam(wavelength=1064e-9, waist_at_focus=34e-6, power=4.0,
                        focus_position=8.5e-3)
    return LatticeTrap(beam=beam, depth_at_focus=1e-3,
                       stark_shift_at_focus=TWO_PI * 83.0 * MHz)


def default_loading_trap():
    beam = GaussianBeam(wavelength=1064e-9, waist_at_focus=17e-6, power=1.0)
    return LatticeTrap(beam=beam, depth_at_focus=1e-3)


def beam_radius_at(beam, z):
    """1/e**2 intensity radius w(z) = w0 * sqrt(1 + ((z - z_f)/z_R)**2)."""
    dz = (np.asarray(z, dtype=float) - beam.focus_position) / beam.rayleigh_range
    return beam.waist_at_focus * np.sqrt(1.0 + dz ** 2)


def trap_depth_at(trap, z):
    """On-axis depth U(z) = U0 * (w0 / w(z))**2 in kelvin."""
    ratio = trap.beam.waist_at_focus / beam_radius_at(trap.beam, z)
    return trap.depth_at_focus * ratio ** 2


def stark_shift_at(trap, z=None, depth=None):
    """Light shift (rad/s) at axial position ``z`` or for a given ``depth``."""
    if depth is None:
        if z is None:
            raise TypeError("give either z or depth")
        depth = trap_depth_at(trap, z)
    return trap.stark_coefficient * np.asarray(depth, dtype=float)


TRANSFER_STAGES = ("mot_to_lattice", "mot_to_cavity")


def transfer_efficiency(stage, params=None):
    """Bernoulli success probability for a transfer stage.

    ``params`` is an :class:`~cqedsim.params.ExperimentParams`; omitting it
    uses the published 90 % (MOT -> loading lattice) and 80 % (MOT -> cavity).
    """
    if params is None:
        from .params import ExperimentParams
        params = ExperimentParams()
    if stage not in TRANSFER_STAGES:
        raise ConfigError([("stage", f"unknown transfer stage {stage!r}; "
                                     f"expected one of {TRANSFER_STAGES}")])
    return getattr(params, f"transfer_{stage}")
