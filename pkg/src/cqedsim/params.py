"""Parameter sets for the atom, cavity, probe and detector.

All angular frequencies are in rad/s, lengths in m. The ``default_*``
constructors return the published operating point of the apparatus.
"""
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Tuple

from .units import TWO_PI, MHz

if TYPE_CHECKING:
    from .traps import LatticeTrap


@dataclass(frozen=True)
class AtomParams:
    transition_wavelength: float = 780e-9
    gamma: float = TWO_PI * 6.0 * MHz  # full natural linewidth
    hyperfine_label: str = "87Rb D2 F=2 -> F'=3"

    def __post_init__(self):
        if self.transition_wavelength <= 0:
            raise ValueError("transition_wavelength must be positive")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    @property
    def wavenumber(self):
        return TWO_PI / self.transition_wavelength


@dataclass(frozen=True)
class CavityParams:
    g0: float = TWO_PI * 17.0 * MHz
    kappa: float = TWO_PI * 7.0 * MHz
    mode_waist: float = 20e-6
    cavity_length: float = 222e-6
    total_losses_ppm: float = 130.0

    def __post_init__(self):
        for name in ("g0", "kappa", "mode_waist", "cavity_length"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class ProbeParams:
    """Probe drive.

    ``probe_atom_detuning_bare`` is omega_0 - omega_p (positive for a probe
    red of the bare resonance) and ``cavity_probe_detuning`` is
    omega_c - omega_p (positive values cool). ``two_beam_mode`` selects how
    the two counter-propagating beams enter the drive term: ``"per_beam"``
    uses Omega**2, ``"summed"`` uses 2 * Omega**2.
    """
    rabi_frequency: float = TWO_PI * 12.0 * MHz
    probe_atom_detuning_bare: float = TWO_PI * 21.5 * MHz
    cavity_probe_detuning: float = TWO_PI * 21.5 * MHz
    two_beam_mode: str = "per_beam"

    def __post_init__(self):
        if self.rabi_frequency < 0:
            raise ValueError("rabi_frequency must be non-negative")
        if self.two_beam_mode not in ("per_beam", "summed"):
            raise ValueError(f"unknown two_beam_mode {self.two_beam_mode!r}")

    @property
    def drive_squared(self):
        beams = 2.0 if self.two_beam_mode == "summed" else 1.0
        return beams * self.rabi_frequency ** 2


@dataclass(frozen=True)
class DetectionChain:
    stage_efficiencies: Tuple[float, ...] = (0.5, 0.5, 0.5)
    dark_count_rate: float = 100.0

    def __post_init__(self):
        object.__setattr__(self, "stage_efficiencies",
                           tuple(float(e) for e in self.stage_efficiencies))
        for eff in self.stage_efficiencies:
            if not 0.0 <= eff <= 1.0:
                raise ValueError(f"stage efficiency {eff} outside [0, 1]")
        if self.dark_count_rate < 0:
            raise ValueError("dark_count_rate must be non-negative")

    @property
    def efficiency(self):
        total = 1.0
        for eff in self.stage_efficiencies:
            total *= eff
        return total


@dataclass(frozen=True)
class Position:
    z: float = 0.0
    rho: float = 0.0

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be non-negative")


def _default_trap():
    from .traps import default_conveyor_trap
    return default_conveyor_trap()


@dataclass(frozen=True)
class ExperimentParams:
    """Everything the cavity emission model needs, bundled.

    ``signal_reduction`` is a phenomenological factor applied to the
    predicted single-atom count rate; measured rates sit 10 to 30 times
    below the two-level prediction and no microscopic model of the gap is
    attempted. ``cavity_position`` is where the cavity axis crosses the
    conveyor axis, measured from the MOT.
    """
    atom: AtomParams = field(default_factory=AtomParams)
    cavity: CavityParams = field(default_factory=CavityParams)
    probe: ProbeParams = field(default_factory=ProbeParams)
    detection: DetectionChain = field(default_factory=DetectionChain)
    trap: "LatticeTrap" = field(default_factory=_default_trap)
    lattice_wavelength: float = 1064e-9
    cavity_position: float = 8.5e-3
    axial_model: str = "uniform_average"
    axial_z: float = 0.0
    signal_reduction: float = 1.0 / 30.0
    transfer_mot_to_lattice: float = 0.90
    transfer_mot_to_cavity: float = 0.80

    def __post_init__(self):
        if self.axial_model not in ("fixed_z", "uniform_average"):
            raise ValueError(f"unknown axial_model {self.axial_model!r}")
        if not 0.0 <= self.signal_reduction:
            raise ValueError("signal_reduction must be non-negative")
        for name in ("transfer_mot_to_lattice", "transfer_mot_to_cavity"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be a probability")

    def with_probe(self, **changes):
        return replace(self, probe=replace(self.probe, **changes))
