"""Scenario configuration: schema, unit parsing, defaults and validation.

Configs are TOML documents. Every dimensional value is a string with an
explicit unit (``"17 MHz"``, ``"34 um"``); frequencies feeding the cavity
formulas are linear on input and stored as rad/s. Unknown keys, unit
mismatches and out-of-range values are collected and reported together.
"""
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..conveyor import RampSegment, TransportPlan
from ..errors import ConfigError, InvalidPlanError
from ..montecarlo import LossModel, MotModel
from ..params import (AtomParams, CavityParams, DetectionChain, ExperimentParams,
                      ProbeParams)
from ..traps import GaussianBeam, LatticeTrap
from ..units import UnitError, parse_quantity

SCENARIOS = ("mot_counting", "deliver_and_hold", "transverse_scan",
             "multipass_sweep", "power_scan", "detuning_scan", "lifetime_study")

PUBLISHED = "published"
DERIVED = "derived from published values"
ASSUMED = "model assumption"
SCENARIO_DEFAULT = "scenario default"
OVERRIDE = "config override"


@dataclass(frozen=True)
class Field:
    kind: str
    default: Any
    source: str = PUBLISHED
    check: str = "positive"  # positive | nonneg | any | prob | optional
    choices: Tuple[str, ...] = ()


F = Field

PHYSICS_SCHEMA = {
    "atom": {
        "transition_wavelength": F("length", "780 nm"),
        "gamma": F("angular_frequency", "6 MHz"),
    },
    "cavity": {
        "g0": F("angular_frequency", "17 MHz"),
        "kappa": F("angular_frequency", "7 MHz"),
        "mode_waist": F("length", "20 um", DERIVED),
        "cavity_length": F("length", "222 um"),
        "total_losses_ppm": F("dimensionless", 130.0, check="nonneg"),
    },
    "probe": {
        "rabi_frequency": F("angular_frequency", "12 MHz", check="nonneg"),
        "probe_atom_detuning_bare": F("angular_frequency", "21.5 MHz", check="any"),
        "cavity_probe_detuning": F("angular_frequency", "21.5 MHz", ASSUMED, "any"),
        "two_beam_mode": F("choice", "per_beam", ASSUMED,
                           choices=("per_beam", "summed")),
    },
    "detection": {
        "stage_efficiencies": F("efficiencies", [0.5, 0.5, 0.5]),
        "dark_count_rate": F("rate", "100 counts/s", ASSUMED, "nonneg"),
        "signal_reduction": F("dimensionless", 1.0 / 30.0, DERIVED, "nonneg"),
        "single_atom_rate": F("rate", None, ASSUMED, "optional"),
    },
    "trap": {
        "wavelength": F("length", "1064 nm"),
        "waist": F("length", "34 um"),
        "power": F("power", "4 W"),
        "depth_at_focus": F("temperature", "1 mK"),
        "stark_shift_at_focus": F("angular_frequency", "83 MHz", check="any"),
    },
    "geometry": {
        "mot_to_cavity_distance": F("length", "8.5 mm"),
        "axial_model": F("choice", "uniform_average", ASSUMED,
                         choices=("uniform_average", "fixed_z")),
        "axial_z": F("length", "0 m", ASSUMED, "any"),
    },
    "transfer": {
        "mot_to_lattice": F("dimensionless", 0.90, check="prob"),
        "mot_to_cavity": F("dimensionless", 0.80, check="prob"),
    },
    "loss": {
        "cooling_lifetime": F("time", "15 s"),
        "heating_lifetime": F("time", "50 ms", ASSUMED),
        "multiatom_lifetimes": F("lifetime_map", {"4": "0.5 s"}, DERIVED),
    },
    "mot": {
        "loading_rate": F("rate", "0.025 atoms/s", ASSUMED, "nonneg"),
        "per_atom_loss_rate": F("rate", "0.01 /s", DERIVED, "nonneg"),
        "fluorescence_per_atom": F("rate", "1600 counts/s", ASSUMED, "nonneg"),
        "background_rate": F("rate", "4000 counts/s", ASSUMED, "nonneg"),
        "read_noise_sigma": F("dimensionless", 40.0, ASSUMED, "nonneg"),
    },
}

# scenario-specific knobs; all defaults are scenario defaults
S = lambda kind, default, check="positive", choices=(): Field(  # noqa: E731
    kind, default, SCENARIO_DEFAULT, check, choices)

SCENARIO_SCHEMA = {
    "mot_counting": {
        "duration": S("time", "500 s"),
        "bin_width": S("time", "500 ms"),
        "calibration_frames": S("count", 20),
        "min_segment": S("count", 1),
        "penalty": S("dimensionless", None, "optional"),
        "histogram_bin": S("dimensionless", 20.0),
    },
    "deliver_and_hold": {
        "n_atoms": S("count", 1, "nonneg"),
        "hold": S("time", "4 s"),
        "probe_delay": S("time", "250 ms"),
        "bin_width": S("time", "10 ms"),
        "transport_detuning": S("frequency", "50 kHz"),
        "ramp_time": S("time", "20 ms"),
    },
    "transverse_scan": {
        "speed": S("velocity", "55 um/s"),
        "amplitude": S("length", "60 um"),
        "bin_width": S("time", "10 ms"),
        "max_attempts": S("count", 1000),
    },
    "multipass_sweep": {
        "passes": S("count", 10),
        "speed": S("velocity", "440 um/s"),
        "amplitude": S("length", "60 um"),
        "bin_width": S("time", "1 ms"),
        "max_attempts": S("count", 1000),
    },
    "power_scan": {
        "power_start": S("power", "24 nW"),
        "power_end": S("power", "24 uW"),
        "ramp_time": S("time", "250 ms"),
        "rabi_at_power_end": S("angular_frequency", "25 MHz"),
        "bin_width": S("time", "10 ms"),
        "dark_duration": S("time", "250 ms"),
        "dark_threshold_sigma": S("dimensionless", 3.0),
        "max_attempts": S("count", 1000),
    },
    "detuning_scan": {
        "grid_start": S("angular_frequency", "0 MHz", "any"),
        "grid_stop": S("angular_frequency", "28 MHz", "any"),
        "grid_points": S("count", 20),
        "extra_points": S("angular_frequency_list", []),
        "dwell": S("time", "100 ms"),
        "max_attempts": S("count", 10000),
    },
    "lifetime_study": {
        "atom_numbers": S("count_list", [1, 2, 3, 4]),
        "hold": S("time", "20 s"),
        "survival_grid": S("count", 41),
    },
}

DEFAULT_REPETITIONS = {
    "mot_counting": 20, "deliver_and_hold": 20, "transverse_scan": 17,
    "multipass_sweep": 20, "power_scan": 10, "detuning_scan": 10,
    "lifetime_study": 200,
}

# physics defaults that differ per scenario: (section, key) -> (value, source)
SCENARIO_PHYSICS_DEFAULTS = {
    "deliver_and_hold": {("detection", "single_atom_rate"): "10 counts/ms"},
    "transverse_scan": {("detection", "single_atom_rate"): "10 counts/ms"},
    "multipass_sweep": {("detection", "single_atom_rate"): "10 counts/ms"},
    "power_scan": {("probe", "cavity_probe_detuning"): "-12 MHz"},
}

TOP_LEVEL = {"scenario", "seed", "repetitions", "output_dir", "noise",
             "emit_plots", "physics", "plan", "params", "expectations"}


@dataclass
class ScenarioConfig:
    scenario: str
    seed: int
    repetitions: int
    output_dir: str
    noise: bool
    emit_plots: bool
    physics: ExperimentParams
    loss: LossModel
    mot: MotModel
    settings: Dict[str, Any]
    plan: Optional[TransportPlan]
    drift_speed: float
    expectations: Dict[str, Dict[str, float]]
    provenance: List[Tuple[str, str, str]] = field(default_factory=list)
    resolved: Dict[str, Any] = field(default_factory=dict)
    raw_physics: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    @property
    def digest(self):
        """SHA-256 of the resolved configuration in canonical JSON."""
        text = json.dumps(self.resolved, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _convert(value, f, path, errors):
    """Parse one value according to its field definition; append errors instead of raising."""
    try:
        if value is None:
            return None
        if f.kind == "choice":
            if value not in f.choices:
                raise UnitError(f"must be one of {list(f.choices)}")
            return value
        if f.kind == "count":
            if isinstance(value, bool) or not isinstance(value, int):
                raise UnitError(f"expected an integer, got {value!r}")
            if value < (0 if f.check == "nonneg" else 1):
                raise UnitError("out of range")
            return value
        if f.kind == "count_list":
            if not isinstance(value, list) or not value:
                raise UnitError("expected a non-empty list of integers")
            for v in value:
                if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                    raise UnitError(f"bad atom number {v!r}")
            return list(value)
        if f.kind == "efficiencies":
            if not isinstance(value, list) or not value:
                raise UnitError("expected a non-empty list of efficiencies")
            out = [parse_quantity(v, "dimensionless") for v in value]
            if any(not 0 <= v <= 1 for v in out):
                raise UnitError("efficiencies must lie in [0, 1]")
            return out
        if f.kind == "angular_frequency_list":
            if not isinstance(value, list):
                raise UnitError("expected a list")
            return [parse_quantity(v, "angular_frequency") for v in value]
        if f.kind == "lifetime_map":
            if not isinstance(value, dict):
                raise UnitError("expected a table of atom number -> lifetime")
            out = {}
            for k, v in value.items():
                if not str(k).isdigit() or int(k) < 1:
                    raise UnitError(f"bad atom number key {k!r}")
                tau = parse_quantity(v, "time")
                if tau <= 0:
                    raise UnitError("lifetimes must be positive")
                out[int(k)] = tau
            return out
        x = parse_quantity(value, f.kind)
        if f.check == "positive" and not x > 0:
            raise UnitError("must be positive")
        if f.check in ("nonneg", "optional") and x < 0:
            raise UnitError("must be non-negative")
        if f.check == "prob" and not 0 <= x <= 1:
            raise UnitError("must be a probability in [0, 1]")
        return x
    except UnitError as exc:
        errors.append((path, str(exc)))
        return None


def _resolve_section(raw, schema, path, errors, overrides=None):
    """Merge ``raw`` onto ``schema`` defaults. Returns (values, provenance)."""
    overrides = overrides or {}
    if not isinstance(raw, dict):
        errors.append((path, "expected a table"))
        raw = {}
    for key in raw:
        if key not in schema:
            errors.append((f"{path}.{key}", "unknown key"))
    values, prov = {}, []
    for key, f in schema.items():
        if key in raw:
            text, source = raw[key], OVERRIDE
        elif key in overrides:
            text, source = overrides[key], SCENARIO_DEFAULT
        else:
            text, source = f.default, f.source
        values[key] = _convert(text, f, f"{path}.{key}", errors)
        if text is not None:
            prov.append((f"{path}.{key}", _as_text(text), source))
    return values, prov


def _as_text(value):
    if isinstance(value, dict):
        return ", ".join(f"{k}: {v}" for k, v in value.items())
    if isinstance(value, list):
        return "[" + ", ".join(str(v) for v in value) + "]"
    return str(value)


def _build_physics(p, single_rate_errors):
    atom = AtomParams(transition_wavelength=p["atom"]["transition_wavelength"],
                      gamma=p["atom"]["gamma"])
    cav = p["cavity"]
    cavity = CavityParams(g0=cav["g0"], kappa=cav["kappa"], mode_waist=cav["mode_waist"],
                          cavity_length=cav["cavity_length"],
                          total_losses_ppm=cav["total_losses_ppm"])
    pr = p["probe"]
    probe = ProbeParams(rabi_frequency=pr["rabi_frequency"],
                        probe_atom_detuning_bare=pr["probe_atom_detuning_bare"],
                        cavity_probe_detuning=pr["cavity_probe_detuning"],
                        two_beam_mode=pr["two_beam_mode"])
    det = p["detection"]
    chain = DetectionChain(tuple(det["stage_efficiencies"]), det["dark_count_rate"])
    tr = p["trap"]
    geo = p["geometry"]
    beam = GaussianBeam(wavelength=tr["wavelength"], waist_at_focus=tr["waist"],
                        power=tr["power"], focus_position=geo["mot_to_cavity_distance"])
    trap = LatticeTrap(beam=beam, depth_at_focus=tr["depth_at_focus"],
                       stark_shift_at_focus=tr["stark_shift_at_focus"])
    params = ExperimentParams(
        atom=atom, cavity=cavity, probe=probe, detection=chain, trap=trap,
        lattice_wavelength=tr["wavelength"],
        cavity_position=geo["mot_to_cavity_distance"],
        axial_model=geo["axial_model"], axial_z=geo["axial_z"],
        signal_reduction=det["signal_reduction"],
        transfer_mot_to_lattice=p["transfer"]["mot_to_lattice"],
        transfer_mot_to_cavity=p["transfer"]["mot_to_cavity"])
    if det["single_atom_rate"] is not None:
        params = calibrate_signal_reduction(params, det["single_atom_rate"])
    return params


def calibrate_signal_reduction(params, single_atom_rate):
    """Set ``signal_reduction`` so one atom at the cavity centre yields ``single_atom_rate``.

    ``single_atom_rate`` excludes dark counts.
    """
    from dataclasses import replace

    from ..montecarlo import single_atom_signal_rate
    unreduced = single_atom_signal_rate(replace(params, signal_reduction=1.0),
                                        params.cavity_position)
    return replace(params, signal_reduction=float(single_atom_rate / unreduced))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float):
        return repr(obj)
    return obj


def load_config_text(text):
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([("", f"malformed config: {exc}")]) from None


def validate_config(raw, seed=None, output_dir=None, noise=None):
    """Resolve a raw config (TOML text or mapping) into a :class:`ScenarioConfig`.

    ``seed``, ``output_dir`` and ``noise`` override the document (command-line
    flags). Raises :class:`ConfigError` listing every problem found.
    """
    if isinstance(raw, (str, bytes)):
        raw = load_config_text(raw.decode() if isinstance(raw, bytes) else raw)
    raw = dict(raw)
    errors = []
    for key in raw:
        if key not in TOP_LEVEL:
            errors.append((key, "unknown key"))
    scenario = raw.get("scenario")
    if scenario is None:
        errors.append(("scenario", "missing required field"))
        raise ConfigError(errors)
    if scenario not in SCENARIOS:
        errors.append(("scenario", f"unknown scenario {scenario!r}; "
                                   f"expected one of {list(SCENARIOS)}"))
        raise ConfigError(errors)

    seed = raw.get("seed", 0) if seed is None else seed
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        errors.append(("seed", "must be a non-negative integer"))
    reps = raw.get("repetitions", DEFAULT_REPETITIONS[scenario])
    if isinstance(reps, bool) or not isinstance(reps, int) or reps < 1:
        errors.append(("repetitions", "must be a positive integer"))
    out = raw.get("output_dir", "out") if output_dir is None else output_dir
    noise = raw.get("noise", True) if noise is None else noise
    emit_plots = raw.get("emit_plots", False)
    for key, val in (("noise", noise), ("emit_plots", emit_plots)):
        if not isinstance(val, bool):
            errors.append((key, "must be true or false"))

    physics_raw = raw.get("physics", {})
    if not isinstance(physics_raw, dict):
        errors.append(("physics", "expected a table"))
        physics_raw = {}
    for section in physics_raw:
        if section not in PHYSICS_SCHEMA:
            errors.append((f"physics.{section}", "unknown section"))
    scen_over = SCENARIO_PHYSICS_DEFAULTS.get(scenario, {})
    physics, provenance = {}, []
    for section, schema in PHYSICS_SCHEMA.items():
        over = {k: v for (s, k), v in scen_over.items() if s == section}
        values, prov = _resolve_section(physics_raw.get(section, {}), schema,
                                        f"physics.{section}", errors, over)
        physics[section] = values
        provenance.extend(prov)

    settings, prov = _resolve_section(raw.get("params", {}), SCENARIO_SCHEMA[scenario],
                                      "params", errors)
    provenance.extend(prov)

    plan_raw = raw.get("plan", {})
    plan, drift = None, 0.0
    plan_resolved = {}
    if not isinstance(plan_raw, dict):
        errors.append(("plan", "expected a table"))
        plan_raw = {}
    for key in plan_raw:
        if key not in ("segments", "start_position", "drift_speed"):
            errors.append((f"plan.{key}", "unknown key"))
    drift = _convert(plan_raw.get("drift_speed", "0 m/s"),
                     Field("velocity", None, check="any"), "plan.drift_speed", errors)
    start = _convert(plan_raw.get("start_position", "0 m"),
                     Field("length", None, check="any"), "plan.start_position", errors)
    segments = []
    for i, seg in enumerate(plan_raw.get("segments", [])):
        path = f"plan.segments[{i}]"
        if not isinstance(seg, dict):
            errors.append((path, "expected a table"))
            continue
        for key in seg:
            if key not in ("duration", "detuning_start", "detuning_end", "interpolation"):
                errors.append((f"{path}.{key}", "unknown key"))
        missing = [k for k in ("duration", "detuning_start") if k not in seg]
        for k in missing:
            errors.append((f"{path}.{k}", "missing required field"))
        if missing:
            continue
        dur = _convert(seg["duration"], Field("time", None), f"{path}.duration", errors)
        a = _convert(seg["detuning_start"], Field("frequency", None, check="any"),
                     f"{path}.detuning_start", errors)
        b = _convert(seg.get("detuning_end", seg["detuning_start"]),
                     Field("frequency", None, check="any"), f"{path}.detuning_end", errors)
        if None not in (dur, a, b):
            try:
                segments.append(RampSegment(dur, a, b, seg.get("interpolation", "linear")))
            except InvalidPlanError as exc:
                errors.append((path, str(exc)))
        plan_resolved.setdefault("segments", []).append([dur, a, b])
    plan_resolved.update(start_position=start, drift_speed=drift)
    if "drift_speed" in plan_raw:
        provenance.append(("plan.drift_speed", str(plan_raw["drift_speed"]), OVERRIDE))

    expectations = {}
    exp_raw = raw.get("expectations", {})
    if not isinstance(exp_raw, dict):
        errors.append(("expectations", "expected a table"))
        exp_raw = {}
    for name, bounds in exp_raw.items():
        path = f"expectations.{name}"
        if not isinstance(bounds, dict) or not set(bounds) <= {"min", "max"} or not bounds:
            errors.append((path, "expected a table with 'min' and/or 'max'"))
            continue
        ok = all(isinstance(v, (int, float)) and not isinstance(v, bool)
                 for v in bounds.values())
        if not ok:
            errors.append((path, "bounds must be numbers"))
            continue
        expectations[name] = {k: float(v) for k, v in bounds.items()}

    if errors:
        raise ConfigError(errors)

    try:
        params = _build_physics(physics, errors)
        loss = LossModel(physics["loss"]["cooling_lifetime"],
                         physics["loss"]["heating_lifetime"],
                         physics["loss"]["multiatom_lifetimes"])
        mot = MotModel(**physics["mot"])
        if segments:
            plan = TransportPlan(segments=segments, start_position=start,
                                 drift_speed=drift,
                                 lattice_wavelength=params.lattice_wavelength)
    except ValueError as exc:
        raise ConfigError([("physics", str(exc))]) from None

    resolved = {"scenario": scenario, "seed": seed, "repetitions": reps,
                "noise": noise, "physics": physics, "params": settings,
                "plan": plan_resolved, "expectations": expectations}
    return ScenarioConfig(scenario=scenario, seed=seed, repetitions=reps,
                          output_dir=str(out), noise=noise, emit_plots=emit_plots,
                          physics=params, loss=loss, mot=mot, settings=settings,
                          plan=plan, drift_speed=drift, expectations=expectations,
                          provenance=provenance, resolved=_jsonable(resolved),
                          raw_physics=physics)
