"""Unit handling for configuration values.

Internally every quantity is SI, and every frequency that enters the
cavity-QED formulas is an angular frequency in rad/s. Configuration text
carries explicit unit suffixes (``"17 MHz"``, ``"34 um"``) which are parsed
against a strict table; linear frequencies given for angular quantities are
multiplied by 2*pi on ingest.
"""
import math
import re

TWO_PI = 2.0 * math.pi

MHz = 1e6
kHz = 1e3
um = 1e-6
nm = 1e-9
mm = 1e-3
ms = 1e-3


def mhz_to_angular(f_mhz):
    """Linear frequency in MHz -> angular frequency in rad/s."""
    return TWO_PI * f_mhz * MHz


def angular_to_mhz(omega):
    return omega / (TWO_PI * MHz)


_FREQUENCY = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9}

# kind -> {suffix: factor to SI}
UNIT_TABLE = {
    "frequency": dict(_FREQUENCY),
    "angular_frequency": {**{k: TWO_PI * v for k, v in _FREQUENCY.items()},
                          "rad/s": 1.0},
    "length": {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9},
    "power": {"W": 1.0, "mW": 1e-3, "uW": 1e-6, "nW": 1e-9},
    "temperature": {"K": 1.0, "mK": 1e-3, "uK": 1e-6},
    "rate": {"/s": 1.0, "1/s": 1.0, "counts/s": 1.0, "counts/ms": 1e3,
             "/ms": 1e3, "photons/s": 1.0, "photons/ms": 1e3,
             "atoms/s": 1.0},
    "velocity": {"m/s": 1.0, "mm/s": 1e-3, "um/s": 1e-6, "cm/s": 1e-2},
}

_QUANTITY_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
                          r"\s*([A-Za-z/0-9]+)\s*$")


class UnitError(ValueError):
    pass


def parse_quantity(value, kind):
    """Parse ``"<number> <unit>"`` into an SI float of the given kind.

    Dimensionless kinds accept plain numbers. Dimensional kinds require a
    suffix from :data:`UNIT_TABLE`; a bare number is rejected so that a
    missing 2*pi or a mm/um slip cannot pass silently.
    """
    if kind == "dimensionless":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise UnitError(f"expected a plain number, got {value!r}")
        return float(value)
    if kind not in UNIT_TABLE:
        raise UnitError(f"unknown quantity kind {kind!r}")
    if not isinstance(value, str):
        raise UnitError(f"expected a string with a {kind} unit, got {value!r}")
    match = _QUANTITY_RE.match(value)
    if match is None:
        raise UnitError(f"cannot parse {value!r} as '<number> <unit>'")
    number, suffix = match.groups()
    table = UNIT_TABLE[kind]
    if suffix not in table:
        allowed = ", ".join(table)
        raise UnitError(f"unit {suffix!r} is not valid for {kind} ({allowed})")
    return float(number) * table[suffix]


def format_quantity(value, kind):
    """Render an SI value back into config text using a canonical unit."""
    canonical = {"frequency": "Hz", "angular_frequency": "MHz", "length": "m",
                 "time": "s", "power": "W", "temperature": "K",
                 "rate": "/s", "velocity": "m/s"}
    if kind == "dimensionless":
        return value
    unit = canonical[kind]
    return f"{value / UNIT_TABLE[kind][unit]!r} {unit}"
