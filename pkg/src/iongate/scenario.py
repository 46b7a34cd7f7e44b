"""Scenario files: parsing, validation and serialization.

A scenario is an INI file with the sections ``[scenario]``, ``[crystal]``,
``[drive]``, ``[noise]``, ``[oracle]`` and ``[figure]``.  All frequencies
are ordinary frequencies in Hz (the angular frequency divided by 2 pi), as
in experimental tables.  Times are in seconds unless the key says
otherwise.  See ``README.md`` for the full key list.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, replace

import numpy as np

from .crystal import CA40, CA40_729_WAVEVECTOR, IonSpecies, wavevector_from_lamb_dicke
from .errors import FORCE_SCHEMES, MODE_SCHEMES, PULSE_SCHEMES, NoiseConfig, SweepRecipe

__all__ = [
    "TASKS",
    "ScenarioError",
    "Scenario",
    "parse",
    "load",
    "dumps",
    "figure_scenario",
    "with_task",
]

TASKS = ("modes", "design", "sweep", "pulse-train", "oracle", "figure")

TWO_PI = 2.0 * np.pi


class ScenarioError(ValueError):
    """Invalid or incomplete scenario."""


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


# (section, key, field name, parser).  The field name doubles as the
# attribute of Scenario.
_SCHEMA = [
    ("scenario", "task", "task", str),
    ("scenario", "figure_id", "figure_id", int),
    ("crystal", "species", "species", str),
    ("crystal", "n_ions", "n_ions", int),
    ("crystal", "axial_freq_hz", "axial_freq_hz", float),
    ("crystal", "radial_freq_hz", "radial_freq_hz", float),
    ("drive", "mode_scheme", "mode_scheme", str),
    ("drive", "pulse_scheme", "pulse_scheme", str),
    ("drive", "force_scheme", "force_scheme", str),
    ("drive", "lamb_dicke", "lamb_dicke", float),
    ("drive", "rabi_hz", "rabi_hz", float),
    ("drive", "sweep_min_hz", "sweep_min_hz", float),
    ("drive", "sweep_max_hz", "sweep_max_hz", float),
    ("drive", "n_points", "n_points", int),
    ("drive", "r1", "r1", int),
    ("drive", "r2", "r2", int),
    ("drive", "n_pulses", "n_pulses", int),
    ("drive", "gate_time_fraction", "gate_time_fraction", float),
    ("drive", "train_min", "train_min", float),
    ("drive", "train_max", "train_max", float),
    ("drive", "q", "q", float),
    ("drive", "rf_freq_hz", "rf_freq_hz", float),
    ("drive", "rf_rule", "rf_rule", str),
    ("drive", "phase_modes", "phase_modes", str),
    ("noise", "t2", "t2", float),
    ("noise", "nbar", "nbar", float),
    ("oracle", "fock_cutoff", "fock_cutoff", int),
    ("oracle", "n_modes", "oracle_modes", int),
    ("oracle", "include_carrier", "include_carrier", _bool),
    ("figure", "t2_values", "t2_values", _floats),
]


@dataclass(frozen=True)
class Scenario:
    """Validated scenario.  ``None`` marks an absent optional key."""

    task: str
    figure_id: int | None = None
    species: str = "Ca40"
    n_ions: int = 2
    axial_freq_hz: float | None = None
    radial_freq_hz: float | None = None
    mode_scheme: str = "axial_single_mode"
    pulse_scheme: str = "single_pulse"
    force_scheme: str = "secular"
    lamb_dicke: float | None = None
    rabi_hz: float | None = None
    sweep_min_hz: float | None = None
    sweep_max_hz: float | None = None
    n_points: int = 41
    r1: int = 1
    r2: int = 2
    n_pulses: int = 3
    gate_time_fraction: float = 1.0
    train_min: float = 0.2
    train_max: float = 1.0
    q: float = 0.0
    rf_freq_hz: float | None = None
    rf_rule: str = "fixed"
    phase_modes: str = "all"
    t2: float | None = None
    nbar: float | None = None
    fock_cutoff: int = 12
    oracle_modes: int = 2
    include_carrier: bool = True
    t2_values: tuple | None = None

    # -- derived quantities -------------------------------------------------
    @property
    def species_obj(self) -> IonSpecies:
        return CA40

    @property
    def axis(self) -> str:
        return "z" if self.mode_scheme == "axial_single_mode" else "x"

    @property
    def axial_freq(self) -> float:
        return TWO_PI * self.axial_freq_hz

    @property
    def radial_freq(self) -> float:
        return TWO_PI * self.radial_freq_hz

    @property
    def wavevector(self) -> float:
        """Wavevector projection reproducing ``lamb_dicke`` on the drive axis.

        The reference frequency is the single-ion trap frequency of the axis.
        Without ``lamb_dicke`` the 729 nm wavevector is used.
        """
        if self.lamb_dicke is None:
            return CA40_729_WAVEVECTOR
        ref = self.axial_freq if self.axis == "z" else self.radial_freq
        return wavevector_from_lamb_dicke(self.species_obj, self.lamb_dicke, ref)

    @property
    def rf_freq(self) -> float:
        return np.inf if self.rf_freq_hz is None else TWO_PI * self.rf_freq_hz

    def noise(self, t2=None) -> NoiseConfig:
        return NoiseConfig(self.t2 if t2 is None else t2, self.nbar, self.n_ions)

    def recipe(self, t2=None) -> SweepRecipe:
        """Sweep recipe described by the scenario."""
        return SweepRecipe(
            mode_scheme=self.mode_scheme,
            axial_freq=self.axial_freq,
            radial_freq=self.radial_freq,
            wavevector=self.wavevector,
            noise=self.noise(t2),
            sweep_min=TWO_PI * self.sweep_min_hz,
            sweep_max=TWO_PI * self.sweep_max_hz,
            n_points=self.n_points,
            pulse_scheme=self.pulse_scheme,
            force_scheme=self.force_scheme,
            species=self.species_obj,
            r1=self.r1,
            r2=self.r2,
            n_pulses=self.n_pulses,
            q=self.q,
            rf_freq=self.rf_freq,
            rf_rule=self.rf_rule,
            phase_modes=self.phase_modes,
            train_min=self.train_min,
            train_max=self.train_max,
        )


_REQUIRED = {
    "modes": ["crystal.axial_freq_hz", "crystal.radial_freq_hz"],
    "design": ["crystal.axial_freq_hz", "crystal.radial_freq_hz", "drive.lamb_dicke", "noise.t2", "noise.nbar"],
    "sweep": [
        "crystal.axial_freq_hz", "crystal.radial_freq_hz", "drive.lamb_dicke",
        "drive.sweep_min_hz", "drive.sweep_max_hz", "noise.t2", "noise.nbar",
    ],
    "oracle": ["crystal.axial_freq_hz", "crystal.radial_freq_hz", "drive.lamb_dicke"],
    "figure": [
        "crystal.axial_freq_hz", "crystal.radial_freq_hz", "drive.lamb_dicke",
        "drive.sweep_min_hz", "drive.sweep_max_hz", "noise.nbar", "figure.t2_values",
    ],
}
_REQUIRED["pulse-train"] = _REQUIRED["sweep"]

_FIELD_OF = {f"{section}.{key}": name for section, key, name, _ in _SCHEMA}


def _validate(s: Scenario) -> Scenario:
    if s.task not in TASKS:
        raise ScenarioError(f"scenario.task must be one of {TASKS}, got {s.task!r}")
    for dotted in _REQUIRED[s.task]:
        if getattr(s, _FIELD_OF[dotted]) is None:
            raise ScenarioError(f"missing required key {dotted} for task {s.task!r}")
    if s.task in ("design", "oracle") and s.mode_scheme != "transverse_two_mode" and s.rabi_hz is None:
        raise ScenarioError(f"missing required key drive.rabi_hz for task {s.task!r}")
    if s.species.lower() not in ("ca40", "40ca+"):
        raise ScenarioError(f"crystal.species: only Ca40 is built in, got {s.species!r}")
    if s.n_ions != 2 and s.task != "modes":
        raise ScenarioError("crystal.n_ions: gate tasks need two ions")
    for name in ("axial_freq_hz", "radial_freq_hz", "rabi_hz", "sweep_min_hz", "sweep_max_hz", "rf_freq_hz", "t2"):
        value = getattr(s, name)
        if value is not None and not value > 0:
            raise ScenarioError(f"{name} must be positive, got {value}")
    checks = [
        ("drive.mode_scheme", s.mode_scheme, MODE_SCHEMES),
        ("drive.pulse_scheme", s.pulse_scheme, PULSE_SCHEMES),
        ("drive.force_scheme", s.force_scheme, FORCE_SCHEMES),
        ("drive.rf_rule", s.rf_rule, ("fixed", "crossover")),
        ("drive.phase_modes", s.phase_modes, ("all", "bus")),
    ]
    for key, value, allowed in checks:
        if value not in allowed:
            raise ScenarioError(f"{key} must be one of {allowed}, got {value!r}")
    if s.nbar is not None and s.nbar < 0:
        raise ScenarioError("noise.nbar must be non-negative")
    if s.figure_id is not None and s.figure_id not in range(1, 6):
        raise ScenarioError("scenario.figure_id must be in 1..5")
    if s.force_scheme == "micromotion" and s.task in ("sweep", "figure", "design"):
        if not s.q > 0:
            raise ScenarioError("missing required key drive.q for micromotion gates")
        if s.rf_rule == "fixed" and s.rf_freq_hz is None:
            raise ScenarioError("missing required key drive.rf_freq_hz for micromotion gates")
    return s


def parse(text: str) -> Scenario:
    """Parse and validate scenario text.

    Raises
    ------
    ScenarioError
        On syntax errors, unknown keys, bad values or missing required keys.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"unreadable scenario: {exc}") from exc
    known = {(section, key) for section, key, _, _ in _SCHEMA}
    for section in cp.sections():
        for key in cp[section]:
            if (section, key) not in known:
                raise ScenarioError(f"unknown key {section}.{key}")
    values = {}
    for section, key, name, convert in _SCHEMA:
        if cp.has_option(section, key):
            raw = cp.get(section, key)
            try:
                values[name] = convert(raw)
            except ValueError as exc:
                raise ScenarioError(f"bad value for {section}.{key}: {raw!r}") from exc
    if "task" not in values:
        raise ScenarioError("missing required key scenario.task")
    return _validate(Scenario(**values))


def load(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dumps(s: Scenario) -> str:
    """Serialize every set field; ``parse(dumps(s)) == s``."""
    cp = configparser.ConfigParser()
    for section, key, name, _ in _SCHEMA:
        value = getattr(s, name)
        if value is None:
            continue
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key, _format(value))
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


# Built-in figure recipes, keyed by figure number.
_AXIAL = dict(axial_freq_hz=0.975e6, radial_freq_hz=9.75e6)
_FIGURES = {
    1: dict(
        mode_scheme="axial_single_mode", lamb_dicke=0.098, nbar=0.1,
        sweep_min_hz=0.02e6, sweep_max_hz=0.12e6, t2_values=(0.2, 0.4, 0.8, 1.6),
    ),
    2: dict(
        mode_scheme="transverse_single_mode", lamb_dicke=0.031, nbar=0.05,
        sweep_min_hz=0.05e6, sweep_max_hz=1.29e6, t2_values=(0.2, 0.4, 0.8, 1.6), phase_modes="bus",
    ),
    3: dict(
        mode_scheme="transverse_two_mode", lamb_dicke=0.031, nbar=0.05,
        sweep_min_hz=0.2e6, sweep_max_hz=0.975e6, t2_values=(0.2, 0.4, 0.8, 1.6),
    ),
    4: dict(
        mode_scheme="axial_single_mode", pulse_scheme="multi_pulse", n_pulses=3, lamb_dicke=0.098,
        nbar=0.1, sweep_min_hz=0.02e6, sweep_max_hz=0.12e6, t2_values=(0.2, 0.8),
    ),
    5: dict(
        mode_scheme="transverse_two_mode", pulse_scheme="multi_pulse", n_pulses=5, lamb_dicke=0.031,
        nbar=0.05, sweep_min_hz=0.2e6, sweep_max_hz=0.975e6, t2_values=(0.2, 0.8),
    ),
}


def figure_scenario(figure_id: int) -> Scenario:
    """Built-in scenario reproducing one of the five figure recipes."""
    if figure_id not in _FIGURES:
        raise ScenarioError(f"figure id must be in 1..5, got {figure_id}")
    return _validate(Scenario(task="figure", figure_id=figure_id, **_AXIAL, **_FIGURES[figure_id]))


def with_task(s: Scenario, task: str) -> Scenario:
    """Copy of ``s`` running ``task``; validated."""
    return _validate(replace(s, task=task))

