"""Analytic infidelity budget and gate-time optimization.

The total error of a gate is the sum of three contributions: the
off-resonant carrier, motional effects beyond the Lamb-Dicke force model,
and qubit dephasing.  :func:`sweep_and_optimize` evaluates the budget along
a family of gate designs and locates the optimum.

The axial motional-error constants 0.8, 1.2 and 1.4 are empirical fit
values carried over from the literature and are not derived here.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .crystal import CA40, CrystalModes, IonSpecies, normal_modes
from .lightmatter import DriveConfig
from .magnus import (
    InfeasibleError,
    design_single_mode_gate,
    design_two_mode_gate,
    pulse_train_gate,
)

__all__ = [
    "MODE_SCHEMES",
    "PULSE_SCHEMES",
    "FORCE_SCHEMES",
    "NoiseConfig",
    "ErrorBudget",
    "SweepRecipe",
    "SweepPoint",
    "SweepResult",
    "EmptyRangeError",
    "carrier_error",
    "motional_error",
    "dephasing_error",
    "evaluate_point",
    "sweep_and_optimize",
    "rf_scan",
    "crossover_rf",
]

MODE_SCHEMES = ("axial_single_mode", "transverse_single_mode", "transverse_two_mode")
PULSE_SCHEMES = ("single_pulse", "multi_pulse")
FORCE_SCHEMES = ("secular", "micromotion")

# Relative gate-time tolerance of the optimum refinement.
OPTIMUM_RTOL = 1e-3


class EmptyRangeError(ValueError):
    """A sweep range contains no feasible design."""


@dataclass(frozen=True)
class NoiseConfig:
    """Dephasing time ``t2`` (s), mean phonon number ``nbar`` and ion count."""

    t2: float
    nbar: float
    n_ions: int = 2

    def __post_init__(self):
        if not self.t2 > 0:
            raise ValueError("t2 must be positive")
        if self.nbar < 0:
            raise ValueError("nbar must be nonnegative")


@dataclass(frozen=True)
class ErrorBudget:
    """Infidelity contributions of one gate; ``eps_total`` is their sum."""

    eps_carr: float
    eps_mot: float
    eps_deph: float
    gate_time: float
    scheme: tuple
    eps_total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "eps_total", self.eps_carr + self.eps_mot + self.eps_deph)


def carrier_error(n_ions, mean_square_rabi, detuning, force="secular", q=None, rf_freq=None):
    """Off-resonant carrier error.

    Parameters
    ----------
    n_ions : int
    mean_square_rabi : float
        Mean of the squared Rabi frequency over pulses (rad^2/s^2).  For
        micromotion gates this is the secular-equivalent Rabi frequency, that
        is the raw one times ``q/4``.
    detuning : float
        Secular detuning (rad/s); unused for micromotion gates.
    force : {"secular", "micromotion"}
    q, rf_freq : float
        Needed for micromotion gates.
    """
    if force == "secular":
        return 0.5 * n_ions * mean_square_rabi / detuning**2
    if force == "micromotion":
        return 8.0 * n_ions * mean_square_rabi / (q**2 * rf_freq**2)
    raise ValueError(f"unknown force scheme {force!r}")


def motional_error(scheme, modes: CrystalModes, detuning, gate_time, rabi, noise: NoiseConfig):
    """Motional error beyond the Lamb-Dicke force model.

    Parameters
    ----------
    scheme : str
        One of :data:`MODE_SCHEMES`.
    modes : CrystalModes
        Modes of the driven axis with Lamb-Dicke parameters.
    detuning : float
        Effective detuning (rad/s).
    gate_time : float
    rabi : float
        RMS Rabi frequency (rad/s), secular equivalent.
    noise : NoiseConfig
    """
    n = noise.n_ions
    nbar = noise.nbar
    eta1 = modes.lamb_dicke[0]
    higher_order = np.pi**2 * n * (n - 1) * eta1**4 / (8.0 * n**2)
    if scheme == "axial_single_mode":
        omega = modes.mode_freqs[0]
        loop_term = 0.8 * np.pi * n * (detuning - omega) * (nbar + 1) / (2.0 * omega**2 * gate_time)
        return loop_term + higher_order * (1.2 * nbar**2 + 1.4 * nbar)
    if scheme == "transverse_single_mode":
        omega2 = modes.mode_freqs[1]
        eta2 = modes.lamb_dicke[1]
        return (rabi * eta2) ** 2 * (2 * nbar + 1) * (detuning**2 + omega2**2) / (detuning**2 - omega2**2) ** 2
    if scheme == "transverse_two_mode":
        return 2.0 * higher_order * (nbar**2 + nbar)
    raise ValueError(f"unknown mode scheme {scheme!r}")


def dephasing_error(noise: NoiseConfig, t_g):
    """Dephasing error ``2 N^2 t_g / T2``."""
    return 2.0 * noise.n_ions**2 * t_g / noise.t2


def crossover_rf(detuning, q):
    """Drive frequency ``4 delta / q`` above which micromotion gates win."""
    if not q > 0:
        raise ValueError("q must be positive")
    return 4.0 * detuning / q


@dataclass(frozen=True)
class SweepRecipe:
    """A family of gate designs parameterized by one scalar.

    ``sweep_min`` and ``sweep_max`` bound the Rabi frequency (rad/s) of
    single-mode gates or the axial trap frequency (rad/s) of two-mode gates.
    Pulse trains first optimize that single-pulse family and then sweep the
    gate time between ``train_min`` and ``train_max`` times the single-pulse
    optimum, keeping its detuning and crystal.

    Micromotion gates reuse the secular design at equal force: the raw Rabi
    frequency is ``4/q`` times larger and only the carrier error changes.
    With ``rf_rule="crossover"`` the drive frequency of every point is set
    to ``4 delta / q``.
    """

    mode_scheme: str
    axial_freq: float
    radial_freq: float
    wavevector: float
    noise: NoiseConfig
    sweep_min: float
    sweep_max: float
    n_points: int = 41
    pulse_scheme: str = "single_pulse"
    force_scheme: str = "secular"
    species: IonSpecies = CA40
    r1: int = 1
    r2: int = 2
    n_pulses: int = 3
    q: float = 0.0
    rf_freq: float = np.inf
    rf_rule: str = "fixed"
    phase_modes: str = "all"
    train_min: float = 0.2
    train_max: float = 1.0

    def __post_init__(self):
        if self.mode_scheme not in MODE_SCHEMES:
            raise ValueError(f"mode_scheme must be one of {MODE_SCHEMES}")
        if self.pulse_scheme not in PULSE_SCHEMES:
            raise ValueError(f"pulse_scheme must be one of {PULSE_SCHEMES}")
        if self.force_scheme not in FORCE_SCHEMES:
            raise ValueError(f"force_scheme must be one of {FORCE_SCHEMES}")
        if self.rf_rule not in ("fixed", "crossover"):
            raise ValueError("rf_rule must be 'fixed' or 'crossover'")
        if not (0 < self.sweep_min <= self.sweep_max) or self.n_points < 1:
            raise EmptyRangeError("sweep range is empty")
        if not 0 < self.train_min <= self.train_max:
            raise EmptyRangeError("pulse-train gate-time range is empty")
        if self.force_scheme == "micromotion":
            if not self.q > 0:
                raise ValueError("micromotion gates need q > 0")
            if self.rf_rule == "fixed" and not np.isfinite(self.rf_freq):
                raise ValueError("micromotion gates need an rf_freq or the crossover rule")

    @property
    def axis(self) -> str:
        return "z" if self.mode_scheme == "axial_single_mode" else "x"

    @property
    def tags(self) -> tuple:
        return (self.mode_scheme, self.pulse_scheme, self.force_scheme)

    def grid(self):
        if self.pulse_scheme == "multi_pulse":
            return np.linspace(self.train_min, self.train_max, self.n_points)
        return np.linspace(self.sweep_min, self.sweep_max, self.n_points)

    def modes(self, axial_freq=None) -> CrystalModes:
        return normal_modes(
            self.species,
            self.axial_freq if axial_freq is None else axial_freq,
            self.radial_freq,
            self.axis,
            self.noise.n_ions,
            self.wavevector,
        )

    def single_pulse(self):
        return replace(self, pulse_scheme="single_pulse")


@dataclass(frozen=True)
class SweepPoint:
    """One evaluated design of a sweep.

    ``rabi`` is the RMS secular-equivalent Rabi frequency and ``raw_rabi``
    the one the laser must supply (they differ for micromotion gates).
    ``bus_detuning`` is the detuning from the centre-of-mass mode.
    """

    x: float
    budget: ErrorBudget
    rabi: float
    raw_rabi: float
    detuning: float
    bus_detuning: float
    axial_freq: float
    rf_freq: float
    amplitudes: tuple = ()

    @property
    def gate_time(self) -> float:
        return self.budget.gate_time


@dataclass(frozen=True)
class SweepResult:
    """Evaluated sweep sorted by gate time, with the refined optimum."""

    recipe: SweepRecipe
    points: tuple
    optimum: SweepPoint
    interior: bool
    reference: SweepPoint | None = None


def _design(recipe: SweepRecipe, x, reference=None):
    """Secular gate design for sweep value ``x``.

    Returns the gate, the modes it acts on and the axial trap frequency.
    """
    n = recipe.noise.n_ions
    if recipe.pulse_scheme == "multi_pulse":
        modes = recipe.modes(reference.axial_freq)
        drive = DriveConfig(modes.axis, np.ones(n), reference.detuning)
        gate = pulse_train_gate(modes, drive, x * reference.gate_time, recipe.n_pulses)
        return gate, modes, reference.axial_freq
    if recipe.mode_scheme == "transverse_two_mode":
        modes = recipe.modes(x)
        drive = DriveConfig(modes.axis, np.ones(n), 0.0)
        return design_two_mode_gate(modes, drive, recipe.r1, recipe.r2), modes, float(x)
    modes = recipe.modes()
    drive = DriveConfig(modes.axis, np.full(n, x), 0.0)
    gate = design_single_mode_gate(modes, drive, recipe.r1, phase_modes=recipe.phase_modes)
    return gate, modes, recipe.axial_freq


def evaluate_point(recipe: SweepRecipe, x, reference: SweepPoint | None = None) -> SweepPoint:
    """Design a gate for sweep value ``x`` and evaluate its error budget.

    ``reference`` is the single-pulse optimum; it is required for pulse
    trains, whose detuning and crystal it fixes.
    """
    gate, modes, axial = _design(recipe, x, reference)
    noise = recipe.noise
    rms = float(np.sqrt(np.mean(gate.rabi**2)))
    mean_square = rms**2
    if gate.sequence is not None:
        mean_square = gate.sequence.mean_square_rabi
    delta = gate.detuning
    if recipe.force_scheme == "secular":
        rf = recipe.rf_freq
        eps_carr = carrier_error(noise.n_ions, mean_square, delta)
        raw = rms
    else:
        rf = crossover_rf(delta, recipe.q) if recipe.rf_rule == "crossover" else recipe.rf_freq
        eps_carr = carrier_error(noise.n_ions, mean_square, delta, "micromotion", recipe.q, rf)
        raw = rms * 4.0 / recipe.q
    eps_mot = motional_error(recipe.mode_scheme, modes, delta, gate.gate_time, rms, noise)
    budget = ErrorBudget(eps_carr, eps_mot, dephasing_error(noise, gate.gate_time), gate.gate_time, recipe.tags)
    amps = tuple(gate.sequence.amplitudes[:, 0]) if gate.sequence is not None else ()
    return SweepPoint(
        x=float(x),
        budget=budget,
        rabi=rms,
        raw_rabi=raw,
        detuning=delta,
        bus_detuning=delta - modes.mode_freqs[0],
        axial_freq=axial,
        rf_freq=rf,
        amplitudes=amps,
    )


def _safe_point(args):
    recipe, x, reference = args
    try:
        return evaluate_point(recipe, x, reference)
    except InfeasibleError:
        return None


def _map(fn, items, jobs):
    if jobs is None or jobs <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def _refine(recipe, points, best, reference):
    """Golden-section search between the grid neighbours of the minimum."""
    xs = [p.x for p in points]
    k = xs.index(best.x)
    if k == 0 or k == len(xs) - 1:
        return best, False
    lo, hi = sorted((xs[k - 1], xs[k + 1]))
    cache = {}

    def total(x):
        if x not in cache:
            cache[x] = _safe_point((recipe, x, reference))
        p = cache[x]
        return np.inf if p is None else p.budget.eps_total

    # The gate time is smooth and monotone in x, so a relative tolerance on x
    # well below OPTIMUM_RTOL bounds the gate-time error.
    res = minimize_scalar(total, bracket=(lo, best.x, hi), method="golden", tol=OPTIMUM_RTOL * 1e-2)
    refined = cache.get(res.x) or _safe_point((recipe, res.x, reference))
    if refined is None or refined.budget.eps_total > best.budget.eps_total:
        return best, True
    return refined, True


def sweep_and_optimize(recipe: SweepRecipe, jobs: int | None = 1) -> SweepResult:
    """Evaluate ``recipe`` on its grid and refine the minimum of ``eps_total``.

    Pulse trains first optimize the matching single-pulse recipe and sweep
    the gate time below that optimum at its detuning.  Grid points without a
    feasible design are dropped.

    Raises
    ------
    EmptyRangeError
        If no grid point is feasible.
    """
    reference = None
    if recipe.pulse_scheme == "multi_pulse":
        reference = sweep_and_optimize(replace(recipe.single_pulse(), force_scheme="secular"), jobs).optimum
    grid = recipe.grid()
    evaluated = _map(_safe_point, [(recipe, x, reference) for x in grid], jobs)
    points = [p for p in evaluated if p is not None]
    if not points:
        raise EmptyRangeError("no feasible design in the sweep range")
    best = min(points, key=lambda p: p.budget.eps_total)
    optimum, interior = _refine(recipe, points, best, reference)
    points.sort(key=lambda p: p.gate_time)
    return SweepResult(recipe, tuple(points), optimum, interior, reference)


def rf_scan(recipe: SweepRecipe, rf_freqs, jobs: int | None = 1):
    """Optimum micromotion gate for each drive frequency in ``rf_freqs``.

    Returns a list of ``(rf_freq, optimum SweepPoint)``.
    """
    rows = []
    for rf in rf_freqs:
        result = sweep_and_optimize(replace(recipe, force_scheme="micromotion", rf_freq=float(rf), rf_rule="fixed"), jobs)
        rows.append((float(rf), result.optimum))
    return rows
