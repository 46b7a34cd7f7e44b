"""Magnus-expansion design of Molmer-Sorensen gates.

The second-order Magnus operator of a state-dependent force splits into
phase-space displacements ``gamma[i, m]`` of every mode and a spin-spin
phase ``g12``.  A gate is maximally entangling when all displacements
vanish and ``g12 = -i pi/8``.

Conventions
-----------
``couplings[i, m]`` (rad/s) is the force on ion ``i`` times the zero-point
extent of mode ``m``.  With ``h(t) = cos(detuning t) exp(i omega_m t)``::

    gamma[i, m](t) = -i couplings[i, m] * conj(int_0^t h)
    g_ij(t)        = i sum_m c_im c_jm int_0^t dt1 int_0^t1 dt2 Im(h(t1) conj(h(t2)))

``g12`` always denotes the symmetrized pair coefficient ``(g_12 + g_21)/2``,
so the entangling unitary is ``exp(2 g12 s_1 s_2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from .crystal import CrystalModes
from .lightmatter import DriveConfig, ForceModel, RegimeViolation, classify, force_model, sideband_weights

__all__ = [
    "TARGET_G12",
    "ResonanceError",
    "InfeasibleError",
    "Pulse",
    "PulseSequence",
    "GateSolution",
    "circle_function",
    "gamma_single_pulse",
    "g12_single_pulse",
    "j_coupling",
    "design_single_mode_gate",
    "design_two_mode_gate",
    "unit_force",
    "pulse_integrals",
    "multipulse_coefficients",
    "closure_matrix",
    "solve_pulse_train",
    "pulse_train_gate",
    "micromotion_transform",
    "carrier_ratio",
    "gate_time_ratio",
    "ideal_bell_state",
]

TARGET_G12 = -1j * np.pi / 8.0

# Relative distance to a mode below which the resonant limit is used.
RESONANCE_TOL = 1e-6


class ResonanceError(ValueError):
    """The detuning coincides with a mode frequency."""


class InfeasibleError(ValueError):
    """No pulse train satisfies the closure and phase conditions."""


@dataclass(frozen=True)
class Pulse:
    """Square pulse starting at ``t_start`` (s) lasting ``width`` (s)."""

    t_start: float
    width: float
    rabi: np.ndarray


@dataclass(frozen=True)
class PulseSequence:
    """Ordered, non-overlapping square pulses at a fixed detuning."""

    pulses: tuple
    detuning: float
    total_time: float

    def __post_init__(self):
        starts = [p.t_start for p in self.pulses]
        if any(p.width <= 0 for p in self.pulses):
            raise ValueError("pulse widths must be positive")
        if any(b < a for a, b in zip(starts, starts[1:])):
            raise ValueError("pulse starts must be nondecreasing")
        for a, b in zip(self.pulses, self.pulses[1:]):
            if a.t_start + a.width > b.t_start * (1 + 1e-12) + 1e-18:
                raise ValueError("pulses overlap")

    @classmethod
    def equidistant(cls, amplitudes, detuning, total_time, n_ions=2):
        """Back-to-back pulses of equal width filling ``total_time``.

        ``amplitudes`` has one entry per pulse (shared by all ions) or one
        row per pulse with one column per ion.
        """
        amps = np.asarray(amplitudes, dtype=float)
        if amps.ndim == 1:
            amps = np.repeat(amps[:, None], n_ions, axis=1)
        width = total_time / amps.shape[0]
        pulses = tuple(Pulse(n * width, width, amps[n].copy()) for n in range(amps.shape[0]))
        return cls(pulses, detuning, total_time)

    @property
    def n_pulses(self) -> int:
        return len(self.pulses)

    @property
    def amplitudes(self) -> np.ndarray:
        """``(n_pulses, n_ions)`` array of Rabi frequencies."""
        return np.array([p.rabi for p in self.pulses])

    @property
    def mean_square_rabi(self) -> float:
        """Pulse-averaged squared Rabi frequency, averaged over ions."""
        return float(np.mean(self.amplitudes**2))

    def rabi_at(self, t):
        """Per-ion Rabi frequencies active at time ``t``."""
        for p in self.pulses:
            if p.t_start <= t < p.t_start + p.width:
                return p.rabi
        if self.pulses and t == self.total_time:
            return self.pulses[-1].rabi
        return np.zeros_like(self.pulses[0].rabi)


@dataclass(frozen=True)
class GateSolution:
    """Outcome of a gate design.

    Attributes
    ----------
    gamma : ndarray
        ``(n_ions, n_modes)`` displacements at the gate time.
    g12 : complex
        Symmetrized spin-spin coefficient.
    j_coupling : float
        Effective coupling ``J12`` (rad/s) for continuous drives, or
        ``2 i g12 / t_g`` for pulse trains.
    gate_time : float
    detuning : float
        Effective detuning (rad/s).
    rabi : ndarray
        Per-ion Rabi frequencies of the drive; for pulse trains the RMS over
        pulses.
    loops : tuple
        ``(r1, r2)``; ``r2`` is ``None`` for single-mode gates.
    closure_residual : float
        Largest displacement of a constrained mode.
    drive : DriveConfig
        Drive realizing the gate.
    sequence : PulseSequence or None
    """

    gamma: np.ndarray
    g12: complex
    j_coupling: float
    gate_time: float
    detuning: float
    rabi: np.ndarray
    loops: tuple
    closure_residual: float
    drive: DriveConfig
    sequence: PulseSequence | None = None
    constrained: tuple = field(default=(0,))


def circle_function(omega, tau):
    """``(1 - exp(i omega tau)) / omega`` with its limit ``-i tau`` at zero."""
    omega = np.asarray(omega, dtype=float)
    x = omega * tau
    small = np.abs(x) < 1e-6
    safe = np.where(small, 1.0, omega)
    value = np.where(small, -1j * tau * (1.0 + 0.5j * x), -np.expm1(1j * x) / safe)
    return value if value.ndim else complex(value)


def _phi1(z):
    """``(exp(z) - 1) / z`` for imaginary ``z``, finite at zero."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-8
    safe = np.where(small, 1.0, z)
    return np.where(small, 1.0 + 0.5 * z, np.expm1(z) / safe)


def _sine_excess(x, t):
    """``(t - sin(x t)/x) / x``, finite as ``x -> 0``."""
    x = np.asarray(x, dtype=float)
    y = x * t
    small = np.abs(y) < 1e-3
    safe = np.where(small, 1.0, x)
    series = t**2 * (y / 6.0 - y**3 / 120.0 + y**5 / 5040.0)
    return np.where(small, series, (t - np.sin(y) / safe) / safe)


def gamma_single_pulse(force: ForceModel, m: int, t, ion=None, rotating_wave=True):
    """Displacement of mode ``m`` after a continuous drive of duration ``t``.

    Returns ``(c / 2) (1 - exp(i (delta - omega) t)) / (delta - omega)`` per
    ion, or for the single ``ion`` if given.  ``rotating_wave=False`` adds the
    counter-rotating term oscillating at ``delta + omega``.
    """
    delta = force.effective_detuning
    omega = force.mode_freqs[m]
    c = force.couplings[:, m] if ion is None else force.couplings[ion, m]
    value = 0.5 * c * circle_function(delta - omega, t)
    if not rotating_wave:
        value = value + 0.5 * c * circle_function(-delta - omega, t)
    return value


def g12_single_pulse(force: ForceModel, modes: CrystalModes | None = None, t=0.0, mode_set=None):
    """Spin-spin coefficient of ions 0 and 1 after a continuous drive.

    ``g12 = i sum_m c_0m c_1m omega_m / (2 (omega_m^2 - delta^2))
    (t - sin((delta - omega_m) t) / (delta - omega_m))``, which keeps the
    exact secular growth rate and the near-resonant oscillation.

    Parameters
    ----------
    force : ForceModel
    modes : CrystalModes, optional
        Unused; accepted for symmetry with the other design calls.
    t : float
    mode_set : iterable of int, optional
        Restrict the sum to these modes.
    """
    delta = force.effective_detuning
    idx = range(force.mode_freqs.size) if mode_set is None else mode_set
    total = 0.0
    for m in idx:
        omega = force.mode_freqs[m]
        c = force.couplings[0, m] * force.couplings[1, m]
        x = delta - omega
        # omega / (2 (omega^2 - delta^2)) = -omega / (2 x (omega + delta))
        total += c * (-omega / (2.0 * (omega + delta))) * float(_sine_excess(x, t))
    return 1j * total


def j_coupling(force: ForceModel, modes: CrystalModes | None = None, detuning=None, mode_set=None):
    """Effective coupling ``J12 = sum_m c_0m c_1m omega_m / (delta^2 - omega_m^2)``.

    Raises
    ------
    ResonanceError
        If ``detuning`` is within the resonance tolerance of a mode.
    """
    delta = force.effective_detuning if detuning is None else detuning
    idx = range(force.mode_freqs.size) if mode_set is None else mode_set
    total = 0.0
    for m in idx:
        omega = force.mode_freqs[m]
        if abs(delta - omega) < RESONANCE_TOL * omega:
            raise ResonanceError(f"detuning on resonance with mode {m}")
        total += force.couplings[0, m] * force.couplings[1, m] * omega / (delta**2 - omega**2)
    return float(total)


def _all_gammas(force, t, rotating_wave=True):
    return np.column_stack(
        [gamma_single_pulse(force, m, t, rotating_wave=rotating_wave) for m in range(force.mode_freqs.size)]
    )


def design_single_mode_gate(
    modes: CrystalModes, drive: DriveConfig, r1: int = 1, bus: int = 0, phase_modes: str = "all"
) -> GateSolution:
    """Continuous gate closing ``r1`` loops of the bus mode.

    The detuning is chosen so that the bus mode closes at
    ``t_g = 2 pi r1 / (delta - omega_bus)`` and ``g12 = -i pi/8`` there.  At
    leading order this gives ``delta - omega_bus = 2 sqrt(r1 c_0 c_1)``,
    which for two ions is ``sqrt(2 r1) Omega eta``.

    Parameters
    ----------
    modes : CrystalModes
    drive : DriveConfig
        Rabi frequencies and sideband; its detuning is ignored.
    r1 : int
        Number of phase-space loops.
    bus : int
        Index of the bus mode (0 is centre of mass).
    phase_modes : {"all", "bus"}
        Modes included in the phase condition.  ``"bus"`` reproduces the
        closed-form single-mode design; ``"all"`` also counts the phase
        picked up through spectator modes.
    """
    if r1 < 1:
        raise ValueError("r1 must be at least 1")
    omega = modes.mode_freqs[bus]
    force = force_model(replace(drive, detuning=omega), modes)
    c = force.couplings[0, bus] * force.couplings[1, bus]
    if c <= 0:
        raise InfeasibleError("bus mode does not couple both ions with the same sign")
    mode_set = [bus] if phase_modes == "bus" else None
    if phase_modes not in ("all", "bus"):
        raise ValueError(f"phase_modes must be 'all' or 'bus', got {phase_modes!r}")

    def mismatch(gap):
        trial = replace(force, effective_detuning=omega + gap)
        t_g = 2.0 * np.pi * r1 / gap
        return g12_single_pulse(trial, t=t_g, mode_set=mode_set).imag - TARGET_G12.imag

    guess = 2.0 * np.sqrt(r1 * c)
    others = np.delete(modes.mode_freqs, bus) - omega
    above = others[others > 0]
    ceiling = 0.999 * above.min() if above.size else 100.0 * guess
    lo, hi = 0.5 * guess, min(2.0 * guess, ceiling)
    while mismatch(lo) > 0 and lo > 1e-6 * guess:
        lo *= 0.5
    while mismatch(hi) < 0 and hi < ceiling:
        hi = min(2.0 * hi, ceiling)
    gap = brentq(mismatch, lo, hi, xtol=1e-14 * guess, rtol=1e-14)
    delta = omega + gap
    t_g = 2.0 * np.pi * r1 / gap
    final = replace(force, effective_detuning=delta)
    gammas = _all_gammas(final, t_g)
    return GateSolution(
        gamma=gammas,
        g12=g12_single_pulse(final, t=t_g),
        j_coupling=j_coupling(final),
        gate_time=t_g,
        detuning=delta,
        rabi=drive.rabi.copy(),
        loops=(r1, None),
        closure_residual=float(np.max(np.abs(gammas[:, bus]))),
        drive=replace(drive, detuning=delta),
        constrained=(bus,),
    )


def design_two_mode_gate(modes: CrystalModes, drive: DriveConfig, r1: int = 1, r2: int = 2) -> GateSolution:
    """Continuous gate closing both transverse modes of a two-ion crystal.

    The detuning satisfies ``delta - omega_2 = r2 (delta - omega_1)`` and the
    gate time closes ``r1`` loops of the centre-of-mass mode.  The Rabi
    frequency is scaled so that ``g12 = -i pi/8``; the per-ion pattern of
    ``drive.rabi`` is kept (all ones if it is zero), with the sign of the
    second ion reversed when the loop numbers would give the opposite phase.

    Raises
    ------
    ValueError
        For the axial axis, whose mode splitting is incommensurate, or an
        invalid ``r2``.
    """
    if modes.axis == "z":
        raise ValueError("two-mode gates need transverse modes; the axial splitting is irrational")
    if modes.n_modes != 2:
        raise ValueError("two-mode design needs a two-ion crystal")
    if not (r2 >= 2 or r2 <= -1) or r1 < 1:
        raise ValueError("need r1 >= 1 and r2 >= 2 or r2 <= -1")
    w1, w2 = modes.mode_freqs
    delta = (r2 * w1 - w2) / (r2 - 1)
    t_g = 2.0 * np.pi * r1 * abs(r2 - 1) / (w1 - w2)
    pattern = drive.rabi if np.any(drive.rabi) else np.ones(modes.n_ions)
    unit = force_model(replace(drive, rabi=pattern, detuning=delta), modes)
    phase = g12_single_pulse(unit, t=t_g).imag
    if phase > 0:
        # A detuning between the modes flips the phase; a pi phase on the
        # second ion's drive flips it back.
        pattern = pattern * np.array([1.0, -1.0])
        unit = force_model(replace(drive, rabi=pattern, detuning=delta), modes)
        phase = g12_single_pulse(unit, t=t_g).imag
    if phase >= 0:
        raise InfeasibleError("loop numbers give no entangling phase")
    scale = np.sqrt(TARGET_G12.imag / phase)
    final = unit.scaled(scale)
    gammas = _all_gammas(final, t_g)
    rabi = pattern * scale
    return GateSolution(
        gamma=gammas,
        g12=g12_single_pulse(final, t=t_g),
        j_coupling=j_coupling(final),
        gate_time=t_g,
        detuning=delta,
        rabi=rabi,
        loops=(r1, r2),
        closure_residual=float(np.max(np.abs(gammas))),
        drive=replace(drive, rabi=rabi, detuning=delta),
        constrained=(0, 1),
    )


def unit_force(drive: DriveConfig, modes: CrystalModes) -> ForceModel:
    """Force model of ``drive`` with every Rabi frequency set to 1 rad/s."""
    return force_model(drive.with_rabi(np.ones(drive.n_ions)), modes)


def _self_integral(nu, mu, tau):
    """``int_0^tau ds1 int_0^s1 ds2 exp(i nu s1 - i mu s2)``."""
    if abs(mu * tau) > 1e-2:
        return (tau * _phi1(1j * (nu - mu) * tau) - tau * _phi1(1j * nu * tau)) / (-1j * mu)
    # Near mu = 0 the closed form cancels; use the exponential of a
    # triangular generator whose corner entry is the nested integral.
    generator = np.array([[0, 1, 0], [0, 1j * nu, 1], [0, 0, 1j * (nu - mu)]], dtype=complex)
    return complex(scipy.linalg.expm(generator * tau)[0, 2])


def pulse_integrals(omega, delta, starts, widths):
    """Single and ordered double integrals of ``h(t) = cos(delta t) exp(i omega t)``.

    Returns
    -------
    single : ndarray
        ``int h`` over each pulse.
    double : ndarray
        ``Im int int_{t2 < t1} h(t1) conj(h(t2))`` restricted to the same pulse.
    """
    freqs = (omega - delta, omega + delta)
    single = np.zeros(len(starts), dtype=complex)
    double = np.zeros(len(starts))
    for n, (t0, tau) in enumerate(zip(starts, widths)):
        single[n] = 0.5 * sum(np.exp(1j * f * t0) * tau * _phi1(1j * f * tau) for f in freqs)
        acc = 0.0j
        for fa in freqs:
            for fb in freqs:
                acc += np.exp(1j * (fa - fb) * t0) * _self_integral(fa, fb, tau)
        double[n] = 0.25 * acc.imag
    return single, double


def _pair_matrix(omega, delta, starts, widths):
    """Matrix ``P[n, k]`` with ``g_ij = i sum c_in c_jk P[n, k]`` for one mode."""
    single, double = pulse_integrals(omega, delta, starts, widths)
    cross = np.imag(single[:, None] * np.conj(single[None, :]))
    pair = np.tril(cross, k=-1)
    pair[np.diag_indices_from(pair)] = double
    return pair, single


def multipulse_coefficients(seq: PulseSequence, force: ForceModel, modes: CrystalModes | None = None):
    """Displacements and spin-spin coefficient of a pulse train.

    Parameters
    ----------
    seq : PulseSequence
    force : ForceModel
        Force evaluated at unit Rabi frequency (see :func:`unit_force`).
    modes : CrystalModes, optional
        Unused; accepted for call symmetry.

    Returns
    -------
    gamma : ndarray
        ``(n_ions, n_modes)`` displacements at the end of the sequence.
    g12 : complex
        Symmetrized spin-spin coefficient of ions 0 and 1.

    Notes
    -----
    Both co- and counter-rotating terms are integrated exactly.
    """
    starts = [p.t_start for p in seq.pulses]
    widths = [p.width for p in seq.pulses]
    amps = seq.amplitudes
    n_modes = force.mode_freqs.size
    gamma = np.zeros((force.couplings.shape[0], n_modes), dtype=complex)
    g12 = 0.0
    for m in range(n_modes):
        pair, single = _pair_matrix(force.mode_freqs[m], seq.detuning, starts, widths)
        coupling = force.couplings[:, m][None, :] * amps
        gamma[:, m] = -1j * (coupling * np.conj(single)[:, None]).sum(axis=0)
        if coupling.shape[1] > 1:
            a, b = coupling[:, 0], coupling[:, 1]
            g12 += 0.5 * (a @ pair @ b + b @ pair @ a)
    return gamma, 1j * g12


def closure_matrix(modes: CrystalModes, detuning, t_g, n_pulses, constrained):
    """Real linear system whose nullspace closes the constrained modes.

    Row pairs hold the real and imaginary parts of the per-pulse
    displacement of each constrained mode for unit amplitude.
    """
    width = t_g / n_pulses
    starts = width * np.arange(n_pulses)
    rows = []
    for m in constrained:
        omega = modes.mode_freqs[m]
        z = 0.5 * (
            circle_function(detuning - omega, width) * np.exp(1j * (detuning - omega) * starts)
            + circle_function(-detuning - omega, width) * np.exp(-1j * (detuning + omega) * starts)
        )
        rows.extend([z.real, z.imag])
    return np.array(rows)


def _default_constrained(modes, n_pulses):
    if n_pulses >= 2 * modes.n_modes + 1:
        return tuple(range(modes.n_modes))
    return tuple(range(max(1, (n_pulses - 1) // 2)))


def solve_pulse_train(
    modes: CrystalModes,
    detuning: float,
    t_g: float,
    n_pulses: int,
    drive: DriveConfig | None = None,
    constrained=None,
    rank_tol: float = 1e-9,
) -> PulseSequence:
    """Equidistant pulse amplitudes closing the constrained modes with ``g12 = -i pi/8``.

    Parameters
    ----------
    modes : CrystalModes
    detuning : float
        Effective detuning (rad/s).
    t_g : float
        Gate time (s).
    n_pulses : int
    drive : DriveConfig, optional
        Sideband and per-ion Rabi pattern; defaults to a secular drive with
        equal Rabi frequencies.
    constrained : sequence of int, optional
        Modes to close.  Defaults to all modes when ``n_pulses >= 2 N + 1``
        and otherwise to the centre-of-mass mode.
    rank_tol : float
        Relative singular-value threshold defining the nullspace.

    Returns
    -------
    PulseSequence
        All ions share each pulse amplitude.  Among nullspace vectors the
        one of least mean-square Rabi frequency is chosen and the first
        pulse is made positive.

    Raises
    ------
    InfeasibleError
        If the nullspace is empty or every nullspace vector produces a
        phase of the wrong sign.
    """
    if drive is None:
        drive = DriveConfig(modes.axis, np.ones(modes.n_ions), detuning)
    constrained = _default_constrained(modes, n_pulses) if constrained is None else tuple(constrained)
    if n_pulses < 2 * len(constrained) + 1:
        raise InfeasibleError(f"{n_pulses} pulses cannot close {len(constrained)} modes")
    system = closure_matrix(modes, detuning, t_g, n_pulses, constrained)
    _, sv, vt = np.linalg.svd(system)
    rank = int(np.sum(sv > rank_tol * sv[0]))
    basis = vt[rank:].T
    if basis.shape[1] == 0:
        raise InfeasibleError("closure system has no nontrivial solution")
    force = unit_force(replace(drive, detuning=detuning), modes)
    width = t_g / n_pulses
    starts = width * np.arange(n_pulses)
    phase = np.zeros((n_pulses, n_pulses))
    for m in range(modes.n_modes):
        pair, _ = _pair_matrix(modes.mode_freqs[m], detuning, starts, [width] * n_pulses)
        c = force.couplings[0, m] * force.couplings[1, m]
        phase += c * 0.5 * (pair + pair.T)
    reduced = basis.T @ phase @ basis
    values, vectors = np.linalg.eigh(0.5 * (reduced + reduced.T))
    if values[0] >= 0:
        raise InfeasibleError("every closing pulse train gives a phase of the wrong sign")
    amplitudes = basis @ vectors[:, 0] * np.sqrt(TARGET_G12.imag / values[0])
    pivot = amplitudes[np.argmax(np.abs(amplitudes) > 1e-9 * np.max(np.abs(amplitudes)))]
    if pivot < 0:
        amplitudes = -amplitudes
    per_ion = amplitudes[:, None] * drive.rabi[None, :] / np.where(drive.rabi == 0, 1.0, drive.rabi)
    return PulseSequence.equidistant(per_ion, detuning, t_g)


def pulse_train_gate(
    modes: CrystalModes,
    drive: DriveConfig,
    t_g: float,
    n_pulses: int,
    constrained=None,
) -> GateSolution:
    """Solve a pulse train and evaluate its displacements and phase."""
    constrained = _default_constrained(modes, n_pulses) if constrained is None else tuple(constrained)
    seq = solve_pulse_train(modes, drive.detuning, t_g, n_pulses, drive, constrained)
    force = unit_force(drive, modes)
    gamma, g12 = multipulse_coefficients(seq, force)
    rms = np.sqrt(np.mean(seq.amplitudes**2, axis=0))
    return GateSolution(
        gamma=gamma,
        g12=g12,
        j_coupling=float((2j * g12 / t_g).real),
        gate_time=t_g,
        detuning=drive.detuning,
        rabi=rms,
        loops=(None, None),
        closure_residual=float(np.max(np.abs(gamma[:, list(constrained)]))),
        drive=drive.with_rabi(rms),
        sequence=seq,
        constrained=constrained,
    )


def micromotion_transform(d: DriveConfig, secular_freq: float | None = None) -> DriveConfig:
    """Map a secular drive onto the first micromotion sideband at equal force.

    The detuning is kept as the detuning from the micromotion sideband and
    the Rabi frequency is raised so that the force strength is unchanged,
    which is ``4/q`` for a compensated trap.

    Raises
    ------
    RegimeViolation
        If the residual modulation index violates
        ``beta_tilde << q omega / (4 rf_freq)``.
    """
    if d.sideband_index != 0:
        raise ValueError("expected a secular drive")
    if not (d.q > 0 and np.isfinite(d.rf_freq)):
        raise ValueError("micromotion transform needs q > 0 and a finite rf_freq")
    omega = abs(d.detuning) if secular_freq is None else secular_freq
    bound = d.q * omega / (4.0 * d.rf_freq)
    ratio = float(np.max(d.beta_tilde)) / bound
    if classify(ratio) == "fail":
        raise RegimeViolation("beta_bound", ratio, f"excess micromotion too large: beta_tilde / bound = {ratio:.3g}")
    j0 = sideband_weights(d.beta_tilde, 0)
    j1 = sideband_weights(d.beta_tilde, 1)
    secular_weight = np.hypot(j0, d.q / 4.0 * j1)
    micro_weight = np.hypot(j1, d.q / 4.0 * j0)
    return replace(d, sideband_index=1, rabi=d.rabi * secular_weight / micro_weight)


def carrier_ratio(detuning, q, rf_freq):
    """Micromotion over secular carrier error at equal force, ``(4 delta / (q rf))^2``."""
    return (4.0 * detuning / (q * rf_freq)) ** 2


def gate_time_ratio(detuning, q, rf_freq):
    """Micromotion over secular gate time at equal fidelity, ``4 delta / (q rf)``."""
    return 4.0 * detuning / (q * rf_freq)


def ideal_bell_state(phases=(0.0, 0.0)):
    """Target state ``(|dd> + i exp(i(phi1 + phi2)) |uu>) / sqrt(2)``.

    Basis order is (dd, du, ud, uu).
    """
    total = float(np.sum(phases))
    return np.array([1.0, 0.0, 0.0, 1j * np.exp(1j * total)]) / np.sqrt(2.0)
