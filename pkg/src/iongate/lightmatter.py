"""Bichromatic laser-ion coupling in the resolved-sideband regime.

Two force models are provided.  The secular model drives the motional
sidebands of the carrier (sideband index 0) and the micromotion model
drives them around the first micromotion sideband (sideband index 1).
Each model returns per-ion, per-mode force strengths, the spin operator the
force couples to, and the residual off-resonant carrier terms.

All frequencies are angular (rad/s).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import factorial

import numpy as np

from .crystal import CrystalModes

__all__ = [
    "DriveConfig",
    "Carrier",
    "ForceModel",
    "RegimeReport",
    "RegimeViolation",
    "PASS_RATIO",
    "WARN_RATIO",
    "classify",
    "debye_waller",
    "beta_tilde",
    "sideband_weights",
    "spin_matrix",
    "secular_force_model",
    "micromotion_force_model",
    "force_model",
    "regime_check",
]

# A "much smaller than" ratio passes up to PASS_RATIO and fails above WARN_RATIO.
PASS_RATIO = 0.1
WARN_RATIO = 0.3

_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
_SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)


class RegimeViolation(ValueError):
    """A regime condition required by a force model fails.

    Attributes
    ----------
    margin : str
        Name of the failed condition.
    ratio : float
        Value of the ratio that should be small.
    """

    def __init__(self, margin, ratio, message=""):
        self.margin = margin
        self.ratio = ratio
        super().__init__(message or f"regime condition {margin} violated: ratio {ratio:.4g}")


@dataclass(frozen=True)
class DriveConfig:
    """Bichromatic drive acting on a crystal.

    Attributes
    ----------
    axis : str
    rabi : ndarray
        Per-ion Rabi frequencies (rad/s), already dressed by the Debye-Waller
        factor; use :meth:`from_bare` to apply it.
    detuning : float
        Bichromatic detuning from the driven sideband (rad/s).  For sideband
        index 1 this is the detuning from the first micromotion sideband.
    sideband_index : int
        0 for secular gates, 1 for micromotion gates.
    phase : ndarray
        Per-ion laser phases (rad).
    beta_tilde : ndarray
        Per-ion excess-micromotion modulation indices (magnitudes).
    q : float
        Mathieu ``q`` of the axis.
    rf_freq : float
        Trap drive frequency (rad/s); ``inf`` means no drive.
    """

    axis: str
    rabi: np.ndarray
    detuning: float
    sideband_index: int = 0
    phase: np.ndarray = field(default=None)
    beta_tilde: np.ndarray = field(default=None)
    q: float = 0.0
    rf_freq: float = np.inf

    def __post_init__(self):
        if self.sideband_index not in (0, 1):
            raise ValueError(f"sideband_index must be 0 or 1, got {self.sideband_index}")
        rabi = np.atleast_1d(np.asarray(self.rabi, dtype=float))
        n = rabi.size
        phase = np.zeros(n) if self.phase is None else np.broadcast_to(self.phase, (n,))
        beta = np.zeros(n) if self.beta_tilde is None else np.broadcast_to(self.beta_tilde, (n,))
        object.__setattr__(self, "rabi", rabi)
        object.__setattr__(self, "phase", np.asarray(phase, dtype=float).copy())
        object.__setattr__(self, "beta_tilde", np.abs(np.asarray(beta, dtype=float)))
        if self.sideband_index == 1 and not (np.isfinite(self.rf_freq) and self.q > 0):
            raise ValueError("micromotion drive needs q > 0 and a finite rf_freq")

    @classmethod
    def from_bare(cls, modes: CrystalModes, bare_rabi, detuning, **kwargs):
        """Build a drive from bare Rabi frequencies, applying the Debye-Waller factor."""
        bare = np.broadcast_to(np.asarray(bare_rabi, dtype=float), (modes.n_ions,))
        dressed = bare * np.array([debye_waller(modes, i) for i in range(modes.n_ions)])
        return cls(modes.axis, dressed, detuning, **kwargs)

    @property
    def n_ions(self) -> int:
        return self.rabi.size

    def with_rabi(self, rabi):
        return replace(self, rabi=np.broadcast_to(np.asarray(rabi, dtype=float), self.rabi.shape))

    @property
    def laser_detuning(self) -> float:
        """Detuning of the bichromatic tones from the carrier (rad/s)."""
        if self.sideband_index == 0:
            return self.detuning
        return self.rf_freq + self.detuning


@dataclass(frozen=True)
class Carrier:
    """Residual carrier term ``amplitude * sigma cos(frequency t)`` per ion."""

    amplitude: np.ndarray
    frequency: float
    quadrature: str


@dataclass(frozen=True)
class ForceModel:
    """State-dependent force of a bichromatic drive.

    Attributes
    ----------
    strengths : ndarray
        ``strengths[i, m]``: force on ion ``i`` projected on mode ``m`` in
        units of force over hbar (1/(m s)).
    couplings : ndarray
        ``strengths * zero_point``: the coupling rate of ion ``i`` to mode
        ``m`` (rad/s).
    spin_mixing : ndarray
        Per-ion ``(c_y, c_x)`` with ``c_y^2 + c_x^2 = 1``.
    effective_detuning : float
        Detuning that enters the gate dynamics (rad/s).
    mode_freqs : ndarray
        Mode frequencies the force couples to (rad/s).
    carriers : tuple of Carrier
    sideband_index : int
    """

    strengths: np.ndarray
    couplings: np.ndarray
    spin_mixing: np.ndarray
    effective_detuning: float
    mode_freqs: np.ndarray
    carriers: tuple
    sideband_index: int

    def spin_operator(self, ion, phase=0.0):
        """2x2 spin operator of ``ion`` (basis ordered down, up)."""
        c_y, c_x = self.spin_mixing[ion]
        return spin_matrix(c_y, c_x, phase)

    def scaled(self, factor):
        """Same model with every Rabi frequency multiplied by ``factor``."""
        return replace(
            self,
            strengths=self.strengths * factor,
            couplings=self.couplings * factor,
            carriers=tuple(replace(c, amplitude=c.amplitude * factor) for c in self.carriers),
        )


def classify(ratio):
    """``"pass"``, ``"warn"`` or ``"fail"`` for a small-ratio condition."""
    if ratio <= PASS_RATIO:
        return "pass"
    if ratio <= WARN_RATIO:
        return "warn"
    return "fail"


@dataclass(frozen=True)
class RegimeReport:
    """Ratios that must be small for the force models to hold.

    Boolean fields are true when the ratio passes.  ``status`` maps each
    condition to ``"pass"``, ``"warn"`` or ``"fail"``.
    """

    resolved_micromotion: bool
    micromotion_margin: float
    carrier_margin: tuple
    compensation_ok: bool
    compensation_margin: float
    beta_bound_ok: bool
    beta_bound_margin: float
    status: dict


def debye_waller(modes: CrystalModes, ion: int) -> float:
    """Rabi-frequency reduction ``exp(-sum_m (M_im eta_m)^2 / 2)``."""
    if modes.lamb_dicke is None:
        return 1.0
    return float(np.exp(-0.5 * np.sum((modes.mode_matrix[ion] * modes.lamb_dicke) ** 2)))


def beta_tilde(k_L, driv_amp_dc, q):
    """Signed modulation index ``-k_L r_driv(0) q / 2``."""
    return -k_L * driv_amp_dc * q / 2.0


def sideband_weights(beta, l, terms=30):
    """Bessel function ``J_l(beta)`` from its power series.

    Intended for ``|beta| < 1`` where the series converges after a few terms.
    Negative orders use ``J_{-l} = (-1)^l J_l``.
    """
    l = int(l)
    if l < 0:
        return (-1) ** l * sideband_weights(beta, -l, terms)
    beta = np.asarray(beta, dtype=float)
    half = beta / 2.0
    total = np.zeros_like(beta)
    for k in range(terms):
        term = (-1) ** k * half ** (2 * k + l) / (factorial(k) * factorial(k + l))
        total = total + term
    return total if total.ndim else float(total)


def spin_matrix(c_y, c_x, phase=0.0):
    """``c_y sigma_y + c_x sigma_x`` in the basis rotated by ``phase``.

    The basis is ordered (down, up) so that raising takes index 0 to 1.
    """
    rotation = np.array([[1, 0], [0, np.exp(1j * phase)]])
    sy = rotation @ _SIGMA_Y @ rotation.conj().T
    sx = rotation @ _SIGMA_X @ rotation.conj().T
    return c_y * sy + c_x * sx


def _force_parts(d: DriveConfig, modes: CrystalModes, weight, c_y, c_x):
    if modes.wavevector is None:
        raise ValueError("modes need a wavevector to build a force model")
    if d.n_ions != modes.n_ions:
        raise ValueError(f"drive has {d.n_ions} ions, crystal has {modes.n_ions}")
    norm = np.hypot(c_y, c_x)
    mixing = np.column_stack([c_y / norm, c_x / norm])
    prefactor = d.rabi * modes.wavevector / (1.0 - d.q / 2.0) * weight
    strengths = prefactor[:, None] * modes.mode_matrix
    zero_point = modes.zero_point(np.arange(modes.n_modes))
    return strengths, strengths * zero_point[None, :], mixing


def _require(report: RegimeReport, name, ratio):
    if report.status[name] == "fail":
        raise RegimeViolation(name, ratio)


def secular_force_model(d: DriveConfig, modes: CrystalModes) -> ForceModel:
    """Force model for a drive on the secular sidebands.

    Raises
    ------
    RegimeViolation
        If the micromotion sidebands are not resolved.
    """
    if d.sideband_index != 0:
        raise ValueError("secular force model needs sideband_index 0")
    report = regime_check(d, modes)
    _require(report, "resolved_micromotion", report.micromotion_margin)
    j0 = sideband_weights(d.beta_tilde, 0)
    j1 = sideband_weights(d.beta_tilde, 1)
    c_y, c_x = j0, d.q / 4.0 * j1
    weight = np.hypot(c_y, c_x)
    strengths, couplings, mixing = _force_parts(d, modes, weight, c_y, c_x)
    carriers = (Carrier(d.rabi * j0, d.detuning, "x"),)
    return ForceModel(strengths, couplings, mixing, d.detuning, modes.mode_freqs.copy(), carriers, 0)


def micromotion_force_model(d: DriveConfig, modes: CrystalModes) -> ForceModel:
    """Force model for a drive on the first micromotion sideband.

    Raises
    ------
    RegimeViolation
        If ``beta_tilde >= q/4`` or the micromotion sidebands are not resolved.
    """
    if d.sideband_index != 1:
        raise ValueError("micromotion force model needs sideband_index 1")
    report = regime_check(d, modes)
    if report.compensation_margin >= 1.0:
        raise RegimeViolation("compensation", report.compensation_margin)
    _require(report, "resolved_micromotion", report.micromotion_margin)
    j0 = sideband_weights(d.beta_tilde, 0)
    j1 = sideband_weights(d.beta_tilde, 1)
    c_y, c_x = d.q / 4.0 * j0, -j1
    weight = np.hypot(c_y, c_x)
    strengths, couplings, mixing = _force_parts(d, modes, weight, c_y, c_x)
    carriers = (
        Carrier(d.rabi * j0, d.rf_freq, "x"),
        Carrier(d.rabi * j1, d.detuning, "y"),
    )
    return ForceModel(strengths, couplings, mixing, d.detuning, modes.mode_freqs.copy(), carriers, 1)


def force_model(d: DriveConfig, modes: CrystalModes) -> ForceModel:
    """Dispatch to the secular or micromotion model by sideband index."""
    if d.sideband_index == 0:
        return secular_force_model(d, modes)
    return micromotion_force_model(d, modes)


def regime_check(d: DriveConfig, modes: CrystalModes) -> RegimeReport:
    """Evaluate every small-ratio condition for ``d``.

    Ratios are taken for the worst ion.  ``carrier_margin`` is a one-tuple
    for secular drives and the pair (r.f. resolution, near-resonant carrier)
    for micromotion drives.
    """
    rabi = float(np.max(np.abs(d.rabi)))
    beta = float(np.max(d.beta_tilde))
    rf = d.rf_freq
    micro = rabi / rf if np.isfinite(rf) else 0.0
    detuning = abs(d.detuning)
    if d.sideband_index == 0:
        carrier = (rabi * abs(sideband_weights(beta, 0)) / detuning,)
    else:
        carrier = (micro, rabi * beta / detuning)
    comp = beta / (d.q / 4.0) if d.q > 0 else (0.0 if beta == 0 else np.inf)
    secular = float(np.min(modes.mode_freqs))
    if d.q > 0 and np.isfinite(rf):
        bound = beta / (d.q * secular / (4.0 * rf))
    else:
        bound = 0.0 if beta == 0 else np.inf
    status = {
        "resolved_micromotion": classify(micro),
        "carrier": classify(max(carrier)),
        "compensation": classify(comp),
        "beta_bound": classify(bound),
    }
    return RegimeReport(
        resolved_micromotion=status["resolved_micromotion"] == "pass",
        micromotion_margin=micro,
        carrier_margin=carrier,
        compensation_ok=status["compensation"] == "pass",
        compensation_margin=comp,
        beta_bound_ok=status["beta_bound"] == "pass",
        beta_bound_margin=bound,
        status=status,
    )
