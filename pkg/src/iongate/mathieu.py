"""Floquet analysis of the Mathieu equation.

The homogeneous equation ``r'' + (a - 2 q cos 2 tau) r = 0`` with
``tau = rf_freq * t / 2`` describes one trap axis.  This module provides the
characteristic exponent, the leading-order Floquet coefficients, the
micromotion-dressed mode function and the classical decomposition of a
trajectory into secular, intrinsic and excess parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np
import scipy.linalg

__all__ = [
    "MathieuDomainError",
    "MathieuParams",
    "FloquetSolution",
    "ExcessDrive",
    "characteristic_exponent",
    "floquet_coefficients",
    "floquet_solution",
    "dressed_solution",
    "micromotion_envelope",
    "mode_function",
    "classical_trajectory",
]

DEFAULT_L_MAX = 3

# Number of Fourier harmonics kept on each side when solving the
# recursion exactly.  Coefficients fall off like q^n / (4^n n!^2), so ten
# harmonics are far below double precision for q < 1.
_RECURSION_HARMONICS = 10


class MathieuDomainError(ValueError):
    """Raised when the parameters do not describe stable confinement."""


@dataclass(frozen=True)
class MathieuParams:
    """Dimensionless Mathieu parameters of one trap axis.

    Parameters
    ----------
    a, q : float
        Static and oscillating confinement strengths.  Must satisfy
        ``|a| < 1`` and ``q**2 < 1``.
    rf_freq : float
        Drive angular frequency in rad/s.
    l_max : int
        Truncation order of the Floquet series, at least 1.
    """

    a: float
    q: float
    rf_freq: float
    l_max: int = DEFAULT_L_MAX

    def __post_init__(self):
        if not (abs(self.a) < 1.0 and self.q**2 < 1.0):
            raise ValueError(f"need |a| < 1 and q^2 < 1, got a={self.a}, q={self.q}")
        if int(self.l_max) != self.l_max or self.l_max < 1:
            raise ValueError(f"l_max must be a positive integer, got {self.l_max}")
        if not self.rf_freq > 0:
            raise ValueError(f"rf_freq must be positive, got {self.rf_freq}")


@dataclass(frozen=True)
class FloquetSolution:
    """Leading-order Floquet solution of one axis.

    Attributes
    ----------
    beta : float
        Characteristic exponent in (0, 1).
    secular_freq : float
        Secular angular frequency ``rf_freq * beta / 2`` (rad/s).
    coeffs : dict
        ``{l: C_{2l}/C_0}`` for ``l = 1..l_max``; the negative harmonics are
        taken equal to the positive ones.
    xi : float
        Envelope normalization ``1 + sum(2 C_{2l})``.
    q, rf_freq : float
        Drive parameters the solution was built from.
    """

    beta: float
    secular_freq: float
    coeffs: dict = field(compare=True)
    xi: float
    q: float
    rf_freq: float

    @property
    def l_max(self) -> int:
        return len(self.coeffs)


@dataclass(frozen=True)
class ExcessDrive:
    """Classical drive responsible for excess micromotion.

    Use :meth:`from_fields` to derive the displacement amplitudes from the
    stray-field description.
    """

    e_dc: float
    phi_ac: float
    r0: float
    alpha_tilde: float
    driv_amp_dc: float
    driv_amp_ac: float

    @classmethod
    def from_fields(cls, e_dc, phi_ac, r0, alpha_tilde, charge, mass, secular_freq, q):
        """Build the drive from a static field and an a.c. phase mismatch.

        Parameters
        ----------
        e_dc : float
            Static stray field along the axis (V/m).
        phi_ac : float
            Phase difference between the r.f. electrodes (rad).
        r0 : float
            Ion-electrode distance (m).
        alpha_tilde : float
            Geometric factor of the phase-mismatch field.
        charge, mass : float
            Ion charge (C) and mass (kg).
        secular_freq : float
            Secular angular frequency of the axis (rad/s).
        q : float
            Mathieu ``q`` of the axis.
        """
        amp_dc = charge * e_dc / (mass * secular_freq**2)
        amp_ac = q * r0 * phi_ac * alpha_tilde / 4.0
        return cls(e_dc, phi_ac, r0, alpha_tilde, amp_dc, amp_ac)

    @classmethod
    def none(cls):
        """A perfectly compensated trap."""
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    def displacement(self, t, rf_freq):
        """Slowly varying driven displacement ``r_driv(t)`` in metres."""
        t = np.asarray(t, dtype=float)
        if self.driv_amp_ac == 0.0:
            return np.full_like(t, self.driv_amp_dc)
        return self.driv_amp_dc + self.driv_amp_ac * np.sin(rf_freq * t)


def _exact_beta(a, q):
    """Solve the three-term Floquet recursion as a quadratic eigenproblem.

    The recursion ``q (c_{n+1} + c_{n-1}) = (a - (beta + 2n)^2) c_n`` is
    quadratic in ``beta``.  It is linearized into a companion matrix and
    the eigenvalue whose eigenvector peaks at ``n = 0`` is returned.
    """
    n = np.arange(-_RECURSION_HARMONICS, _RECURSION_HARMONICS + 1)
    size = n.size
    stiffness = np.diag(4.0 * n**2 - a) + q * (np.eye(size, k=1) + np.eye(size, k=-1))
    damping = np.diag(4.0 * n)
    companion = np.block([[np.zeros((size, size)), np.eye(size)], [-stiffness, -damping]])
    values, vectors = scipy.linalg.eig(companion)
    weights = np.abs(vectors[:size])
    weights /= np.linalg.norm(weights, axis=0)
    center = int(np.argmax(weights[_RECURSION_HARMONICS]))
    beta = values[center]
    if abs(beta.imag) > 1e-9:
        raise MathieuDomainError(f"unstable parameters a={a}, q={q}: complex exponent {beta}")
    return abs(beta.real)


def characteristic_exponent(p: MathieuParams, order: str = "exact") -> float:
    """Characteristic exponent ``beta`` of the Mathieu equation.

    Parameters
    ----------
    p : MathieuParams
    order : {"exact", "leading"}
        ``"leading"`` returns the closed form ``sqrt(a + q^2/2)``.
        ``"exact"`` solves the full Floquet recursion, which the closed form
        approximates to ``O(q^4)``.

    Raises
    ------
    MathieuDomainError
        If ``a + q^2/2 <= 0`` or the exponent is not real.
    """
    lowest = p.a + p.q**2 / 2.0
    if lowest <= 0.0:
        raise MathieuDomainError(f"a + q^2/2 = {lowest:g} <= 0: no confinement")
    if order == "leading":
        return float(np.sqrt(lowest))
    if order != "exact":
        raise ValueError(f"unknown order {order!r}")
    beta = _exact_beta(p.a, p.q)
    if not 0.0 < beta < 1.0:
        raise MathieuDomainError(f"exponent {beta} outside the first stability region")
    return float(beta)


def floquet_coefficients(q: float, l_max: int = DEFAULT_L_MAX) -> dict:
    """Closed-form Floquet coefficients ``C_{2l}/C_0`` for ``l = 1..l_max``."""
    return {
        l: (-1) ** l * q**l / (4**l * factorial(l - 1) ** 2) for l in range(1, l_max + 1)
    }


def _xi(coeffs):
    return 1.0 + 2.0 * sum(coeffs.values())


def floquet_solution(p: MathieuParams, order: str = "exact") -> FloquetSolution:
    """Floquet solution of one axis.  See :func:`characteristic_exponent`."""
    beta = characteristic_exponent(p, order=order)
    coeffs = floquet_coefficients(p.q, p.l_max)
    return FloquetSolution(
        beta=beta,
        secular_freq=0.5 * p.rf_freq * beta,
        coeffs=coeffs,
        xi=_xi(coeffs),
        q=p.q,
        rf_freq=p.rf_freq,
    )


def dressed_solution(mode_freq, q=0.0, rf_freq=None, l_max=DEFAULT_L_MAX) -> FloquetSolution:
    """Floquet solution for a normal mode of known secular frequency.

    Normal modes of a static chain share the axis Floquet coefficients but
    oscillate at their own frequency.  With ``q = 0`` the drive frequency is
    irrelevant and may be omitted.
    """
    if q != 0.0 and not rf_freq:
        raise ValueError("rf_freq is required when q != 0")
    rf = float(rf_freq) if rf_freq else np.inf
    coeffs = floquet_coefficients(q, l_max)
    beta = 2.0 * mode_freq / rf if np.isfinite(rf) else 0.0
    return FloquetSolution(beta, float(mode_freq), coeffs, _xi(coeffs), q, rf)


def micromotion_envelope(s: FloquetSolution, t):
    """Periodic envelope ``1 + sum 2 C_{2l} cos(l rf_freq t)``."""
    t = np.asarray(t, dtype=float)
    env = np.ones_like(t)
    if not np.isfinite(s.rf_freq):
        return env
    for l, c in s.coeffs.items():
        env = env + 2.0 * c * np.cos(l * s.rf_freq * t)
    return env


def mode_function(s: FloquetSolution, t):
    """Complex mode function ``u(t)`` normalized to ``u(0) = 1``.

    Accepts scalar or array ``t``.
    """
    t = np.asarray(t, dtype=float)
    u = np.exp(1j * s.secular_freq * t) * micromotion_envelope(s, t) / s.xi
    return u if u.ndim else complex(u)


def classical_trajectory(s: FloquetSolution, x: ExcessDrive, r0_init, t):
    """Split a classical trajectory into secular, intrinsic and excess parts.

    Parameters
    ----------
    s : FloquetSolution
    x : ExcessDrive
    r0_init : float
        Initial secular amplitude (m).
    t : float or ndarray
        Times (s).

    Returns
    -------
    secular, intrinsic, excess : ndarray
        Displacements in metres.  Only the slowly varying part of the driven
        response is retained in ``excess``.
    """
    t = np.asarray(t, dtype=float)
    envelope = micromotion_envelope(s, t)
    secular = (r0_init / s.xi) * np.cos(s.secular_freq * t)
    intrinsic = secular * (envelope - 1.0)
    excess = x.displacement(t, s.rf_freq) * envelope
    return secular, intrinsic, excess
