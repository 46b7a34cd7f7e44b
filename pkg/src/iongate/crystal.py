"""Linear Coulomb crystals: equilibrium positions and normal modes.

Lengths are in metres and frequencies are angular (rad/s).  The Coulomb
coupling matrix is stored per unit mass, so its eigenvalues add directly
to the squared trap frequency.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import constants

__all__ = [
    "IonSpecies",
    "CA40",
    "CA40_729_WAVEVECTOR",
    "CrystalModes",
    "CrystalInstabilityError",
    "ConvergenceError",
    "coulomb_constant",
    "equilibrium_positions",
    "coupling_matrix",
    "normal_modes",
    "lamb_dicke",
    "wavevector_from_lamb_dicke",
]

AXES = ("x", "y", "z")


@dataclass(frozen=True)
class IonSpecies:
    """Mass (kg), charge (C) and a descriptive label."""

    mass: float
    charge: float
    label: str = ""

    def __post_init__(self):
        if not (self.mass > 0 and self.charge > 0):
            raise ValueError("mass and charge must be positive")


CA40 = IonSpecies(39.962590863 * constants.atomic_mass, constants.e, "40Ca+")

# Wavevector of the 729 nm quadrupole transition in calcium.
CA40_729_WAVEVECTOR = 2.0 * np.pi / 729e-9


class CrystalInstabilityError(ValueError):
    """The linear chain is not a stable configuration."""


class ConvergenceError(RuntimeError):
    """Newton iteration for the equilibrium did not converge."""


@dataclass(frozen=True)
class CrystalModes:
    """Normal modes of a linear chain along one axis.

    Attributes
    ----------
    n_ions : int
    axis : str
        One of ``"x"``, ``"y"``, ``"z"``.
    eq_positions : ndarray
        Equilibrium positions along the chain (m).
    mode_matrix : ndarray
        ``mode_matrix[i, m]`` is the participation of ion ``i`` in mode ``m``.
        Column 0 is the centre-of-mass mode.
    mode_freqs : ndarray
        Mode angular frequencies (rad/s), centre-of-mass first.
    lamb_dicke : ndarray
        Per-mode Lamb-Dicke parameters, or ``None`` when no wavevector was
        supplied.
    species : IonSpecies
    wavevector : float or None
        Laser wavevector projection on the axis (1/m).
    """

    n_ions: int
    axis: str
    eq_positions: np.ndarray
    mode_matrix: np.ndarray
    mode_freqs: np.ndarray
    lamb_dicke: np.ndarray | None
    species: IonSpecies = CA40
    wavevector: float | None = None

    @property
    def n_modes(self) -> int:
        return self.mode_freqs.size

    def zero_point(self, m):
        """Ground-state extent ``sqrt(hbar / (2 M omega_m))`` of mode ``m`` (m)."""
        return np.sqrt(constants.hbar / (2.0 * self.species.mass * self.mode_freqs[m]))


def coulomb_constant(species: IonSpecies) -> float:
    """``Q^2 / (4 pi eps0)`` in J m."""
    return species.charge**2 / (4.0 * np.pi * constants.epsilon_0)


def _length_scale(species, omega_z):
    return (coulomb_constant(species) / (species.mass * omega_z**2)) ** (1.0 / 3.0)


def _force_residual(u):
    """Dimensionless force balance ``u_i - sum_j sign(u_i-u_j)/(u_i-u_j)^2``."""
    d = u[:, None] - u[None, :]
    np.fill_diagonal(d, np.inf)
    return u - np.sum(np.sign(d) / d**2, axis=1)


def _force_jacobian(u):
    d = u[:, None] - u[None, :]
    np.fill_diagonal(d, np.inf)
    off = -2.0 / np.abs(d) ** 3
    jac = off.copy()
    np.fill_diagonal(jac, 1.0 - np.sum(off, axis=1))
    return jac


def equilibrium_positions(species: IonSpecies, omega_z: float, n_ions: int, tol=1e-13, max_iter=100):
    """Equilibrium positions of ``n_ions`` ions in a harmonic axial well.

    Solves the force balance by Newton iteration in units of
    ``(Q^2 / (4 pi eps0 M omega_z^2))^(1/3)``, seeded with uniform spacing
    set by the two-ion solution.

    Returns
    -------
    ndarray
        Sorted positions in metres, symmetric about zero.

    Raises
    ------
    ConvergenceError
        When the residual does not drop below ``tol``.
    """
    if not omega_z > 0:
        raise ValueError("omega_z must be positive")
    if int(n_ions) != n_ions or n_ions < 1:
        raise ValueError("n_ions must be a positive integer")
    scale = _length_scale(species, omega_z)
    if n_ions == 1:
        return np.zeros(1)
    half_gap = 0.25 ** (1.0 / 3.0)
    u = half_gap * np.linspace(-(n_ions - 1), n_ions - 1, n_ions)
    for _ in range(max_iter):
        res = _force_residual(u)
        if np.max(np.abs(res)) <= tol * np.max(np.abs(u)):
            break
        step = np.linalg.solve(_force_jacobian(u), res)
        # Damp steps that would reorder the ions.
        gaps = np.diff(u)
        shrink = np.diff(step)
        factor = 1.0
        while np.any(gaps - factor * shrink <= 0.0):
            factor *= 0.5
        u = u - factor * step
    else:
        raise ConvergenceError(
            f"equilibrium not found for N={n_ions}: residual {np.max(np.abs(res)):.3e}"
        )
    u = 0.5 * (u - u[::-1])
    return np.sort(u) * scale


def coupling_matrix(species: IonSpecies, positions, axis: str) -> np.ndarray:
    """Coulomb coupling matrix per unit mass (rad^2/s^2).

    Off-diagonal entries are ``f Q^2 / (4 pi eps0 M |z_i - z_j|^3)`` with
    ``f = 1`` for transverse axes and ``f = -2`` for the chain axis; the
    diagonal holds minus the row sum of the off-diagonal entries.
    """
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    factor = -2.0 if axis == "z" else 1.0
    z = np.asarray(positions, dtype=float)
    d = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(d, np.inf)
    off = factor * coulomb_constant(species) / (species.mass * d**3)
    return off - np.diag(np.sum(off, axis=1))


def _orient(vectors):
    # Deterministic sign: largest-magnitude leading component positive.
    for k in range(vectors.shape[1]):
        col = vectors[:, k]
        pivot = col[np.argmax(np.abs(col) > 1e-9 * np.max(np.abs(col)))]
        if pivot < 0:
            vectors[:, k] = -col
    return vectors


def normal_modes(
    species: IonSpecies,
    omega_axial: float,
    omega_radial: float,
    axis: str,
    n_ions: int,
    wavevector: float | None = None,
) -> CrystalModes:
    """Normal modes of a linear chain along ``axis``.

    Parameters
    ----------
    species : IonSpecies
    omega_axial, omega_radial : float
        Single-ion trap frequencies along and across the chain (rad/s).
    axis : {"x", "y", "z"}
        ``"z"`` is the chain axis.
    n_ions : int
    wavevector : float, optional
        Laser wavevector projection (1/m) used for the Lamb-Dicke parameters.

    Returns
    -------
    CrystalModes
        Mode 0 is the centre-of-mass mode: the highest transverse or the
        lowest axial frequency.

    Raises
    ------
    CrystalInstabilityError
        If a squared mode frequency is not positive.
    """
    positions = equilibrium_positions(species, omega_axial, n_ions)
    trap = omega_axial if axis == "z" else omega_radial
    coupling = coupling_matrix(species, positions, axis)
    shifts, vectors = np.linalg.eigh(coupling)
    squared = trap**2 + shifts
    # A vanishing frequency is the threshold itself; round-off must not hide it.
    if np.any(squared <= 1e-12 * trap**2):
        raise CrystalInstabilityError(
            f"linear chain unstable along {axis}: min omega^2 = {squared.min():.4g} rad^2/s^2"
        )
    # eigh sorts ascending; transverse branches are ordered from the top.
    order = np.arange(n_ions) if axis == "z" else np.arange(n_ions)[::-1]
    freqs = np.sqrt(squared[order])
    vectors = _orient(vectors[:, order].copy())
    eta = lamb_dicke(species, wavevector, freqs) if wavevector is not None else None
    return CrystalModes(n_ions, axis, positions, vectors, freqs, eta, species, wavevector)


def lamb_dicke(species: IonSpecies, k_L, mode_freq):
    """Lamb-Dicke parameter ``k_L sqrt(hbar / (2 M omega))``."""
    mode_freq = np.asarray(mode_freq, dtype=float)
    if np.any(mode_freq <= 0):
        raise ValueError("mode frequency must be positive")
    return k_L * np.sqrt(constants.hbar / (2.0 * species.mass * mode_freq))


def wavevector_from_lamb_dicke(species: IonSpecies, eta_ref: float, freq_ref: float) -> float:
    """Wavevector projection reproducing ``eta_ref`` at angular frequency ``freq_ref``."""
    return eta_ref / np.sqrt(constants.hbar / (2.0 * species.mass * freq_ref))
