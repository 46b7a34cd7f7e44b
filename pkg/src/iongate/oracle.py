"""Brute-force integration of the laser-ion interaction.

The interaction-picture Hamiltonian is assembled from the raw drive (Rabi
frequencies, phases, laser detuning, excess-micromotion modulation) and the
micromotion-dressed mode functions, without the rotating-wave or
state-dependent-force simplifications used by the gate designs.  It is then
integrated in a truncated Fock space of two qubits and one or two modes.
The result is an independent check of the Magnus predictions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .crystal import CrystalModes
from .lightmatter import DriveConfig, RegimeViolation, force_model, spin_matrix
from .magnus import GateSolution, PulseSequence, ideal_bell_state
from .mathieu import dressed_solution, mode_function

__all__ = [
    "HilbertSpec",
    "SimResult",
    "CutoffError",
    "IntegrationError",
    "TruncationError",
    "Hamiltonian",
    "build_hamiltonian",
    "evolve",
    "evolve_gate",
    "thermal_weights",
    "thermal_average",
    "bell_fidelity",
]

LEAKAGE_TOL = 1e-6
NORM_TOL = 1e-8

_SIGMA_PLUS = sp.csr_matrix(np.array([[0.0, 0.0], [1.0, 0.0]]))


class CutoffError(RuntimeError):
    """Population reached the highest retained Fock level."""


class IntegrationError(RuntimeError):
    """The adaptive integrator failed or lost normalization."""


class TruncationError(ValueError):
    """The thermal distribution cannot be represented within the cutoff."""


@dataclass(frozen=True)
class HilbertSpec:
    """Truncated Hilbert space of two qubits and ``n_modes`` oscillators.

    Attributes
    ----------
    n_modes : int
        1 or 2; the lowest-index modes of the crystal are kept.
    fock_cutoff : int
        Number of Fock levels per mode, at least 4.
    initial : {"ground", "thermal"}
    nbar : float
        Mean phonon number per mode for thermal runs.
    truncation_weight : float
        Thermal population that must be retained, at least 0.999.
    """

    n_modes: int = 2
    fock_cutoff: int = 12
    initial: str = "ground"
    nbar: float = 0.0
    truncation_weight: float = 0.999

    def __post_init__(self):
        if self.n_modes not in (1, 2):
            raise ValueError(f"n_modes must be 1 or 2, got {self.n_modes}")
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 4:
            raise ValueError(f"fock_cutoff must be an integer >= 4, got {self.fock_cutoff}")
        if self.initial not in ("ground", "thermal"):
            raise ValueError(f"initial must be 'ground' or 'thermal', got {self.initial!r}")
        if self.nbar < 0:
            raise ValueError("nbar must be non-negative")
        if not 0.999 <= self.truncation_weight <= 1.0:
            raise ValueError("truncation_weight must lie in [0.999, 1]")

    @property
    def dim(self) -> int:
        return 4 * self.fock_cutoff**self.n_modes


@dataclass(frozen=True)
class SimResult:
    """Outcome of an oracle run.

    Attributes
    ----------
    state : ndarray
        Final state vector for pure runs; the 4x4 reduced spin density
        matrix for thermal averages.
    spin_density : ndarray
        Reduced two-qubit density matrix, basis (down, up) per ion.
    bell_fidelity : float
    norm_drift : float
        Largest ``| |psi|^2 - 1 |`` at the end of the run(s).
    gamma_measured : ndarray
        ``(n_ions, n_modes)`` displacements inferred from the conditional
        mode amplitudes.
    leakage : float
        Largest population seen in the top Fock level.
    retained_weight : float
        Thermal population represented by the run(s); 1 for pure runs.
    """

    state: np.ndarray
    spin_density: np.ndarray
    bell_fidelity: float
    norm_drift: float
    gamma_measured: np.ndarray
    leakage: float
    retained_weight: float = 1.0


def _embed(ops, position, n_factors, dims):
    factors = [sp.identity(d, format="csr") for d in dims]
    factors[position] = ops
    out = factors[0]
    for f in factors[1:]:
        out = sp.kron(out, f, format="csr")
    return out


def _annihilation(cutoff):
    return sp.diags(np.sqrt(np.arange(1, cutoff)), 1, format="csr")


class Hamiltonian:
    """Time-dependent Hamiltonian ``H(t) = sum_k f_k(t) O_k``.

    The constant operators are stacked into one sparse matrix so that a
    single product gives every ``O_k psi``.  Call :meth:`matrix` for the
    operator at time ``t`` and :meth:`apply` for ``H(t) psi``.
    """

    def __init__(self, drive, modes, spec, include_carrier=True, sequence=None):
        if drive.n_ions != 2 or modes.n_ions != 2:
            raise ValueError("the oracle simulates two ions")
        if modes.lamb_dicke is None:
            raise ValueError("modes need Lamb-Dicke parameters")
        if spec.n_modes > modes.n_modes:
            raise ValueError("more simulated modes than crystal modes")
        self.drive = drive
        self.modes = modes
        self.spec = spec
        self.include_carrier = include_carrier
        self.sequence = sequence
        n = spec.fock_cutoff
        dims = [2, 2] + [n] * spec.n_modes
        n_factors = len(dims)
        raising = [_embed(_SIGMA_PLUS, i, n_factors, dims) for i in range(2)]
        lowering = [r.T.tocsr() for r in raising]
        annihilate = [_embed(_annihilation(n), 2 + m, n_factors, dims) for m in range(spec.n_modes)]
        create = [a.T.tocsr() for a in annihilate]
        # Operator order: per ion, (sigma+, sigma-), then per mode
        # (a+ sigma+, a+ sigma-, a sigma+, a sigma-).
        ops = []
        for i in range(2):
            ops += [raising[i], lowering[i]]
            for m in range(spec.n_modes):
                ops += [
                    create[m] @ raising[i],
                    create[m] @ lowering[i],
                    annihilate[m] @ raising[i],
                    annihilate[m] @ lowering[i],
                ]
        self._ops = ops
        self._stack = sp.vstack(ops, format="csr")
        self.dim = spec.dim
        self._annihilate = annihilate
        self._top_projector = [
            _embed(sp.diags([0.0] * (n - 1) + [1.0], 0, format="csr"), 2 + m, n_factors, dims)
            for m in range(spec.n_modes)
        ]
        self.solutions = [
            dressed_solution(modes.mode_freqs[m], q=drive.q, rf_freq=drive.rf_freq)
            for m in range(spec.n_modes)
        ]
        self.weights = modes.mode_matrix[:, : spec.n_modes] * modes.lamb_dicke[None, : spec.n_modes]

    def rabi(self, t):
        if self.sequence is None:
            return self.drive.rabi
        return np.asarray(self.sequence.rabi_at(t), dtype=float)

    def phases(self, t):
        d = self.drive
        if np.isfinite(d.rf_freq):
            return d.phase + d.beta_tilde * np.cos(d.rf_freq * t)
        return d.phase

    def coefficients(self, t):
        """Scalar weights ``f_k(t)`` of the stacked operators."""
        amp = self.rabi(t) * np.cos(self.drive.laser_detuning * t)
        phase = np.exp(1j * self.phases(t))
        u = np.array([mode_function(s, t) for s in self.solutions])
        carrier = 1.0 if self.include_carrier else 0.0
        out = []
        for i in range(2):
            a, e = amp[i], phase[i]
            out += [carrier * a * e, carrier * a * np.conj(e)]
            for m in range(self.spec.n_modes):
                k = a * self.weights[i, m]
                out += [
                    1j * k * u[m] * e,
                    -1j * k * u[m] * np.conj(e),
                    1j * k * np.conj(u[m]) * e,
                    -1j * k * np.conj(u[m]) * np.conj(e),
                ]
        return np.asarray(out, dtype=complex)

    def matrix(self, t):
        """Sparse ``H(t)``."""
        coef = self.coefficients(t)
        total = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for c, op in zip(coef, self._ops):
            if c != 0:
                total = total + c * op
        return total

    def apply(self, t, psi):
        parts = (self._stack @ psi).reshape(len(self._ops), self.dim)
        return self.coefficients(t) @ parts

    def leakage(self, psi):
        return max(float(np.real(np.vdot(psi, p @ psi))) for p in self._top_projector)

    def mode_amplitude(self, psi, m):
        return np.vdot(psi, self._annihilate[m] @ psi)


def build_hamiltonian(
    drive: DriveConfig,
    modes: CrystalModes,
    spec: HilbertSpec,
    include_carrier: bool = True,
    sequence: PulseSequence | None = None,
) -> Hamiltonian:
    """Interaction-picture Hamiltonian of a bichromatic drive on two ions.

    Per ion ``i`` with ``A_i(t) = Omega_i(t) cos(delta_L t)`` and modulated
    phase ``phi_i(t) = phi_i + beta_i cos(rf_freq t)``::

        H = sum_i A_i [e^{i phi_i} s+_i + h.c.]
          + sum_{i,m} A_i M_im eta_m (u_m a_m^+ + u_m^* a_m)
                       (i e^{i phi_i} s+_i - i e^{-i phi_i} s-_i)

    where ``u_m`` is the dressed mode function and ``delta_L`` the detuning
    of the tones from the carrier.

    Parameters
    ----------
    drive : DriveConfig
        Rabi frequencies are ignored when ``sequence`` is given.
    modes : CrystalModes
    spec : HilbertSpec
    include_carrier : bool
        ``False`` drops the direct qubit drive, leaving the pure force.
    sequence : PulseSequence, optional
        Piecewise-constant Rabi frequencies.
    """
    return Hamiltonian(drive, modes, spec, include_carrier, sequence)


def bell_fidelity(spin_density, phases=(0.0, 0.0)) -> float:
    """Overlap of a two-qubit density matrix with the target Bell state."""
    target = ideal_bell_state(phases)
    return float(np.real(np.vdot(target, spin_density @ target)))


def _spin_density(psi, dim_modes):
    block = psi.reshape(4, dim_modes)
    return block @ block.conj().T


def _spin_operators(drive, modes):
    try:
        force = force_model(drive, modes)
        return [force.spin_operator(i, drive.phase[i]) for i in range(2)]
    except (RegimeViolation, ValueError):
        return [spin_matrix(1.0, 0.0, drive.phase[i]) for i in range(2)]


def _measure_gamma(ham, psi, spin_ops):
    """Displacements from mode amplitudes conditioned on spin eigenstates.

    For a pure force the branch with spin eigenvalues ``(s1, s2)`` carries
    ``<a_m> = -(s1 gamma_1m^* + s2 gamma_2m^*)``; the two unknowns are
    fitted over the four branches.
    """
    projectors = []
    for op in spin_ops:
        vals, vecs = np.linalg.eigh(op)
        projectors.append([(v, np.outer(vecs[:, k], vecs[:, k].conj())) for k, v in enumerate(vals)])
    dim_modes = ham.dim // 4
    gamma = np.zeros((2, ham.spec.n_modes), dtype=complex)
    for (s1, p1), (s2, p2) in itertools.product(*projectors):
        proj = np.kron(p1, p2)
        branch = (proj @ psi.reshape(4, dim_modes)).ravel()
        weight = np.vdot(branch, branch).real
        if weight < 1e-12:
            continue
        for m in range(ham.spec.n_modes):
            amp = ham.mode_amplitude(branch, m) / weight
            gamma[0, m] += -np.conj(amp) * np.sign(s1) / 4.0
            gamma[1, m] += -np.conj(amp) * np.sign(s2) / 4.0
    return gamma


def _run(ham, psi0, t_g, rtol, atol, check_leakage, samples=64):
    max_step = np.inf
    if ham.drive.sideband_index == 1 or (np.isfinite(ham.drive.rf_freq) and ham.drive.q > 0):
        # Resolve the drive period by at least 20 steps.
        max_step = 2.0 * np.pi / ham.drive.rf_freq / 20.0
    if ham.sequence is not None:
        # Pulse edges are discontinuities; integrate each pulse separately.
        edges = sorted({0.0, t_g} | {p.t_start for p in ham.sequence.pulses if 0 < p.t_start < t_g})
    else:
        edges = [0.0, t_g]
    psi = psi0
    leak = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        sol = solve_ivp(
            lambda t, y: -1j * ham.apply(t, y),
            (a, b),
            psi,
            method="DOP853",
            rtol=rtol,
            atol=atol,
            max_step=max_step,
            t_eval=np.linspace(a, b, samples) if check_leakage else None,
        )
        if sol.status != 0:
            raise IntegrationError(f"integration failed: {sol.message}")
        if check_leakage:
            leak = max(leak, max(ham.leakage(sol.y[:, k]) for k in range(sol.y.shape[1])))
        psi = sol.y[:, -1]
    if check_leakage and leak > LEAKAGE_TOL:
        raise CutoffError(f"top Fock level population {leak:.2e} exceeds {LEAKAGE_TOL:g}")
    return psi, leak


def _initial_state(spec, occupation):
    dims = [spec.fock_cutoff] * spec.n_modes
    index = int(np.ravel_multi_index(occupation, dims)) if dims else 0
    psi = np.zeros(spec.dim, dtype=complex)
    # Spins start in |down, down>, the first spin block.
    psi[index] = 1.0
    return psi


def _pure_run(spec, drive, modes, t_g, include_carrier, sequence, occupation, rtol, atol, check_leakage):
    ham = build_hamiltonian(drive, modes, spec, include_carrier, sequence)
    psi, leak = _run(ham, _initial_state(spec, occupation), t_g, rtol, atol, check_leakage)
    drift = abs(np.vdot(psi, psi).real - 1.0)
    if drift > NORM_TOL:
        raise IntegrationError(f"norm drift {drift:.2e} exceeds {NORM_TOL:g}")
    rho = _spin_density(psi, ham.dim // 4)
    gamma = _measure_gamma(ham, psi, _spin_operators(drive, modes))
    return SimResult(psi, rho, bell_fidelity(rho, drive.phase), drift, gamma, leak)


def evolve(
    spec: HilbertSpec,
    drive: DriveConfig,
    modes: CrystalModes,
    t_g: float,
    include_carrier: bool = True,
    sequence: PulseSequence | None = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    check_leakage: bool = True,
) -> SimResult:
    """Integrate the Schrodinger equation from ``|down, down>`` up to ``t_g``.

    Thermal initial states are delegated to :func:`thermal_average`.

    Raises
    ------
    CutoffError
        If the top Fock level population exceeds ``LEAKAGE_TOL``.
    IntegrationError
        If the integrator fails or the norm drifts by more than ``NORM_TOL``.
    """
    if spec.initial == "thermal":
        return thermal_average(spec, drive, modes, t_g, include_carrier, sequence, rtol, atol, check_leakage)
    occupation = (0,) * spec.n_modes
    return _pure_run(spec, drive, modes, t_g, include_carrier, sequence, occupation, rtol, atol, check_leakage)


def evolve_gate(spec: HilbertSpec, gate: GateSolution, modes: CrystalModes, include_carrier=True, **kwargs):
    """Run :func:`evolve` on a designed gate."""
    return evolve(spec, gate.drive, modes, gate.gate_time, include_carrier, gate.sequence, **kwargs)


def thermal_weights(nbar, cutoff, n_modes, target=0.999):
    """Most probable Fock configurations of a thermal state.

    Returns
    -------
    configs : list of tuple
        Occupations, most likely first, until ``target`` is reached.
    probs : ndarray
        Their probabilities (not renormalized).

    Raises
    ------
    TruncationError
        If the states representable within ``cutoff`` hold less than
        ``target``.
    """
    levels = np.arange(cutoff)
    single = (nbar**levels / (1.0 + nbar) ** (levels + 1)) if nbar > 0 else (levels == 0).astype(float)
    configs = list(itertools.product(range(cutoff), repeat=n_modes))
    probs = np.array([np.prod(single[list(c)]) for c in configs])
    order = np.argsort(-probs, kind="stable")
    total = np.cumsum(probs[order])
    if total[-1] < target:
        raise TruncationError(f"cutoff {cutoff} keeps only {total[-1]:.6f} of the thermal weight")
    keep = int(np.searchsorted(total, target - 1e-15)) + 1
    chosen = order[:keep]
    return [configs[k] for k in chosen], probs[chosen]


def thermal_average(
    spec: HilbertSpec,
    drive: DriveConfig,
    modes: CrystalModes,
    t_g: float,
    include_carrier: bool = True,
    sequence: PulseSequence | None = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    check_leakage: bool = True,
) -> SimResult:
    """Bell fidelity averaged over the retained thermal Fock states.

    Each configuration is evolved as a pure state; fidelities and spin
    density matrices are averaged with renormalized weights.
    """
    configs, probs = thermal_weights(spec.nbar, spec.fock_cutoff, spec.n_modes, spec.truncation_weight)
    weights = probs / probs.sum()
    rho = np.zeros((4, 4), dtype=complex)
    gamma = np.zeros((2, spec.n_modes), dtype=complex)
    drift = leak = 0.0
    for occupation, w in zip(configs, weights):
        res = _pure_run(spec, drive, modes, t_g, include_carrier, sequence, occupation, rtol, atol, check_leakage)
        rho += w * res.spin_density
        gamma += w * res.gamma_measured
        drift = max(drift, res.norm_drift)
        leak = max(leak, res.leakage)
    return SimResult(rho, rho, bell_fidelity(rho, drive.phase), drift, gamma, leak, float(probs.sum()))
