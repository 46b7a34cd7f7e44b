"""Independent reference computations used only by the tests."""

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize

from iongate.crystal import coulomb_constant


def monodromy_beta(a, q):
    """Characteristic exponent from one-period integration of the Mathieu equation.

    Integrates ``x'' + (a - 2 q cos 2 tau) x = 0`` over ``tau in [0, pi]`` for
    the two fundamental solutions; ``cos(pi beta)`` is half the trace of the
    monodromy matrix.
    """

    def rhs(tau, y):
        k = a - 2.0 * q * np.cos(2.0 * tau)
        return [y[1], -k * y[0], y[3], -k * y[2]]

    sol = solve_ivp(rhs, (0.0, np.pi), [1.0, 0.0, 0.0, 1.0], method="DOP853", rtol=1e-12, atol=1e-14)
    x1, v1, x2, v2 = sol.y[:, -1]
    half_trace = 0.5 * (x1 + v2)
    return float(np.arccos(np.clip(half_trace, -1.0, 1.0)) / np.pi)


def series_residual(beta, coeffs, a, q, n_grid=2001):
    """Sup-norm residual of the truncated Floquet solution, relative to its size.

    Works in ``tau = rf t / 2`` where the drive period is ``pi``.
    """
    tau = np.linspace(0.0, np.pi, n_grid)
    phase = np.exp(1j * beta * tau)
    env = np.ones_like(tau, dtype=complex)
    d_env = np.zeros_like(env)
    dd_env = np.zeros_like(env)
    for l, c in coeffs.items():
        env += 2 * c * np.cos(2 * l * tau)
        d_env += -4 * l * c * np.sin(2 * l * tau)
        dd_env += -8 * l**2 * c * np.cos(2 * l * tau)
    x = phase * env
    xpp = phase * (-(beta**2) * env + 2j * beta * d_env + dd_env)
    residual = xpp + (a - 2.0 * q * np.cos(2.0 * tau)) * x
    return float(np.max(np.abs(residual)) / np.max(np.abs(x)))


def potential_minimum(species, omega_z, n_ions):
    """Equilibrium by direct minimization of the axial potential energy."""
    k = coulomb_constant(species)
    scale = (k / (species.mass * omega_z**2)) ** (1.0 / 3.0)

    def energy(u):
        d = np.abs(u[:, None] - u[None, :])[np.triu_indices(n_ions, 1)]
        return 0.5 * np.sum(u**2) + np.sum(1.0 / d)

    start = np.linspace(-1.0, 1.0, n_ions) * n_ions
    res = minimize(energy, start, method="BFGS", options={"gtol": 1e-12})
    return np.sort(res.x) * scale


def hessian_frequencies(species, positions, omega_axial, omega_radial, axis, step=1e-4):
    """Mode frequencies from a finite-difference Hessian of the full 3D potential."""
    k = coulomb_constant(species)
    m = species.mass
    n = positions.size
    trap = {"z": omega_axial, "x": omega_radial, "y": omega_radial}
    idx = {"x": 0, "y": 1, "z": 2}[axis]
    scale = np.min(np.diff(positions)) if n > 1 else 1e-6
    h = step * scale

    def energy(offsets):
        r = np.zeros((n, 3))
        r[:, 2] = positions
        r[:, idx] += offsets
        e = 0.5 * m * trap[axis] ** 2 * np.sum(r[:, idx] ** 2)
        if axis != "z":
            e += 0.5 * m * omega_axial**2 * np.sum(r[:, 2] ** 2)
        for i in range(n):
            for j in range(i + 1, n):
                e += k / np.linalg.norm(r[i] - r[j])
        return e

    hess = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            def shifted(si, sj):
                d = np.zeros(n)
                d[i] += si * h
                d[j] += sj * h
                return energy(d)

            hess[i, j] = (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4 * h * h)
    return np.sort(np.sqrt(np.linalg.eigvalsh(hess) / m))


def force_integrals(couplings, omega, detuning, segments, t_end):
    """Displacement and spin-spin phase of one mode by direct integration.

    ``couplings`` are the two ion couplings at unit Rabi frequency;
    ``segments`` is a list of ``(t_start, t_stop, amplitude)``.  The force on
    ion ``i`` is ``c_i a(t) cos(detuning t)``.  Returns ``(gamma, g12)`` with
    ``gamma_i = -i conj(A_i)``, ``A_i = int f_i exp(i omega t)`` and ``g12``
    the symmetrized ordered double integral of the imaginary part.
    """
    c = np.asarray(couplings, dtype=float)

    def amplitude(t):
        for t0, t1, a in segments:
            if t0 <= t < t1:
                return a
        return 0.0

    def rhs(t, y, a):
        f = c * a * np.cos(detuning * t)
        rot = np.exp(1j * omega * t)
        A = y[0:2] + 1j * y[2:4]
        dA = f * rot
        dG = 0.5 * (f[0] * np.imag(rot * np.conj(A[1])) + f[1] * np.imag(rot * np.conj(A[0])))
        return [dA[0].real, dA[1].real, dA[0].imag, dA[1].imag, dG]

    y = np.zeros(5)
    edges = sorted({0.0, t_end, *[s[0] for s in segments], *[s[1] for s in segments]})
    for t0, t1 in zip(edges, edges[1:]):
        if t1 <= t0:
            continue
        a = amplitude(0.5 * (t0 + t1))
        period = 2 * np.pi / (abs(detuning) + omega)
        sol = solve_ivp(rhs, (t0, t1), y, args=(a,), method="DOP853", rtol=1e-11, atol=1e-16, max_step=period / 8)
        y = sol.y[:, -1]
    A = y[0:2] + 1j * y[2:4]
    return -1j * np.conj(A), 1j * y[4]
