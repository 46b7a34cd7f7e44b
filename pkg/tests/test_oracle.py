from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import AXIAL, TWO_PI
from iongate.lightmatter import DriveConfig, force_model
from iongate.magnus import (
    PulseSequence,
    design_single_mode_gate,
    design_two_mode_gate,
    gamma_single_pulse,
    ideal_bell_state,
    multipulse_coefficients,
    unit_force,
)
from iongate.oracle import (
    CutoffError,
    HilbertSpec,
    TruncationError,
    bell_fidelity,
    build_hamiltonian,
    evolve,
    evolve_gate,
    thermal_weights,
)


def test_hilbert_space_validation():
    with pytest.raises(ValueError):
        HilbertSpec(n_modes=3)
    with pytest.raises(ValueError):
        HilbertSpec(fock_cutoff=3)
    with pytest.raises(ValueError):
        HilbertSpec(truncation_weight=0.99)
    assert HilbertSpec(2, 12).dim == 4 * 144


@settings(max_examples=20, deadline=None)
@given(t=st.floats(0.0, 1e-4), beta=st.floats(0.0, 0.01), phase=st.floats(-np.pi, np.pi))
def test_hamiltonian_hermitian(axial_modes, t, beta, phase):
    drive = DriveConfig("z", [TWO_PI * 5e4, TWO_PI * 7e4], AXIAL + 1e5, phase=phase, beta_tilde=beta, q=0.05, rf_freq=TWO_PI * 30e6)
    h = build_hamiltonian(drive, axial_modes, HilbertSpec(2, 4)).matrix(t).toarray()
    np.testing.assert_allclose(h, h.conj().T, atol=1e-9)
    psi = np.random.default_rng(0).normal(size=h.shape[0]) + 0j
    np.testing.assert_allclose(build_hamiltonian(drive, axial_modes, HilbertSpec(2, 4)).apply(t, psi), h @ psi, atol=1e-6)


def test_zero_drive_does_nothing(axial_modes):
    drive = DriveConfig("z", np.zeros(2), AXIAL + 1e5)
    result = evolve(HilbertSpec(1, 4), drive, axial_modes, 20e-6)
    assert abs(result.state[0]) == pytest.approx(1.0, abs=1e-12)
    assert result.bell_fidelity == pytest.approx(0.5, abs=1e-12)


def test_carrier_rotation_matches_closed_form(axial_modes):
    # With no Lamb-Dicke coupling each spin rotates by (Omega/delta) sin(delta t).
    still = replace(axial_modes, lamb_dicke=np.zeros(2))
    rabi, delta, t = TWO_PI * 0.2e6, TWO_PI * 0.5e6, 3.3e-6
    drive = DriveConfig("z", np.full(2, rabi), delta)
    result = evolve(HilbertSpec(1, 4), drive, still, t)
    angle = rabi / delta * np.sin(delta * t)
    up = np.sin(angle) ** 2
    populations = np.real(np.diag(result.spin_density))
    np.testing.assert_allclose(populations, [(1 - up) ** 2, up * (1 - up), up * (1 - up), up**2], atol=1e-9)


def test_force_only_displacement_matches_magnus(axial_modes):
    gate = design_single_mode_gate(axial_modes, DriveConfig("z", np.full(2, TWO_PI * 0.12e6), 0.0))
    t = 0.5 * gate.gate_time
    result = evolve(HilbertSpec(1, 10), gate.drive, axial_modes, t, include_carrier=False)
    expected = gamma_single_pulse(force_model(gate.drive, axial_modes), 0, t, rotating_wave=False)
    np.testing.assert_allclose(result.gamma_measured[:, 0], expected, rtol=1e-5)


def test_force_only_pulse_train_displacement(axial_modes):
    drive = DriveConfig("z", np.ones(2), AXIAL + TWO_PI * 15e3)
    seq = PulseSequence.equidistant(np.array([1.0, -0.4, 0.8]) * TWO_PI * 40e3, drive.detuning, 40e-6)
    result = evolve(HilbertSpec(2, 8), drive, axial_modes, seq.total_time, include_carrier=False, sequence=seq)
    gamma, _ = multipulse_coefficients(seq, unit_force(drive, axial_modes))
    np.testing.assert_allclose(result.gamma_measured, gamma, rtol=1e-4, atol=1e-6)


def test_force_only_gate_is_a_bell_gate(axial_modes):
    gate = design_single_mode_gate(axial_modes, DriveConfig("z", np.full(2, TWO_PI * 0.06e6), 0.0))
    result = evolve_gate(HilbertSpec(2, 10), gate, axial_modes, include_carrier=False)
    assert 1 - result.bell_fidelity < 1e-3
    assert np.max(np.abs(result.gamma_measured[:, 0])) < 1e-3
    assert result.norm_drift < 1e-8


@pytest.mark.slow
def test_two_mode_force_only_gate(transverse_modes):
    gate = design_two_mode_gate(transverse_modes, DriveConfig("x", np.ones(2), 0.0))
    result = evolve_gate(HilbertSpec(2, 14), gate, transverse_modes, include_carrier=False)
    assert 1 - result.bell_fidelity < 1e-3
    assert np.max(np.abs(result.gamma_measured)) < 1e-2


def test_small_cutoff_detected(axial_modes):
    gate = design_single_mode_gate(axial_modes, DriveConfig("z", np.full(2, TWO_PI * 0.12e6), 0.0))
    with pytest.raises(CutoffError):
        evolve_gate(HilbertSpec(1, 4), gate, axial_modes, include_carrier=False)


def test_thermal_weights():
    configs, probs = thermal_weights(0.1, 8, 2, 0.9999)
    assert probs.sum() >= 0.9999
    assert configs[0] == (0, 0)
    assert np.all(np.diff(probs) <= 0)
    configs, probs = thermal_weights(0.0, 6, 2)
    assert configs == [(0, 0)] and probs[0] == 1.0
    with pytest.raises(TruncationError):
        thermal_weights(5.0, 4, 2, 0.999)


def test_thermal_at_zero_temperature_equals_ground(axial_modes):
    gate = design_single_mode_gate(axial_modes, DriveConfig("z", np.full(2, TWO_PI * 0.12e6), 0.0))
    ground = evolve_gate(HilbertSpec(1, 10), gate, axial_modes, include_carrier=False)
    thermal = evolve_gate(HilbertSpec(1, 10, "thermal", 0.0), gate, axial_modes, include_carrier=False)
    assert thermal.bell_fidelity == pytest.approx(ground.bell_fidelity, abs=1e-12)
    assert thermal.retained_weight == 1.0


def test_bell_fidelity_of_target():
    target = ideal_bell_state((0.3, -1.1))
    assert bell_fidelity(np.outer(target, target.conj()), (0.3, -1.1)) == pytest.approx(1.0, abs=1e-15)
