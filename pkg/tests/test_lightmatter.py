import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import jv

from conftest import AXIAL, TWO_PI
from iongate.crystal import CA40_729_WAVEVECTOR
from iongate.lightmatter import (
    DriveConfig,
    RegimeViolation,
    beta_tilde,
    classify,
    debye_waller,
    force_model,
    micromotion_force_model,
    regime_check,
    secular_force_model,
    sideband_weights,
    spin_matrix,
)

RF = TWO_PI * 100e6


def micro_drive(modes, rabi, detuning, beta=0.0, q=0.3, rf=RF):
    return DriveConfig(modes.axis, np.full(2, rabi), detuning, 1, beta_tilde=beta, q=q, rf_freq=rf)


def test_modulation_index_examples():
    assert beta_tilde(CA40_729_WAVEVECTOR, 0.0, 0.3) == 0.0
    assert beta_tilde(CA40_729_WAVEVECTOR, 10e-9, 0.3) == pytest.approx(-0.01293, abs=5e-6)


def test_bessel_examples():
    assert sideband_weights(0.0, 0) == 1.0
    assert sideband_weights(0.0, 1) == 0.0
    assert sideband_weights(0.001, 1) == pytest.approx(5.0e-4, rel=1e-6)


@settings(max_examples=60, deadline=None)
@given(beta=st.floats(-0.99, 0.99), l=st.integers(-4, 4))
def test_bessel_series_against_scipy(beta, l):
    value = sideband_weights(beta, l)
    assert value == pytest.approx(jv(l, beta), abs=1e-15)
    assert abs(value) <= 1.0


def test_secular_pure_force(axial_modes):
    rabi = TWO_PI * 50e3
    d = DriveConfig("z", np.full(2, rabi), AXIAL + TWO_PI * 10e3, q=0.3, rf_freq=RF)
    f = secular_force_model(d, axial_modes)
    np.testing.assert_array_equal(f.spin_mixing, [[1.0, 0.0], [1.0, 0.0]])
    expected = rabi * axial_modes.mode_matrix * axial_modes.wavevector / 0.85
    np.testing.assert_allclose(f.strengths, expected, rtol=1e-14)
    assert f.effective_detuning == d.detuning
    assert f.carriers[0].frequency == d.detuning


def test_secular_spin_mixing_ratio(axial_modes):
    d = DriveConfig("z", np.full(2, TWO_PI * 50e3), AXIAL, beta_tilde=0.01, q=0.3, rf_freq=RF)
    f = secular_force_model(d, axial_modes)
    c_y, c_x = f.spin_mixing[0]
    assert c_x / c_y == pytest.approx(3.75e-4, rel=1e-4)


def test_secular_without_rf(axial_modes):
    rabi = TWO_PI * 50e3
    d = DriveConfig("z", np.full(2, rabi), AXIAL, beta_tilde=0.002)
    f = secular_force_model(d, axial_modes)
    expected = rabi * jv(0, 0.002) * axial_modes.mode_matrix * axial_modes.wavevector
    np.testing.assert_allclose(f.strengths, expected, rtol=1e-13)


def test_micromotion_strength_is_quarter_q(transverse_modes):
    rabi = TWO_PI * 200e3
    micro = micromotion_force_model(micro_drive(transverse_modes, rabi, 1e5), transverse_modes)
    sec = secular_force_model(DriveConfig("x", np.full(2, rabi), 1e5, q=0.3, rf_freq=RF), transverse_modes)
    np.testing.assert_allclose(micro.strengths / sec.strengths, 0.075, rtol=1e-14)
    np.testing.assert_array_equal(micro.spin_mixing[:, 1], 0.0)


def test_micromotion_carriers(transverse_modes):
    rabi = TWO_PI * 200e3
    f = micromotion_force_model(micro_drive(transverse_modes, rabi, 1e5), transverse_modes)
    assert f.carriers[0].frequency == RF
    np.testing.assert_array_equal(f.carriers[1].amplitude, 0.0)
    f = micromotion_force_model(micro_drive(transverse_modes, rabi, 1e5, beta=0.005), transverse_modes)
    np.testing.assert_allclose(f.carriers[1].amplitude, rabi * 0.0025, rtol=1e-5)
    np.testing.assert_allclose(f.carriers[1].amplitude, rabi * jv(1, 0.005), rtol=1e-14)
    assert f.effective_detuning == 1e5


def test_micromotion_needs_compensation(transverse_modes):
    with pytest.raises(RegimeViolation) as info:
        micromotion_force_model(micro_drive(transverse_modes, TWO_PI * 1e5, 1e5, beta=0.075), transverse_modes)
    assert info.value.margin == "compensation"


def test_unresolved_sidebands_rejected(transverse_modes):
    d = DriveConfig("x", np.full(2, 0.5 * RF), 1e6, q=0.3, rf_freq=RF)
    with pytest.raises(RegimeViolation) as info:
        secular_force_model(d, transverse_modes)
    assert info.value.margin == "resolved_micromotion"


def test_regime_margins_micromotion(transverse_modes):
    d = micro_drive(transverse_modes, TWO_PI * 1e6, TWO_PI * 1e6, beta=1e-3)
    report = regime_check(d, transverse_modes)
    assert report.carrier_margin == pytest.approx((0.01, 0.001), rel=1e-12)
    assert report.resolved_micromotion and report.status["carrier"] == "pass"


def test_regime_margin_fast_axial_point(axial_modes):
    d = DriveConfig("z", np.full(2, TWO_PI * 0.12e6), TWO_PI * 0.9916e6)
    report = regime_check(d, axial_modes)
    assert report.carrier_margin[0] == pytest.approx(0.121, abs=1e-3)
    assert report.status["carrier"] == "warn"


def test_compensation_boundary(transverse_modes):
    report = regime_check(micro_drive(transverse_modes, 1e5, 1e5, beta=0.075), transverse_modes)
    assert not report.compensation_ok


def test_classify_thresholds():
    assert [classify(r) for r in (0.1, 0.2, 0.31)] == ["pass", "warn", "fail"]


def test_debye_waller(axial_modes):
    expected = np.exp(-0.5 * np.sum((axial_modes.mode_matrix[0] * axial_modes.lamb_dicke) ** 2))
    assert debye_waller(axial_modes, 0) == pytest.approx(expected, rel=1e-15)
    d = DriveConfig.from_bare(axial_modes, TWO_PI * 1e5, 0.0)
    np.testing.assert_allclose(d.rabi, TWO_PI * 1e5 * expected)


def test_invalid_sideband():
    with pytest.raises(ValueError):
        DriveConfig("z", [1.0, 1.0], 0.0, sideband_index=2)
    with pytest.raises(ValueError):
        DriveConfig("z", [1.0, 1.0], 0.0, sideband_index=1)


@settings(max_examples=60, deadline=None)
@given(
    beta=st.floats(0.0, 0.07),
    q=st.floats(0.05, 0.35),
    phase=st.floats(-np.pi, np.pi),
    sideband=st.sampled_from([0, 1]),
)
def test_spin_operator_algebra(transverse_modes, beta, q, phase, sideband):
    if sideband == 1 and beta >= 0.3 * q / 4:
        return
    d = DriveConfig("x", np.full(2, TWO_PI * 1e5), 1e5, sideband, phase=phase, beta_tilde=beta, q=q, rf_freq=RF)
    f = force_model(d, transverse_modes)
    c_y, c_x = f.spin_mixing[0]
    assert c_y**2 + c_x**2 == pytest.approx(1.0, abs=1e-12)
    s = f.spin_operator(0, phase)
    np.testing.assert_allclose(s, s.conj().T, atol=1e-15)
    np.testing.assert_allclose(s @ s, np.eye(2), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(q=st.floats(0.05, 0.35), sideband=st.sampled_from([0, 1]))
def test_force_continuous_at_zero_modulation(transverse_modes, q, sideband):
    def model(beta):
        d = DriveConfig("x", np.full(2, TWO_PI * 1e5), 1e5, sideband, beta_tilde=beta, q=q, rf_freq=RF)
        return force_model(d, transverse_modes)

    a, b = model(0.0), model(1e-9)
    np.testing.assert_allclose(a.strengths, b.strengths, rtol=1e-9)
    # A 1e-9 step in the index moves the mixing by at most 1e-9 / (q/4) ~ 1e-7.
    np.testing.assert_allclose(a.spin_mixing, b.spin_mixing, atol=1e-7)


def test_spin_matrix_is_sigma_y_at_zero_phase():
    np.testing.assert_array_equal(spin_matrix(1.0, 0.0), [[0, -1j], [1j, 0]])
