from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iongate.mathieu import (
    ExcessDrive,
    MathieuDomainError,
    MathieuParams,
    characteristic_exponent,
    classical_trajectory,
    floquet_coefficients,
    floquet_solution,
    mode_function,
)
from oracles import monodromy_beta

RF = 2.0 * np.pi * 30e6


def test_harmonic_limit_exponent():
    assert characteristic_exponent(MathieuParams(0.04, 0.0, RF)) == pytest.approx(0.2, abs=1e-12)
    assert characteristic_exponent(MathieuParams(0.04, 0.0, RF), order="leading") == pytest.approx(0.2, abs=1e-15)


def test_pure_rf_exponent_matches_monodromy():
    beta = characteristic_exponent(MathieuParams(0.0, 0.3, RF))
    assert beta == pytest.approx(monodromy_beta(0.0, 0.3), abs=1e-8)
    leading = characteristic_exponent(MathieuParams(0.0, 0.3, RF), order="leading")
    assert leading == pytest.approx(0.2121320343559643, abs=1e-12)
    # The closed form is off by O(q^4), about 4e-3 here; the exact route is the default.
    assert abs(leading - monodromy_beta(0.0, 0.3)) < 0.3**4


def test_unconfined_parameters_rejected():
    with pytest.raises(MathieuDomainError):
        characteristic_exponent(MathieuParams(-0.001, 0.0, RF))


@pytest.mark.parametrize("a, q", [(1.0, 0.1), (0.1, 1.0), (0.01, -1.2)])
def test_out_of_regime_parameters_rejected(a, q):
    with pytest.raises(ValueError):
        MathieuParams(a, q, RF)


def test_l_max_must_be_positive():
    with pytest.raises(ValueError):
        MathieuParams(0.01, 0.1, RF, l_max=0)


def test_no_drive_gives_no_micromotion():
    s = floquet_solution(MathieuParams(0.04, 0.0, RF, l_max=4))
    assert all(c == 0.0 for c in s.coeffs.values())
    assert s.xi == 1.0


def test_closed_form_coefficients_small_q():
    s = floquet_solution(MathieuParams(0.0, 0.03, RF, l_max=1))
    assert s.coeffs[1] == pytest.approx(-0.0075, abs=1e-15)
    assert s.xi == pytest.approx(0.985, abs=1e-15)


def test_closed_form_coefficients_q03():
    # (-1)^l q^l / (4^l ((l-1)!)^2) evaluated by hand: -0.075, +0.005625
    coeffs = floquet_coefficients(0.3, 2)
    assert coeffs[1] == pytest.approx(-0.075, abs=1e-15)
    assert coeffs[2] == pytest.approx(0.005625, abs=1e-15)
    s = floquet_solution(MathieuParams(0.0, 0.3, RF, l_max=2))
    assert s.xi == pytest.approx(0.86125, abs=1e-14)


def test_secular_frequency_definition():
    s = floquet_solution(MathieuParams(0.01, 0.2, RF))
    assert s.secular_freq == pytest.approx(0.5 * RF * s.beta, rel=1e-15)


def test_mode_function_initial_and_period():
    s = floquet_solution(MathieuParams(0.0, 0.3, RF, l_max=2))
    assert mode_function(s, 0.0) == pytest.approx(1.0 + 0.0j, abs=1e-15)
    period = 2.0 * np.pi / RF
    expected = np.exp(1j * s.secular_freq * period)
    assert mode_function(s, period) == pytest.approx(expected, abs=1e-12)


def test_mode_function_harmonic_limit():
    s = floquet_solution(MathieuParams(0.04, 0.0, RF))
    t = np.linspace(0, 1e-6, 7)
    np.testing.assert_allclose(mode_function(s, t), np.exp(1j * s.secular_freq * t), atol=1e-15)


def test_mode_function_initial_velocity():
    # u'(0) = i omega up to the series truncation.
    q = 0.05
    s = floquet_solution(MathieuParams(0.0, q, RF, l_max=3))
    h = 1e-3 / RF
    deriv = (mode_function(s, h) - mode_function(s, -h)) / (2 * h)
    assert abs(deriv / (1j * s.secular_freq) - 1) < 1e-6


def test_trajectory_without_drive():
    s = floquet_solution(MathieuParams(0.04, 0.0, RF))
    t = np.linspace(0, 2e-6, 50)
    sec, intr, exc = classical_trajectory(s, ExcessDrive.none(), 1e-6, t)
    np.testing.assert_allclose(sec, 1e-6 * np.cos(s.secular_freq * t))
    assert np.all(intr == 0) and np.all(exc == 0)


def test_intrinsic_to_secular_ratio_at_zero():
    s = floquet_solution(MathieuParams(0.0, 0.3, RF, l_max=2))
    sec, intr, _ = classical_trajectory(s, ExcessDrive.none(), 1e-6, 0.0)
    assert intr / sec == pytest.approx(2 * (-0.075) + 2 * 0.005625, abs=1e-14)


def test_excess_time_average():
    s = floquet_solution(MathieuParams(0.0, 0.3, RF))
    drive = ExcessDrive(1.0, 0.0, 0.0, 0.0, 5e-9, 0.0)
    t = np.linspace(0, 2 * np.pi / RF, 4096, endpoint=False)
    _, _, exc = classical_trajectory(s, drive, 0.0, t)
    assert np.mean(exc) == pytest.approx(5e-9, rel=1e-12)


def test_excess_amplitudes_vanish_with_fields():
    d = ExcessDrive.from_fields(0.0, 0.0, 1e-4, 1.0, 1.6e-19, 6.6e-26, 2 * np.pi * 1e6, 0.3)
    assert d.driv_amp_dc == 0.0 and d.driv_amp_ac == 0.0


@settings(max_examples=30, deadline=None)
@given(
    e_dc=st.floats(-50.0, 50.0),
    phi_ac=st.floats(-1e-3, 1e-3),
    scale=st.floats(0.1, 10.0),
)
def test_excess_linear_in_each_source(e_dc, phi_ac, scale):
    args = (1e-4, 1.0, 1.602e-19, 6.64e-26, 2 * np.pi * 1e6, 0.3)
    s = floquet_solution(MathieuParams(0.0, 0.3, RF))
    t = np.linspace(0, 1e-6, 33)

    def excess(e, p):
        return classical_trajectory(s, ExcessDrive.from_fields(e, p, *args), 0.0, t)[2]

    both = excess(e_dc, phi_ac)
    np.testing.assert_allclose(both, excess(e_dc, 0.0) + excess(0.0, phi_ac), atol=1e-20)
    np.testing.assert_allclose(excess(scale * e_dc, 0.0), scale * excess(e_dc, 0.0), rtol=1e-12, atol=1e-22)
    np.testing.assert_allclose(excess(0.0, scale * phi_ac), scale * excess(0.0, phi_ac), rtol=1e-12, atol=1e-22)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-0.05, 0.05), q=st.floats(0.0, 0.35))
def test_exponent_against_monodromy(a, q):
    if a + q**2 / 2 <= 1e-4:
        return
    beta = characteristic_exponent(MathieuParams(a, q, RF))
    assert abs(beta - monodromy_beta(a, q)) <= 1e-3
    assert 0.0 < beta < 1.0


@settings(max_examples=40, deadline=None)
@given(q=st.floats(0.0, 0.35), l_max=st.integers(1, 5))
def test_coefficient_closed_form_and_normalization(q, l_max):
    s = floquet_solution(MathieuParams(0.0 if q > 0.01 else 0.01, q, RF, l_max=l_max))
    for l, c in s.coeffs.items():
        assert c == (-1) ** l * q**l / (4**l * factorial(l - 1) ** 2)
    assert s.xi == pytest.approx(1 + 2 * sum(s.coeffs.values()), abs=1e-15)
    mags = [abs(c) for c in s.coeffs.values()]
    assert all(b <= a for a, b in zip(mags, mags[1:]))


@settings(max_examples=30, deadline=None)
@given(q=st.floats(0.01, 0.35), l_max=st.integers(1, 4))
def test_series_consistency_between_orders(q, l_max):
    a = 0.01
    lo = floquet_solution(MathieuParams(a, q, RF, l_max=l_max))
    hi = floquet_solution(MathieuParams(a, q, RF, l_max=l_max + 1))
    t = np.linspace(0, 2 * np.pi / RF, 513)
    gap = np.max(np.abs(mode_function(lo, t) - mode_function(hi, t)))
    assert gap <= 2 * q ** (l_max + 1)
