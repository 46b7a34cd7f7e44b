import sys

import numpy as np
import pytest

from iongate.crystal import CA40, normal_modes, wavevector_from_lamb_dicke

TWO_PI = 2.0 * np.pi
AXIAL = TWO_PI * 0.975e6
RADIAL = TWO_PI * 9.75e6


def axial_wavevector():
    return wavevector_from_lamb_dicke(CA40, 0.098, AXIAL)


def transverse_wavevector():
    return wavevector_from_lamb_dicke(CA40, 0.031, RADIAL)


@pytest.fixture(scope="session")
def axial_modes():
    return normal_modes(CA40, AXIAL, RADIAL, "z", 2, axial_wavevector())


@pytest.fixture(scope="session")
def transverse_modes():
    return normal_modes(CA40, AXIAL, RADIAL, "x", 2, transverse_wavevector())


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
