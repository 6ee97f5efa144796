import math

import pytest

from bn4d.constants import CONSTANTS, C_REDUCED, FRAK_C, FRAK_c, OMEGA


def test_values():
    assert FRAK_c == pytest.approx(2.8284271247461903, rel=1e-15)
    assert OMEGA == pytest.approx(2 * math.pi**2, rel=1e-15)
    assert FRAK_C == pytest.approx(8 * math.sqrt(2) * math.pi**2, rel=1e-15)


def test_reduced_constant_is_four_omega():
    assert C_REDUCED == pytest.approx(4 * OMEGA, rel=1e-14)
    assert C_REDUCED == pytest.approx(78.9568352087, rel=1e-10)
    assert FRAK_C**2 / (OMEGA * FRAK_c**2) == pytest.approx(C_REDUCED, rel=1e-14)


def test_as_dict_round_numbers():
    d = CONSTANTS.as_dict()
    assert set(d) >= {"frak_c", "omega", "frak_C", "c_reduced"}
    assert d["frak_C"] == pytest.approx(2 * d["frak_c"] * d["omega"])
