import pytest
from hypothesis import given, strategies as st

from sdsim.errors import UnitParseError
from sdsim.units import DMNL, UnitExpr, format_units, parse_units

BASES = ["Day", "bias", "interactions", "recommendations", "quality"]
exponent_maps = st.dictionaries(st.sampled_from(BASES), st.integers(-3, 3), max_size=5)


def test_compound_denominator():
    assert parse_units("bias/(interactions*Day)").exponents == {"bias": 1, "interactions": -1, "Day": -1}


def test_dimensionless_spellings():
    assert parse_units("Dmnl") == DMNL
    assert parse_units("Dmnl").exponents == {}
    assert parse_units("1") == DMNL


def test_ratio():
    assert parse_units("quality/recommendations").exponents == {"quality": 1, "recommendations": -1}


def test_reciprocal_day():
    assert parse_units("1/Day").exponents == {"Day": -1}


def test_left_associative():
    # a/b*c is (a/b)*c
    assert parse_units("bias/Day*quality").exponents == {"bias": 1, "Day": -1, "quality": 1}


def test_dmnl_is_identity():
    bias = UnitExpr.base("bias")
    assert DMNL * bias == bias


def test_zero_exponents_dropped():
    u = UnitExpr.base("Day") / UnitExpr.base("Day")
    assert u == DMNL and u.exponents == {}


@pytest.mark.parametrize("raw", ["bias/", "bias**2", "(bias", "bi as", "2"])
def test_bad_units_raise(raw):
    with pytest.raises(UnitParseError):
        parse_units(raw)


@given(exponent_maps, exponent_maps)
def test_multiplication_commutes(a, b):
    assert UnitExpr(a) * UnitExpr(b) == UnitExpr(b) * UnitExpr(a)


@given(exponent_maps)
def test_format_parse_round_trip(a):
    u = UnitExpr(a)
    assert parse_units(format_units(u)) == u


@given(exponent_maps)
def test_inverse(a):
    u = UnitExpr(a)
    assert u * u.inverse() == DMNL
