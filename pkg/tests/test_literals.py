from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pcfvar.literals import ParseError, parse_elem, parse_matrix, parse_pcf, parse_quad, parse_ring, parse_value
from pcfvar.ring import QuadIrr, RelQuadIrr, Z, format_elem, format_value


def test_values_over_z():
    assert parse_value("7/4") == Fraction(7, 4)
    assert parse_value("0.25") == Fraction(1, 4)
    assert parse_value("sqrt(8)") == QuadIrr.make(0, 2, 1, 2)
    assert format_value(parse_value("(1+sqrt(5))/2")) == "(1+sqrt(5))/2"
    assert format_value(parse_value("sqrt(2)")) == "sqrt(2)"
    assert parse_value("sqrt(9)") == 3


def test_values_over_quadratic_rings():
    gi = parse_ring("Z[i]")
    assert parse_value("i", gi) == gi.omega
    assert parse_value("(1+sqrt(-7))/2", gi).__class__ is RelQuadIrr
    R = parse_ring("Z[sqrt(2)]")
    assert parse_value("sqrt(2)", R) == R.omega
    assert format_elem(parse_elem("-3+2*w", R)) == "-3+2*w"


@pytest.mark.parametrize("bad", ["", "sqrt(", "1/0", "import os", "x", "2**w"])
def test_rejects_bad_literals(bad):
    with pytest.raises((ParseError, ValueError, ZeroDivisionError)):
        parse_value(bad)


@given(u=st.integers(-50, 50), v=st.integers(-50, 50))
def test_elem_format_round_trip(u, v):
    for ring in ("Z[i]", "O(-3)", "Z[sqrt(5)]"):
        R = parse_ring(ring)
        x = R.elem(u, v)
        assert parse_elem(format_elem(x), R) == x


@given(b=st.lists(st.integers(-20, 20), max_size=3), a=st.lists(st.integers(-20, 20), min_size=1, max_size=4))
def test_pcf_format_round_trip(b, a):
    p = parse_pcf("[" + ",".join(map(str, b)) + "; " + ",".join(map(str, a)) + "]")
    assert p.b == tuple(b) and p.a == tuple(a)
    assert parse_pcf(str(p)) == p


def test_structured_parsers():
    assert parse_quad("1, 0, -2").coeffs() == (1, 0, -2)
    with pytest.raises(ParseError):
        parse_quad("0,0,0")
    with pytest.raises(ParseError):
        parse_quad("1,2")
    assert parse_matrix("1,2,1,1").entries() == (1, 2, 1, 1)
    assert parse_matrix("(7,10,5,7)").entries() == (7, 10, 5, 7)
    with pytest.raises(ParseError):
        parse_pcf("[;]")
