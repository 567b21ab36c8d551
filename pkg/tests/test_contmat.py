from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from pcfvar.contmat import PCF, IDENTITY, Mat2, QuadPoly, T, dmat, e_matrix, eigen_check, quad_poly, t_power
from pcfvar.literals import parse_pcf, parse_ring, parse_value
from pcfvar.ring import Z

terms = st.lists(st.integers(-9, 9), max_size=3)
period = st.lists(st.integers(-9, 9), min_size=1, max_size=4)


def list_mul(x, y):
    return [[sum(x[i][m] * y[m][j] for m in range(2)) for j in range(2)] for i in range(2)]


def oracle_e(b, a):
    """E by plain nested lists: D(b..) D(a..) t D(-b reversed) t."""
    D = lambda c: [[c, 1], [1, 0]]
    t = [[0, 1], [1, 0]]
    m = [[1, 0], [0, 1]]
    for c in list(b) + list(a):
        m = list_mul(m, D(c))
    if b:
        m = list_mul(m, t)
        for c in reversed(b):
            m = list_mul(m, D(-c))
        m = list_mul(m, t)
    return m


def test_dmat_examples():
    assert dmat(0) == T
    assert dmat(5) == Mat2(5, 1, 1, 0)
    R = parse_ring("Z[sqrt(2)]")
    w = R.omega
    assert dmat(1 + w) == Mat2(1 + w, 1, 1, 0)
    assert t_power(2) == IDENTITY and t_power(3) == T


def test_e_matrix_examples():
    assert e_matrix(parse_pcf("[; 1]")) == Mat2(1, 1, 1, 0)
    assert e_matrix(parse_pcf("[1; 2]")) == Mat2(1, 2, 1, 1)
    assert quad_poly(parse_pcf("[1; 2]")).coeffs() == (1, 0, -2)
    assert quad_poly(parse_pcf("[; 1]")).coeffs() == (1, -1, -1)


def test_quad_of_triple_period():
    p = parse_pcf("[; 2,-4,4]")
    E = e_matrix(p)
    assert E == Mat2(*[x for row in oracle_e((), (2, -4, 4)) for x in row])
    assert quad_poly(p).coeffs()[0] == E.e21


@given(b=terms, a=period)
def test_e_matrix_matches_list_oracle(b, a):
    E = e_matrix(PCF(Z, b, a))
    assert E.entries() == tuple(x for row in oracle_e(b, a) for x in row)
    assert E.det() == (-1) ** len(a)


@pytest.mark.parametrize("ring", ["Z[i]", "Z[sqrt(2)]", "O(-3)"])
@given(data=st.data())
def test_determinant_law_over_quadratic_rings(ring, data):
    R = parse_ring(ring)
    elem = st.builds(R.elem, st.integers(-5, 5), st.integers(-5, 5))
    b = data.draw(st.lists(elem, max_size=2))
    a = data.draw(st.lists(elem, min_size=1, max_size=4))
    assert e_matrix(PCF(R, b, a)).det() == (-1) ** len(a)


def test_eigen_check_examples():
    assert eigen_check(parse_pcf("[1; 2]"), parse_value("sqrt(2)"))
    assert eigen_check(parse_pcf("[; 1]"), parse_value("(1+sqrt(5))/2"))
    assert not eigen_check(parse_pcf("[1; 2]"), 1)


@given(b=terms, a=period)
def test_quad_roots_are_eigenvectors(b, a):
    p = PCF(Z, b, a)
    q = quad_poly(p)
    if q.is_zero or q.A == 0 or q.discriminant() == 0:
        return
    for beta in q.roots():
        assert eigen_check(p, beta)


def test_pcf_validation():
    with pytest.raises(ValueError):
        PCF(Z, (1,), ())
    assert str(parse_pcf("[1,2; 3]")) == "[1,2; 3]"
    assert parse_pcf("[3,4]") == PCF(Z, (), (3, 4))


def test_zero_quad_is_flagged():
    assert QuadPoly(0, 0, 0).is_zero
    assert not QuadPoly(1, 0, -2).is_zero
