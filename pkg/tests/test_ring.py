from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pcfvar.literals import parse_ring, parse_value
from pcfvar.ring import (
    QuadIrr,
    RElem,
    RelQuadIrr,
    RingError,
    RingSpec,
    Z,
    arith,
    height,
    nearest,
    norm_conj,
    re_sign,
    squarefree_decompose,
)

RINGS = ["Z[i]", "O(-3)", "O(-7)", "Z[sqrt(-3)]", "Z[sqrt(2)]", "O(5)", "Z[sqrt(5)]", "O(13)"]
small = st.integers(-20, 20)


def brute_squarefree(n):
    s = 1
    for f in range(2, abs(n) + 1):
        while n % (f * f) == 0:
            n //= f * f
            s *= f
    return s, n


@pytest.mark.parametrize("n", [2, 8, 12, -12, 50, 72, 97, -1, 1])
def test_squarefree_decompose_matches_brute_force(n):
    assert squarefree_decompose(n) == brute_squarefree(n)


def test_ring_literals_and_bases():
    assert str(parse_ring("Z")) == "Z"
    assert parse_ring("Z[1/2, 1/3]").primes == (2, 3)
    assert parse_ring(str(parse_ring("Z[1/5]"))) == parse_ring("Z[1/5]")
    gi = parse_ring("Z[i]")
    assert gi == parse_ring("O(-1)") and gi.omega * gi.omega == -1
    eis = parse_ring("O(-3)")
    w = eis.omega
    assert w * w - w + 1 == 0  # (1 + sqrt(-3))/2
    assert parse_ring("Z[sqrt(-3)]") != eis
    with pytest.raises(RingError):
        RingSpec.quadratic(4)
    with pytest.raises(ValueError):
        parse_ring("Q")


@pytest.mark.parametrize("ring", RINGS)
@given(a=small, b=small, c=small, d=small)
def test_field_axioms(ring, a, b, c, d):
    R = parse_ring(ring)
    x, y = R.elem(a, b), R.elem(c, d)
    assert x + y == y + x and x * y == y * x
    assert (x + y) * x == x * x + y * x
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x * y).conj() == x.conj() * y.conj()
    if y:
        q = x / y
        assert q * y == x
        val, in_ring = arith(x, y, "div")
        assert val == q and in_ring == R.contains(q)


@pytest.mark.parametrize("ring", RINGS)
def test_units(ring):
    R = parse_ring(ring)
    for u in R.box(3):
        if R.is_unit(u):
            assert R.contains(1 / u)


def test_s_integers():
    R = parse_ring("Z[1/2]")
    assert R.contains(Fraction(3, 4)) and not R.contains(Fraction(1, 3))
    assert R.is_unit(Fraction(1, 8)) and not R.is_unit(3)
    assert all(height(x) <= 4 for x in R.box(4))


def test_norm_conj_example():
    R = parse_ring("Z[sqrt(2)]")
    n, c = norm_conj(parse_value("sqrt(3)+sqrt(2)", R))
    assert n == -1
    assert str(c) == "w-sqrt(3)"


@given(p=small, q=st.integers(1, 9), r=st.integers(1, 9), D=st.sampled_from([2, 3, 5, 7, 13, 12]))
def test_quadirr_floor_matches_float(p, q, r, D):
    x = QuadIrr.make(p, q, r, D)
    if isinstance(x, QuadIrr):
        f = (p + q * math.sqrt(D)) / r
        if abs(f - round(f)) > 1e-9:
            assert x.floor() == math.floor(f)


@given(p=small, q=small, r=st.integers(1, 6))
def test_nearest_integer_rounds_ties_down(p, q, r):
    x = Fraction(p * 2 + q, 2 * r)
    c = nearest(x, Z)
    rem = x - c
    assert -Fraction(1, 2) < rem <= Fraction(1, 2)


@pytest.mark.parametrize("ring", ["Z[i]", "O(-3)", "O(-7)"])
@given(a=small, b=small, c=st.integers(1, 9))
def test_nearest_lattice_point_is_closest(ring, a, b, c):
    R = parse_ring(ring)
    x = R.elem(Fraction(a, c), Fraction(b, c))
    n = nearest(x, R)
    best = min(((x - g).norm() for g in R.box(max(abs(a), abs(b)) + 2)))
    assert (x - n).norm() == best


@pytest.mark.parametrize("ring", ["Z[i]", "O(-3)", "Z[sqrt(2)]"])
@given(a=small, b=small, c=small, e=small)
def test_re_sign_exact_against_float(ring, a, b, c, e):
    R = parse_ring(ring)
    if not (c or e):
        return
    x = RelQuadIrr.make(R.elem(a, b), R.elem(c, e), 1, R.elem(3, 1), R)
    z = complex(x)
    if abs(z.real) > 1e-6:
        assert re_sign(x) == (1 if z.real > 0 else -1)


def test_relem_pickles():
    import pickle

    R = parse_ring("O(-3)")
    x = R.elem(2, -1)
    assert pickle.loads(pickle.dumps(x)) == x
    assert isinstance(x, RElem)
