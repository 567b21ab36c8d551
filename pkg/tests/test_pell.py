from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from pcfvar.contmat import QuadPoly
from pcfvar.literals import parse_quad, parse_ring
from pcfvar.pell import (
    FPError,
    FPPoint,
    conic_to_fp,
    fp_lattice,
    fp_scan,
    fp_stream,
    fp_to_unit,
    fundamental_pell,
    r_beta,
    unit_inverse,
    unit_mul,
    unit_norm,
    unit_to_fp,
)
from pcfvar.ring import QuadIrr

NONSQUARES = [a for a in range(2, 60) if math.isqrt(a) ** 2 != a]


def brute_pell(alpha, limit=10**4):
    """Smallest y >= 1 with x^2 - alpha y^2 = +-1, as (y, x, norm)."""
    for y in range(1, limit):
        for n in (-1, 1):
            x2 = alpha * y * y + n
            x = math.isqrt(x2)
            if x * x == x2:
                return (y, x, n)
    raise AssertionError("no solution below limit")


@pytest.mark.parametrize("alpha", NONSQUARES)
def test_fundamental_pell_matches_brute_force(alpha):
    assert fundamental_pell(alpha) == brute_pell(alpha)


def test_fundamental_pell_examples():
    assert fundamental_pell(2) == (1, 1, -1)
    assert fundamental_pell(3) == (1, 2, 1)
    assert fundamental_pell(13) == (5, 18, -1)


def test_r_beta_examples():
    two = r_beta(QuadPoly(1, 0, -2))
    assert str(two.theta) == "sqrt(2)"
    R = parse_ring("Z[sqrt(2)]")
    three = r_beta(parse_quad("1,0,-3", R))
    assert str(three.theta) == "sqrt(3)"
    seven = r_beta(QuadPoly(2, -2, -3))
    assert seven.theta == QuadIrr.make(1, 1, 1, 7)


def test_unit_to_fp_examples():
    Q = QuadPoly(1, 0, -2)
    assert unit_to_fp(1, 1, Q, 1) == FPPoint(1, 2, 1, 1, 1)
    assert unit_to_fp(0, 1, Q, 2) == FPPoint(1, 0, 0, 1, 0)
    assert fp_to_unit(FPPoint(1, 2, 1, 1, 1), Q) == (1, 1)
    assert fp_to_unit(FPPoint(1, 0, 0, 1, 0), Q) == (0, 1)
    R = parse_ring("Z[sqrt(2)]")
    w = R.omega
    P = unit_to_fp(R.one, w, parse_quad("1,0,-3", R), 1)
    assert P.entries() == (w, 3, 1, w)
    with pytest.raises(FPError):
        fp_to_unit(FPPoint(7, 10, 5, 7, 0), Q)


def test_fp_stream_examples():
    Q = QuadPoly(1, 0, -2)
    assert [P.conic() for P in fp_stream(Q, 1, count=3)] == [(1, 1), (5, 7), (29, 41)]
    assert fp_stream(QuadPoly(1, 0, -3), 1, count=3) == []
    R = parse_ring("Z[sqrt(2)]")
    pts = fp_stream(parse_quad("1,0,-3", R), 1, R, 3, ["sqrt(3)+sqrt(2)"])
    assert pts and all(P.satisfies(parse_quad("1,0,-3", R)) for P in pts)


@pytest.mark.parametrize("alpha", [2, 3, 5, 6, 7, 13])
@pytest.mark.parametrize("k", [1, 2])
def test_scan_against_conic_brute_force(alpha, k):
    H = 400
    Q = QuadPoly(1, 0, -alpha)
    want = set()
    for x in range(-H, H + 1):
        for y in range(-H, H + 1):
            if y * y - alpha * x * x == (-1) ** k and max(abs(y), abs(alpha * x)) <= H:
                want.add(conic_to_fp(x, y, alpha, k))
    assert set(fp_scan(Q, k, H)) == want


@pytest.mark.parametrize("q", ["1,0,-2", "1,0,-5", "2,-2,-3", "1,-1,-1", "3,1,-1"])
def test_round_trips_and_eigenvalues(q):
    Q = parse_quad(q)
    beta = Q.roots()[0]
    for k in (1, 2):
        for P in fp_stream(Q, k, count=5):
            c, d = fp_to_unit(P, Q)
            assert unit_to_fp(c, d, Q, k) == P
            # (beta, 1) is an eigenvector with eigenvalue c*beta + d
            a, b, pc, pd = P.entries()
            lam = c * beta + d
            assert a * beta + b == lam * beta
            assert pc * beta + pd == lam


@given(m=st.integers(0, 6), n=st.integers(0, 6))
def test_unit_group_law(m, n):
    Q = QuadPoly(1, -1, -1)
    g = (1, 0)  # the golden ratio itself
    u = (0, 1)
    for _ in range(m):
        u = unit_mul(u, g, Q)
    v = (0, 1)
    for _ in range(n):
        v = unit_mul(v, unit_inverse(g, Q), Q)
    w = unit_mul(u, v, Q)
    assert unit_norm(*w, Q) == (-1) ** (m + n)


def test_lattice_over_relative_units():
    R = parse_ring("Z[sqrt(2)]")
    Q = parse_quad("1,0,-3", R)
    gens = ["sqrt(3)+sqrt(2)", "2+sqrt(3)"]
    for k in (1, 2):
        pts = fp_lattice(Q, k, R, 12, gens)
        assert len(pts) == 12 and len(set(pts)) == 12
        assert all(P.satisfies(Q) and P.matrix().det() == (-1) ** k for P in pts)
        heights = [P.height() for P in pts]
        assert heights == sorted(heights)

