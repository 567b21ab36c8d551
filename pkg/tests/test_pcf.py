from __future__ import annotations

import mpmath
import pytest
from hypothesis import given, strategies as st

from pcfvar.contmat import PCF, QuadPoly, dprod
from pcfvar.literals import parse_pcf, parse_ring, parse_value
from pcfvar.pcf import NonConvergent, evaluate, exact_value, membership, worpitzky_check
from pcfvar.ring import Z

big_terms = st.integers(2, 9).flatmap(lambda n: st.sampled_from([n, -n]))


def convergent_oracle(b, a, count=400):
    """Backward evaluation of a long truncation, in mpmath."""
    seq = list(b) + list(a) * count
    with mpmath.workdps(50):
        x = mpmath.mpf(seq[-1])
        for c in reversed(seq[:-1]):
            x = c + 1 / x
        return x


def test_worpitzky_examples():
    assert worpitzky_check([3, 3, 3])
    assert not worpitzky_check([1, 2])
    assert worpitzky_check([2, 2, 2])


@pytest.mark.parametrize(
    "text,value",
    [("[; 1]", "(1+sqrt(5))/2"), ("[1; 2]", "sqrt(2)"), ("[2; -4,4]", "sqrt(3)"), ("[; 2,-2]", "1")],
)
def test_exact_values(text, value):
    p = parse_pcf(text)
    v = evaluate(p)
    assert v.converged
    assert exact_value(p) == parse_value(value)
    assert v.contains(v.exact)


@given(b=st.lists(st.integers(-9, 9), max_size=2), a=st.lists(big_terms, min_size=1, max_size=4))
def test_worpitzky_inputs_converge_to_oracle(b, a):
    v = evaluate(PCF(Z, b, a))
    assert v.converged and v.radius < 1e-20
    if abs(dprod(a).trace()) == 2:
        # parabolic tails converge only like 1/n; check the exact double root
        assert v.contains(v.exact)
        return
    with mpmath.workdps(50):
        assert abs(v.numeric - convergent_oracle(b, a)) < 1e-15


@given(a=st.lists(big_terms, min_size=1, max_size=3))
def test_radius_shrinks_geometrically(a):
    v = evaluate(PCF(Z, (), a))
    radii = [float(r) for r in v.radii]
    assert len(radii) > 1
    assert all(x >= y for x, y in zip(radii, radii[1:]))


def test_membership_examples():
    assert membership(parse_pcf("[1; 2]"), QuadPoly(1, 0, -2))
    assert not membership(parse_pcf("[; 2]"), QuadPoly(1, 0, -2))
    assert membership(parse_pcf("[; 1]"), QuadPoly(2, -2, -2))


def test_gaussian_value_and_embedding():
    R = parse_ring("Z[i]")
    p = parse_pcf("[w; 3]", R)
    v = evaluate(p)
    assert v.converged and v.contains(v.exact)
    R2 = parse_ring("Z[sqrt(2)]")
    p2 = parse_pcf("[; 2+w]", R2)
    v0, v1 = evaluate(p2, 0), evaluate(p2, 1)
    assert v0.converged and v1.converged
    assert v0.contains(v0.exact, 0) and v1.contains(v1.exact, 1)


def test_elliptic_period_does_not_converge():
    # D(1)D(-1) has trace 0: the Mobius map has order 4
    with pytest.raises(NonConvergent):
        exact_value(parse_pcf("[; 1,-1]"))
