from __future__ import annotations

import random
from fractions import Fraction

import pytest

from pcfvar.contmat import PCF
from pcfvar.gauss import (
    GaussExpansion,
    PreconditionError,
    fundamental_cell,
    gauss_uniqueness_probe,
    m_set,
    nicf_expand_gauss,
)
from pcfvar.literals import parse_ring, parse_value
from pcfvar.pcf import exact_value
from pcfvar.ring import RElem, nearest

GI = parse_ring("Z[i]")


def test_cells():
    sq = fundamental_cell(GI)
    assert sq.rho2 == Fraction(1, 2) and len(sq.vertices) == 4
    hexa = fundamental_cell(parse_ring("O(-3)"))
    assert hexa.rho2 == Fraction(1, 3) and len(hexa.vertices) == 6
    rect = fundamental_cell(parse_ring("Z[sqrt(-2)]"))
    assert rect.rho2 == Fraction(3, 4) and len(rect.vertices) == 4


@pytest.mark.parametrize("ring", ["Z[i]", "O(-3)", "Z[sqrt(-2)]", "O(-7)"])
def test_cell_matches_nearest_point_grid_oracle(ring):
    R = parse_ring(ring)
    cell = fundamental_cell(R)
    rng = random.Random(3)
    box = R.box(3)
    for _ in range(300):
        z = R.elem(Fraction(rng.randint(-60, 60), 40), Fraction(rng.randint(-60, 60), 40))
        closest = min((z - g).norm() for g in box)
        assert cell.contains(z) == ((z.norm()) == closest)


@pytest.mark.parametrize("ring", ["Z[i]", "O(-3)", "O(-7)"])
def test_tiling_unique_after_tie_break(ring):
    R = parse_ring(ring)
    cell = fundamental_cell(R)
    rng = random.Random(5)
    for _ in range(2000):
        z = R.elem(Fraction(rng.randint(-400, 400), 97), Fraction(rng.randint(-400, 400), 97))
        c = nearest(z, R)
        assert cell.contains(z - c)


def test_gaussian_m_set():
    M = m_set(GI, 6)
    i = GI.omega
    assert {GI.coerce(0), GI.one, -GI.one, i, -i, 1 + i, 1 - i, -1 + i, -1 - i} <= M
    assert M == frozenset(c for c in GI.box(3) if c.norm() <= 5)
    assert all(c.norm() < 16 for c in M)


def test_m_set_monotone_and_precondition():
    assert m_set(GI, 6) <= m_set(GI, 8)
    with pytest.raises(PreconditionError):
        m_set(GI, 1)


def test_gauss_examples():
    e = nicf_expand_gauss(parse_value("sqrt(2)", GI), GI)
    assert (e.preperiod, e.period) == ((GI.one,), (GI.coerce(2),))
    assert not e.avoids_m
    assert gauss_uniqueness_probe(e, GI, require_avoid_m=False)
    with pytest.raises(PreconditionError):
        gauss_uniqueness_probe(e, GI)
    f = nicf_expand_gauss(GI.elem(3, 2), GI)
    assert f.terminated and f.preperiod == (GI.elem(3, 2),)


@pytest.mark.parametrize("ring", ["Z[i]", "O(-3)"])
def test_random_round_trips_outside_m(ring):
    R = parse_ring(ring)
    M = m_set(R, 6)
    rng = random.Random(9)
    done = 0
    while done < 15:
        terms = [R.elem(rng.randint(-5, 5), rng.randint(-5, 5)) for _ in range(rng.randint(1, 3))]
        if any(t.norm() < 16 or t in M for t in terms):
            continue
        value = exact_value(PCF(R, (), terms))
        e = nicf_expand_gauss(value, R, mset=M)
        assert e.status == "periodic" and e.avoids_m
        assert gauss_uniqueness_probe(e, R, mset=M)
        assert e.canonical() == GaussExpansion((), tuple(terms), "periodic", True).canonical()
        done += 1


def test_suffix_inverses_land_in_open_cell():
    cell = fundamental_cell(GI)
    value = exact_value(PCF(GI, (), (GI.elem(4, 1), GI.elem(-3, 4))))
    x = value
    for _ in range(6):
        c = nearest(x, GI)
        x = 1 / (x - c)
        assert cell.contains(1 / x, strict=True)
