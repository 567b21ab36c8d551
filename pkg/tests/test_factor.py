from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from pcfvar.contmat import IDENTITY, PCF, Mat2, QuadPoly, T, dmat, e_matrix
from pcfvar.factor import (
    FactorProblem,
    FactorSolution,
    fiber_solve,
    naive_vbar_solve,
    phi_inverse,
    phi_iso,
    solve_word,
    vbar_solve,
    word_matrix,
)
from pcfvar.literals import parse_ring
from pcfvar.pcf import membership
from pcfvar.pell import FPPoint, fp_stream
from pcfvar.ring import Z


def test_vbar_examples():
    assert [s.x for s in vbar_solve(FactorProblem(dmat(5) @ T, 0, 1, 9))] == [(5,)]
    sols = vbar_solve(FactorProblem(Mat2(1, 2, 1, 1) @ T, 1, 1, 3))
    assert FactorSolution((1,), (2,)) in sols
    assert [str(s) for s in vbar_solve(FactorProblem(IDENTITY, 0, 2, 5))] == ["(0,0)"]


def test_problem_validation():
    with pytest.raises(ValueError):
        FactorProblem(Mat2(1, 0, 0, 2), 0, 2, 5)
    with pytest.raises(ValueError):
        FactorProblem(IDENTITY, 2, 2, 5)


def test_phi_examples():
    assert phi_iso(FactorSolution((1,), (2,))).x == (1, 1)
    assert phi_iso(FactorSolution((0,), (3, 4))).x == (0, 3, 4)


@given(b=st.integers(-9, 9), a=st.lists(st.integers(-9, 9), min_size=1, max_size=4))
def test_phi_round_trip_and_word(b, a):
    sol = FactorSolution((b,), tuple(a))
    z = phi_iso(sol)
    assert phi_inverse(z) == sol
    # both sides of the isomorphism factor the same matrix A
    assert word_matrix(sol) == word_matrix(z)


@pytest.mark.parametrize("N,k,H", [(0, 1, 8), (0, 2, 8), (0, 3, 8), (1, 1, 8), (1, 2, 8), (1, 3, 4)])
def test_completeness_over_z(N, k, H):
    rng = random.Random(N * 10 + k)
    for _ in range(5):
        sol = FactorSolution(tuple(rng.randint(-H, H) for _ in range(N)), tuple(rng.randint(-H, H) for _ in range(k)))
        prob = FactorProblem(word_matrix(sol), N, k, H)
        got = vbar_solve(prob)
        assert sol in got
        assert got == naive_vbar_solve(prob)


@pytest.mark.parametrize("N,k", [(0, 2), (0, 3), (1, 2)])
def test_completeness_over_gaussian_integers(N, k):
    R = parse_ring("Z[i]")
    rng = random.Random(k)
    H = 2
    for _ in range(3):
        el = lambda: R.elem(rng.randint(-H, H), rng.randint(-H, H))
        sol = FactorSolution(tuple(el() for _ in range(N)), tuple(el() for _ in range(k)))
        prob = FactorProblem(word_matrix(sol), N, k, H, R)
        got = vbar_solve(prob)
        assert sol in got
        assert got == naive_vbar_solve(prob)


def test_seeding_and_jobs_do_not_change_results():
    sol = FactorSolution((), (3, -4, 2, 5))
    prob = FactorProblem(word_matrix(sol), 0, 4, 6)
    base = vbar_solve(prob, seeded=False)
    assert vbar_solve(prob) == base
    assert vbar_solve(prob, jobs=3) == base
    assert sol in base


def test_solve_word_rejects_wrong_determinant():
    assert solve_word(Mat2(3, 1, 1, 1), 2, 5) == []


def test_fiber_examples():
    Q = QuadPoly(1, 0, -2)
    assert PCF(Z, (1,), (2,)) in fiber_solve(FPPoint(1, 2, 1, 1, 1), Q, 1, 1, 3)
    assert fiber_solve(FPPoint(1, 0, 0, 1, 0), Q, 0, 2, 5) == []
    sols = fiber_solve(FPPoint(7, 10, 5, 7, 1), Q, 1, 1, 12)
    brute = [
        PCF(Z, (y,), (x,))
        for y in range(-12, 13)
        for x in range(-12, 13)
        if e_matrix(PCF(Z, (y,), (x,))) == Mat2(7, 10, 5, 7)
    ]
    assert sols == brute


def test_fiber_outputs_project_to_their_point():
    Q = QuadPoly(1, -1, -1)
    for k, N in ((2, 0), (2, 1), (3, 0), (3, 1)):
        for P in fp_stream(Q, k, count=6):
            for p in fiber_solve(P, Q, N, k, 6):
                assert e_matrix(p) == P.matrix() and membership(p, Q)
