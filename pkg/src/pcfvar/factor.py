"""Bounded-height factorisation of matrices into continuant words.

For A in SL2(R) the variety Vbar_{N,k}(A) consists of the tuples with

    A = D(y_1)..D(y_N) D(x_1)..D(x_k) t D(-y_N)..D(-y_1) t^{k+1}.

With N = 0 this is D(x_1)..D(x_k) = A t^k.  With N = 1 it collapses to
D(y) D(x_1)..D(x_{k-1}) D(x_k - y) = A t^{k+1}, i.e. a point of
Vbar_{0,k+1}(A) after the linear change of coordinates ``phi``.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

from .contmat import PCF, Mat2, QuadPoly, T, dprod, e_matrix, t_power
from .pcf import membership
from .pell import FPPoint
from .ring import RElem, RingSpec, Z, as_field, height, sort_key


@dataclass(frozen=True)
class FactorProblem:
    A: Mat2
    N: int
    k: int
    H: int
    ring: RingSpec = Z

    def __post_init__(self):
        if self.N not in (0, 1):
            raise ValueError("N must be 0 or 1")
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.A.det() != 1:
            raise ValueError(f"det A = {self.A.det()}, expected 1")


@dataclass(frozen=True)
class FactorSolution:
    y: tuple
    x: tuple

    def coords(self) -> tuple:
        return self.y + self.x

    def to_pcf(self, ring: RingSpec = Z) -> PCF:
        return PCF(ring, self.y, self.x)

    def key(self):
        return [sort_key(v) for v in self.coords()]

    def __str__(self):
        from .ring import format_elem

        return "(" + ",".join(format_elem(v) for v in self.coords()) + ")"


def word_matrix(sol: FactorSolution) -> Mat2:
    """The right-hand side of the defining equation for ``sol``."""
    k = len(sol.x)
    m = dprod(sol.y) @ dprod(sol.x) @ T @ dprod([-v for v in reversed(sol.y)])
    return m @ t_power(k + 1)


@lru_cache(maxsize=64)
def _box(ring: RingSpec, H: int) -> tuple:
    return tuple(ring.box(H))


def _quotient(num, den, ring: RingSpec):
    """num/den when it lies in ring, else None."""
    if isinstance(num, int) and isinstance(den, int):
        q, r = divmod(num, den)
        return None if r else q
    q = as_field(num, ring) / as_field(den, ring)
    q = ring.coerce(q)
    return q if ring.contains(q) else None


def _seed_order(cands, M: Mat2):
    """Candidates nearest the continuant quotient M11/M21 first."""
    if not M.e21:
        return cands
    ring = _ring_of(M)
    target = complex(as_field(M.e11, ring)) / complex(as_field(M.e21, ring))
    return sorted(cands, key=lambda x: abs(complex(x) - target))


def _ring_of(M: Mat2) -> RingSpec:
    for x in M.entries():
        if isinstance(x, RElem):
            return x.ring
    return Z


class _Solver:
    def __init__(self, ring: RingSpec, H: int, last_free: bool, seeded: bool):
        self.ring = ring
        self.H = H
        self.last_free = last_free
        self.seeded = seeded
        self.box = _box(ring, H)
        self.nodes = 0

    def ok(self, x, last: bool) -> bool:
        if not self.ring.contains(x):
            return False
        return (last and self.last_free) or height(x) <= self.H

    def solve(self, M: Mat2, k: int):
        self.nodes += 1
        # determinant ladder: D(x_1)..D(x_k) has determinant (-1)^k
        assert M.det() == (-1) ** k, "residual determinant off the ladder"
        ring = self.ring
        if k == 1:
            if M.e12 == 1 and M.e21 == 1 and M.e22 == 0:
                x = ring.coerce(M.e11)
                if self.ok(x, True):
                    yield (x,)
            return
        if k == 2:
            # D(x)D(y) = [[xy+1, x], [y, 1]]
            if M.e22 != 1:
                return
            x, y = ring.coerce(M.e12), ring.coerce(M.e21)
            if M.e11 == x * y + 1 and self.ok(x, False) and self.ok(y, True):
                yield (x, y)
            return
        if k == 3:
            # the residual after peeling x must have a 1 in its corner
            if M.e22:
                q = _quotient(M.e12 - 1, M.e22, ring)
                cands = () if q is None or not self.ok(q, False) else (q,)
            elif M.e12 == 1:
                cands = self.box
            else:
                return
        else:
            cands = self.box
        if self.seeded:
            cands = _seed_order(cands, M)
        for x in cands:
            R = Mat2(M.e21, M.e22, M.e11 - x * M.e21, M.e12 - x * M.e22)
            for rest in self.solve(R, k - 1):
                yield (x,) + rest


def _branch(args):
    M, k, ring, H, last_free, x = args
    solver = _Solver(ring, H, last_free, True)
    R = Mat2(M.e21, M.e22, M.e11 - x * M.e21, M.e12 - x * M.e22)
    return [(x,) + rest for rest in solver.solve(R, k - 1)]


def solve_word(M: Mat2, k: int, H: int, ring: RingSpec = Z, last_free: bool = False, jobs: int = 1, seeded: bool = True):
    """All (x_1..x_k) of height <= H with D(x_1)..D(x_k) = M, sorted.

    With ``last_free`` the final coordinate is not height-bounded (it is
    always determined by the others).
    """
    if M.det() != (-1) ** k:
        return []
    if jobs > 1 and k >= 4:
        tasks = [(M, k, ring, H, last_free, x) for x in _box(ring, H)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            found = [s for chunk in pool.map(_branch, tasks, chunksize=8) for s in chunk]
    else:
        found = list(_Solver(ring, H, last_free, seeded).solve(M, k))
    return sorted(set(found), key=lambda s: [sort_key(v) for v in s])


def vbar_solve(prob: FactorProblem, jobs: int = 1, seeded: bool = True) -> list[FactorSolution]:
    """Every point of Vbar_{N,k}(A) with all coordinates of height <= H."""
    A, k, H, ring = prob.A, prob.k, prob.H, prob.ring
    if prob.N == 0:
        M = A @ t_power(k)
        return [FactorSolution((), s) for s in solve_word(M, k, H, ring, jobs=jobs, seeded=seeded)]
    M = A @ t_power(k + 1)
    out = []
    for z in solve_word(M, k + 1, H, ring, last_free=True, jobs=jobs, seeded=seeded):
        sol = phi_inverse(FactorSolution((), z))
        if height(sol.x[-1]) <= H:
            out.append(sol)
    return sorted(out, key=FactorSolution.key)


def naive_vbar_solve(prob: FactorProblem) -> list[FactorSolution]:
    """Reference sweep over the whole height box."""
    box = _box(prob.ring, prob.H)
    out = []
    for coords in itertools.product(box, repeat=prob.N + prob.k):
        sol = FactorSolution(tuple(coords[: prob.N]), tuple(coords[prob.N :]))
        if word_matrix(sol) == prob.A:
            out.append(sol)
    return sorted(out, key=FactorSolution.key)


def phi_iso(sol: FactorSolution) -> FactorSolution:
    """(b, a_1..a_k) -> (b, a_1..a_{k-1}, a_k - b)."""
    if len(sol.y) != 1:
        raise ValueError("phi applies to solutions with N = 1")
    b = sol.y[0]
    return FactorSolution((), (b,) + sol.x[:-1] + (sol.x[-1] - b,))


def phi_inverse(sol: FactorSolution) -> FactorSolution:
    if sol.y or len(sol.x) < 2:
        raise ValueError("phi inverse applies to N = 0 solutions of length >= 2")
    z = sol.x
    return FactorSolution((z[0],), z[1:-1] + (z[-1] + z[0],))


def fiber_solve(P: FPPoint, Q: QuadPoly, N: int, k: int, H: int, jobs: int = 1) -> list[PCF]:
    """PCF points p of type (N, k) over Q with E(p) equal to P's matrix."""
    ring = Q.ring
    target = P.matrix()
    A = target @ t_power(k)
    out = []
    for sol in vbar_solve(FactorProblem(A, N, k, H, ring), jobs=jobs):
        p = sol.to_pcf(ring)
        if e_matrix(p) != target:
            raise AssertionError(f"fiber point {sol} does not reproduce {P}")
        if membership(p, Q):
            out.append(p)
    return out


__all__ = [
    "FactorProblem",
    "FactorSolution",
    "vbar_solve",
    "naive_vbar_solve",
    "phi_iso",
    "phi_inverse",
    "fiber_solve",
    "solve_word",
    "word_matrix",
]
