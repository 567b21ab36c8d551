"""Degeneracy scans, density certificates and the Pell bijection check."""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .contmat import PCF, Mat2, QuadPoly, T, dprod, e_matrix, quad_coeffs
from .factor import FactorProblem, vbar_solve, fiber_solve, _box, _quotient
from .gauss import default_bound, m_set
from .pcf import membership, proportional
from .pell import FPError, fp_lattice, fp_scan, fp_to_unit, fundamental_pell, unit_to_fp
from .ring import IMAGINARY, INTEGERS, RElem, RingSpec, Z, as_field, height, sort_key

# interior over Z needs |c| > 2 (uniqueness hypothesis); Worpitzky uses >= 2
INTERIOR_STRICT_BOUND = 2
INTERIOR_IMAGINARY_ABS2 = 4
# the factorisation-variety scan uses the convergence bound |a_i| >= 2
WORPITZKY_TERM_BOUND = 2
DEGENERACY_LIMIT = 2
DENSITY_THRESHOLDS = "density is known for N = 1 when k >= 8 and for N = 0 when k >= 9"


class BudgetExceeded(RuntimeError):
    """The estimated work exceeds the configured node or time budget."""


class InsufficientPoints(ValueError):
    """No points were harvested."""


@dataclass
class ScanReport:
    ring: str
    Q: object
    N: int
    k: int
    H: int
    total_points: int
    boundary_points: int
    interior_points: list
    elapsed: float
    points: list = field(default_factory=list, repr=False)

    @property
    def holds(self) -> bool:
        return len(self.interior_points) <= DEGENERACY_LIMIT

    def to_json(self) -> dict:
        return {
            "ring": self.ring,
            "quad": self.Q,
            "N": self.N,
            "k": self.k,
            "H": self.H,
            "total_points": self.total_points,
            "boundary_points": self.boundary_points,
            "interior_points": [str(p) for p in self.interior_points],
            "interior_count": len(self.interior_points),
            "holds": self.holds,
        }


class InteriorTest:
    """All coordinates clear of the boundary set: |c| > 2 over Z, and
    |c| >= 2 with c outside M over imaginary quadratic orders."""

    def __init__(self, spec: RingSpec, mset=None, inclusive: bool = False):
        self.spec = spec
        self.inclusive = inclusive
        if spec.kind == IMAGINARY:
            self.mset = mset if mset is not None else m_set(spec, default_bound(spec))
        elif spec.kind == INTEGERS:
            self.mset = None
        else:
            raise ValueError(f"degeneracy scans run over Z or imaginary quadratic orders, not {spec}")

    def __call__(self, c) -> bool:
        if self.mset is None:
            return abs(c) >= WORPITZKY_TERM_BOUND if self.inclusive else abs(c) > INTERIOR_STRICT_BOUND
        return c.norm() >= INTERIOR_IMAGINARY_ABS2 and c not in self.mset


def _budget(nodes: int, node_limit: int | None):
    if node_limit is not None and nodes > node_limit:
        raise BudgetExceeded(f"estimated {nodes} nodes exceeds limit {node_limit}")


def _check_time(start: float, time_limit: float | None):
    if time_limit is not None and time.perf_counter() - start > time_limit:
        raise BudgetExceeded(f"time limit {time_limit}s exceeded")


_E11 = Mat2(1, 0, 0, 0)


def degeneracy_points(Q: QuadPoly, N: int, k: int, H: int, spec: RingSpec, start=None, time_limit=None, first=None):
    """All points of height <= H on the PCF variety of Q, lexicographic.

    E(p) is affine in the last period term, so the minors of
    [Quad(p); Q] pin it down from the other coordinates.  ``first`` fixes
    the first coordinate (one parallel chunk).
    """
    box = _box(spec, H)
    Qc = Q.coeffs()
    found = []
    heads = box if first is None else (first,)
    prefixes = itertools.product(heads, *([box] * (N + k - 2)))
    for i, prefix in enumerate(prefixes):
        if time_limit is not None and i % 512 == 0:
            _check_time(start, time_limit)
        b, a_head = prefix[:N], prefix[N:]
        P = dprod(b) @ dprod(a_head)
        S = T @ dprod([-x for x in reversed(b)]) @ T if N else Mat2(1, 0, 0, 1)
        q0 = quad_coeffs(P @ T @ S)
        q1 = quad_coeffs(P @ _E11 @ S)
        cands = None
        consts = []
        for i1, i2 in ((0, 1), (0, 2), (1, 2)):
            alpha = q0[i1] * Qc[i2] - q0[i2] * Qc[i1]
            gamma = q1[i1] * Qc[i2] - q1[i2] * Qc[i1]
            if gamma:
                x = _quotient(-alpha, gamma, spec)
                cands = [] if x is None or height(x) > H else [x]
                break
            consts.append(alpha)
        if cands is None:
            cands = list(box) if not any(consts) else []
        for x in cands:
            q = tuple(u + x * v for u, v in zip(q0, q1))
            if proportional(q, Qc):
                found.append(PCF(spec, b, a_head + (x,)))
    return found


def _scan_chunk(args):
    Q, N, k, H, spec, first = args
    return degeneracy_points(Q, N, k, H, spec, first=first)


def naive_degeneracy_points(Q: QuadPoly, N: int, k: int, H: int, spec: RingSpec) -> list:
    """Reference enumeration over the full height box."""
    box = _box(spec, H)
    out = []
    for coords in itertools.product(box, repeat=N + k):
        p = PCF(spec, coords[:N], coords[N:])
        if membership(p, Q):
            out.append(p)
    return out


def degeneracy_scan(
    Q: QuadPoly,
    N: int,
    k: int,
    H: int,
    spec: RingSpec | None = None,
    mset=None,
    node_limit: int | None = None,
    time_limit: float | None = None,
    jobs: int = 1,
) -> ScanReport:
    """Exhaustive scan of the PCF variety of Q at height H with interior count."""
    spec = spec or Q.ring
    if N + k <= 2:
        raise ValueError("degeneracy scans need N + k > 2")
    interior = InteriorTest(spec, mset)
    _budget(len(_box(spec, H)) ** (N + k - 1), node_limit)
    start = time.perf_counter()
    if Q.ring != spec:
        Q = QuadPoly(*Q.coeffs(), ring=spec)
    if jobs > 1:
        tasks = [(Q, N, k, H, spec, x) for x in _box(spec, H)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            points = [p for chunk in pool.map(_scan_chunk, tasks) for p in chunk]
        _check_time(start, time_limit)
    else:
        points = degeneracy_points(Q, N, k, H, spec, start, time_limit)
    inner = [p for p in points if all(interior(c) for c in p.coords())]
    return ScanReport(
        str(spec), Q.to_json(), N, k, H, len(points), len(points) - len(inner), inner,
        time.perf_counter() - start, points,
    )


def vbar_degeneracy_scan(
    A: Mat2,
    N: int,
    k: int,
    H: int,
    spec: RingSpec = Z,
    mset=None,
    node_limit: int | None = None,
    jobs: int = 1,
) -> ScanReport:
    """Solutions of Vbar_{N,k}(A) with the interior test on period coordinates."""
    if N + k <= 3:
        raise ValueError("this scan needs N + k > 3")
    interior = InteriorTest(spec, mset, inclusive=True)
    _budget(len(_box(spec, H)) ** max(N + k - 2, 1), node_limit)
    start = time.perf_counter()
    sols = vbar_solve(FactorProblem(A, N, k, H, spec), jobs=jobs)
    inner = [s for s in sols if all(interior(c) for c in s.x)]
    return ScanReport(
        str(spec), A.to_json(), N, k, H, len(sols), len(sols) - len(inner), inner,
        time.perf_counter() - start, sols,
    )


# ---------------------------------------------------------------------------
# Density certificates
# ---------------------------------------------------------------------------


@dataclass
class DensityCertificate:
    points: list
    degree: int
    monomial_count: int
    rank: int
    certified: bool
    fibers: int = 0
    note: str = DENSITY_THRESHOLDS

    def to_json(self) -> dict:
        return {
            "points": len(self.points),
            "fibers": self.fibers,
            "degree": self.degree,
            "monomial_count": self.monomial_count,
            "rank": self.rank,
            "certified": self.certified,
            "note": self.note,
        }


def monomials(nvars: int, degree: int) -> list[tuple]:
    """Exponent vectors of total degree <= degree, graded lexicographic."""
    out = []
    for deg in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), deg):
            exp = [0] * nvars
            for v in combo:
                exp[v] += 1
            out.append(tuple(exp))
    return out


def _field(x, spec: RingSpec):
    return as_field(x, spec) if spec.is_quadratic else Fraction(x)


def evaluation_matrix(points: list, degree: int, spec: RingSpec) -> list[list]:
    mons = monomials(len(points[0]), degree)
    rows = []
    for p in points:
        vals = [_field(x, spec) for x in p]
        row = []
        for exp in mons:
            v = _field(1, spec)
            for x, e in zip(vals, exp):
                if e:
                    v = v * x**e
            row.append(v)
        rows.append(row)
    return rows


def exact_rank(rows: list[list]) -> int:
    """Rank by Gaussian elimination over the (exact) field of the entries."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = 1 / m[rank][col]
        for i in range(rank + 1, len(m)):
            if m[i][col]:
                f = m[i][col] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        if rank == len(m) or rank == ncols:
            break
    return rank


def certify_points(points: list, degree: int, spec: RingSpec, fibers: int = 0) -> DensityCertificate:
    if not points:
        raise InsufficientPoints("no points to certify")
    rows = evaluation_matrix(points, degree, spec)
    ncols = len(rows[0])
    rank = exact_rank(rows)
    return DensityCertificate(points, degree, ncols, rank, rank == ncols, fibers)


def harvest(
    Q: QuadPoly,
    N: int,
    k: int,
    spec: RingSpec | None = None,
    fiber_count: int = 10,
    H: int = 6,
    extra_unit_gens: Iterable | None = None,
    jobs: int = 1,
) -> list[list]:
    """Fibre solutions (as coordinate tuples) over the lowest FP points of
    the unit group, one list per fibre."""
    spec = spec or Q.ring
    if Q.ring != spec:
        Q = QuadPoly(*Q.coeffs(), ring=spec)
    fps = fp_lattice(Q, k, spec, fiber_count, extra_unit_gens)
    return [[p.coords() for p in fiber_solve(P, Q, N, k, H, jobs=jobs)] for P in fps]


def harvest_and_certify(
    Q: QuadPoly,
    N: int,
    k: int,
    spec: RingSpec | None = None,
    fiber_count: int = 10,
    H: int = 6,
    degree: int = 1,
    extra_unit_gens: Iterable | None = None,
    jobs: int = 1,
) -> DensityCertificate:
    """Harvest fibre points and test whether any polynomial of degree
    <= ``degree`` vanishes on all of them."""
    spec = spec or Q.ring
    fibers = harvest(Q, N, k, spec, fiber_count, H, extra_unit_gens, jobs)
    points = [p for f in fibers for p in f]
    return certify_points(points, degree, spec, sum(1 for f in fibers if f))


# ---------------------------------------------------------------------------
# Pell bijection
# ---------------------------------------------------------------------------


@dataclass
class PellCheck:
    alpha: int
    k: int
    H: int
    fp_points: list
    units: list
    ok: bool

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "k": self.k,
            "H": self.H,
            "fp_points": len(self.fp_points),
            "units": len(self.units),
            "bijection": self.ok,
        }


def units_with_norm(alpha: int, k: int, H: int) -> list[tuple[int, int]]:
    """Units d + c*sqrt(alpha) of norm (-1)^k, as (c, d), with image height <= H.

    Generated as +-eps^m for m in Z from the fundamental solution.
    """
    x1, y1, n1 = fundamental_pell(alpha)
    want = (-1) ** k
    out = set()
    c, d, n = 0, 1, 1
    while abs(c) * alpha <= H or abs(c) <= 1:
        if n == want:
            # eps^m, eps^-m = n * conj(eps^m), and their negatives
            for cc, dd in ((c, d), (-n * c, n * d)):
                for s in (1, -1):
                    u = (s * cc, s * dd)
                    if max(abs(u[0]) * alpha, abs(u[1])) <= H:
                        out.add(u)
        c, d, n = c * y1 + d * x1, d * y1 + alpha * c * x1, n * n1
        if abs(c) > H and abs(d) > H:
            break
    return sorted(out)


def pell_bijection_report(alpha: int, k: int, H: int) -> PellCheck:
    if alpha < 2 or math.isqrt(alpha) ** 2 == alpha:
        raise ValueError("alpha must be a nonsquare >= 2")
    Q = QuadPoly(1, 0, -alpha)
    points = fp_scan(Q, k, H)
    units = units_with_norm(alpha, k, H)
    ok = True
    images = []
    for c, d in units:
        try:
            P = unit_to_fp(c, d, Q, k)
        except FPError:
            ok = False
            continue
        images.append(P)
        if fp_to_unit(P, Q) != (c, d):
            ok = False
    back = []
    for P in points:
        u = fp_to_unit(P, Q)
        back.append(u)
        if unit_to_fp(*u, Q, k) != P:
            ok = False
    ok = ok and set(images) == set(points) and len(set(images)) == len(units) and set(back) == set(units)
    return PellCheck(alpha, k, H, points, units, ok)


def pell_bijection_check(alpha: int, k: int, H: int) -> bool:
    return pell_bijection_report(alpha, k, H).ok


def sorted_points(points: list) -> list:
    return sorted(points, key=lambda p: [sort_key(x) for x in p])


__all__ = [
    "BudgetExceeded",
    "InsufficientPoints",
    "ScanReport",
    "DensityCertificate",
    "PellCheck",
    "degeneracy_scan",
    "naive_degeneracy_points",
    "vbar_degeneracy_scan",
    "harvest",
    "harvest_and_certify",
    "certify_points",
    "exact_rank",
    "monomials",
    "pell_bijection_check",
    "pell_bijection_report",
    "RElem",
    "e_matrix",
]
