"""The acceptance battery: one check per criterion, each returning (ok, detail)."""
from __future__ import annotations

import random
import time
import timeit
from dataclasses import dataclass
from typing import Callable

from .contmat import PCF, Mat2, QuadPoly, e_matrix, eigen_check, quad_poly
from .experiment import certify_points, degeneracy_scan, harvest, pell_bijection_report
from .factor import FactorProblem, FactorSolution, naive_vbar_solve, phi_iso, vbar_solve, word_matrix, fiber_solve
from .gauss import m_set
from .hurwitz import NICFExpansion, hurwitz_valid, uniqueness_probe
from .literals import parse_quad, parse_ring, parse_value
from .pcf import evaluate, membership
from .pell import fp_lattice, fp_stream
from .ring import RingSpec, Z, height

SEED = 20240501
DENSITY_UNIT_GENERATORS = ["sqrt(3)+sqrt(2)", "2+sqrt(3)"]


@dataclass
class Result:
    number: int
    name: str
    ok: bool
    detail: str
    elapsed: float

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} criterion {self.number:>2}: {self.name} ({self.detail}; {self.elapsed:.2f}s)"

    def to_json(self) -> dict:
        return {"criterion": self.number, "name": self.name, "ok": self.ok, "detail": self.detail, "elapsed": round(self.elapsed, 3)}


def _random_elem(rng: random.Random, spec: RingSpec, bound: int):
    if spec.is_quadratic:
        return spec.elem(rng.randint(-bound, bound), rng.randint(-bound, bound))
    return rng.randint(-bound, bound)


def check_e_matrix() -> tuple[bool, str]:
    p = PCF(Z, (1,), (2,))
    ok = e_matrix(p) == Mat2(1, 2, 1, 1) and quad_poly(p).coeffs() == (1, 0, -2)
    ok = ok and eigen_check(p, parse_value("sqrt(2)"))
    best = min(timeit.repeat(lambda: (e_matrix(p), quad_poly(p)), number=100, repeat=5)) / 100
    return ok and best < 1e-3, f"E=[[1,2],[1,1]], Quad=x^2-2, {best * 1e6:.0f}us per call"


def check_determinant_law(count: int = 1000) -> tuple[bool, str]:
    rng = random.Random(SEED)
    failures = 0
    rings = [Z, parse_ring("Z[i]"), parse_ring("Z[sqrt(2)]")]
    for spec in rings:
        for _ in range(count):
            N, k = rng.randint(0, 3), rng.randint(1, 5)
            p = PCF(spec, [_random_elem(rng, spec, 9) for _ in range(N)], [_random_elem(rng, spec, 9) for _ in range(k)])
            if e_matrix(p).det() != (-1) ** k:
                failures += 1
    return failures == 0, f"{count} PCFs per ring over {len(rings)} rings, {failures} failures"


def random_nicf(rng: random.Random) -> NICFExpansion:
    pre = [rng.randint(-9, 9)] + [rng.choice((-1, 1)) * rng.randint(3, 9) for _ in range(rng.randint(0, 3))]
    per = [rng.choice((-1, 1)) * rng.randint(3, 9) for _ in range(rng.randint(1, 5))]
    return NICFExpansion(tuple(pre), tuple(per))


def check_hurwitz_round_trip(count: int = 200) -> tuple[bool, str]:
    rng = random.Random(SEED)
    failures = 0
    start = time.perf_counter()
    for _ in range(count):
        e = random_nicf(rng)
        if not (hurwitz_valid(e) and uniqueness_probe(e)):
            failures += 1
    elapsed = time.perf_counter() - start
    return failures == 0 and elapsed < 10, f"{count} expansions, {failures} failures"


def check_worpitzky(count: int = 100) -> tuple[bool, str]:
    rng = random.Random(SEED)
    failures = 0
    worst = 0.0
    for _ in range(count):
        per = [rng.choice((-1, 1)) * rng.randint(2, 9) for _ in range(rng.randint(1, 4))]
        pre = [rng.randint(-9, 9) for _ in range(rng.randint(0, 2))]
        v = evaluate(PCF(Z, pre, per), max_periods=1000)
        if not (v.converged and v.radius < 1e-20 and v.periods <= 1000):
            failures += 1
        worst = max(worst, float(v.radius))
    return failures == 0, f"{count} sequences, {failures} failures, worst radius {worst:.1e}"


DEGENERACY_QUADS = ["1,0,-2", "1,0,-3", "1,-1,-1"]
DEGENERACY_TYPES = [(1, 2), (0, 3), (1, 3)]


def check_degeneracy_z(H: int = 8) -> tuple[bool, str]:
    parts, ok = [], True
    for q in DEGENERACY_QUADS:
        for N, k in DEGENERACY_TYPES:
            r = degeneracy_scan(parse_quad(q), N, k, H, Z)
            ok = ok and r.holds and r.elapsed < 60
            parts.append(f"{q}/{N},{k}:{r.total_points}/{len(r.interior_points)}")
    return ok, "total/interior " + " ".join(parts)


def check_degeneracy_gaussian() -> tuple[bool, str]:
    spec = parse_ring("Z[i]")
    r = degeneracy_scan(parse_quad("1,1,2", spec), 1, 2, 4, spec, mset=m_set(spec, 6))
    return r.holds and r.elapsed < 600, f"{r.total_points} points, {r.boundary_points} boundary, {len(r.interior_points)} interior, |M| = 21"


def check_pell_bijection(H: int = 1000) -> tuple[bool, str]:
    ok, parts = True, []
    for alpha in (2, 3, 5, 13):
        for k in (1, 2):
            r = pell_bijection_report(alpha, k, H)
            ok = ok and r.ok
            parts.append(f"{alpha}/{k}:{len(r.fp_points)}")
    first = [P.conic() for P in fp_stream(QuadPoly(1, 0, -2), 1, count=3)]
    ok = ok and first == [(1, 1), (5, 7), (29, 41)]
    return ok, "points " + " ".join(parts) + f", first conic points {first}"


def phi_correspondence(A: Mat2, k: int, H: int) -> tuple[bool, int]:
    """phi maps Vbar_{1,k}(A) at height H onto the Vbar_{0,k+1}(A) points whose
    first k coordinates and z_{k+1} + z_1 have height <= H."""
    lhs = sorted((phi_iso(s) for s in vbar_solve(FactorProblem(A, 1, k, H))), key=FactorSolution.key)
    wide = vbar_solve(FactorProblem(A, 0, k + 1, 2 * H))
    rhs = [s for s in wide if all(height(z) <= H for z in s.x[:k]) and height(s.x[k] + s.x[0]) <= H]
    ok = bool(lhs) and [s.x for s in lhs] == [s.x for s in rhs] and len(set(s.x for s in lhs)) == len(lhs)
    return ok, len(lhs)


def check_phi(count: int = 50, H: int = 5) -> tuple[bool, str]:
    rng = random.Random(SEED)
    failures = total = 0
    for _ in range(count):
        k = rng.randint(1, 3)
        sol = FactorSolution((rng.randint(-H, H),), tuple(rng.randint(-H, H) for _ in range(k)))
        ok, n = phi_correspondence(word_matrix(sol), k, H)
        failures += not ok
        total += n
    return failures == 0, f"{count} matrices, {failures} failures, {total} N=1 solutions"


def check_solver(H: int = 8) -> tuple[bool, str]:
    rng = random.Random(SEED)
    mismatches = 0
    cases = 0
    for k in (1, 2, 3):
        for N in (0, 1):
            for _ in range(4):
                # the naive sweep over four coordinates is kept to H <= 5
                h = rng.randint(2, H) if N + k <= 3 else rng.randint(2, 5)
                sol = FactorSolution(tuple(rng.randint(-h, h) for _ in range(N)), tuple(rng.randint(-h, h) for _ in range(k)))
                prob = FactorProblem(word_matrix(sol), N, k, h)
                cases += 1
                if vbar_solve(prob) != naive_vbar_solve(prob):
                    mismatches += 1
    # performance at k = 3, H = 8
    prob = FactorProblem(word_matrix(FactorSolution((), (3, -5, 7))), 0, 3, H)
    t0 = time.perf_counter()
    fast = vbar_solve(prob)
    t1 = time.perf_counter()
    slow = naive_vbar_solve(prob)
    t2 = time.perf_counter()
    speedup = (t2 - t1) / max(t1 - t0, 1e-9)
    ok = mismatches == 0 and fast == slow and speedup >= 5
    return ok, f"{cases} cases, {mismatches} mismatches, speedup {speedup:.0f}x"


def check_fibers(count: int = 20) -> tuple[bool, str]:
    Q = QuadPoly(1, 0, -2)
    total, bad = 0, 0
    for N, k, H in ((1, 1, 8), (0, 2, 8), (1, 2, 8), (0, 3, 8), (1, 3, 6)):
        for P in fp_lattice(Q, k, count=count):
            for p in fiber_solve(P, Q, N, k, H):
                total += 1
                if e_matrix(p) != P.matrix() or not membership(p, Q):
                    bad += 1
    return bad == 0, f"{total} fiber points over {count} FP points per type, {bad} bad"


def check_density() -> tuple[bool, str]:
    spec = parse_ring("Z[sqrt(2)]")
    Q = parse_quad("1,0,-3", spec)
    start = time.perf_counter()
    fibers = harvest(Q, 1, 2, spec, 10, 6, DENSITY_UNIT_GENERATORS)
    points = [p for f in fibers for p in f]
    if not points:
        return False, "no points harvested"
    many = certify_points(points, 1, spec, sum(1 for f in fibers if f))
    # negative control: the first fibre that has points, on its own
    single = certify_points(next(f for f in fibers if f), 1, spec, 1)
    elapsed = time.perf_counter() - start
    ok = many.certified and not single.certified and elapsed < 600
    return ok, (
        f"{many.fibers} nonempty fibers of 10: {len(points)} points, rank {many.rank}/{many.monomial_count}; "
        f"single fiber rank {single.rank}/{single.monomial_count}"
    )


def check_m_set() -> tuple[bool, str]:
    spec = parse_ring("Z[i]")
    M = m_set(spec, 6)
    i = spec.omega
    required = {spec.coerce(0)} | {s * x for s in (1, -1) for x in (spec.one, i)} | {a + b * i for a in (1, -1) for b in (1, -1)}
    ok = required <= M and all(c.norm() < 16 for c in M)
    return ok, f"|M| = {len(M)}, max |c|^2 = {max(c.norm() for c in M)}"


CRITERIA: list[tuple[int, str, Callable[[], tuple[bool, str]]]] = [
    (1, "E-matrix ground truth", check_e_matrix),
    (2, "determinant law", check_determinant_law),
    (3, "Hurwitz round trip", check_hurwitz_round_trip),
    (4, "Worpitzky gate", check_worpitzky),
    (5, "degeneracy over Z", check_degeneracy_z),
    (6, "degeneracy over Z[i]", check_degeneracy_gaussian),
    (7, "Pell bijection", check_pell_bijection),
    (8, "phi isomorphism", check_phi),
    (9, "solver completeness", check_solver),
    (10, "fiber consistency", check_fibers),
    (11, "density certificate", check_density),
    (12, "m_set sanity", check_m_set),
]


def run_criterion(number: int) -> Result:
    for n, name, fn in CRITERIA:
        if n == number:
            start = time.perf_counter()
            try:
                ok, detail = fn()
            except Exception as exc:  # report, do not crash the battery
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            return Result(n, name, ok, detail, time.perf_counter() - start)
    raise KeyError(number)


def run_all(numbers=None) -> list[Result]:
    return [run_criterion(n) for n, _, _ in CRITERIA if numbers is None or n in numbers]
