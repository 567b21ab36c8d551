"""Fermat-Pell curves, the orders R_beta and their norm-(+-1) units.

A point (a, b, c, d) of the curve attached to A x^2 + B x + C satisfies

    ad - bc = (-1)^k,  Bc = A(d - a),  -Ab = Cc,  -Bb = C(d - a),

and corresponds to the unit u = c*beta + d of R_beta (beta a root of the
quadratic).  For x^2 - alpha the coordinates (c, d) are a point of the
conic y^2 - alpha x^2 = (-1)^k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .contmat import Mat2, QuadPoly, dmat, IDENTITY
from .ring import (
    INTEGERS,
    IMAGINARY,
    QuadIrr,
    RelQuadIrr,
    RingSpec,
    Z,
    as_field,
    height,
    sort_key,
    sqrt_in_field,
    to_rel,
    unit_generators,
)


class FPError(ValueError):
    """A point or unit violates the Fermat-Pell relations."""


class NoGenerator(ValueError):
    """No unit of R_beta is available to generate points."""


@dataclass(frozen=True)
class FPPoint:
    a: object
    b: object
    c: object
    d: object
    k_parity: int

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def matrix(self) -> Mat2:
        return Mat2(self.a, self.b, self.c, self.d)

    def height(self) -> int:
        return max(height(x) for x in self.entries())

    def conic(self) -> tuple:
        """(x, y) = (c, d)."""
        return (self.c, self.d)

    def satisfies(self, Q: QuadPoly) -> bool:
        a, b, c, d = self.entries()
        A, B, C = Q.coeffs()
        sign = -1 if self.k_parity % 2 else 1
        return (
            a * d - b * c == sign
            and B * c == A * (d - a)
            and -A * b == C * c
            and -B * b == C * (d - a)
        )

    def __str__(self):
        from .ring import format_elem

        return "(" + ",".join(format_elem(x) for x in self.entries()) + ")"


@dataclass(frozen=True)
class OrderDesc:
    """R_beta = R + R*theta with theta = scale*beta and theta^2 = trace*theta + const."""

    theta: object
    scale: object
    trace: object
    const: object
    ring: RingSpec

    @property
    def basis(self) -> tuple:
        return (1, self.theta)

    def contains_unit(self, c, d) -> bool:
        """Whether c*beta + d lies in R_beta."""
        ring = self.ring
        q = as_field(c, ring) / as_field(self.scale, ring)
        return ring.contains(ring.coerce(q)) and ring.contains(ring.coerce(as_field(d, ring)))


# ---------------------------------------------------------------------------
# Regular continued fractions and fundamental units over Z
# ---------------------------------------------------------------------------


def regular_cf(x: QuadIrr, max_steps: int = 100_000) -> tuple[list[int], list[int]]:
    """Floor-rounded expansion of a real quadratic irrational: (preperiod, period)."""
    seen: dict = {}
    terms: list[int] = []
    for _ in range(max_steps):
        key = (x.p, x.q, x.r, x.D)
        if key in seen:
            i = seen[key]
            return terms[:i], terms[i:]
        seen[key] = len(terms)
        a = x.floor()
        terms.append(a)
        x = 1 / (x - a)
    raise RuntimeError("regular continued fraction did not become periodic")


def _primitive(A: int, B: int, C: int) -> tuple[int, int, int]:
    g = math.gcd(math.gcd(A, B), C)
    if A < 0:
        g = -g
    return A // g, B // g, C // g


def order_unit(Q) -> tuple[int, int]:
    """Fundamental unit u = c*beta + d > 1 of R_beta over Z, beta = (-B+sqrt(disc))/(2A)."""
    A, B, C = (int(x) for x in (Q.coeffs() if isinstance(Q, QuadPoly) else Q))
    A, B, C = _primitive(A, B, C)
    disc = B * B - 4 * A * C
    if disc <= 0 or math.isqrt(disc) ** 2 == disc:
        raise NoGenerator(f"discriminant {disc} gives no units of infinite order")
    beta = QuadIrr.make(-B, 1, 2 * A, disc)
    pre, per = regular_cf(beta)
    M = IDENTITY
    for a in pre:
        M = M @ dmat(a)
    W = IDENTITY
    for a in per:
        W = W @ dmat(a)
    G = M @ W @ M.inverse()
    c, d = G.e21, G.e22
    # u = c*beta + d; normalise to u > 1 in the real embedding
    u = c * float(beta) + d
    if u < 0:
        c, d, u = -c, -d, -u
    if u < 1:
        # inverse = norm * conjugate, conj(c*beta + d) = -c*beta + d - c*B/A
        n = (d * d * A - c * d * B + c * c * C) // A
        c, d = n * -c, n * (d - c * B // A)
    return c, d


def fundamental_pell(alpha: int) -> tuple[int, int, int]:
    """Smallest positive (x, y) with y^2 - alpha x^2 = +-1, and that norm."""
    if alpha < 2:
        raise ValueError("alpha must be at least 2")
    if math.isqrt(alpha) ** 2 == alpha:
        raise ValueError(f"{alpha} is a square")
    c, d = order_unit((1, 0, -alpha))
    x, y = abs(c), abs(d)
    return x, y, y * y - alpha * x * x


# ---------------------------------------------------------------------------
# R_beta and the unit <-> point maps
# ---------------------------------------------------------------------------


def _check_irreducible(Q: QuadPoly):
    if Q.is_zero or not Q.A:
        raise FPError("need a quadratic with A != 0")
    if sqrt_in_field(as_field(Q.discriminant(), Q.ring)) is not None:
        raise FPError("quadratic is reducible over the base field")


def r_beta(Q: QuadPoly, spec: RingSpec | None = None) -> OrderDesc:
    """The order of the lattice R*beta + R, verified by a stabiliser test."""
    spec = spec or Q.ring
    _check_irreducible(Q)
    if spec.kind == INTEGERS:
        A, B, C = _primitive(*Q.coeffs())
    elif spec.is_unit(Q.A):
        inv = 1 / as_field(Q.A, spec)
        A, B, C = 1, spec.coerce(as_field(Q.B, spec) * inv), spec.coerce(as_field(Q.C, spec) * inv)
    else:
        raise FPError(f"non-monic quadratic over {spec} is unsupported")
    beta = QuadPoly(A, B, C, spec).roots()[0]
    theta = to_rel(beta, spec) * A
    desc = OrderDesc(_present(theta, spec), A, spec.coerce(-B), spec.coerce(-A * C), spec)
    _verify_order(desc, B, C, spec)
    return desc


def _present(v, spec):
    if isinstance(v, RelQuadIrr) and not spec.is_quadratic:
        return QuadIrr.from_rel(v)
    return v


def _verify_order(desc: OrderDesc, B, C, spec: RingSpec):
    theta = to_rel(desc.theta, spec)
    if theta * theta != theta * desc.trace + desc.const:
        raise FPError("theta is not closed under multiplication")
    # theta*beta = -B*beta - C must lie in R*beta + R
    for x in (B, C):
        if not spec.contains(spec.coerce(as_field(x, spec))):
            raise FPError("R_beta does not stabilise the lattice")


def unit_norm(c, d, Q: QuadPoly):
    """N(c*beta + d) = d^2 - cdB/A + c^2 C/A over the base field."""
    ring = Q.ring
    A, B, C = (as_field(x, ring) for x in Q.coeffs())
    c, d = as_field(c, ring), as_field(d, ring)
    return ring.coerce(d * d - c * d * B / A + c * c * C / A)


def unit_to_fp(c, d, Q: QuadPoly, k: int) -> FPPoint:
    """The point (d - cB/A, -cC/A, c, d) attached to the unit c*beta + d."""
    ring = Q.ring
    if unit_norm(c, d, Q) != (-1) ** k:
        raise FPError(f"norm of {c}*beta+{d} is not (-1)^{k}")
    A, B, C = (as_field(x, ring) for x in Q.coeffs())
    cf, df = as_field(c, ring), as_field(d, ring)
    a = ring.coerce(df - cf * B / A)
    b = ring.coerce(-cf * C / A)
    for x in (a, b, c, d):
        if not ring.contains(ring.coerce(x)):
            raise FPError(f"coordinate {x} is not in {ring}")
    return FPPoint(a, b, ring.coerce(c), ring.coerce(d), k % 2)


def fp_to_unit(P: FPPoint, Q: QuadPoly) -> tuple:
    """(c, d) with u = c*beta + d; inverse of :func:`unit_to_fp`."""
    if not P.satisfies(Q):
        raise FPError(f"{P} violates the Fermat-Pell relations")
    return (P.c, P.d)


def conic_to_fp(x, y, alpha, k: int, ring: RingSpec = Z) -> FPPoint:
    """(x, y) on y^2 - alpha x^2 = (-1)^k to the point (y, alpha x, x, y)."""
    x, y = ring.coerce(x), ring.coerce(y)
    if y * y - alpha * x * x != (-1) ** k:
        raise FPError("not on the conic")
    return FPPoint(y, ring.coerce(alpha * x), x, y, k % 2)


def value_to_cd(u, Q: QuadPoly) -> tuple:
    """Write an element of K(beta) as c*beta + d."""
    ring = Q.ring
    beta = to_rel(Q.roots()[0], ring)
    u = to_rel(u, ring)
    if not isinstance(beta, RelQuadIrr):
        raise FPError("beta lies in the base field")
    if not isinstance(u, RelQuadIrr):
        return ring.coerce(0), ring.coerce(u)
    if u.delta != beta.delta:
        u = u.rebase(beta.delta)
    c = u.q / beta.q
    d = u.p - c * beta.p
    return ring.coerce(c), ring.coerce(d)


def unit_mul(u1: tuple, u2: tuple, Q: QuadPoly) -> tuple:
    ring = Q.ring
    A, B, C = (as_field(x, ring) for x in Q.coeffs())
    c1, d1 = (as_field(x, ring) for x in u1)
    c2, d2 = (as_field(x, ring) for x in u2)
    cc = c1 * c2
    return ring.coerce(c1 * d2 + c2 * d1 - cc * B / A), ring.coerce(d1 * d2 - cc * C / A)


def _torsion(spec: RingSpec) -> list:
    if spec.kind == IMAGINARY:
        zeta = unit_generators(spec)[0]
        out, x = [], spec.one
        while True:
            out.append(x)
            x = x * zeta
            if x == spec.one:
                return out
    return [spec.coerce(1), spec.coerce(-1)]


def base_generators(Q: QuadPoly, extra_unit_gens: Iterable | None = None) -> list:
    """Units of R_beta of infinite order as (c, d) pairs."""
    spec = Q.ring
    gens = []
    for g in extra_unit_gens or ():
        if isinstance(g, str):
            from .literals import parse_value

            g = parse_value(g, spec)
        gens.append(value_to_cd(g, Q) if not isinstance(g, tuple) else g)
    if not gens:
        if spec.kind == INTEGERS:
            gens.append(order_unit(Q))
        else:
            raise NoGenerator(f"no unit generator for {spec}; supply unit_generators")
    return gens


def fp_stream(
    Q: QuadPoly,
    k: int,
    spec: RingSpec | None = None,
    count: int = 10,
    extra_unit_gens: Iterable | None = None,
) -> list[FPPoint]:
    """The first ``count`` points from powers u0^m (m >= 1) of norm (-1)^k,
    ordered by height.  A torsion unit multiplies a power when that fixes
    the norm."""
    if spec is not None and spec != Q.ring:
        Q = QuadPoly(*Q.coeffs(), ring=spec)
    spec = Q.ring
    want = (-1) ** k
    torsion = _torsion(spec)
    points: dict = {}
    for g in base_generators(Q, extra_unit_gens):
        u = g
        misses = 0
        produced = 0
        # powers beyond the point count keep the height order honest
        while produced < count + 2 and misses < 4:
            fixed = None
            for z in torsion:
                cand = unit_mul(u, (spec.coerce(0), z), Q)
                if unit_norm(*cand, Q) == want:
                    fixed = cand
                    break
            if fixed is None:
                misses += 1
            else:
                misses = 0
                try:
                    points[unit_to_fp(*fixed, Q, k)] = None
                    produced += 1
                except FPError:
                    pass
            u = unit_mul(u, g, Q)
    ordered = sorted(points, key=lambda P: (P.height(), [sort_key(x) for x in P.entries()]))
    return ordered[:count]


def unit_inverse(u: tuple, Q: QuadPoly) -> tuple:
    """(c, d)^{-1} = N(u) * conj(u), with conj(c*beta + d) = -c*beta + d + c*tr(beta)."""
    spec = Q.ring
    c, d = u
    n = unit_norm(c, d, Q)
    A, B, _ = Q.coeffs()
    shift = spec.coerce(as_field(-B * c, spec) / as_field(A, spec))
    return (-n * c, n * (d + shift))


def fp_lattice(
    Q: QuadPoly,
    k: int,
    spec: RingSpec | None = None,
    count: int = 10,
    extra_unit_gens: Iterable | None = None,
    radius: int = 4,
) -> list[FPPoint]:
    """The ``count`` lowest points among torsion * prod g_i^{m_i} with
    |m_i| <= radius, over the whole group the generators span."""
    if spec is not None and spec != Q.ring:
        Q = QuadPoly(*Q.coeffs(), ring=spec)
    spec = Q.ring
    want = (-1) ** k
    one = (spec.coerce(0), spec.coerce(1))
    layers = [one]
    for g in base_generators(Q, extra_unit_gens):
        powers = {0: one}
        inv = unit_inverse(g, Q)
        for m in range(1, radius + 1):
            powers[m] = unit_mul(powers[m - 1], g, Q)
            powers[-m] = unit_mul(powers[-m + 1], inv, Q)
        layers = [unit_mul(u, p, Q) for u in layers for p in powers.values()]
    points = set()
    for u in layers:
        for z in _torsion(spec):
            cand = unit_mul(u, (spec.coerce(0), z), Q)
            if unit_norm(*cand, Q) != want:
                continue
            try:
                points.add(unit_to_fp(*cand, Q, k))
            except FPError:
                pass
    ordered = sorted(points, key=lambda P: (P.height(), [sort_key(x) for x in P.entries()]))
    return ordered[:count]


def fp_scan(Q: QuadPoly, k: int, H: int) -> list[FPPoint]:
    """Every point over Z with all coordinates of absolute value <= H."""
    if Q.ring.kind != INTEGERS:
        raise ValueError("exhaustive scan is implemented over Z")
    A, B, C = Q.coeffs()
    if not A:
        raise FPError("need A != 0")
    s = (-1) ** k
    disc = B * B - 4 * A * C
    out = []
    for c in range(-H, H + 1):
        if (C * c) % A:
            continue
        rad = disc * c * c + 4 * A * A * s
        if rad < 0:
            continue
        root = math.isqrt(rad)
        if root * root != rad:
            continue
        for sgn in {1, -1} if root else {1}:
            num = B * c + sgn * root
            if num % (2 * A):
                continue
            d = num // (2 * A)
            if (B * c) % A:
                continue
            a, b = d - B * c // A, -C * c // A
            P = FPPoint(a, b, c, d, k % 2)
            if P.height() <= H and P.satisfies(Q):
                out.append(P)
    return sorted(set(out), key=lambda P: P.entries())
