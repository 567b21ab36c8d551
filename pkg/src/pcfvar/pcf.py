"""Evaluation of periodic continued fractions and variety membership."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import mpmath

from .contmat import PCF, Mat2, QuadPoly, dprod, e_matrix, quad_coeffs
from .ring import (
    RElem,
    RelQuadIrr,
    RingSpec,
    as_field,
    quad_value,
    re_sign,
    sign_real,
)

WORPITZKY_BOUND = 4
DEFAULT_DPS = 60
STOP_RADIUS = mpmath.mpf("1e-30")
MAX_PERIODS = 10_000
# parabolic tails converge like 1/n; a short run suffices for the history
PARABOLIC_PERIODS = 64


class NonConvergent(ArithmeticError):
    """The period matrix has eigenvalues of equal absolute value."""


class DivisionByZeroTail(ArithmeticError):
    """The value (or a truncation) is the point at infinity."""


@dataclass
class PCFValue:
    """Exact value (when known) plus a numeric midpoint/radius enclosure."""

    exact: object
    numeric: mpmath.mpc
    radius: mpmath.mpf
    converged: bool
    periods: int = 0
    poles: int = 0
    radii: list = field(default_factory=list, repr=False)

    def contains(self, x, embedding: int = 0) -> bool:
        with mpmath.workdps(DEFAULT_DPS):
            return abs(embed_value(x, embedding) - self.numeric) <= self.radius


def embed(x, embedding: int = 0):
    """Complex embedding of a ring element as an mpmath number."""
    if isinstance(x, RElem):
        return x.to_mp(embedding)
    return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator if hasattr(x, "numerator") else x)


def worpitzky_check(c: Sequence, embedding: int = 0) -> bool:
    """|c_n c_{n+1}| >= 4 for every consecutive pair, wrapping around."""
    if not c:
        return False
    n = len(c)
    return all(_abs_at_least(c[i] * c[(i + 1) % n], WORPITZKY_BOUND, embedding) for i in range(n))


def _abs_at_least(x, bound: int, embedding: int) -> bool:
    """Exact |x| >= bound in the chosen complex embedding."""
    if isinstance(x, RElem):
        if x.ring.kind == "imaginary":
            return x.norm() >= bound * bound
        if x.b:
            y = x.conj() if embedding else x
            return sign_real(y - bound) >= 0 or sign_real(y + bound) <= 0
        x = x.u
    return abs(x) >= bound


def _attracting_fixed_point(W: Mat2, ring: RingSpec):
    """Exact attracting fixed point of the Mobius map of W, plus a parabolic flag."""
    if not W.e21:
        raise NonConvergent("period matrix is triangular; fixed points are not separated")
    tr = as_field(W.trace(), ring)
    disc = tr * tr - 4 * as_field(W.det(), ring)
    num = as_field(W.e11 - W.e22, ring)
    den = 2 * as_field(W.e21, ring)
    if not disc:
        return ring.coerce(num / den), True
    s = quad_value(0, 1, 1, disc, ring)
    # sign making |tr + sigma*s| the larger eigenvalue modulus
    sigma = re_sign(s * tr.conj()) if ring.kind == "imaginary" else re_sign(s * tr)
    if sigma == 0:
        raise NonConvergent("eigenvalues of the period matrix have equal modulus")
    return (s * sigma + num) / den, False


def exact_value(p: PCF):
    """Exact value of ``p``: the attracting fixed point pushed through the preperiod."""
    ring = p.ring
    W = dprod(p.a)
    beta, _ = _attracting_fixed_point(W, ring)
    B = dprod(p.b)
    if isinstance(beta, RelQuadIrr):
        den = beta * B.e21 + B.e22
        return _present((beta * B.e11 + B.e12) / den, ring)
    den = as_field(B.e21, ring) * beta + B.e22
    if not den:
        raise DivisionByZeroTail("value is infinite")
    return ring.coerce((as_field(B.e11, ring) * beta + B.e12) / den)


def _present(v, ring: RingSpec):
    from .ring import QuadIrr

    if isinstance(v, RelQuadIrr) and not ring.is_quadratic:
        return QuadIrr.from_rel(v)
    return v


def _mp_mat(m: Mat2, embedding: int):
    return [embed(x, embedding) for x in m.entries()]


def _mp_mul(a, b):
    return [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]


def numeric_value(
    p: PCF,
    embedding: int = 0,
    max_periods: int = MAX_PERIODS,
    stop_radius=STOP_RADIUS,
    dps: int = DEFAULT_DPS,
):
    """Iterate truncations period by period.

    Returns (midpoint, radius, contracting, periods, poles, radii).  The
    radius is the geometric tail bound of the observed per-period
    contraction, doubled for safety, plus a working-precision floor.
    """
    with mpmath.workdps(dps):
        floor = mpmath.mpf(10) ** (-(dps - 8))
        W = _mp_mat(dprod(p.a), embedding)
        P = _mp_mat(dprod(p.b), embedding)
        prev = None
        prev_step = None
        radius = mpmath.inf
        ratio = mpmath.inf
        poles = 0
        radii = []
        mid = mpmath.mpc(mpmath.nan)
        n = 0
        for n in range(1, max_periods + 1):
            P = _mp_mul(P, W)
            scale = max(abs(x) for x in P)
            if scale:
                P = [x / scale for x in P]
            if abs(P[2]) <= floor * abs(P[0]):
                poles += 1
                continue
            cur = P[0] / P[2]
            if prev is not None:
                step = abs(cur - prev)
                if prev_step is not None and prev_step > 0:
                    ratio = step / prev_step
                    if ratio < 1:
                        radius = 2 * step * ratio / (1 - ratio) + floor
                    else:
                        radius = mpmath.inf
                elif step == 0 and prev_step == 0:
                    radius = floor
                    ratio = mpmath.mpf(0)
                prev_step = step
            prev = cur
            mid = cur
            radii.append(radius)
            if radius < stop_radius:
                break
        return mid, radius, bool(ratio < 1), n, poles, radii


def evaluate(p: PCF, embedding: int = 0, max_periods: int = MAX_PERIODS) -> PCFValue:
    """Exact and numeric value of ``p``.

    The exact value is computed for every ring (real quadratic rings use the
    embedding with sqrt(d) > 0).  For parabolic period matrices the tail
    converges only like 1/n; there the numeric enclosure is taken from the
    exact double fixed point.
    """
    exact = None
    parabolic = False
    W = dprod(p.a)
    try:
        _, parabolic = _attracting_fixed_point(W, p.ring)
        exact = exact_value(p)
    except DivisionByZeroTail:
        exact = None
    if parabolic:
        max_periods = min(max_periods, PARABOLIC_PERIODS)
    mid, radius, contracting, periods, poles, radii = numeric_value(p, embedding, max_periods)
    worp = worpitzky_check(p.a, embedding)
    if parabolic and exact is not None:
        with mpmath.workdps(DEFAULT_DPS):
            mid = embed_value(exact, embedding)
            radius = mpmath.mpf(10) ** (-(DEFAULT_DPS - 8))
        return PCFValue(exact, mid, radius, True, periods, poles, radii)
    converged = worp or contracting
    return PCFValue(exact, mid, radius, converged, periods, poles, radii)


def embed_value(x, embedding: int = 0):
    if hasattr(x, "to_mp"):
        return x.to_mp(embedding) if not isinstance(x, int) else mpmath.mpc(x)
    return embed(x, embedding)


def membership(p: PCF, Q: QuadPoly) -> bool:
    """Quad(p) is a nonzero multiple of Q (all 2x2 minors vanish)."""
    if Q.is_zero:
        raise ValueError("membership needs a nonzero quadratic")
    return proportional(quad_coeffs(e_matrix(p)), Q.coeffs())


def proportional(q, Q) -> bool:
    if not any(q):
        return False
    return q[0] * Q[1] == q[1] * Q[0] and q[0] * Q[2] == q[2] * Q[0] and q[1] * Q[2] == q[2] * Q[1]


def fp_equations_hold(E: Mat2, Q: QuadPoly, k: int) -> bool:
    """The four Fermat-Pell equations for the entries of E."""
    a, b, c, d = E.entries()
    A, B, C = Q.coeffs()
    return (
        a * d - b * c == (-1) ** k
        and B * c == A * (d - a)
        and -A * b == C * c
        and -B * b == C * (d - a)
    )
