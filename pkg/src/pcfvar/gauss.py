"""Nearest-integer expansions over imaginary quadratic orders.

The fundamental domain is the closed Voronoi cell of the lattice {1, w}.
Points of C are handled in the coordinates (r, s) of r + s*sqrt(d), so that
|r + s*sqrt(d)|^2 = r^2 + |d| s^2 and every geometric test is rational.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from itertools import combinations

from .contmat import PCF
from .ring import (
    IMAGINARY,
    RElem,
    RelQuadIrr,
    RingSpec,
    as_field,
    nearest,
    re_sign,
)


class PreconditionError(ValueError):
    pass


def _require_imaginary(spec: RingSpec):
    if spec.kind != IMAGINARY:
        raise PreconditionError(f"{spec} is not an imaginary quadratic order")


def _coords(x: RElem) -> tuple[Fraction, Fraction]:
    return x.sqrt_d_coords()


def _abs2(r: Fraction, s: Fraction, absd: int) -> Fraction:
    return r * r + absd * s * s


def _dot(p, q, absd: int) -> Fraction:
    return p[0] * q[0] + absd * p[1] * q[1]


@dataclass(frozen=True)
class Cell:
    """Closed Voronoi cell of the lattice, vertices in counterclockwise order."""

    spec: RingSpec
    vertices: tuple
    rho2: Fraction
    inradius2: Fraction
    relevant: tuple

    @property
    def rho(self) -> float:
        return math.sqrt(self.rho2)

    def contains(self, z, strict: bool = False) -> bool:
        """z in V_0 (closed) or U_0 (strict); z is a field or extension value."""
        for g in self.relevant:
            # Re(z * conj(g)) compared with |g|^2 / 2
            y = z * g.conj() - g.norm() / 2
            s = re_sign(y)
            if s > 0 or (strict and s == 0):
                return False
        return True


def _lattice_vectors(spec: RingSpec, reach: int = 2):
    return [
        RElem._make(u, v, 1, spec)
        for u in range(-reach, reach + 1)
        for v in range(-reach, reach + 1)
        if u or v
    ]


@lru_cache(maxsize=32)
def fundamental_cell(spec: RingSpec) -> Cell:
    """Voronoi cell of the order: a rectangle or a hexagon."""
    _require_imaginary(spec)
    absd = -spec.d
    gens = _lattice_vectors(spec)
    lines = []
    for g in gens:
        gc = _coords(g)
        lines.append((gc, _abs2(*gc, absd) / 2))
    verts = set()
    for (g1, c1), (g2, c2) in combinations(lines, 2):
        # solve g1.z = c1, g2.z = c2 in the |d|-weighted inner product
        a11, a12 = g1[0], absd * g1[1]
        a21, a22 = g2[0], absd * g2[1]
        det = a11 * a22 - a12 * a21
        if not det:
            continue
        r = (c1 * a22 - a12 * c2) / det
        s = (a11 * c2 - a21 * c1) / det
        if all(_dot(g, (r, s), absd) <= c for g, c in lines):
            verts.add((r, s))
    # counterclockwise order by angle
    pts = sorted(verts, key=lambda p: math.atan2(float(p[1]) * math.sqrt(absd), float(p[0])))
    vertices = tuple(_from_coords(r, s, spec) for r, s in pts)
    rho2 = max(_abs2(r, s, absd) for r, s in pts)
    relevant = []
    for g, c in lines:
        on = [p for p in pts if _dot(g, p, absd) == c]
        if len(on) >= 2:
            relevant.append(_from_coords(g[0], g[1], spec))
    inradius2 = min(_abs2(*_coords(g), absd) for g in relevant) / 4
    return Cell(spec, vertices, rho2, inradius2, tuple(relevant))


def _from_coords(r: Fraction, s: Fraction, spec: RingSpec) -> RElem:
    if spec.half_omega:
        return spec.elem(r - s, 2 * s)
    return spec.elem(r, s)


# ---------------------------------------------------------------------------
# The exceptional set
# ---------------------------------------------------------------------------


def _segment_dist2(p, a, b, absd: int) -> Fraction:
    ab = (b[0] - a[0], b[1] - a[1])
    ap = (p[0] - a[0], p[1] - a[1])
    den = _dot(ab, ab, absd)
    t = _dot(ap, ab, absd) / den if den else Fraction(0)
    t = min(max(t, Fraction(0)), Fraction(1))
    q = (a[0] + t * ab[0] - p[0], a[1] + t * ab[1] - p[1])
    return _dot(q, q, absd)


def _inside_polygon(p, poly, absd: int) -> bool:
    # poly is convex and counterclockwise in (r, s*sqrt|d|) coordinates
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        if cross < 0:
            return False
    return True


def cell_meets_disk(c: RElem, cell: Cell, center, radius2: Fraction) -> bool:
    """Closed V_c intersects the closed disk |z - center|^2 <= radius2."""
    absd = -cell.spec.d
    cc = _coords(c)
    poly = [(cc[0] + v[0], cc[1] + v[1]) for v in (_coords(x) for x in cell.vertices)]
    if _inside_polygon(center, poly, absd):
        return True
    n = len(poly)
    return any(_segment_dist2(center, poly[i], poly[(i + 1) % n], absd) <= radius2 for i in range(n))


def in_exceptional_set(c: RElem, cell: Cell) -> bool:
    """c in M iff some z in V_c has 1/z outside the open cell U_0.

    1/z fails Re(w conj g) < |g|^2/2 exactly when z lies in the closed disk
    about conj(g)/|g|^2 of radius 1/|g|; z = 0 is on all of these circles.
    """
    absd = -cell.spec.d
    for g in _lattice_vectors(cell.spec):
        gr, gs = _coords(g)
        n = _abs2(gr, gs, absd)
        center = (gr / n, -gs / n)
        if cell_meets_disk(c, cell, center, 1 / n):
            return True
    return False


@lru_cache(maxsize=32)
def m_set(spec: RingSpec, search_bound: int) -> frozenset:
    """All lattice points with |c| <= search_bound that lie in M.

    Every c with |c| > 1/r_in + rho is outside M (1/z then lies in the open
    incircle), so a bound at least that large makes the result complete.
    """
    cell = fundamental_cell(spec)
    need = 1 / math.sqrt(cell.inradius2) + cell.rho
    if search_bound < need:
        raise PreconditionError(f"search bound {search_bound} below {need:.3f}")
    absd = -spec.d
    members = set()
    span = int(search_bound * 2) + 2
    b2 = search_bound * search_bound
    for u in range(-span, span + 1):
        for v in range(-span, span + 1):
            c = RElem._make(u, v, 1, spec)
            if _abs2(*_coords(c), absd) > b2:
                continue
            if in_exceptional_set(c, cell):
                members.add(c)
    return frozenset(members)


def abs2(c) -> Fraction:
    return as_field(c, c.ring).norm() if isinstance(c, RElem) else Fraction(c) ** 2


# ---------------------------------------------------------------------------
# Expansions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussExpansion:
    """Expansion over an imaginary quadratic order.

    ``status`` is ``finite``, ``periodic`` or ``incomplete`` (step budget
    reached); ``avoids_m`` reports whether every term after the first lies
    outside the exceptional set.
    """

    preperiod: tuple
    period: tuple
    status: str
    avoids_m: bool

    @property
    def terminated(self) -> bool:
        return self.status == "finite"

    def canonical(self) -> tuple:
        pre, per = list(self.preperiod), list(self.period)
        if per:
            n = len(per)
            for m in range(1, n + 1):
                if n % m == 0 and per == per[:m] * (n // m):
                    per = per[:m]
                    break
            while pre and pre[-1] == per[-1]:
                pre.pop()
                per = [per[-1]] + per[:-1]
        return tuple(pre), tuple(per), self.status

    def terms(self) -> list:
        return list(self.preperiod) + list(self.period)

    def to_json(self) -> dict:
        return {
            "preperiod": [str(c) for c in self.preperiod],
            "period": [str(c) for c in self.period],
            "status": self.status,
            "avoids_m": self.avoids_m,
        }


def _state_key(x):
    if isinstance(x, RelQuadIrr):
        return ("q", x.key())
    return ("k", x)


def nicf_expand_gauss(alpha, spec: RingSpec, max_steps: int = 500, mset=None) -> GaussExpansion:
    """Nearest-lattice-point expansion with cell tie-break; periodicity is
    detected on exact states."""
    _require_imaginary(spec)
    if mset is None:
        mset = m_set(spec, default_bound(spec))
    x = alpha if isinstance(alpha, RelQuadIrr) else as_field(alpha, spec)
    seen: dict = {}
    terms: list = []
    status = "incomplete"
    split = None
    for _ in range(max_steps):
        key = _state_key(x)
        if key in seen:
            split = seen[key]
            status = "periodic"
            break
        seen[key] = len(terms)
        c = nearest(x, spec)
        terms.append(c)
        rem = x - c
        if not rem:
            status = "finite"
            break
        x = 1 / rem
    if status == "periodic":
        pre, per = tuple(terms[:split]), tuple(terms[split:])
    else:
        pre, per = tuple(terms), ()
    avoids = all(c not in mset for c in terms[1:])
    if status == "periodic" and split == 0 and terms[0] in mset:
        # a purely periodic first term recurs later in the sequence
        avoids = False
    return GaussExpansion(pre, per, status, avoids)


def default_bound(spec: RingSpec) -> int:
    cell = fundamental_cell(spec)
    return math.ceil(1 / math.sqrt(cell.inradius2) + cell.rho) + 1


def gauss_uniqueness_probe(expansion: GaussExpansion, spec: RingSpec, require_avoid_m: bool = True, mset=None) -> bool:
    """Evaluate, re-expand, and compare.  With ``require_avoid_m`` every term
    after the first must lie outside M."""
    from .pcf import exact_value

    _require_imaginary(spec)
    if mset is None:
        mset = m_set(spec, default_bound(spec))
    seq = expansion.terms()
    later = seq[1:] + ([expansion.period[0]] if expansion.period else [])
    if require_avoid_m and any(c in mset for c in later):
        raise PreconditionError("a term after the first lies in M")
    if expansion.status == "finite":
        x = as_field(seq[-1], spec)
        for c in reversed(seq[:-1]):
            x = c + 1 / x
        value = x
    elif expansion.status == "periodic":
        value = exact_value(PCF(spec, expansion.preperiod, expansion.period))
    else:
        raise PreconditionError("incomplete expansion")
    steps = 4 * len(seq) + 64
    again = nicf_expand_gauss(value, spec, steps, mset)
    return again.canonical() == expansion.canonical()
