"""Continuant matrices, PCF data and the attached quadratic."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .ring import (
    QuadIrr,
    RelQuadIrr,
    RingSpec,
    Z,
    as_field,
    format_elem,
    json_scalar,
    format_value,
    quad_value,
    to_rel,
)


@dataclass(frozen=True)
class Mat2:
    """2x2 matrix [[e11, e12], [e21, e22]] over a base ring."""

    e11: object
    e12: object
    e21: object
    e22: object

    def __matmul__(self, o: Mat2) -> Mat2:
        return Mat2(
            self.e11 * o.e11 + self.e12 * o.e21,
            self.e11 * o.e12 + self.e12 * o.e22,
            self.e21 * o.e11 + self.e22 * o.e21,
            self.e21 * o.e12 + self.e22 * o.e22,
        )

    def det(self):
        return self.e11 * self.e22 - self.e12 * self.e21

    def trace(self):
        return self.e11 + self.e22

    def scale(self, s) -> Mat2:
        return Mat2(self.e11 * s, self.e12 * s, self.e21 * s, self.e22 * s)

    def adjugate(self) -> Mat2:
        return Mat2(self.e22, -self.e12, -self.e21, self.e11)

    def inverse(self) -> Mat2:
        """Exact inverse; integral whenever the determinant is a unit of +-1."""
        det = self.det()
        adj = self.adjugate()
        if det == 1:
            return adj
        if det == -1:
            return adj.scale(-1)
        return Mat2(*(x / det for x in adj.entries()))

    def entries(self) -> tuple:
        return (self.e11, self.e12, self.e21, self.e22)

    def apply(self, x):
        """Mobius action x -> (e11 x + e12)/(e21 x + e22)."""
        return (self.e11 * x + self.e12) / (self.e21 * x + self.e22)

    def to_json(self) -> dict:
        return {name: json_scalar(v) for name, v in zip(("e11", "e12", "e21", "e22"), self.entries())}

    def __str__(self):
        a, b, c, d = (format_elem(x) for x in self.entries())
        return f"[[{a},{b}],[{c},{d}]]"


IDENTITY = Mat2(1, 0, 0, 1)
T = Mat2(0, 1, 1, 0)


def dmat(a) -> Mat2:
    """The continuant matrix [[a, 1], [1, 0]]."""
    return Mat2(a, 1, 1, 0)


def t_power(k: int) -> Mat2:
    return T if k % 2 else IDENTITY


def dprod(xs: Sequence) -> Mat2:
    """D(x1) D(x2) ... D(xn), identity for the empty word."""
    m = IDENTITY
    for x in xs:
        # right-multiplying by D(x) is a column shuffle
        m = Mat2(m.e11 * x + m.e12, m.e11, m.e21 * x + m.e22, m.e21)
    return m


@dataclass(frozen=True)
class PCF:
    """Periodic continued fraction [b1..bN; overline(a1..ak)] over ``ring``."""

    ring: RingSpec
    b: tuple
    a: tuple

    def __post_init__(self):
        if not self.a:
            raise ValueError("a PCF needs a nonempty period")
        object.__setattr__(self, "b", tuple(self.ring.coerce(x) for x in self.b))
        object.__setattr__(self, "a", tuple(self.ring.coerce(x) for x in self.a))

    @classmethod
    def of(cls, b: Sequence, a: Sequence, ring: RingSpec = Z) -> PCF:
        return cls(ring, tuple(b), tuple(a))

    @property
    def N(self) -> int:
        return len(self.b)

    @property
    def k(self) -> int:
        return len(self.a)

    def coords(self) -> tuple:
        return self.b + self.a

    def __str__(self):
        pre = ",".join(format_elem(x) for x in self.b)
        per = ",".join(format_elem(x) for x in self.a)
        return f"[{pre}; {per}]"


@dataclass(frozen=True)
class QuadPoly:
    """Coefficients of A x^2 + B x + C.

    The zero triple is representable so that enumeration code can flag
    degenerate points; operations that need roots reject it.
    """

    A: object
    B: object
    C: object
    ring: RingSpec = Z

    def __post_init__(self):
        for name in ("A", "B", "C"):
            object.__setattr__(self, name, self.ring.coerce(getattr(self, name)))

    @property
    def is_zero(self) -> bool:
        return not (self.A or self.B or self.C)

    def coeffs(self) -> tuple:
        return (self.A, self.B, self.C)

    def discriminant(self):
        return self.B * self.B - 4 * self.A * self.C

    def __call__(self, x):
        return (self.A * x + self.B) * x + self.C

    def roots(self) -> tuple:
        """(beta, beta*) with beta = (-B + sqrt(disc))/(2A), principal root."""
        if self.is_zero or not self.A:
            raise ValueError("roots need A != 0")
        ring = self.ring
        disc = as_field(self.discriminant(), ring)
        plus = quad_value(-as_field(self.B, ring), 1, 2 * as_field(self.A, ring), disc, ring)
        if isinstance(plus, RelQuadIrr):
            return _present(plus, ring), _present(plus.conj(), ring)
        # rational roots: the second one is -B/A - beta
        minus = -as_field(self.B, ring) / as_field(self.A, ring) - as_field(plus, ring)
        return ring.coerce(plus), ring.coerce(minus)

    def to_json(self) -> list:
        return [json_scalar(x) for x in self.coeffs()]

    def __str__(self):
        return f"({format_elem(self.A)})x^2 + ({format_elem(self.B)})x + ({format_elem(self.C)})"


def _present(v: RelQuadIrr, ring: RingSpec):
    return QuadIrr.from_rel(v) if not ring.is_quadratic else v


def e_matrix(p: PCF) -> Mat2:
    """D(b1)..D(bN) D(a1)..D(ak) t D(-bN)..D(-b1) t."""
    pre = dprod(p.b)
    per = dprod(p.a)
    if not p.b:
        return per
    back = dprod([-x for x in reversed(p.b)])
    return pre @ per @ T @ back @ T


def quad_coeffs(E: Mat2) -> tuple:
    return (E.e21, E.e22 - E.e11, -E.e12)


def quad_poly(p: PCF) -> QuadPoly:
    """Quadratic E21 x^2 + (E22 - E11) x - E12; check ``is_zero`` for scalar E."""
    return QuadPoly(*quad_coeffs(e_matrix(p)), ring=p.ring)


def eigen_check(p: PCF, beta) -> bool:
    """Exact test of E (beta, 1)^T == (E21 beta + E22) (beta, 1)^T."""
    E = e_matrix(p)
    b = to_rel(beta, p.ring)
    lam = b * E.e21 + E.e22
    return (b * E.e11 + E.e12) - lam * b == 0


def format_quad(q: QuadPoly) -> list:
    return q.to_json()


def format_root(x) -> str:
    return format_value(x)
