"""Exact arithmetic over the supported base rings.

A base ring R is one of Z, Z[1/p], or an order {1, w} in a quadratic field
Q(sqrt(d)).  Elements of the fraction field K are :class:`RElem` values
``(a + b*w)/den`` with integer data.  Elements of a quadratic extension
K(sqrt(delta)) are :class:`RelQuadIrr`; over K = Q the integer-form
:class:`QuadIrr` is the user-facing type.

Every decision about signs, rounding and comparisons is exact.  Float
screening is used only when its error bound proves the answer.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from sympy import factorint

INTEGERS = "integers"
S_INTEGERS = "s-integers"
IMAGINARY = "imaginary"
REAL = "real"


@lru_cache(maxsize=4096)
def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return ``(s, m)`` with ``n == s*s*m``, ``s > 0`` and ``m`` squarefree."""
    if n == 0:
        raise ValueError("0 has no squarefree decomposition")
    s, m = 1, (1 if n > 0 else -1)
    for p, e in factorint(abs(n)).items():
        p, e = int(p), int(e)  # sympy may hand back gmpy2 integers
        s *= p ** (e // 2)
        if e % 2:
            m *= p
    return s, m


def is_squarefree(n: int) -> bool:
    return n != 0 and squarefree_decompose(n)[0] == 1


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def sign_sqrt_form(a: Fraction, b: Fraction, m: Fraction) -> int:
    """Sign of ``a*sqrt(m) + b`` for rationals a, b and m >= 0."""
    sa = _sign(a) if m else 0
    sb = _sign(b)
    if sa == 0:
        return sb
    if sb == 0 or sa == sb:
        return sa
    c = _sign(a * a * m - b * b)
    if c > 0:
        return sa
    if c < 0:
        return sb
    return 0


class RingError(ValueError):
    """Raised for elements outside a ring or incompatible rings."""


@dataclass(frozen=True)
class RingSpec:
    """One of the desk-scale base rings.

    ``kind`` is ``integers``, ``s-integers`` (Z[1/p1,...]), ``imaginary``
    or ``real`` (quadratic orders).  For quadratic kinds ``maximal`` selects
    w = (1+sqrt(d))/2 when d = 1 mod 4; otherwise w = sqrt(d).
    """

    kind: str
    d: int = 0
    primes: tuple[int, ...] = ()
    maximal: bool = True

    def __post_init__(self):
        if self.kind in (IMAGINARY, REAL):
            if not is_squarefree(self.d) or self.d in (0, 1):
                raise RingError(f"d={self.d} must be squarefree and not 0, 1")
            if (self.kind == IMAGINARY) != (self.d < 0):
                raise RingError(f"kind {self.kind} does not match d={self.d}")
            if self.d % 4 != 1 and not self.maximal:
                # Z[sqrt(d)] is already the maximal order here.
                object.__setattr__(self, "maximal", True)
        elif self.kind == S_INTEGERS:
            if not self.primes:
                raise RingError("S must be nonempty for s-integers")
            for p in self.primes:
                if p < 2 or len(factorint(p)) != 1 or factorint(p)[p] != 1:
                    raise RingError(f"{p} is not prime")
            object.__setattr__(self, "primes", tuple(sorted(set(self.primes))))
        elif self.kind != INTEGERS:
            raise RingError(f"unknown ring kind {self.kind!r}")

    # -- constructors -----------------------------------------------------
    @classmethod
    def integers(cls) -> RingSpec:
        return cls(INTEGERS)

    @classmethod
    def s_integers(cls, *primes: int) -> RingSpec:
        return cls(S_INTEGERS, primes=tuple(primes))

    @classmethod
    def quadratic(cls, d: int, maximal: bool = True) -> RingSpec:
        return cls(IMAGINARY if d < 0 else REAL, d=d, maximal=maximal)

    # -- structure --------------------------------------------------------
    @property
    def is_quadratic(self) -> bool:
        return self.kind in (IMAGINARY, REAL)

    @property
    def half_omega(self) -> bool:
        """True when w = (1+sqrt(d))/2."""
        return self.is_quadratic and self.maximal and self.d % 4 == 1

    @property
    def omega_trace(self) -> int:
        return 1 if self.half_omega else 0

    @property
    def omega_const(self) -> int:
        """The constant c0 in w^2 = trace*w + c0."""
        if not self.is_quadratic:
            return 0
        return (self.d - 1) // 4 if self.half_omega else self.d

    def __str__(self) -> str:
        if self.kind == INTEGERS:
            return "Z"
        if self.kind == S_INTEGERS:
            return "Z[" + ",".join(f"1/{p}" for p in self.primes) + "]"
        if self.maximal:
            return f"O({self.d})"
        return f"Z[sqrt({self.d})]"

    # -- elements ---------------------------------------------------------
    def elem(self, u=0, v=0) -> RElem:
        """The field element u + v*w (u, v rational)."""
        u, v = Fraction(u), Fraction(v)
        if v and not self.is_quadratic:
            raise RingError(f"{self} has no basis element w")
        den = u.denominator * v.denominator // math.gcd(u.denominator, v.denominator)
        return RElem._make(int(u * den), int(v * den), den, self)

    @property
    def one(self) -> RElem:
        return self.elem(1)

    @property
    def omega(self) -> RElem:
        return self.elem(0, 1)

    def coerce(self, x):
        """Canonical in-memory form: ``int``/``Fraction`` over Q-type rings,
        :class:`RElem` over quadratic rings."""
        if isinstance(x, RElem):
            if x.b == 0 and not self.is_quadratic:
                return x.a if x.den == 1 else Fraction(x.a, x.den)
            if x.ring != self:
                if x.b == 0:
                    return self.elem(Fraction(x.a, x.den))
                raise RingError(f"element of {x.ring} used in {self}")
            return x
        if isinstance(x, (int, Fraction)):
            if self.is_quadratic:
                return self.elem(x)
            if isinstance(x, Fraction) and x.denominator == 1:
                return x.numerator
            return x
        raise RingError(f"cannot coerce {x!r} into {self}")

    def contains(self, x) -> bool:
        """Membership predicate for R inside its fraction field."""
        if isinstance(x, int):
            return True
        if isinstance(x, Fraction):
            x = self.elem(x)
        if isinstance(x, RElem):
            if x.b and not self.is_quadratic:
                return False
            den = x.den
            if self.kind == S_INTEGERS:
                for p in self.primes:
                    while den % p == 0:
                        den //= p
            return den == 1
        return False

    def box(self, H: int):
        """All ring elements of height <= H, in lexicographic (u, v) order."""
        if H < 1:
            return []
        if self.kind == INTEGERS:
            return list(range(-H, H + 1))
        if self.kind == S_INTEGERS:
            dens = [1]
            changed = True
            while changed:
                changed = False
                for q in list(dens):
                    for p in self.primes:
                        if q * p <= H and q * p not in dens:
                            dens.append(q * p)
                            changed = True
            vals = {Fraction(n, q) for q in dens for n in range(-H, H + 1)}
            return [self.coerce(v) for v in sorted(vals) if height(v) <= H]
        rng = range(-H, H + 1)
        return [RElem._make(u, v, 1, self) for u in rng for v in rng]

    def is_unit(self, x) -> bool:
        x = self.coerce(x)
        if x == 0:
            return False
        if not self.contains(x):
            return False
        if self.kind == INTEGERS:
            return abs(x) == 1
        if self.kind == S_INTEGERS:
            return self.contains(1 / Fraction(x))
        return abs(x.norm()) == 1 and x.norm().denominator == 1


Z = RingSpec.integers()


class RElem:
    """An element (a + b*w)/den of the fraction field of a base ring.

    Instances are immutable and kept in canonical form (den > 0 and
    gcd(a, b, den) == 1), so structural equality is field equality.
    """

    __slots__ = ("a", "b", "den", "ring")

    def __init__(self, u=0, v=0, ring: RingSpec = Z):
        e = ring.elem(u, v)
        object.__setattr__(self, "a", e.a)
        object.__setattr__(self, "b", e.b)
        object.__setattr__(self, "den", e.den)
        object.__setattr__(self, "ring", ring)

    @classmethod
    def _make(cls, a: int, b: int, den: int, ring: RingSpec) -> RElem:
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            a, b, den = -a, -b, -den
        if den != 1:
            g = math.gcd(math.gcd(a, b), den)
            if g != 1:
                a, b, den = a // g, b // g, den // g
        obj = object.__new__(cls)
        object.__setattr__(obj, "a", a)
        object.__setattr__(obj, "b", b)
        object.__setattr__(obj, "den", den)
        object.__setattr__(obj, "ring", ring)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("RElem is immutable")

    def __reduce__(self):
        return (RElem._make, (self.a, self.b, self.den, self.ring))

    # -- coordinates --------------------------------------------------------
    @property
    def u(self) -> Fraction:
        return Fraction(self.a, self.den)

    @property
    def v(self) -> Fraction:
        return Fraction(self.b, self.den)

    def sqrt_d_coords(self) -> tuple[Fraction, Fraction]:
        """(r, s) with self == r + s*sqrt(d)."""
        if self.ring.half_omega:
            return Fraction(2 * self.a + self.b, 2 * self.den), Fraction(self.b, 2 * self.den)
        return self.u, self.v

    # -- arithmetic ---------------------------------------------------------
    def _lift(self, other) -> RElem | None:
        if isinstance(other, RElem):
            if other.ring is self.ring or other.ring == self.ring:
                return other
            if other.b == 0:
                return RElem._make(other.a, 0, other.den, self.ring)
            if self.b == 0:
                return None
            raise RingError(f"mixing {self.ring} and {other.ring}")
        if isinstance(other, int):
            return RElem._make(other, 0, 1, self.ring)
        if isinstance(other, Fraction):
            return RElem._make(other.numerator, 0, other.denominator, self.ring)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            if isinstance(other, RElem):
                return other._lift(self) + other
            return NotImplemented
        if self.den == o.den:
            return RElem._make(self.a + o.a, self.b + o.b, self.den, self.ring)
        return RElem._make(
            self.a * o.den + o.a * self.den, self.b * o.den + o.b * self.den, self.den * o.den, self.ring
        )

    __radd__ = __add__

    def __neg__(self):
        return RElem._make(-self.a, -self.b, self.den, self.ring)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            if isinstance(other, RElem):
                return other._lift(self) - other
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            if isinstance(other, RElem):
                return other._lift(self) * other
            return NotImplemented
        r = self.ring
        a1, b1, a2, b2 = self.a, self.b, o.a, o.b
        if b1 == 0 and b2 == 0:
            return RElem._make(a1 * a2, 0, self.den * o.den, r)
        bb = b1 * b2
        return RElem._make(
            a1 * a2 + r.omega_const * bb,
            a1 * b2 + a2 * b1 + r.omega_trace * bb,
            self.den * o.den,
            r,
        )

    __rmul__ = __mul__

    def conj(self) -> RElem:
        """Galois conjugate (w -> trace - w)."""
        return RElem._make(self.a + self.b * self.ring.omega_trace, -self.b, self.den, self.ring)

    def norm(self) -> Fraction:
        a, b, r = self.a, self.b, self.ring
        return Fraction(a * a + a * b * r.omega_trace - b * b * r.omega_const, self.den * self.den)

    def trace(self) -> Fraction:
        return Fraction(2 * self.a + self.b * self.ring.omega_trace, self.den)

    def inverse(self) -> RElem:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in " + str(self.ring))
        c = self.conj()
        return RElem._make(c.a * n.denominator, c.b * n.denominator, c.den * n.numerator, self.ring)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            if isinstance(other, RElem):
                return other._lift(self) / other
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = RElem._make(1, 0, 1, self.ring)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, RElem):
            if self.b == 0 and other.b == 0:
                return self.a == other.a and self.den == other.den
            return (self.a, self.b, self.den) == (other.a, other.b, other.den) and self.ring == other.ring
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and Fraction(self.a, self.den) == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.den))
        return hash((self.a, self.b, self.den))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def is_rational(self) -> bool:
        return self.b == 0

    # -- embeddings ---------------------------------------------------------
    def __complex__(self):
        r, s = self.sqrt_d_coords()
        if not s:
            return complex(float(r))
        return complex(float(r)) + float(s) * cmath.sqrt(self.ring.d)

    def to_mp(self, embedding: int = 0):
        import mpmath

        r, s = self.sqrt_d_coords()
        val = mpmath.mpf(r.numerator) / r.denominator
        if s:
            root = mpmath.sqrt(mpmath.mpf(self.ring.d))
            if embedding:
                root = -root
            val = val + (mpmath.mpf(s.numerator) / s.denominator) * root
        return mpmath.mpc(val)

    def __repr__(self):
        return f"RElem({format_elem(self)!r}, ring={self.ring})"

    def __str__(self):
        return format_elem(self)


Scalar = Union[int, Fraction, RElem]


def format_elem(x: Scalar) -> str:
    """Element literal ``u+v*w`` with rationals as ``n/m``."""
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    u, v = x.u, x.v
    if v == 0:
        return str(u)
    vs = "w" if v == 1 else "-w" if v == -1 else f"{v}*w"
    if u == 0:
        return vs
    if vs.startswith("-"):
        return f"{u}{vs}"
    return f"{u}+{vs}"


def json_scalar(x: Scalar):
    """Rational integers as JSON numbers, anything else as its literal."""
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    if isinstance(x, RElem) and x.v == 0 and Fraction(x.u).denominator == 1:
        return int(x.u)
    return format_elem(x)


def height(x) -> int:
    """Max of |numerator| and denominator over the (u, v) coordinates."""
    if isinstance(x, int):
        return max(abs(x), 1)
    if isinstance(x, Fraction):
        return max(abs(x.numerator), x.denominator)
    if isinstance(x, RElem):
        u, v = x.u, x.v
        return max(abs(u.numerator), u.denominator, abs(v.numerator), v.denominator)
    raise TypeError(f"no height for {x!r}")


def sort_key(x):
    """Lexicographic (u, v) key used for deterministic output order."""
    if isinstance(x, RElem):
        return (x.u, x.v)
    return (Fraction(x), Fraction(0))


def as_field(x, ring: RingSpec) -> RElem:
    """View a scalar as an :class:`RElem` of ``ring``'s fraction field."""
    if isinstance(x, RElem):
        return x if x.ring == ring else RElem._make(x.a, x.b, x.den, ring) if x.b == 0 else _mismatch(x, ring)
    if isinstance(x, int):
        return RElem._make(x, 0, 1, ring)
    if isinstance(x, Fraction):
        return RElem._make(x.numerator, 0, x.denominator, ring)
    raise RingError(f"cannot view {x!r} in {ring}")


def _mismatch(x, ring):
    raise RingError(f"element {x} of {x.ring} is not in {ring}")


def sign_real(x, ring: RingSpec | None = None) -> int:
    """Exact sign of a real field element (real embedding sqrt(d) > 0)."""
    if isinstance(x, (int, Fraction)):
        return _sign(x)
    if x.b == 0:
        return _sign(x.a)
    if x.ring.kind == IMAGINARY:
        raise RingError("sign of a non-real element")
    r, s = x.sqrt_d_coords()
    return sign_sqrt_form(s, r, Fraction(x.ring.d))


def sqrt_in_field(x: RElem) -> RElem | None:
    """A square root of ``x`` inside K, or None."""
    ring = x.ring
    if not x:
        return x
    r, s = x.sqrt_d_coords()
    if not ring.is_quadratic or s == 0:
        q = _rational_sqrt(r)
        if q is not None:
            return RElem._make(q.numerator, 0, q.denominator, ring)
        if not ring.is_quadratic:
            return None
        q = _rational_sqrt(r / ring.d)
        if q is None:
            return None
        return _from_sqrt_d(Fraction(0), q, ring)
    d = ring.d
    n = _rational_sqrt(r * r - d * s * s)
    if n is None:
        return None
    for e2 in ((r + n) / 2, (r - n) / 2):
        e = _rational_sqrt(e2)
        if e:
            f = s / (2 * e)
            cand = _from_sqrt_d(e, f, ring)
            if cand * cand == x:
                return cand
    return None


def _from_sqrt_d(r: Fraction, s: Fraction, ring: RingSpec) -> RElem:
    # r + s*sqrt(d) -> basis {1, w}
    if ring.half_omega:
        return ring.elem(r - s, 2 * s)
    return ring.elem(r, s)


# ---------------------------------------------------------------------------
# Quadratic extensions K(sqrt(delta))
# ---------------------------------------------------------------------------


class RelQuadIrr:
    """The value p + q*sqrt(delta) with p, q, delta in K and q != 0.

    The canonical form has r = 1, delta integral with square-free content,
    and sqrt(delta) the principal square root (real embedding sqrt(d) > 0
    for real base fields).
    """

    __slots__ = ("p", "q", "delta", "ring")

    def __init__(self, p, q, delta, ring: RingSpec):
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "ring", ring)

    def __setattr__(self, name, value):
        raise AttributeError("RelQuadIrr is immutable")

    def __reduce__(self):
        return (RelQuadIrr, (self.p, self.q, self.delta, self.ring))

    @property
    def r(self) -> RElem:
        return self.ring.one

    @classmethod
    def make(cls, p, q, r, delta, ring: RingSpec) -> RelQuadIrr:
        v = quad_value(p, q, r, delta, ring)
        if not isinstance(v, RelQuadIrr):
            raise ValueError(f"value {v} lies in the base field")
        return v

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, RelQuadIrr):
            if other.delta != self.delta or other.ring != self.ring:
                other = other.rebase(self.delta)
            return other.p, other.q
        if isinstance(other, QuadIrr):
            return self._coerce(other.to_rel(self.ring))
        try:
            return as_field(other, self.ring), as_field(0, self.ring)
        except RingError:
            return None

    def _new(self, p, q):
        return _canon_ext(p, q, self.delta, self.ring)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._new(self.p + o[0], self.q + o[1])

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.p, -self.q)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._new(self.p - o[0], self.q - o[1])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p2, q2 = o
        return self._new(self.p * p2 + self.q * q2 * self.delta, self.p * q2 + self.q * p2)

    __rmul__ = __mul__

    def inverse(self):
        n = self.norm()
        return self._new(self.p / n, -self.q / n)

    def __truediv__(self, other):
        if isinstance(other, (RelQuadIrr, QuadIrr)):
            o = self._coerce(other)
            return self * _canon_ext(o[0], o[1], self.delta, self.ring).inverse()
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._new(self.p / o[0], self.q / o[0])

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = as_field(1, self.ring)
        base = self
        while n:
            if n & 1:
                result = base * result
            base = base * base
            n >>= 1
        return result

    def conj(self) -> RelQuadIrr:
        """Conjugate over K: sqrt(delta) -> -sqrt(delta)."""
        return RelQuadIrr(self.p, -self.q, self.delta, self.ring)

    def norm(self) -> RElem:
        return self.p * self.p - self.q * self.q * self.delta

    def trace(self) -> RElem:
        return self.p + self.p

    def rebase(self, delta) -> RelQuadIrr:
        """Re-express over sqrt(delta) when delta/self.delta is a square in K."""
        ratio = sqrt_in_field(as_field(self.delta, self.ring) / as_field(delta, self.ring))
        if ratio is None:
            raise RingError(f"sqrt({self.delta}) is not in K(sqrt({delta}))")
        # sqrt(self.delta) = +-ratio*sqrt(delta); pick the principal branch.
        s_old = _principal_sqrt(complex(as_field(self.delta, self.ring)))
        s_new = _principal_sqrt(complex(as_field(delta, self.ring)))
        if abs(complex(ratio) * s_new - s_old) > abs(complex(ratio) * s_new + s_old):
            ratio = -ratio
        return RelQuadIrr(self.p, self.q * ratio, delta, self.ring)

    # -- equality -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, RelQuadIrr):
            return (self.p, self.q, self.delta, self.ring) == (other.p, other.q, other.delta, other.ring)
        if isinstance(other, QuadIrr):
            return self == other.to_rel(self.ring)
        return False

    def __hash__(self):
        return hash((self.p, self.q, self.delta))

    def key(self):
        return (self.p, self.q, self.delta)

    # -- numerics -----------------------------------------------------------
    def sqrt_delta_complex(self) -> complex:
        return _principal_sqrt(complex(as_field(self.delta, self.ring)))

    def __complex__(self):
        return complex(as_field(self.p, self.ring)) + complex(as_field(self.q, self.ring)) * self.sqrt_delta_complex()

    def to_mp(self, embedding: int = 0):
        import mpmath

        p = as_field(self.p, self.ring).to_mp(embedding)
        q = as_field(self.q, self.ring).to_mp(embedding)
        dl = as_field(self.delta, self.ring).to_mp(embedding)
        if dl.imag == 0 and dl.real < 0:
            root = mpmath.mpc(0, mpmath.sqrt(-dl.real))
        else:
            root = mpmath.sqrt(dl)
        return p + q * root

    def __repr__(self):
        return f"RelQuadIrr({format_value(self)!r}, ring={self.ring})"

    def __str__(self):
        return format_value(self)


def _principal_sqrt(z: complex) -> complex:
    if z.imag == 0:
        z = complex(z.real, 0.0)
    return cmath.sqrt(z)


def _canon_ext(p, q, delta, ring: RingSpec):
    if not q:
        return ring.coerce(p) if not ring.is_quadratic else as_field(p, ring)
    return RelQuadIrr(as_field(p, ring), as_field(q, ring), delta, ring)


def quad_value(p, q, r, delta, ring: RingSpec):
    """Canonical value of (p + q*sqrt(delta))/r: a field element when it lies
    in K, otherwise a :class:`RelQuadIrr`."""
    p, q, r, delta = (as_field(x, ring) for x in (p, q, r, delta))
    if not r:
        raise ZeroDivisionError("r == 0")
    p, q = p / r, q / r
    if not q:
        return ring.coerce(p)
    if not delta:
        return ring.coerce(p)
    root = sqrt_in_field(delta)
    if root is not None:
        return ring.coerce(p + q * root)
    # Clear the denominator of delta, then strip square content.
    den = delta.den
    q = q / den
    a, b = delta.a * den, delta.b * den
    g = math.gcd(a, b)
    s, _ = squarefree_decompose(g) if g else (1, 1)
    if s > 1:
        a, b, q = a // (s * s), b // (s * s), q * s
    delta = RElem._make(a, b, 1, ring)
    return RelQuadIrr(p, q, delta, ring)


# ---------------------------------------------------------------------------
# Quadratic irrationals over Q in integer form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadIrr:
    """The value (p + q*sqrt(D))/r with r > 0, q != 0, gcd(p, q, r) == 1
    and D squarefree, D not in {0, 1}."""

    p: int
    q: int
    r: int
    D: int

    @classmethod
    def make(cls, p: int, q: int, r: int, D: int):
        """Normalize; returns a Fraction when the value is rational."""
        if r == 0:
            raise ZeroDivisionError("r == 0")
        if q == 0 or D == 0:
            return _frac_or_int(Fraction(p, r))
        s, D = squarefree_decompose(D)
        q *= s
        if D == 1:
            return _frac_or_int(Fraction(p + q, r))
        if r < 0:
            p, q, r = -p, -q, -r
        g = math.gcd(math.gcd(p, q), r)
        return cls(p // g, q // g, r // g, D)

    def __post_init__(self):
        if self.r <= 0 or self.q == 0 or self.D in (0, 1) or not is_squarefree(self.D):
            raise ValueError(f"non-canonical QuadIrr {self.p, self.q, self.r, self.D}")
        if math.gcd(math.gcd(self.p, self.q), self.r) != 1:
            raise ValueError("gcd(p, q, r) != 1")

    @property
    def is_real(self) -> bool:
        return self.D > 0

    def to_rel(self, ring: RingSpec = Z) -> RelQuadIrr:
        v = quad_value(self.p, self.q, self.r, self.D, ring)
        return v

    @classmethod
    def from_rel(cls, x: RelQuadIrr):
        p, q, dl = x.p, x.q, x.delta
        if p.b or q.b or dl.b:
            raise RingError("value is not quadratic over Q")
        n = math.lcm(p.den, q.den)
        return cls.make(int(p.u * n), int(q.u * n), n, dl.a)

    def __add__(self, other):
        return _from_any(self.to_rel() + _rel_operand(other))

    __radd__ = __add__

    def __sub__(self, other):
        return _from_any(self.to_rel() - _rel_operand(other))

    def __rsub__(self, other):
        return _from_any(_rel_operand(other) - self.to_rel())

    def __mul__(self, other):
        return _from_any(self.to_rel() * _rel_operand(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return _from_any(self.to_rel() / _rel_operand(other))

    def __rtruediv__(self, other):
        return _from_any(_rel_operand(other) * self.to_rel().inverse())

    def __neg__(self):
        return QuadIrr(-self.p, -self.q, self.r, self.D)

    def conj(self) -> QuadIrr:
        return QuadIrr(self.p, -self.q, self.r, self.D)

    def norm(self) -> Fraction:
        return Fraction(self.p * self.p - self.q * self.q * self.D, self.r * self.r)

    def floor(self) -> int:
        """Exact floor of a real quadratic irrational."""
        if self.D < 0:
            raise ValueError("floor of a complex value")
        root = math.isqrt(self.q * self.q * self.D)  # irrational: never exact
        n = root if self.q > 0 else -root - 1
        return (self.p + n) // self.r

    def __float__(self):
        return (self.p + self.q * math.sqrt(self.D)) / self.r

    def __complex__(self):
        return (self.p + self.q * cmath.sqrt(self.D)) / self.r

    def to_mp(self, embedding: int = 0):
        import mpmath

        return mpmath.mpc(self.p + self.q * mpmath.sqrt(self.D)) / self.r

    def __str__(self):
        return format_value(self)


def _frac_or_int(x: Fraction):
    return x.numerator if x.denominator == 1 else x


def _rel_operand(x):
    if isinstance(x, QuadIrr):
        return x.to_rel()
    if isinstance(x, RelQuadIrr):
        return x
    return as_field(x, Z) if not isinstance(x, RElem) else x


def _from_any(x):
    if isinstance(x, RelQuadIrr):
        return QuadIrr.from_rel(x)
    if isinstance(x, RElem):
        return _frac_or_int(x.u)
    return x


def to_rel(x, ring: RingSpec):
    """Promote a value to the K(sqrt(delta)) or K representation over ring."""
    if isinstance(x, QuadIrr):
        return x.to_rel(ring)
    if isinstance(x, RelQuadIrr):
        return x
    return as_field(x, ring)


# ---------------------------------------------------------------------------
# Exact sign of real parts
# ---------------------------------------------------------------------------


def _rel_parts(x):
    if isinstance(x, QuadIrr):
        x = x.to_rel()
    if isinstance(x, RelQuadIrr):
        return x.ring, as_field(x.p, x.ring), as_field(x.q, x.ring), as_field(x.delta, x.ring)
    if isinstance(x, RElem):
        return x.ring, x, None, None
    return Z, as_field(x, Z), None, None


def re_sign(x) -> int:
    """Exact sign of Re(x) for a field element or quadratic extension value.

    A float evaluation decides whenever its error bound clears zero; the
    exact radical analysis runs only near zero.
    """
    ring, a, b, delta = _rel_parts(x)
    try:
        approx = complex(x if not isinstance(x, int) else float(x)).real
        mags = abs(complex(a))
        if b is not None:
            mags += abs(complex(b)) * abs(complex(delta)) ** 0.5
        if abs(approx) > 1e-9 * (1.0 + mags):
            return 1 if approx > 0 else -1
    except (OverflowError, ValueError):
        pass
    return _re_sign_exact(ring, a, b, delta)


def _re_sign_exact(ring: RingSpec, a: RElem, b, delta) -> int:
    if ring.kind != IMAGINARY:
        if b is None:
            return sign_real(a)
        if sign_real(delta) < 0:
            return sign_real(a)
        sa, sb = sign_real(a), sign_real(b)
        if sa == 0:
            return sb
        if sb == 0 or sa == sb:
            return sa
        c = sign_real(a * a - b * b * delta)
        return sa if c > 0 else sb if c < 0 else 0
    r0, _ = a.sqrt_d_coords()
    if b is None:
        return _sign(r0)
    # Re(a + b*s) = r0 + r1*X + r2*Y with X = Re(s), Y = sqrt|d|*Im(s).
    absd = -ring.d
    r1, beta = b.sqrt_d_coords()
    r2 = -beta
    dr, gamma = delta.sqrt_d_coords()
    m = dr * dr + gamma * gamma * absd
    sx = 0 if (gamma == 0 and dr < 0) else 1
    sy = _sign(gamma) if sx else 1
    s1, s2 = _sign(r1) * sx, _sign(r2) * sy
    k_sqrt = (r1 * r1 - r2 * r2 * absd) / 2
    k_rat = (r1 * r1 + r2 * r2 * absd) * dr / 2
    if s1 == 0:
        st = s2
    elif s2 == 0 or s1 == s2:
        st = s1
    else:
        c = sign_sqrt_form(k_sqrt, k_rat, m)
        st = s1 if c > 0 else s2 if c < 0 else 0
    s0 = _sign(r0)
    if s0 == 0:
        return st
    if st == 0 or st == s0:
        return s0
    # T^2 = sqrt(m)*(r1^2 + r2^2|d|)/2 + dr*(r1^2 - r2^2|d|)/2 + r1*r2*|d|*gamma
    t2_sqrt = (r1 * r1 + r2 * r2 * absd) / 2
    t2_rat = dr * (r1 * r1 - r2 * r2 * absd) / 2 + r1 * r2 * absd * gamma
    c = sign_sqrt_form(-t2_sqrt, r0 * r0 - t2_rat, m)
    return s0 if c > 0 else st if c < 0 else 0


# ---------------------------------------------------------------------------
# Spec-level operations
# ---------------------------------------------------------------------------


def arith(x, y, op: str):
    """Exact ``x op y``; for ``div`` returns ``(value, in_ring)``."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        if not y:
            raise ZeroDivisionError("division by zero")
        if isinstance(x, int) and isinstance(y, int):
            val = _frac_or_int(Fraction(x, y))
            return val, isinstance(val, int)
        val = x / y
        ring = val.ring if isinstance(val, RElem) else Z
        return val, ring.contains(val)
    raise ValueError(f"unknown op {op!r}")


def norm_conj(x):
    """(norm, conjugate) over the base field (over Q for QuadIrr)."""
    if isinstance(x, (int, Fraction)):
        return x * x, x
    return x.norm(), x.conj()


def nearest(x, spec: RingSpec):
    """Nearest lattice element with the cell tie-break.

    Over Z (and Z[1/p], whose rounding lattice is Z): the integer c with
    x - c in (-1/2, 1/2].  Over imaginary quadratic orders: the closest
    lattice point, ties going to the lexicographically smallest (Re, Im).
    """
    if spec.kind == IMAGINARY:
        return _lattice_nearest(x, spec)
    if spec.kind == REAL:
        raise RingError("nearest() is defined for Z and imaginary quadratic orders")
    if isinstance(x, RelQuadIrr):
        x = QuadIrr.from_rel(x)
    if isinstance(x, RElem):
        if x.b:
            raise RingError("not a real rational value")
        x = x.u
    if isinstance(x, (int, Fraction)):
        return math.ceil(Fraction(x) - Fraction(1, 2))
    if not x.is_real:
        raise RingError("complex value has no nearest integer")
    try:
        f = float(x) - 0.5
        c = math.ceil(f)
        if abs(f - round(f)) > 1e-9 * (1.0 + abs(f)):
            return c
    except OverflowError:
        pass
    # ceil(x - 1/2) for irrational x is floor(x - 1/2) + 1.
    shifted = QuadIrr.make(2 * x.p - x.r, 2 * x.q, 2 * x.r, x.D)
    return shifted.floor() + 1


def _lattice_coords(z: complex, ring: RingSpec) -> tuple[float, float]:
    w = complex(ring.omega)
    v = z.imag / w.imag
    return z.real - v * w.real, v


def _closer(x, c1: RElem, c2: RElem) -> bool:
    """True when c1 is strictly preferred to c2 as nearest point of x."""
    g = c1 - c2
    y = to_rel(x, c1.ring) * g.conj() * 2 - (c1.norm() - c2.norm())
    s = re_sign(y)
    if s:
        return s > 0
    return cell_order_key(c1) < cell_order_key(c2)


def cell_order_key(c: RElem):
    """(Re c, Im c) ordering for tie-breaks; Im compares through v."""
    r, s = c.sqrt_d_coords()
    return (r, s)


def _lattice_nearest(x, ring: RingSpec) -> RElem:
    z = complex(x)
    u0, v0 = _lattice_coords(z, ring)
    iu, iv = round(u0), round(v0)
    cands = [RElem._make(iu + i, iv + j, 1, ring) for i in range(-2, 3) for j in range(-2, 3)]
    cands.sort(key=lambda c: abs(z - complex(c)))
    limit = abs(z - complex(cands[0])) + 0.5
    cands = [c for c in cands if abs(z - complex(c)) <= limit]
    best = cands[0]
    for c in cands[1:]:
        if _closer(x, c, best):
            best = c
    return best


def unit_generators(spec: RingSpec) -> list:
    """Torsion generator first, then generators of R^x modulo torsion."""
    if spec.kind == INTEGERS:
        return [-1]
    if spec.kind == S_INTEGERS:
        return [-1, *spec.primes]
    if spec.kind == IMAGINARY:
        if spec.d == -1:
            return [spec.omega]
        if spec.d == -3 and spec.half_omega:
            return [spec.omega]
        return [spec.elem(-1)]
    from .pell import fundamental_pell, order_unit

    if spec.half_omega:
        c, d = order_unit((1, -1, -(spec.d - 1) // 4))
        eps = spec.elem(d, c)
    else:
        x, y, _ = fundamental_pell(spec.d)
        eps = spec.elem(y, x)
    return [spec.elem(-1), eps]


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------


def _paren(s: str) -> str:
    body = s[1:] if s.startswith("-") else s
    if any(ch in body for ch in "+-*/"):
        return f"({s})"
    return s


def format_value(x) -> str:
    """String form that :func:`pcfvar.literals.parse_value` reads back."""
    if isinstance(x, (int, Fraction, RElem)):
        return format_elem(x)
    if isinstance(x, QuadIrr):
        p, q, r, D = x.p, x.q, x.r, x.D
        root = f"sqrt({D})"
        qs = root if q == 1 else f"-{root}" if q == -1 else f"{q}*{root}"
        num = qs if p == 0 else f"{p}{qs}" if qs.startswith("-") else f"{p}+{qs}"
        if r == 1:
            return num
        if p == 0 and abs(q) == 1:
            return f"{num}/{r}"
        return f"({num})/{r}"
    if isinstance(x, RelQuadIrr):
        root = f"sqrt({format_elem(x.delta)})"
        q, neg = x.q, False
        if q.b == 0 and q.a < 0:
            q, neg = -q, True
        qs = root if q == 1 else f"{_paren(format_elem(q))}*{root}"
        if neg:
            qs = "-" + qs
        if not x.p:
            return qs
        ps = format_elem(x.p)
        if qs.startswith("-"):
            return f"{ps}{qs}"
        return f"{ps}+{qs}"
    raise TypeError(f"cannot format {x!r}")
