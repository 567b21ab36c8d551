"""Nearest-integer continued fractions over Z."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .contmat import PCF
from .ring import QuadIrr, Z, nearest

# |c| > 2 beyond the first term makes the nearest-integer expansion unique
STRICT_TERM_BOUND = 2


class StepBudgetExceeded(RuntimeError):
    """No termination or state repeat within the step budget."""

    def __init__(self, message: str, terms=None):
        super().__init__(message)
        self.terms = list(terms or [])


@dataclass(frozen=True)
class NICFExpansion:
    """preperiod + overline(period); an empty period means a finite expansion."""

    preperiod: tuple
    period: tuple = ()

    @property
    def terminated(self) -> bool:
        return not self.period

    def terms(self, count: int) -> list:
        """The first ``count`` terms of the (possibly infinite) sequence."""
        out = list(self.preperiod[:count])
        while len(out) < count and self.period:
            out.extend(self.period[: count - len(out)])
        return out

    def canonical(self) -> NICFExpansion:
        """Minimal period, with trailing preperiod terms absorbed into it."""
        pre, per = list(self.preperiod), list(self.period)
        if not per:
            return NICFExpansion(tuple(pre), ())
        n = len(per)
        for m in range(1, n + 1):
            if n % m == 0 and per == per[:m] * (n // m):
                per = per[:m]
                break
        while pre and pre[-1] == per[-1]:
            pre.pop()
            per = [per[-1]] + per[:-1]
        return NICFExpansion(tuple(pre), tuple(per))

    def to_pcf(self) -> PCF:
        if not self.period:
            raise ValueError("finite expansion has no PCF form")
        return PCF(Z, self.preperiod, self.period)

    def to_json(self) -> dict:
        return {"preperiod": [_json_int(c) for c in self.preperiod], "period": [_json_int(c) for c in self.period]}


def _json_int(c):
    return c if isinstance(c, int) else str(c)


def _state_key(x):
    return (x.p, x.q, x.r, x.D) if isinstance(x, QuadIrr) else Fraction(x)


def nicf_expand(alpha, max_steps: int = 10_000) -> NICFExpansion:
    """Expand a rational or a real quadratic irrational with nearest-integer
    rounding (remainders in (-1/2, 1/2])."""
    if max_steps < 1:
        raise ValueError("max_steps must be positive")
    if isinstance(alpha, QuadIrr) and not alpha.is_real:
        raise ValueError("complex value: use the imaginary-quadratic expansion")
    x = alpha if isinstance(alpha, QuadIrr) else Fraction(alpha)
    seen: dict = {}
    terms: list[int] = []
    for _ in range(max_steps):
        key = _state_key(x)
        if key in seen:
            i = seen[key]
            return NICFExpansion(tuple(terms[:i]), tuple(terms[i:]))
        seen[key] = len(terms)
        c = nearest(x, Z)
        terms.append(c)
        rem = x - c
        if rem == 0:
            return NICFExpansion(tuple(terms), ())
        x = 1 / rem
    raise StepBudgetExceeded(f"no repeat within {max_steps} steps", terms)


def _sequence_for_check(e: NICFExpansion) -> list:
    # enough terms to see every index > 1 and every wrap-around pair
    if not e.period:
        return list(e.preperiod)
    return e.terms(len(e.preperiod) + 2 * len(e.period) + 1)


def hurwitz_valid(e: NICFExpansion) -> bool:
    """Conditions (a)-(c): |c_i| >= 2 for i > 1; a +-2 at i > 1 is followed by
    a term of the same sign; a finite expansion of length > 1 does not end
    in -2."""
    seq = _sequence_for_check(e)
    if not seq:
        return False
    last = len(seq) - 1
    for i in range(1, len(seq)):
        c = seq[i]
        if abs(c) < 2:
            return False
        if abs(c) == 2 and i < last and (c > 0) != (seq[i + 1] > 0):
            return False
    if e.terminated and len(seq) > 1 and seq[-1] == -2:
        return False
    return True


def strict_terms(e: NICFExpansion) -> bool:
    """All terms beyond the first exceed 2 in absolute value."""
    seq = _sequence_for_check(e)
    return all(abs(c) > STRICT_TERM_BOUND for c in seq[1:])


def finite_value(terms) -> Fraction:
    x = Fraction(terms[-1])
    for c in reversed(terms[:-1]):
        x = c + 1 / x
    return x


def expansion_value(e: NICFExpansion):
    """Exact value of an expansion (finite or periodic)."""
    from .pcf import exact_value

    if e.terminated:
        v = finite_value(e.preperiod)
        return v.numerator if v.denominator == 1 else v
    return exact_value(e.to_pcf())


def uniqueness_probe(e: NICFExpansion) -> bool:
    """Evaluate ``e`` and re-expand; True iff the expansion is reproduced."""
    if not hurwitz_valid(e):
        raise ValueError("expansion violates the Hurwitz conditions")
    value = expansion_value(e)
    steps = 4 * (len(e.preperiod) + len(e.period)) + 64
    return nicf_expand(value, steps).canonical() == e.canonical()
