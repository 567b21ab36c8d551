"""Text forms: ring names, element and value literals, PCFs, quadratics."""
from __future__ import annotations

import ast
import re
from fractions import Fraction

from .ring import (
    QuadIrr,
    RElem,
    RelQuadIrr,
    RingSpec,
    Z,
    as_field,
    quad_value,
    re_sign,
    sqrt_in_field,
)


class ParseError(ValueError):
    """Malformed literal or DSL string."""


_RING_PATTERNS = [
    (re.compile(r"^(Z|ZZ)$"), lambda m: RingSpec.integers()),
    (re.compile(r"^Z\[i\]$"), lambda m: RingSpec.quadratic(-1)),
    (
        re.compile(r"^Z\[\s*1/\d+(\s*,\s*1/\d+)*\s*\]$"),
        lambda m: RingSpec.s_integers(*(int(p) for p in re.findall(r"1/(\d+)", m.group(0)))),
    ),
    (re.compile(r"^O\(\s*(-?\d+)\s*\)$"), lambda m: RingSpec.quadratic(int(m.group(1)), maximal=True)),
    (
        re.compile(r"^Z\[\s*sqrt\(\s*(-?\d+)\s*\)\s*\]$"),
        lambda m: RingSpec.quadratic(int(m.group(1)), maximal=False),
    ),
]


def parse_ring(text: str) -> RingSpec:
    """Parse "Z", "Z[1/p]", "O(d)", "Z[sqrt(d)]" (and the alias "Z[i]")."""
    s = text.strip()
    for pat, build in _RING_PATTERNS:
        m = pat.match(s)
        if m:
            try:
                return build(m)
            except ValueError as exc:
                raise ParseError(f"bad ring {text!r}: {exc}") from exc
    raise ParseError(f"unrecognised ring {text!r}")


def format_ring(spec: RingSpec) -> str:
    return str(spec)


# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------


def _principal_root(x: RElem, ring: RingSpec):
    """Principal sqrt(x): an element of K when possible, else a RelQuadIrr."""
    root = sqrt_in_field(x)
    if root is None:
        v = quad_value(0, 1, 1, x, ring)
        return v if isinstance(v, RelQuadIrr) else as_field(v, ring)
    if not root:
        return root
    s = re_sign(root)
    if s < 0:
        return -root
    if s == 0:
        # purely imaginary: principal root has positive imaginary part
        _, im = root.sqrt_d_coords()
        if im < 0:
            return -root
    return root


class _Evaluator:
    def __init__(self, ring: RingSpec, source: str):
        self.ring = ring
        self.source = source

    def lift(self, x):
        if isinstance(x, RelQuadIrr):
            return x
        return as_field(x, self.ring)

    def visit(self, node):
        ring = self.ring
        if isinstance(node, ast.Expression):
            return self.visit(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                raise ParseError(f"unsupported constant {node.value!r}")
            text = ast.get_source_segment(self.source, node) or repr(node.value)
            return as_field(Fraction(text), ring)
        if isinstance(node, ast.Name):
            if node.id == "w":
                if not ring.is_quadratic:
                    raise ParseError(f"{ring} has no basis element w")
                return ring.omega
            if node.id == "i":
                return _principal_root(as_field(-1, ring), ring)
            raise ParseError(f"unknown name {node.id!r}")
        if isinstance(node, ast.UnaryOp):
            v = self.visit(node.operand)
            if isinstance(node.op, ast.USub):
                return -v
            if isinstance(node.op, ast.UAdd):
                return v
        if isinstance(node, ast.BinOp):
            left, right = self.visit(node.left), self.visit(node.right)
            op = node.op
            try:
                if isinstance(op, ast.Add):
                    return self.lift(left) + right
                if isinstance(op, ast.Sub):
                    return self.lift(left) - right
                if isinstance(op, ast.Mult):
                    return self.lift(left) * right
                if isinstance(op, ast.Div):
                    return self.lift(left) / right
                if isinstance(op, ast.Pow):
                    if not (isinstance(right, RElem) and right.b == 0 and right.den == 1):
                        raise ParseError("exponent must be an integer")
                    return self.lift(left) ** right.a
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(str(exc)) from exc
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt":
            if len(node.args) != 1 or node.keywords:
                raise ParseError("sqrt takes one argument")
            arg = self.visit(node.args[0])
            if isinstance(arg, RelQuadIrr):
                raise ParseError("nested square roots are not supported")
            return _principal_root(arg, ring)
        raise ParseError(f"unsupported syntax in {self.source!r}")


def parse_value(text: str, ring: RingSpec = Z):
    """Evaluate an exact value expression over ``ring``.

    Accepts integers, decimals, ``w`` (the basis element), ``i``, ``sqrt()``
    and the operators ``+ - * / **``.  Returns an int/Fraction over Q-type
    rings, an :class:`RElem` over quadratic rings, a :class:`QuadIrr` for
    irrationalities over Q and a :class:`RelQuadIrr` otherwise.
    """
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}") from exc
    val = _Evaluator(ring, text.strip()).visit(tree)
    return normalize_value(val, ring)


def normalize_value(val, ring: RingSpec):
    if isinstance(val, RelQuadIrr):
        if not ring.is_quadratic:
            return QuadIrr.from_rel(val)
        return val
    return ring.coerce(val)


def parse_elem(text: str, ring: RingSpec = Z):
    """Parse a ring-element literal such as ``3``, ``7/4`` or ``-3+2*w``."""
    v = parse_value(text, ring)
    if isinstance(v, (QuadIrr, RelQuadIrr)):
        raise ParseError(f"{text!r} is not an element of {ring}")
    if not ring.contains(v):
        raise ParseError(f"{text!r} is not in {ring}")
    return v


def split_top(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside parentheses and brackets."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_elem_list(text: str, ring: RingSpec = Z) -> list:
    text = text.strip()
    if not text:
        return []
    return [parse_elem(p, ring) for p in split_top(text)]


def parse_pcf(text: str, ring: RingSpec = Z):
    """Parse ``[b1,...,bN; a1,...,ak]``; without ``;`` all terms are periodic."""
    from .contmat import PCF

    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError(f"PCF must be bracketed: {text!r}")
    body = s[1:-1]
    if ";" in body:
        pre, per = body.split(";", 1)
    else:
        pre, per = "", body
    try:
        return PCF(ring, tuple(parse_elem_list(pre, ring)), tuple(parse_elem_list(per, ring)))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def parse_quad(text: str, ring: RingSpec = Z):
    """Parse "A,B,C" into a QuadPoly."""
    from .contmat import QuadPoly

    parts = parse_elem_list(text, ring)
    if len(parts) != 3:
        raise ParseError(f"quadratic needs three coefficients: {text!r}")
    q = QuadPoly(*parts, ring=ring)
    if q.is_zero:
        raise ParseError("the zero polynomial has no roots")
    return q


def parse_matrix(text: str, ring: RingSpec = Z):
    """Parse "a,b,c,d" or "(a,b,c,d)" (row-major) into a Mat2."""
    from .contmat import Mat2

    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    parts = parse_elem_list(body, ring)
    if len(parts) != 4:
        raise ParseError(f"matrix needs four entries: {text!r}")
    return Mat2(*parts)


__all__ = [
    "ParseError",
    "parse_ring",
    "format_ring",
    "parse_value",
    "parse_elem",
    "parse_elem_list",
    "parse_pcf",
    "parse_quad",
    "parse_matrix",
    "split_top",
]
