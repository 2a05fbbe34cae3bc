"""Polynomial expressions in the two symbols ``n`` and ``v``.

Grammar (whitespace ignored, no implicit multiplication)::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" INTEGER)?
    atom   := INTEGER ("/" INTEGER)? | "n" | "v" | "(" expr ")"
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .poly import Poly, Scalar, as_scalar

MAX_EXPONENT = 64


class ExprError(ValueError):
    """Syntax or semantic error, carrying the 0-based character position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


@dataclass(frozen=True)
class BiPoly:
    """Sparse polynomial: ``terms[(i, j)]`` is the coefficient of n^i v^j."""

    terms: Mapping[tuple[int, int], Scalar] = field(default_factory=dict)

    def __post_init__(self):
        clean = {k: as_scalar(c) for k, c in self.terms.items() if c != 0}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def const(cls, c) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def from_poly(cls, p: Poly, n_degree: int = 0) -> "BiPoly":
        return cls({(n_degree, j): c for j, c in enumerate(p.coeffs)})

    @property
    def deg_n(self) -> int:
        return max((i for i, _ in self.terms), default=-1)

    @property
    def deg_v(self) -> int:
        return max((j for _, j in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "BiPoly") -> "BiPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return BiPoly(out)

    def __neg__(self) -> "BiPoly":
        return BiPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def __mul__(self, other) -> "BiPoly":
        if not isinstance(other, BiPoly):
            return BiPoly({k: c * other for k, c in self.terms.items()})
        out: dict = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + c1 * c2
        return BiPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "BiPoly":
        out = BiPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def n_coefficient(self, i: int) -> Poly:
        """The polynomial in v multiplying n^i."""
        width = self.deg_v + 1
        cs = [0] * max(width, 0)
        for (a, b), c in self.terms.items():
            if a == i:
                cs[b] = c
        return Poly(cs)

    def v_coefficient(self, j: int) -> "NPoly":
        """The polynomial in n multiplying v^j."""
        cs = [0] * max(self.deg_n + 1, 0)
        for (a, b), c in self.terms.items():
            if b == j:
                cs[a] = c
        return NPoly(cs)

    def substitute_v_scaled(self, s) -> "BiPoly":
        """p(n, s*v)."""
        return BiPoly({(i, j): c * Fraction(s) ** j for (i, j), c in self.terms.items()})

    def __str__(self):
        return format_bipoly(self)


@dataclass(frozen=True)
class NPoly:
    """Univariate polynomial in ``n`` (normalisers e_n)."""

    coeffs: tuple = ()

    def __post_init__(self):
        cs = [as_scalar(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __call__(self, n: int) -> Scalar:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * n + c
        return as_scalar(acc)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def as_bipoly(self) -> BiPoly:
        return BiPoly({(i, 0): c for i, c in enumerate(self.coeffs)})

    def __str__(self):
        return format_bipoly(self.as_bipoly())


def eval_at_n(p: BiPoly, n: int) -> Poly:
    """Substitute the integer ``n``, leaving a polynomial in v."""
    cs = [0] * (p.deg_v + 1)
    for (i, j), c in p.terms.items():
        cs[j] += c * n ** i
    return Poly(cs)


def eval_bipoly(p: BiPoly, n, v):
    """Numeric value at (n, v)."""
    return sum(c * n ** i * v ** j for (i, j), c in p.terms.items())


def format_bipoly(p: BiPoly) -> str:
    """Render in the input grammar; ``parse_expr(format_bipoly(p)) == p``."""
    if p.is_zero():
        return "0"
    chunks = []
    for (i, j) in sorted(p.terms, key=lambda k: (-k[0], k[1])):
        c = p.terms[(i, j)]
        factors = []
        if i:
            factors.append("n" if i == 1 else f"n^{i}")
        if j:
            factors.append("v" if j == 1 else f"v^{j}")
        mag = abs(c)
        if mag != 1 or not factors:
            factors.insert(0, str(mag))
        chunks.append(("-" if c < 0 else "+", "*".join(factors)))
    out = ("-" if chunks[0][0] == "-" else "") + chunks[0][1]
    for sign, body in chunks[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN = re.compile(r"\s*(?:(\d+)|([nv])|([-+*^/()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks, pos = [], 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("int", m.group(1), start))
        elif m.group(2):
            toks.append(("sym", m.group(2), start))
        else:
            toks.append(("op", m.group(3), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            raise ExprError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> BiPoly:
        if self.peek()[0] == "end":
            raise ExprError("empty expression", 0)
        out = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprError(f"unexpected {val!r}", pos)
        return out

    def expr(self) -> BiPoly:
        acc = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> BiPoly:
        acc = self.unary()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            acc = acc * self.unary()
        return acc

    def unary(self) -> BiPoly:
        if self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            inner = self.unary()
            return -inner if op == "-" else inner
        return self.power()

    def power(self) -> BiPoly:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            kind, val, pos = self.take()
            if kind == "op" and val == "-":
                raise ExprError("negative exponent", pos)
            if kind != "int":
                raise ExprError("exponent must be a nonnegative integer literal", pos)
            if self.peek()[:2] == ("op", "/"):
                raise ExprError("exponent must be an integer", self.peek()[2])
            k = int(val)
            if k > MAX_EXPONENT:
                raise ExprError(f"exponent {k} exceeds {MAX_EXPONENT}", pos)
            if self.peek()[:2] == ("op", "^"):
                raise ExprError("chained exponent", self.peek()[2])
            return base ** k
        return base

    def atom(self) -> BiPoly:
        kind, val, pos = self.take()
        if kind == "int":
            num = int(val)
            if self.peek()[:2] == ("op", "/"):
                self.take()
                k2, v2, p2 = self.take()
                if k2 != "int":
                    raise ExprError("division only allowed between integer literals", p2)
                if int(v2) == 0:
                    raise ExprError("zero denominator", p2)
                return BiPoly.const(Fraction(num, int(v2)))
            return BiPoly.const(num)
        if kind == "sym":
            return BiPoly({(1, 0) if val == "n" else (0, 1): 1})
        if (kind, val) == ("op", "("):
            inner = self.expr()
            self.expect(")")
            if self.peek()[:2] == ("op", "/"):
                raise ExprError("division only allowed between integer literals", self.peek()[2])
            return inner
        if kind == "end":
            raise ExprError("unexpected end of input", pos)
        raise ExprError(f"unexpected {val!r}", pos)


def parse_expr(text: str) -> BiPoly:
    """Parse and expand an expression into a :class:`BiPoly`."""
    return _Parser(text).parse()


def parse_npoly(text: str) -> NPoly:
    """Parse an expression that must not mention ``v``."""
    p = parse_expr(text)
    if p.deg_v > 0:
        raise ExprError("normaliser may not depend on v", 0)
    return p.v_coefficient(0)
