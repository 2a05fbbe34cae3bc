"""Dense univariate polynomials in ``v`` over the rationals.

Coefficients are stored low degree first. Integral values are kept as plain
``int`` so that integer triangles never pay for ``Fraction`` normalisation.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]


def as_scalar(x) -> Scalar:
    """Coerce to ``int`` when integral, otherwise to ``Fraction``."""
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, Rational):
        return as_scalar(Fraction(x.numerator, x.denominator))
    if isinstance(x, str):
        return as_scalar(Fraction(x))
    raise TypeError(f"not an exact rational: {x!r}")


def _trim(coeffs: list) -> tuple:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class Poly:
    """Immutable dense polynomial; ``coeffs[k]`` is the coefficient of v^k."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        object.__setattr__(self, "coeffs", _trim([as_scalar(c) for c in coeffs]))

    @classmethod
    def _raw(cls, coeffs: tuple) -> "Poly":
        # caller guarantees normalised, trimmed coefficients
        p = object.__new__(cls)
        object.__setattr__(p, "coeffs", coeffs)
        return p

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def const(cls, c) -> "Poly":
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c=1) -> "Poly":
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, k: int) -> Scalar:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("v" if k == 1 else f"v^{k}")
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    # ring operations

    def __add__(self, other):
        other = _lift(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = as_scalar(out[i] + c)
        return Poly._raw(_trim(out))

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = _lift(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._raw(())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Poly._raw(_trim([as_scalar(c) for c in out]))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out, base = Poly([1]), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c) -> "Poly":
        c = as_scalar(c)
        if c == 0:
            return Poly._raw(())
        return Poly._raw(tuple(as_scalar(x * c) for x in self.coeffs))

    def shift(self, k: int) -> "Poly":
        """Multiply by v^k."""
        if not self.coeffs:
            return self
        return Poly._raw((0,) * k + self.coeffs)

    def divmod(self, d: "Poly") -> tuple["Poly", "Poly"]:
        """Euclidean division: ``self = q*d + r`` with ``deg r < deg d``."""
        d = _lift(d)
        if d.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        r = [Fraction(c) for c in self.coeffs]
        lead = Fraction(d.coeffs[-1])
        dd = len(d.coeffs) - 1
        q = [Fraction(0)] * max(len(r) - dd, 0)
        for i in range(len(r) - 1, dd - 1, -1):
            c = r[i] / lead
            if c == 0:
                continue
            q[i - dd] = c
            for j, y in enumerate(d.coeffs):
                r[i - dd + j] -= c * y
        return Poly(q), Poly(r[:dd])

    def __call__(self, x):
        return poly_eval(self, x)

    def derivative(self, k: int = 1) -> "Poly":
        p = self
        for _ in range(k):
            p = poly_derivative(p)
        return p

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)


def _lift(x) -> Poly:
    if isinstance(x, Poly):
        return x
    return Poly([x])


def poly_derivative(p: Poly) -> Poly:
    """Formal derivative d/dv."""
    return Poly._raw(tuple(as_scalar(k * c) for k, c in enumerate(p.coeffs) if k))


def poly_eval(p: Poly, x) -> Scalar:
    """Horner evaluation, exact for exact ``x``."""
    acc = 0
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return as_scalar(acc) if isinstance(acc, (int, Fraction)) else acc


def derivatives_at(p: Poly, x, upto: int) -> list:
    """[p(x), p'(x), ..., p^(upto)(x)] exactly."""
    out, q = [], p
    for _ in range(upto + 1):
        out.append(poly_eval(q, x))
        q = poly_derivative(q)
    return out


def poly_reciprocal(p: Poly, m: int = 0) -> Poly:
    """v^(deg p + m) * p(1/v): reverse the coefficients, then shift by m."""
    if p.is_zero():
        return p
    rev = list(reversed(p.coeffs))
    if m >= 0:
        return Poly([0] * m + rev)
    if any(c != 0 for c in rev[:-m]):
        raise ValueError(f"reciprocal with m={m} leaves negative exponents")
    return Poly(rev[-m:])


def poly_substitute_scaled(p: Poly, s) -> Poly:
    """p(s*v)."""
    s = as_scalar(s)
    out, pw = [], 1
    for c in p.coeffs:
        out.append(c * pw)
        pw = pw * s
    return Poly(out)


def taylor_at_one(p: Poly) -> list:
    """Coefficients of p expanded in powers of (v - 1)."""
    out, q, fact = [], p, 1
    for k in range(len(p.coeffs)):
        if k:
            fact *= k
        out.append(as_scalar(Fraction(poly_eval(q, 1)) / fact))
        q = poly_derivative(q)
    return out


def from_taylor_at_one(cs: Sequence) -> Poly:
    """Inverse of :func:`taylor_at_one`."""
    w = Poly([-1, 1])
    out = Poly()
    for k, c in enumerate(cs):
        out = out + (w ** k).scale(c)
    return out
