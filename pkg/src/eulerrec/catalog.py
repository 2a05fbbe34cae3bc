"""Parametric families of Eulerian recurrences and a few named specs."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .expr import BiPoly
from .poly import Poly, as_scalar
from .recurrence import ClassSpec, RecurrenceSpec, SpecError, simple_spec

FAMILIES = ("A", "T", "Q", "M", "POLYA")


def _lin(alpha: Poly, gamma: Poly, b_full: Poly) -> ClassSpec:
    return ClassSpec(a=BiPoly.from_poly(alpha, 1) + BiPoly.from_poly(gamma),
                     b=BiPoly.from_poly(b_full))


def catalog_spec(family: str, params: Sequence) -> RecurrenceSpec:
    """Build a family member.

    ``meta["predicted"]`` holds the family's stated (mu, sigma^2) pair, taken
    from the closed forms below rather than from the generic classifier, so the
    two can be compared.
    """
    fam = family.upper()
    ps = [as_scalar(Fraction(p)) if not isinstance(p, int) else p for p in params]
    v = Poly([0, 1])
    omv = Poly([1, -1])
    if fam == "A":
        p, q, r = _arity(fam, ps, 3)
        if not (q > 0 and r > 0 and 0 <= p <= q * r):
            raise SpecError("A(p,q,r) needs q,r > 0 and 0 <= p <= q*r")
        cls = _lin(v.scale(q), Poly([p, q * r - q - p]), (v * omv).scale(q))
        pred = (Fraction(1, 2), Fraction(1, 12))
    elif fam == "T":
        p, q, r = _arity(fam, ps, 3)
        if not (q >= 1 and r >= p >= 0 and r + p > 0):
            raise SpecError("T(p,q,r) needs q >= 1, r >= p >= 0, r + p > 0")
        cls = _lin(v.scale(q), Poly([p, r - p - q]), v * omv)
        q_ = Fraction(q)
        pred = (q_ / (q_ + 1), q_ ** 2 / ((q_ + 1) ** 2 * (q_ + 2)))
    elif fam == "Q":
        p, q = _arity(fam, ps, 2)
        if not (p >= 0 and q >= 0 and p + q > 0):
            raise SpecError("Q(p,q) needs p, q >= 0 with p + q > 0")
        cls = _lin(v, Poly([p, q - p - 1]), Poly([1, 0, -1]))
        pred = (Fraction(1, 3), Fraction(8, 45))
    elif fam == "M":
        p, q, r = _arity(fam, ps, 3)
        if not (q >= 1 and p >= 0 and r >= 0):
            raise SpecError("M(p,q,r) needs q >= 1 and p, r >= 0")
        alpha = Poly([-1, q + 1])
        gamma = Poly([1 + p, q * r - p - q - 1])
        cls = ClassSpec(a=BiPoly.from_poly(alpha, 1) + BiPoly.from_poly(gamma),
                        b=BiPoly.from_poly((v * omv).scale(q)), e=_npoly_n())
        q_ = Fraction(q)
        pred = ((q_ + 1) / (2 * q_), (q_ ** 2 - 1) / (12 * q_ ** 2))
    elif fam == "POLYA":
        a, b, c, d, s0, x0 = _arity(fam, ps, 6)
        q = a + b
        if not (q == c + d and q >= 1 and a != c and a >= -1 and c >= 0 and s0 >= 1
                and 0 <= x0 <= s0):
            raise SpecError("POLYA(a,b,c,d,s0,x0) needs a+b = c+d >= 1, a != c, a >= -1, c >= 0, "
                            "s0 >= 1, 0 <= x0 <= s0")
        vc = Poly.monomial(c)
        cls = _lin(vc.scale(q), vc.scale(s0 - q), Poly.monomial(a + 1) - Poly.monomial(c + 1))
        pred = (Fraction(c * q, b + c),
                Fraction(q * b * c * (c - a) ** 2, (b + c) ** 2 * (2 * c + b - a)))
        spec = RecurrenceSpec(name=f"POLYA{tuple(ps)}", start=0, classes=(cls,),
                              initial=Poly.monomial(x0),
                              meta={"family": fam, "params": ps, "predicted": pred})
        spec.validate()
        return spec
    else:
        raise SpecError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    spec = RecurrenceSpec(name=f"{fam}{tuple(ps)}", start=0, classes=(cls,), initial=Poly([1]),
                          meta={"family": fam, "params": ps, "predicted": pred})
    spec.validate()
    return spec


def _npoly_n():
    from .expr import NPoly
    return NPoly((0, 1))


def _arity(fam: str, ps: list, k: int) -> list:
    if len(ps) != k:
        raise SpecError(f"family {fam} takes {k} parameters, got {len(ps)}")
    return ps


_BUILTIN = {
    "eulerian": dict(a="v*n + 1 - v", b="v - v^2"),
    "A173018": dict(a="v*n + 1 - v", b="v - v^2"),
    "A008292": dict(a="v*n + 1 - v", b="v - v^2"),
    "A060187": dict(a="2*v*n + 1 - v", b="2*v - 2*v^2"),
    "A008517": dict(a="2*v*n - v", b="v - v^2"),
    "A008971": dict(a="v*n + 1 - v", b="2*v - 2*v^2"),
    "A008290": dict(a="n - 1 + v", b="1 - v"),
    "A065600": dict(a="4*n - 4 + 2*v", b="(3 - v)*(1 - v)", e="n + 1"),
    "A091441": dict(a="n + 1 + 2*v", b="-v*(1 - v)"),
    "A039598": dict(a="4*n + 2*v", b="-(1 + v)*(1 - v)", e="n + 1"),
    "A193229": dict(a="2*n + v - 1", b="-v*(1 - v)"),
    "A202550": dict(a="8*n + 2*v", b="-(1 + v)*(1 - v)", e="n + 1"),
    "A103451": dict(a="n", b="-v*(1 - v)", e="n", initial="1 + v"),
    "A132393": dict(a="n - 1 + v"),
    "A059427": dict(a="v^2*n + 2*v - v^2", b="(v + v^2)*(1 - v)"),
    "A256978": dict(a="v*(2*v*n + 1 - 2*v)", b="(v + v^2)*(1 - v)"),
    "A156920": dict(a="2*v*n + 1 - v", b="v*(1 - 2*v)"),
    "A162976": dict(a="(1 + v)*n", b="(3 + v)*(1 - v)", e="2", start=1),
    "aval": dict(a="v*(1 + v)*n", b="v*(1 + v)*(1 - v)", initial="v"),
    "pascal": dict(a="1 + v"),
    "trinomial": dict(a="1 + v + v^2"),
    "constant": dict(a="1"),
}


def builtin_names() -> list[str]:
    return sorted(_BUILTIN) + ["A244312"]


def builtin_spec(name: str) -> RecurrenceSpec:
    """Named specs used by the examples, the CLI and the OEIS fixtures."""
    if name == "A244312":
        from .recurrence import parse_spec
        return parse_spec(A244312_TEXT)
    if name not in _BUILTIN:
        raise KeyError(name)
    kw = dict(_BUILTIN[name])
    return simple_spec(name, **kw)


A244312_TEXT = """\
name = "A244312"
start = 1
modulus = 2
initial = "v"
[class 0]
a = "v*n - 1"
b = "v - v^2"
[class 1]
a = "v*n - v"
b = "v - v^2"
"""
