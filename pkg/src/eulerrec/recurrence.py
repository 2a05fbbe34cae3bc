"""Recurrence specifications, exact row generation and shape detection.

A spec describes

    e_n P_n = a_n P_{n-1} + b_n P'_{n-1} + b2_n P''_{n-1} + c2_n P_{n-2} + t_n T_n

where every coefficient is a polynomial in ``n`` and ``v`` and the residue
class ``n mod modulus`` selects which coefficient set applies. ``b`` is the
full multiplier of the derivative; a factor ``1 - v`` is detected later by
:func:`canonicalize`, never assumed.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence, Union

from .expr import BiPoly, ExprError, NPoly, eval_at_n, format_bipoly, parse_expr
from .poly import Poly, Scalar, as_scalar, poly_eval, poly_substitute_scaled

ONE_MINUS_V = Poly([1, -1])


class SpecError(ValueError):
    """Malformed or inconsistent specification."""


class GenerationError(RuntimeError):
    """Row generation failed (zero normaliser, non-integer row, ...)."""


@dataclass(frozen=True)
class SequenceRef:
    """Rows of another spec, used as the inhomogeneous term ``mult * T_n``."""

    name: str
    spec: "RecurrenceSpec"
    mult: BiPoly


@dataclass(frozen=True)
class ClassSpec:
    a: BiPoly
    b: BiPoly = field(default_factory=BiPoly)
    e: NPoly = field(default_factory=lambda: NPoly((1,)))
    c2: BiPoly = field(default_factory=BiPoly)
    b2: BiPoly = field(default_factory=BiPoly)
    inhomog: Optional[SequenceRef] = None

    @property
    def second_order(self) -> bool:
        return not self.c2.is_zero()


@dataclass(frozen=True)
class RecurrenceSpec:
    name: str
    start: int
    classes: tuple
    initial: Poly
    initial2: Optional[Poly] = None
    require_integer: bool = False
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def modulus(self) -> int:
        return len(self.classes)

    @property
    def second_order(self) -> bool:
        return any(c.second_order for c in self.classes)

    def class_at(self, n: int) -> ClassSpec:
        return self.classes[n % self.modulus]

    def validate(self, horizon: int = 200) -> None:
        if not self.classes:
            raise SpecError("at least one class is required")
        if self.second_order and self.initial2 is None:
            raise SpecError("second-order recurrence needs initial2 (row start+1)")
        first = self.start + (2 if self.second_order else 1)
        for cls in self.classes:
            if cls.e.is_zero():
                raise SpecError("normaliser e is identically zero")
        # e is a polynomial: finitely many roots, so a bounded scan plus the
        # degree argument covers every index
        for k in range(first, first + horizon):
            if self.class_at(k).e(k) == 0:
                raise SpecError(f"normaliser vanishes at n={k}")
        for cls in self.classes:
            roots = _integer_roots(cls.e)
            bad = [r for r in roots if r >= first and self.class_at(r) is cls]
            if bad:
                raise SpecError(f"normaliser vanishes at n={bad[0]}")


def _integer_roots(e: NPoly) -> list[int]:
    if e.degree <= 0:
        return []
    cs = [Fraction(c) for c in e.coeffs]
    den = 1
    for c in cs:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [int(c * den) for c in cs]
    k = next(i for i, c in enumerate(ints) if c != 0)
    if k:
        out = [0]
        ints = ints[k:]
    else:
        out = []
    c0 = abs(ints[0])
    for d in range(1, c0 + 1):
        if c0 % d == 0:
            for r in (d, -d):
                if sum(c * r ** i for i, c in enumerate(ints)) == 0:
                    out.append(r)
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


# spec-file format

_SECTION = re.compile(r"^\[\s*class\s+(\d+)\s*\]$")
_PAIR = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")
_CLASS_KEYS = {"a", "b", "b2", "c2", "e", "inhomog_ref", "inhomog_mult"}
_TOP_KEYS = {"name", "start", "modulus", "initial", "initial2", "require_integer"}

Resolver = Callable[[str], "RecurrenceSpec"]


def _unquote(raw: str, lineno: int) -> str:
    raw = raw.strip()
    if raw[:1] in "\"'":
        q = raw[0]
        end = raw.find(q, 1)
        if end < 0:
            raise SpecError(f"line {lineno}: unterminated string")
        rest = raw[end + 1:].strip()
        if rest and not rest.startswith("#"):
            raise SpecError(f"line {lineno}: trailing text after value")
        return raw[1:end]
    return raw.split("#", 1)[0].strip()


def _expr(text: str, lineno: int, key: str) -> BiPoly:
    try:
        return parse_expr(text)
    except ExprError as err:
        raise SpecError(f"line {lineno}: {key}: {err}") from err


def _as_poly_in_v(p: BiPoly, what: str) -> Poly:
    if p.deg_n > 0:
        raise SpecError(f"{what} may not depend on n")
    return p.n_coefficient(0)


def parse_spec(text: str, resolver: Optional[Resolver] = None) -> RecurrenceSpec:
    """Parse the line-oriented spec format into a validated spec."""
    top: dict[str, tuple[str, int]] = {}
    sections: dict[int, dict[str, tuple[str, int]]] = {}
    current: Optional[dict] = None
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _SECTION.match(stripped)
        if m:
            k = int(m.group(1))
            if k in sections:
                raise SpecError(f"line {lineno}: duplicate section [class {k}]")
            current = sections[k] = {}
            continue
        m = _PAIR.match(stripped)
        if not m:
            raise SpecError(f"line {lineno}: expected 'key = value'")
        key, value = m.group(1), _unquote(m.group(2), lineno)
        target = current if current is not None else top
        allowed = _CLASS_KEYS if current is not None else _TOP_KEYS | _CLASS_KEYS
        if key not in allowed:
            raise SpecError(f"line {lineno}: unknown key {key!r}")
        if key in target:
            raise SpecError(f"line {lineno}: duplicate key {key!r}")
        target[key] = (value, lineno)

    if "initial" not in top:
        raise SpecError("missing required key 'initial'")
    loose = {k: v for k, v in top.items() if k in _CLASS_KEYS}
    if loose and sections:
        raise SpecError("class keys at top level cannot be mixed with [class K] sections")
    if loose:
        sections = {0: loose}
    try:
        modulus = int(top.get("modulus", ("1", 0))[0])
        start = int(top.get("start", ("0", 0))[0])
    except ValueError as err:
        raise SpecError(f"start/modulus must be integers: {err}") from err
    if modulus < 1:
        raise SpecError("modulus must be positive")
    if sorted(sections) != list(range(modulus)):
        raise SpecError(f"modulus {modulus} needs sections [class 0]..[class {modulus - 1}], "
                        f"found {sorted(sections)}")

    classes = []
    for k in range(modulus):
        sec = sections[k]
        if "a" not in sec:
            raise SpecError(f"class {k}: missing 'a'")
        get = lambda key, default: _expr(sec[key][0], sec[key][1], key) if key in sec else default
        e_bp = get("e", BiPoly.const(1))
        if e_bp.deg_v > 0:
            raise SpecError(f"class {k}: e may not depend on v")
        inhomog = None
        if "inhomog_ref" in sec:
            ref_name = sec["inhomog_ref"][0]
            if resolver is None:
                raise SpecError(f"class {k}: inhomog_ref {ref_name!r} but no resolver")
            try:
                ref = resolver(ref_name)
            except (KeyError, FileNotFoundError) as err:
                raise SpecError(f"class {k}: cannot resolve {ref_name!r}") from err
            inhomog = SequenceRef(ref_name, ref, get("inhomog_mult", BiPoly.const(1)))
        elif "inhomog_mult" in sec:
            raise SpecError(f"class {k}: inhomog_mult without inhomog_ref")
        classes.append(ClassSpec(a=get("a", None), b=get("b", BiPoly()), e=e_bp.v_coefficient(0),
                                 c2=get("c2", BiPoly()), b2=get("b2", BiPoly()), inhomog=inhomog))

    def row(key):
        value, lineno = top[key]
        return _as_poly_in_v(_expr(value, lineno, key), key)

    flag = top.get("require_integer", ("false", 0))[0].lower()
    if flag not in ("true", "false", "1", "0", "yes", "no"):
        raise SpecError(f"require_integer must be a boolean, got {flag!r}")
    spec = RecurrenceSpec(
        name=top.get("name", ("unnamed", 0))[0],
        start=start,
        classes=tuple(classes),
        initial=row("initial"),
        initial2=row("initial2") if "initial2" in top else None,
        require_integer=flag in ("true", "1", "yes"),
    )
    spec.validate()
    return spec


def load_spec(path: Union[str, Path]) -> RecurrenceSpec:
    """Read a spec file; ``inhomog_ref`` names resolve to builtin specs or sibling files."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")

    def resolver(name: str) -> RecurrenceSpec:
        from .catalog import builtin_spec
        candidate = path.parent / name
        if candidate.is_file():
            return load_spec(candidate)
        return builtin_spec(name)

    return parse_spec(text, resolver)


def format_spec(spec: RecurrenceSpec) -> str:
    """Render in the spec-file format."""
    lines = [f'name = "{spec.name}"', f"start = {spec.start}", f"modulus = {spec.modulus}",
             f'initial = "{format_bipoly(BiPoly.from_poly(spec.initial))}"']
    if spec.initial2 is not None:
        lines.append(f'initial2 = "{format_bipoly(BiPoly.from_poly(spec.initial2))}"')
    if spec.require_integer:
        lines.append("require_integer = true")
    for k, cls in enumerate(spec.classes):
        lines.append(f"[class {k}]")
        lines.append(f'a = "{format_bipoly(cls.a)}"')
        for key in ("b", "b2", "c2"):
            val = getattr(cls, key)
            if not val.is_zero():
                lines.append(f'{key} = "{format_bipoly(val)}"')
        if cls.e.coeffs != (1,):
            lines.append(f'e = "{cls.e}"')
        if cls.inhomog is not None:
            lines.append(f'inhomog_ref = "{cls.inhomog.name}"')
            lines.append(f'inhomog_mult = "{format_bipoly(cls.inhomog.mult)}"')
    return "\n".join(lines) + "\n"


# generation

def _mul_into(out: list, p: Poly, row: Sequence) -> None:
    for i, x in enumerate(p.coeffs):
        if x == 0:
            continue
        for j, y in enumerate(row):
            if y:
                out[i + j] += x * y


def _deriv(row: Sequence) -> list:
    return [k * row[k] for k in range(1, len(row))]


def _divide(cs: list, e: Scalar) -> list:
    if e == 1:
        return cs
    if isinstance(e, int):
        return [c // e if isinstance(c, int) and c % e == 0 else Fraction(c) / e for c in cs]
    return [c / e for c in cs]


def iter_rows(spec: RecurrenceSpec) -> Iterator[tuple[int, Poly]]:
    """Yield ``(n, P_n)`` for n = start, start+1, ... indefinitely."""
    n = spec.start
    prev2: Optional[Poly] = None
    prev = spec.initial
    yield n, prev
    if spec.second_order:
        prev2, prev = prev, spec.initial2
        n += 1
        yield n, prev
    ref_iters: dict = {}
    ref_rows: dict = {}

    def ref_row(ref: SequenceRef, k: int) -> Poly:
        key = id(ref.spec)
        rows = ref_rows.setdefault(key, {})
        if key not in ref_iters:
            ref_iters[key] = iter_rows(ref.spec)
        while k not in rows:
            idx, r = next(ref_iters[key])
            if idx > k:
                raise GenerationError(f"reference {ref.name!r} has no row {k}")
            rows[idx] = r
            rows.pop(idx - 3, None)
        return rows[k]

    while True:
        n += 1
        cls = spec.class_at(n)
        e = cls.e(n)
        if e == 0:
            raise GenerationError(f"normaliser e vanishes at n={n}")
        a, b, b2 = eval_at_n(cls.a, n), eval_at_n(cls.b, n), eval_at_n(cls.b2, n)
        p = prev.coeffs
        d1 = _deriv(p)
        d2 = _deriv(d1) if not b2.is_zero() else []
        extra = []
        if prev2 is not None and not cls.c2.is_zero():
            extra.append((eval_at_n(cls.c2, n), prev2.coeffs))
        if cls.inhomog is not None:
            extra.append((eval_at_n(cls.inhomog.mult, n), ref_row(cls.inhomog, n).coeffs))
        width = max([len(a) + len(p), len(b) + len(d1), len(b2) + len(d2)]
                    + [len(m) + len(r) for m, r in extra] + [1])
        out = [0] * width
        _mul_into(out, a, p)
        _mul_into(out, b, d1)
        if d2:
            _mul_into(out, b2, d2)
        for m, r in extra:
            _mul_into(out, m, r)
        row = Poly(_divide(out, e))
        if spec.require_integer and not row.is_integral():
            raise GenerationError(f"row {n} has a non-integer coefficient")
        prev2, prev = prev, row
        yield n, row


def generate_rows(spec: RecurrenceSpec, upto: int) -> list[Poly]:
    """Exact rows P_start .. P_upto."""
    if upto < spec.start:
        raise ValueError(f"upto={upto} is below start={spec.start}")
    out = []
    for n, row in iter_rows(spec):
        out.append(row)
        if n >= upto:
            break
    return out


def rows_at(spec: RecurrenceSpec, ns: Sequence[int]) -> dict[int, Poly]:
    """Rows at selected indices, keeping only a sliding window in memory."""
    wanted = set(ns)
    out: dict[int, Poly] = {}
    if not wanted:
        return out
    last = max(wanted)
    for n, row in iter_rows(spec):
        if n in wanted:
            out[n] = row
        if n >= last:
            break
    return out


# canonical shapes

@dataclass(frozen=True)
class EulerianLinear:
    """a = alpha(v) n + gamma(v), derivative multiplier beta(v)(1 - v)."""

    alpha: Poly
    beta: Poly
    gamma: Poly
    start: int = 0
    initial: Poly = Poly([1])


@dataclass(frozen=True)
class NnForm:
    """alpha constant in v, beta(v) = beta + beta1 (v-1), gamma(v) = gamma + gamma1 (v-1)."""

    alpha: Scalar
    beta: Scalar
    beta1: Scalar
    gamma: Scalar
    gamma1: Scalar
    c0: Scalar
    c1: Scalar
    start: int = 0

    @property
    def tau1(self) -> Fraction:
        return Fraction(-self.beta) / self.alpha

    @property
    def tau2(self) -> Fraction:
        return Fraction(self.gamma) / self.alpha

    def linear(self) -> EulerianLinear:
        w = Poly([-1, 1])
        return EulerianLinear(Poly([self.alpha]), Poly([self.beta]) + w.scale(self.beta1),
                              Poly([self.gamma]) + w.scale(self.gamma1), self.start,
                              Poly([self.c0]) + w.scale(self.c1))


@dataclass(frozen=True)
class BetaZero:
    """No derivative term: a = alpha(v) n + gamma(v)."""

    alpha: Poly
    gamma: Poly
    start: int = 0
    initial: Poly = Poly([1])


@dataclass(frozen=True)
class BetaRR:
    """a = alpha n + p v + q with derivative multiplier -alpha v (1 - v), P_0 = h0 + h1 v."""

    alpha: Scalar
    p: Scalar
    q: Scalar
    h0: Scalar
    h1: Scalar
    nn: NnForm


@dataclass(frozen=True)
class General:
    reasons: tuple


CanonicalForm = Union[EulerianLinear, NnForm, BetaZero, BetaRR, General]


def _npoly_gcd(polys: Sequence[Poly]) -> Poly:
    g = Poly()
    for p in polys:
        a, b = g, p
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        g = a
    if g.is_zero():
        return Poly([1])
    return g.scale(Fraction(1) / Fraction(g.coeffs[-1]))


def _n_polys(p: BiPoly) -> list[Poly]:
    return [Poly(p.v_coefficient(j).coeffs) for j in range(p.deg_v + 1)]


def _divide_n_content(p: BiPoly, g: Poly) -> BiPoly:
    out: dict = {}
    for j in range(p.deg_v + 1):
        q, r = Poly(p.v_coefficient(j).coeffs).divmod(g)
        assert r.is_zero()
        for i, c in enumerate(q.coeffs):
            out[(i, j)] = c
    return BiPoly(out)


def _class_shape(cls: ClassSpec) -> Union[tuple, General]:
    """Reduce one class to ``("zero", alpha, gamma)`` or ``("lin", alpha, beta, gamma)``."""
    reasons = []
    if not cls.c2.is_zero():
        reasons.append("second-order term c2 != 0")
    if not cls.b2.is_zero():
        reasons.append("second-derivative term b2 != 0")
    if cls.inhomog is not None:
        reasons.append("inhomogeneous term present")
    if reasons:
        return General(tuple(reasons))
    # strip the common factor in n shared by a, b and e
    parts = _n_polys(cls.a) + _n_polys(cls.b) + [Poly(cls.e.coeffs)]
    g = _npoly_gcd([p for p in parts if not p.is_zero()])
    a, b = _divide_n_content(cls.a, g), _divide_n_content(cls.b, g)
    e = Poly(cls.e.coeffs).divmod(g)[0]
    lead = Fraction(e.coeffs[-1])
    a, b = a * (1 / lead), b * (1 / lead)
    if a.deg_n > 1:
        return General(("multiplier a_n is not linear in n",))
    alpha, gamma = a.n_coefficient(1), a.n_coefficient(0)
    if b.is_zero():
        return ("zero", alpha, gamma)
    if b.deg_n > 0:
        return General(("derivative multiplier depends on n",))
    beta, rem = b.n_coefficient(0).divmod(ONE_MINUS_V)
    if not rem.is_zero():
        return General(("derivative multiplier not divisible by (1-v)",))
    return ("lin", alpha, beta, gamma)


def canonicalize(spec: RecurrenceSpec) -> CanonicalForm:
    """Detect the most specific shape; ``General`` lists what did not fit."""
    shapes = [_class_shape(c) for c in spec.classes]
    for s in shapes:
        if isinstance(s, General):
            return s
    if spec.modulus > 1:
        if all(s[0] == "lin" for s in shapes) and \
                all(s[1] == shapes[0][1] and s[2] == shapes[0][2] for s in shapes):
            _, alpha, beta, gamma = shapes[0]
            return EulerianLinear(alpha, beta, gamma, spec.start, spec.initial)
        return General(("parity classes with differing alpha/beta",))
    shape = shapes[0]
    if shape[0] == "zero":
        return BetaZero(shape[1], shape[2], spec.start, spec.initial)
    _, alpha, beta, gamma = shape
    lin = EulerianLinear(alpha, beta, gamma, spec.start, spec.initial)
    if alpha.degree <= 0 and beta.degree <= 1 and gamma.degree <= 1 and spec.initial.degree <= 1:
        a0 = alpha[0]
        nn = NnForm(a0, poly_eval(beta, 1), beta[1], poly_eval(gamma, 1), gamma[1],
                    poly_eval(spec.initial, 1), spec.initial[1], spec.start)
        if a0 != 0 and beta == Poly([0, -a0]):
            return BetaRR(a0, gamma[1], gamma[0], spec.initial[0], spec.initial[1], nn)
        return nn
    return lin


def linear_form(form: CanonicalForm) -> Optional[EulerianLinear]:
    """View any first-order shape as an :class:`EulerianLinear`."""
    if isinstance(form, EulerianLinear):
        return form
    if isinstance(form, NnForm):
        return form.linear()
    if isinstance(form, BetaRR):
        return form.nn.linear()
    if isinstance(form, BetaZero):
        return EulerianLinear(form.alpha, Poly(), form.gamma, form.start, form.initial)
    return None


# transforms

def _laurent_reverse(p: Poly, k: int, K: int) -> Poly:
    """v^(k+K) p(1/v) as a polynomial; requires deg p <= k + K."""
    if p.degree > k + K:
        raise SpecError("degree too large for reversal")
    cs = [0] * (k + K + 1)
    for j, c in enumerate(p.coeffs):
        cs[k + K - j] = c
    return Poly(cs)


def _strip_low(p: Poly, K: int, what: str) -> Poly:
    if any(c != 0 for c in p.coeffs[:K]):
        raise SpecError(f"reciprocal {what} is not a polynomial")
    return Poly(p.coeffs[K:])


def reciprocal_spec(spec: RecurrenceSpec, m: int = 0) -> RecurrenceSpec:
    """Spec whose rows are v^(n+m) P_n(1/v)."""
    form = canonicalize(spec)
    if isinstance(form, General) or spec.modulus != 1:
        raise SpecError("reciprocal_spec needs a single-class first-order Eulerian shape")
    lin = linear_form(form)
    alpha, beta, gamma = lin.alpha, lin.beta, lin.gamma
    K = max(alpha.degree, beta.degree + 1, gamma.degree, 0) + 1
    # a_Q = v alpha(1/v) n + v gamma(1/v) - (n - 1 + m) v (1 - v) beta(1/v)
    ra = _laurent_reverse(alpha, 1, K)
    rg = _laurent_reverse(gamma, 1, K)
    rb = _laurent_reverse(beta, 1, K) * ONE_MINUS_V
    n_part = _strip_low(ra - rb, K, "alpha")
    c_part = _strip_low(rg - rb.scale(m - 1), K, "gamma")
    b_full = _strip_low(_laurent_reverse(beta, 2, K) * ONE_MINUS_V, K, "beta")
    init_deg = spec.start + m
    if spec.initial.degree > init_deg:
        raise SpecError("initial row degree exceeds start + m")
    new = ClassSpec(a=BiPoly.from_poly(n_part, 1) + BiPoly.from_poly(c_part),
                    b=BiPoly.from_poly(b_full))
    return RecurrenceSpec(name=f"{spec.name}-reciprocal", start=spec.start, classes=(new,),
                          initial=_laurent_reverse(spec.initial, init_deg, 0),
                          meta={"reciprocal_of": spec.name, "m": m})


def scale_spec(spec: RecurrenceSpec, s) -> RecurrenceSpec:
    """Spec of R_n(v) = P_n(v/s)."""
    s = as_scalar(s)
    if s == 0:
        raise SpecError("scale factor must be nonzero")
    inv = Fraction(1) / s

    def tr(cls: ClassSpec) -> ClassSpec:
        inh = cls.inhomog
        if inh is not None:
            inh = SequenceRef(inh.name, scale_spec(inh.spec, s), inh.mult.substitute_v_scaled(inv))
        return ClassSpec(a=cls.a.substitute_v_scaled(inv), b=cls.b.substitute_v_scaled(inv) * s,
                         e=cls.e, c2=cls.c2.substitute_v_scaled(inv),
                         b2=cls.b2.substitute_v_scaled(inv) * (s * s), inhomog=inh)

    init2 = None if spec.initial2 is None else poly_substitute_scaled(spec.initial2, inv)
    return replace(spec, classes=tuple(tr(c) for c in spec.classes),
                   initial=poly_substitute_scaled(spec.initial, inv), initial2=init2,
                   require_integer=False if s != 1 else spec.require_integer)


def simple_spec(name: str, a: str, b: str = "0", initial: str = "1", start: int = 0,
                e: str = "1", **extra) -> RecurrenceSpec:
    """Single-class spec from expression strings."""
    from .expr import parse_npoly
    cls = ClassSpec(a=parse_expr(a), b=parse_expr(b), e=parse_npoly(e),
                    c2=parse_expr(extra.pop("c2", "0")), b2=parse_expr(extra.pop("b2", "0")))
    init2 = extra.pop("initial2", None)
    spec = RecurrenceSpec(name=name, start=start, classes=(cls,),
                          initial=parse_expr(initial).n_coefficient(0),
                          initial2=None if init2 is None else parse_expr(init2).n_coefficient(0),
                          meta=extra.pop("meta", {}))
    if extra:
        raise TypeError(f"unexpected arguments {sorted(extra)}")
    spec.validate()
    return spec
