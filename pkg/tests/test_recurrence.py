from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, settings, strategies as st

from eulerrec.catalog import builtin_spec, catalog_spec
from eulerrec.poly import Poly, poly_reciprocal, poly_substitute_scaled
from eulerrec.recurrence import (BetaRR, BetaZero, EulerianLinear, General, GenerationError,
                                 NnForm, SpecError, canonicalize, format_spec, generate_rows,
                                 parse_spec, reciprocal_spec, rows_at, scale_spec, simple_spec)

EULERIAN_ROWS = [[1], [1], [1, 1], [1, 4, 1], [1, 11, 11, 1], [1, 26, 66, 26, 1],
          [1, 57, 302, 302, 57, 1]]


def coeffs(rows):
    return [list(r.coeffs) for r in rows]


def test_eulerian_table():
    assert coeffs(generate_rows(catalog_spec("A", [1, 1, 1]), 6)) == EULERIAN_ROWS


def test_a008971_row5():
    assert list(generate_rows(builtin_spec("A008971"), 5)[5].coeffs) == [1, 58, 61]


def test_rows_at_matches_generate():
    spec = builtin_spec("A060187")
    full = generate_rows(spec, 12)
    assert rows_at(spec, [3, 12]) == {3: full[3], 12: full[12]}


def test_parity_classes_a244312():
    spec = builtin_spec("A244312")
    rows = generate_rows(spec, 10)
    assert [sum(r.coeffs) for r in rows] == [factorial(n - 1) for n in range(1, 11)]
    assert list(rows[4].coeffs) == [0, 0, 4, 16, 4]


def test_inhomogeneous_reference():
    # Q_n = (n v - 1) Q_{n-1} + v (1 - v) Q'_{n-1} + v A_n with A_n Eulerian
    text = """
    name = "shifted-eulerian"
    start = 1
    initial = "v"
    a = "n*v - 1"
    b = "v - v^2"
    inhomog_ref = "eulerian"
    inhomog_mult = "v"
    """
    spec = parse_spec(text, resolver=builtin_spec)
    eul = generate_rows(builtin_spec("eulerian"), 9)
    for n, row in enumerate(generate_rows(spec, 9), start=1):
        a = eul[n].coeffs
        expect = [0] + [k * a[k - 1] for k in range(1, len(a) + 1)]
        assert list(row.coeffs) == expect


def test_second_derivative_big_ascents():
    spec = simple_spec("big-ascents", a="n*((1 + 3*v)*n + 1 - 3*v)", b="2*(4*n - 3)*v*(1 - v)",
                       b2="4*v*(1 - v)^2", e="n*(n + 1)")

    def explicit(n):
        out = []
        for k in range(n // 2 + 1):
            # C(j - 1, -1) is 1 at j = 0 and 0 otherwise
            lead = [1 if j == 0 else 0 for j in range(n + 1)] if k == 0 else \
                [comb(k + j - 1, k - 1) for j in range(n + 1)]
            inner = sum(lead[j] * comb(n + 1 - k, n - 2 * k - j) for j in range(n - 2 * k + 1))
            out.append(Fraction(comb(n + 1, k) * inner, n + 1))
        return Poly(out)

    rows = generate_rows(spec, 14)
    assert all(rows[n] == explicit(n) for n in range(1, 15))


def test_second_order_fibonacci():
    spec = simple_spec("fib", a="1", c2="v", initial="1", initial2="1")
    for n, row in enumerate(generate_rows(spec, 15)):
        assert list(row.coeffs) == [comb(n - k, k) for k in range(n // 2 + 1)]


def test_normaliser_must_divide():
    spec = simple_spec("bad", a="n + v", e="2")
    spec2 = parse_spec(format_spec(spec).replace("start = 0", "start = 0\nrequire_integer = true"))
    with pytest.raises(GenerationError):
        generate_rows(spec2, 3)


def test_zero_normaliser_is_rejected():
    with pytest.raises((SpecError, GenerationError)):
        generate_rows(simple_spec("z", a="n", e="n - 2"), 4)


@pytest.mark.parametrize("text", [
    'a = "n"',
    'initial = "1"\n[class 0]\na = "n"\n[class 0]\na = "1"',
    'initial = "1"\nmodulus = 2\n[class 0]\na = "n"',
    'initial = "1"\na = "n +"',
    'initial = "1"\na = "n"\nbogus = "1"',
    'initial = "n"\na = "1"',
    'initial = "1"\na = "1"\ne = "v"',
])
def test_spec_errors(text):
    with pytest.raises(SpecError):
        parse_spec(text)


@pytest.mark.parametrize("name", ["eulerian", "A244312", "A202550", "A162976", "aval"])
def test_format_round_trip(name):
    spec = builtin_spec(name)
    again = parse_spec(format_spec(spec))
    assert generate_rows(again, spec.start + 8) == generate_rows(spec, spec.start + 8)


def test_canonical_shapes():
    assert isinstance(canonicalize(builtin_spec("eulerian")), EulerianLinear)
    assert isinstance(canonicalize(builtin_spec("pascal")), BetaZero)
    assert isinstance(canonicalize(builtin_spec("A039598")), NnForm)
    rr = canonicalize(simple_spec("rr", a="n + v + 1", b="-v*(1 - v)", initial="1 + v"))
    assert isinstance(rr, BetaRR) and (rr.h0, rr.h1) == (1, 1)
    gen = canonicalize(simple_spec("fib", a="1", c2="v", initial2="1"))
    assert isinstance(gen, General) and gen.reasons


def test_content_is_stripped():
    lin = canonicalize(simple_spec("x", a="3*n*v + 3 - 3*v", b="3*v - 3*v^2", e="3"))
    assert lin.alpha == Poly([0, 1]) and lin.beta == Poly([0, 1])


pq = st.integers(1, 3)


@given(p_half=st.integers(0, 6), q=pq, r=pq)
@settings(max_examples=30, deadline=None)
def test_palindromic_when_p_is_half_qr(p_half, q, r):
    if 2 * p_half > q * r or (q * r) % 2:
        return
    p = q * r // 2
    for n, row in enumerate(generate_rows(catalog_spec("A", [p, q, r]), 8)):
        assert list(row.coeffs) == list(reversed(row.coeffs))


def lin_specs():
    small = st.integers(0, 3)
    return st.tuples(small, small, small, small, small).map(
        lambda t: simple_spec("rand", a=f"({t[0]} + {t[1]}*v)*n + {t[2]} + {t[3]}*v",
                              b=f"({t[4]}*v)*(1 - v)"))


@given(lin_specs(), st.integers(0, 2))
@settings(max_examples=25, deadline=None)
def test_reciprocal_spec_reverses_rows(spec, m):
    rows = generate_rows(spec, 7)
    if any(r.is_zero() for r in rows):
        return
    try:
        rec = reciprocal_spec(spec, m)
    except SpecError:
        return
    for n, (p, q) in enumerate(zip(rows, generate_rows(rec, 7))):
        assert q == poly_reciprocal(p, n + m - p.degree)


@given(lin_specs(), st.sampled_from([2, Fraction(1, 3), -1]))
@settings(max_examples=25, deadline=None)
def test_scale_spec_substitutes(spec, s):
    rows = generate_rows(spec, 6)
    scaled = generate_rows(scale_spec(spec, s), 6)
    for p, q in zip(rows, scaled):
        assert q == poly_substitute_scaled(p, Fraction(1) / s)


def test_reciprocal_of_t021():
    rec = reciprocal_spec(catalog_spec("T", [0, 2, 1]), 1)
    lin = canonicalize(rec)
    assert lin.alpha == Poly([1, 1]) and lin.gamma == Poly([-1])


def test_catalog_rejects_bad_params():
    with pytest.raises(SpecError):
        catalog_spec("A", [5, 1, 1])
    with pytest.raises(SpecError):
        catalog_spec("Z", [1])
