from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from eulerrec.catalog import builtin_spec, catalog_spec
from eulerrec.classify import (DISCRETE, SCALED, SqrtRational, beta_zero_params, classify,
                               law_factorial_moments, law_moments, law_pmf, normal_params)
from eulerrec.moments import scaled_moments
from eulerrec.poly import Poly
from eulerrec.recurrence import canonicalize, simple_spec

F = Fraction


def law_of(spec):
    return classify(spec)[0]


def mu_s2(law):
    return law["mu"], law["sigma2"]


@pytest.mark.parametrize("spec, expected", [
    (catalog_spec("T", [0, 2, 1]), (F(2, 3), F(1, 9))),
    (builtin_spec("A008971"), (F(1, 3), F(2, 45))),
    (builtin_spec("A162976"), (F(1, 6), F(23, 180))),
    (builtin_spec("aval"), (F(3, 4), F(7, 48))),
    (builtin_spec("A256978"), (F(1), F(1, 3))),
    (builtin_spec("A059427"), (F(2, 3), F(8, 45))),
    (catalog_spec("M", [0, 2, 1]), (F(3, 4), F(1, 16))),
    (builtin_spec("pascal"), (F(1, 2), F(1, 4))),
    (builtin_spec("trinomial"), (F(1), F(2, 3))),
])
def test_normal_fixtures(spec, expected):
    law = law_of(spec)
    assert law.kind == "Normal" and mu_s2(law) == expected


@pytest.mark.parametrize("fam, params", [
    ("A", [1, 1, 1]), ("A", [0, 2, 3]), ("T", [1, 3, 2]), ("Q", [1, 2]), ("M", [1, 3, 2]),
    ("POLYA", [1, 2, 2, 1, 3, 1]),
])
def test_classifier_matches_family_prediction(fam, params):
    spec = catalog_spec(fam, params)
    assert mu_s2(law_of(spec)) == spec.meta["predicted"]


def test_discrete_laws():
    assert law_of(builtin_spec("A008290")).kind == "Poisson"
    nb = law_of(builtin_spec("A065600"))
    assert nb.kind == "NegBinomial" and (nb["r"], nb["p"]) == (2, F(1, 3))


def test_continuous_laws():
    assert law_of(builtin_spec("A091441")).params == {"a": 2, "b": 2}
    ray = law_of(builtin_spec("A039598"))
    assert ray.kind == "Rayleigh" and ray["sigma"] == SqrtRational(F(1, 2))
    hn = law_of(builtin_spec("A193229"))
    assert hn.kind == "HalfNormal" and hn["sigma"] == SqrtRational(F(2))
    ml = law_of(builtin_spec("A202550"))
    assert ml.kind == "MittagLeffler" and ml.tau1 == F(1, 4)


def test_beta_mixture_weights():
    spec = simple_spec("rr", a="n + v + 1", b="-v*(1 - v)", initial="1 + v")
    law = law_of(spec)
    assert law.kind == "BetaMixture"
    assert [c[0] for c in law["components"]] == [F(1, 2), F(1, 2)]
    # the mixture moments are the limits of the scaled moments
    got = scaled_moments(spec, 3000, 1, M=3)
    want = law_moments(law, 3)
    assert all(abs(g - w) < 0.01 * w for g, w in zip(got[1:], want[1:]))


def test_log_scale_normal():
    law = law_of(builtin_spec("A132393"))
    assert law.kind == "Normal" and law["mean_scale"] == "log n"
    assert (law["mu"], law["sigma2"]) == (1, 1)


def test_bounded_and_unknown():
    assert law_of(builtin_spec("constant")).kind == "Degenerate"
    assert law_of(builtin_spec("A103451")).kind == "MomentSequence"
    unk = law_of(builtin_spec("A156920"))
    assert unk.kind == "Unknown" and unk["reason"]
    fib = law_of(simple_spec("fib", a="1", c2="v", initial2="1"))
    assert fib.kind == "Unknown"
    neg = law_of(simple_spec("neg", a="n - 3*v"))
    assert neg.kind == "Unknown"


def test_parity_warning():
    law, ctx = classify(builtin_spec("A244312"))
    assert mu_s2(law) == (F(1, 2), F(1, 12)) and ctx.warnings


small = st.integers(1, 3)


@given(small, small, st.integers(0, 4), st.integers(0, 4))
@settings(max_examples=30, deadline=None)
def test_gamma_and_initial_robustness(q, s, g0, g1):
    # (mu, sigma^2) depend only on alpha and beta
    base = simple_spec("x", a=f"{q}*v*n + 1 + {g0} - v", b=f"{s}*v*(1 - v)")
    other = simple_spec("y", a=f"{q}*v*n + 1 - v + {g1}*v", b=f"{s}*v*(1 - v)",
                        initial=f"{g0 + 1} + {g1}*v^2")
    a, b = law_of(base), law_of(other)
    if a.kind == "Normal" and b.kind == "Normal":
        assert mu_s2(a) == mu_s2(b)


@given(small, small, st.integers(1, 4))
@settings(max_examples=30, deadline=None)
def test_content_scale_invariance(q, s, c):
    base = simple_spec("x", a=f"{q}*v*n + 1 - v", b=f"{s}*v*(1 - v)")
    scaled = simple_spec("y", a=f"{c}*({q}*v*n + 1 - v)", b=f"{c}*{s}*v*(1 - v)", e=f"{c}")
    assert law_of(base) == law_of(scaled)


@pytest.mark.parametrize("name", ["A008290", "A065600", "A091441", "A039598", "A193229",
                                  "A202550"])
def test_dichotomy_by_sign_of_tau1(name):
    form = canonicalize(builtin_spec(name))
    nn = getattr(form, "nn", form)
    law = law_of(builtin_spec(name))
    if nn.tau1 < 0:
        assert law.kind in DISCRETE
    else:
        assert law.kind in SCALED and law.tau1 == nn.tau1


def test_normal_params_formula():
    v = Poly([0, 1])
    assert normal_params(v, v) == (F(1, 2), F(1, 12))
    assert beta_zero_params(Poly([0]), Poly([1, 1]))["mu_gamma"] == F(1, 2)
    # Stirling cycles: a = n - 1 + v, so the harmonic-scale mean coefficient is 1
    p = beta_zero_params(Poly([1]), Poly([-1, 1]))
    assert (p["mu_alpha"], p["s2_alpha"]) == (0, 0) and p["nu"] == 1 and p["varsigma"] == 1


def test_discrete_law_helpers():
    nb = law_of(builtin_spec("A065600"))
    fm = law_factorial_moments(nb, 3)
    assert [float(x) for x in fm] == pytest.approx([1, 1, 1.5, 3])
    pmf = law_pmf(nb, range(4))
    assert pmf == pytest.approx([4 * (k + 1) / 3 ** (k + 2) for k in range(4)])
