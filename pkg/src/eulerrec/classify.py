"""Limit-law decision procedure for canonical Eulerian shapes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from scipy import optimize, special

from .moments import MomentError, general_mv_recurrence, moments_from_rows
from .poly import Poly, derivatives_at, poly_eval
from .recurrence import (BetaRR, BetaZero, CanonicalForm, EulerianLinear, General, NnForm,
                         RecurrenceSpec, canonicalize, iter_rows)

KINDS = ("Normal", "Poisson", "NegBinomial", "BernoulliSum", "Beta", "BetaMixture", "Rayleigh",
         "HalfNormal", "MittagLeffler", "Uniform", "Degenerate", "MomentSequence", "Unknown")
DISCRETE = ("Poisson", "NegBinomial", "BernoulliSum")
SCALED = ("Beta", "BetaMixture", "Rayleigh", "HalfNormal", "MittagLeffler", "Uniform",
          "MomentSequence")


@dataclass(frozen=True)
class LimitLaw:
    """Tagged limit law. ``tau1`` is the scale exponent of X_n for scaled laws."""

    kind: str
    params: dict = field(default_factory=dict)
    tau1: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")

    def __getitem__(self, key):
        return self.params[key]

    def to_json(self) -> dict:
        out = {"kind": self.kind,
               "params": {k: _render(v) for k, v in self.params.items()}}
        if self.tau1 is not None:
            out["tau1"] = _render(self.tau1)
        return out

    def __str__(self):
        inner = ", ".join(f"{k}={_short(v)}" for k, v in self.params.items())
        return f"{self.kind}({inner})"


def _render(v):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, (int, Fraction)):
        f = Fraction(v)
        exact = str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
        return {"exact": exact, "decimal": float(f)}
    if isinstance(v, float):
        return {"exact": None, "decimal": v}
    if isinstance(v, SqrtRational):
        return {"exact": str(v), "decimal": float(v)}
    if isinstance(v, (list, tuple)):
        return [_render(x) for x in v]
    if isinstance(v, dict):
        return {k: _render(x) for k, x in v.items()}
    return v


def _short(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)


@dataclass(frozen=True)
class SqrtRational:
    """sqrt(r) for a nonnegative rational r, kept exact for display."""

    square: Fraction

    def __float__(self):
        return math.sqrt(self.square)

    def __str__(self):
        return f"sqrt({self.square})"


# law constructors

def _prob(p, what):
    if not 0 < p < 1:
        raise ValueError(f"{what} must lie in (0, 1), got {p}")
    return p


def normal(mu, sigma2, mean_scale: str = "n", var_scale: str = "n", mean_log=0) -> LimitLaw:
    params = {"mu": mu, "sigma2": sigma2, "mean_scale": mean_scale, "var_scale": var_scale}
    if mean_log:
        params["mean_log"] = mean_log
    return LimitLaw("Normal", params)


def poisson(lam) -> LimitLaw:
    if lam <= 0:
        raise ValueError("Poisson rate must be positive")
    return LimitLaw("Poisson", {"lambda": lam})


def neg_binomial(r, p) -> LimitLaw:
    if r <= 0:
        raise ValueError("NegBinomial r must be positive")
    return LimitLaw("NegBinomial", {"r": r, "p": _prob(p, "p")})


def bernoulli_sum(ell: int, p) -> LimitLaw:
    return LimitLaw("BernoulliSum", {"l": ell, "p": _prob(p, "p")})


def beta_law(a, b) -> LimitLaw:
    if a <= 0 or b <= 0:
        raise ValueError("Beta parameters must be positive")
    return LimitLaw("Beta", {"a": a, "b": b}, Fraction(1))


def beta_mixture(components: Sequence[tuple]) -> LimitLaw:
    if sum(w for w, _, _ in components) != 1:
        raise ValueError("mixture weights must sum to 1")
    return LimitLaw("BetaMixture", {"components": [list(c) for c in components]}, Fraction(1))


def rayleigh(sigma2) -> LimitLaw:
    return LimitLaw("Rayleigh", {"sigma": SqrtRational(Fraction(sigma2))}, Fraction(1, 2))


def half_normal(sigma2) -> LimitLaw:
    return LimitLaw("HalfNormal", {"sigma": SqrtRational(Fraction(sigma2))}, Fraction(1, 2))


def mittag_leffler(p, q, c, tau1) -> LimitLaw:
    return LimitLaw("MittagLeffler", {"p": p, "q": q, "c": c}, Fraction(tau1))


def uniform(lo=0, hi=1) -> LimitLaw:
    return LimitLaw("Uniform", {"lo": lo, "hi": hi}, Fraction(1))


def degenerate(mu) -> LimitLaw:
    return LimitLaw("Degenerate", {"mu": mu})


def moment_sequence(tau1, ks: Sequence) -> LimitLaw:
    return LimitLaw("MomentSequence", {"K": list(ks)}, Fraction(tau1))


def unknown(reason: str) -> LimitLaw:
    return LimitLaw("Unknown", {"reason": reason})


# limiting moments of each law

def law_moments(law: LimitLaw, M: int) -> list[float]:
    """Raw moments 0..M of the limit (of X_n / n^tau1 for scaled laws)."""
    k, p = law.kind, law.params
    out = []
    for m in range(M + 1):
        if k == "Beta":
            out.append(_beta_moment(p["a"], p["b"], m))
        elif k == "BetaMixture":
            out.append(sum(float(w) * _beta_moment(a, b, m) for w, a, b in p["components"]))
        elif k == "Uniform":
            lo, hi = float(p["lo"]), float(p["hi"])
            out.append((hi ** (m + 1) - lo ** (m + 1)) / ((m + 1) * (hi - lo)))
        elif k == "Rayleigh":
            s = float(p["sigma"])
            out.append(math.sqrt(math.pi) * math.gamma(m + 1) / math.gamma(m / 2 + 0.5)
                       * (s / math.sqrt(2)) ** m)
        elif k == "HalfNormal":
            s = float(p["sigma"])
            out.append(math.gamma(m + 1) / math.gamma(m / 2 + 1) * (s / math.sqrt(2)) ** m)
        elif k == "MittagLeffler":
            out.append(_ml_moment(float(p["p"]), float(p["q"]), float(p["c"]), m))
        elif k == "MomentSequence":
            out.append(1.0 if m == 0 else float(p["K"][m - 1]))
        elif k == "Degenerate":
            out.append(float(p["mu"]) ** m)
        elif k == "Normal":
            out.append(0.0 if m % 2 else float(math.prod(range(1, m, 2))))
        elif k in DISCRETE:
            from .moments import factorial_to_raw
            return [float(x) for x in factorial_to_raw(law_factorial_moments(law, M))]
        else:
            raise ValueError(f"no moments for {k}")
    return out


def _beta_moment(a, b, m: int) -> float:
    out = 1.0
    for i in range(m):
        out *= (float(a) + i) / (float(a) + float(b) + i)
    return out


def _ml_moment(p: float, q: float, c: float, m: int) -> float:
    return c ** m * math.exp(math.lgamma(m + 1) + math.lgamma(q) - math.lgamma(p * m + q))


def _falling(s, m: int):
    out = Fraction(1)
    for i in range(m):
        out *= s - i
    return out


def law_factorial_moments(law: LimitLaw, M: int) -> list:
    """Exact factorial moments 0..M of a discrete law."""
    k, p = law.kind, law.params
    if k == "Poisson":
        return [Fraction(p["lambda"]) ** m for m in range(M + 1)]
    if k == "NegBinomial":
        r, q = Fraction(p["r"]), Fraction(p["p"])
        return [_falling(-r, m) * (-q / (1 - q)) ** m for m in range(M + 1)]
    if k == "BernoulliSum":
        return [_falling(Fraction(p["l"]), m) * Fraction(p["p"]) ** m for m in range(M + 1)]
    raise ValueError(f"{k} is not discrete")


def law_pmf(law: LimitLaw, ks) -> list[float]:
    from scipy import stats
    k, p = law.kind, law.params
    if k == "Poisson":
        dist = stats.poisson(float(p["lambda"]))
    elif k == "NegBinomial":
        dist = stats.nbinom(float(p["r"]), 1 - float(p["p"]))
    elif k == "BernoulliSum":
        dist = stats.binom(int(p["l"]), float(p["p"]))
    else:
        raise ValueError(f"{k} has no pmf")
    return [float(x) for x in dist.pmf(list(ks))]


# parameter formulas

def normal_params(alpha: Poly, beta: Poly) -> tuple[Fraction, Fraction]:
    """Linear-scale mean and variance constants."""
    a0, a1, a2 = derivatives_at(alpha, 1, 2)
    b0, b1 = derivatives_at(beta, 1, 1)
    if a0 + b0 == 0 or a0 + 2 * b0 == 0:
        raise ZeroDivisionError("alpha(1)+beta(1) and alpha(1)+2beta(1) must be nonzero")
    mu = Fraction(a1, a0 + b0)
    sigma2 = mu + (a2 - 2 * mu * b1 - a0 * mu * mu) / (a0 + 2 * b0)
    return mu, sigma2


def _mu_s2(f: Poly) -> tuple[Fraction, Fraction]:
    f0, f1, f2 = (Fraction(x) for x in derivatives_at(f, 1, 2))
    mu = f1 / f0
    return mu, mu + f2 / f0 - mu * mu


def beta_zero_params(alpha: Poly, gamma: Poly) -> dict:
    """mu, sigma^2 of alpha and gamma plus the log-scale constants nu and varsigma."""
    out = {"mu_alpha": None, "s2_alpha": None, "mu_gamma": None, "s2_gamma": None,
           "nu": None, "varsigma": None}
    a0, a1, a2 = (Fraction(x) for x in derivatives_at(alpha, 1, 2))
    g0, g1, g2 = (Fraction(x) for x in derivatives_at(gamma, 1, 2))
    if alpha.is_zero():
        if g0 <= 0:
            raise ValueError("need gamma(1) > 0 when alpha vanishes")
        out["mu_gamma"], out["s2_gamma"] = _mu_s2(gamma)
        return out
    if a0 <= 0:
        raise ValueError("need alpha(1) > 0")
    out["mu_alpha"], out["s2_alpha"] = _mu_s2(alpha)
    if g0 > 0:
        out["mu_gamma"], out["s2_gamma"] = _mu_s2(gamma)
    out["nu"] = (a0 * g1 - a1 * g0) / a0 ** 2
    out["varsigma"] = (g1 + g2) / a0 - 2 * a1 * g1 / a0 ** 2 + g0 * a1 ** 2 / a0 ** 3
    return out


def km_moments(nn: NnForm, M: int) -> list:
    """Limits K_0..K_M.

    Continuous case (beta < 0): limits of E[X_n^m] / n^(m tau1), floats.
    Discrete case (beta > 0): exact factorial-moment limits read off the
    limiting PGF (1 + (beta1/beta)(v - 1))^(gamma1/beta1), or Poisson when
    beta1 = 0.
    """
    beta, beta1, gamma1 = Fraction(nn.beta), Fraction(nn.beta1), Fraction(nn.gamma1)
    if beta > 0:
        if beta1 == 0:
            return [(gamma1 / beta) ** m for m in range(M + 1)]
        s, c = gamma1 / beta1, beta1 / beta
        return [_falling(s, m) * c ** m for m in range(M + 1)]
    if beta == 0:
        raise MomentError("beta(1) = 0: no K_m limit")
    tau1, tau2 = nn.tau1, nn.tau2
    base = 1 + tau2
    if base <= 0 and base.denominator == 1:
        raise MomentError("Gamma pole at 1 + tau2")
    out = [1.0]
    ratio = Fraction(nn.c1, nn.c0)
    for m in range(1, M + 1):
        exact = m * ratio - gamma1 / beta
        for j in range(1, m):
            exact *= (j * beta1 - gamma1) / beta
        poch = special.poch(float(base), float(m * tau1))
        if not math.isfinite(poch) or poch == 0:
            raise MomentError(f"Gamma pole in K_{m}")
        out.append(float(exact) / poch)
    return out


# decision procedure

@dataclass
class ClassifyContext:
    canonical: CanonicalForm
    nonneg_checked_upto: int
    warnings: list = field(default_factory=list)


def _nonneg(spec: RecurrenceSpec, horizon: int) -> tuple[bool, int, str]:
    last = spec.start
    try:
        for n, row in iter_rows(spec):
            last = n
            if row.is_zero():
                return False, n, f"row {n} vanishes"
            if any(c < 0 for c in row.coeffs):
                return False, n, "negative coefficients"
            if n >= spec.start + horizon:
                break
    except (ArithmeticError, RuntimeError) as err:
        return False, last, f"generation failed: {err}"
    return True, last, ""


def classify(spec: RecurrenceSpec, M: int = 6, horizon: int = 40) -> tuple[LimitLaw, ClassifyContext]:
    """Classify the limiting coefficient distribution of ``spec``."""
    form = canonicalize(spec)
    ok, upto, why = _nonneg(spec, horizon)
    ctx = ClassifyContext(form, upto)
    if not ok:
        ctx.warnings.append(why)
        return unknown(why), ctx
    if isinstance(form, General):
        return unknown("; ".join(form.reasons)), ctx
    if spec.modulus > 1:
        ctx.warnings.append("residue classes share alpha and beta; class-0 gamma used")
    if isinstance(form, BetaZero):
        return _classify_beta_zero(form, ctx), ctx
    if isinstance(form, EulerianLinear):
        return _classify_linear(form, ctx), ctx
    nn = form.nn if isinstance(form, BetaRR) else form
    return _classify_nn(spec, form, nn, M, ctx), ctx


def _classify_beta_zero(form: BetaZero, ctx: ClassifyContext) -> LimitLaw:
    try:
        pars = beta_zero_params(form.alpha, form.gamma)
    except ValueError as err:
        return unknown(str(err))
    if form.alpha.is_zero():
        if pars["s2_gamma"] > 0:
            return normal(pars["mu_gamma"], pars["s2_gamma"])
        ctx.warnings.append("every factor is a monomial: X_n is deterministic")
        return degenerate(pars["mu_gamma"])
    if pars["s2_alpha"] > 0:
        return normal(pars["mu_alpha"], pars["s2_alpha"])
    if pars["varsigma"] > 0:
        if pars["mu_alpha"] == 0:
            return normal(pars["nu"], pars["varsigma"], "log n", "log n")
        return normal(pars["mu_alpha"], pars["varsigma"], "n", "log n", mean_log=pars["nu"])
    ctx.warnings.append("bounded variance: fluctuations stay O(1)")
    return degenerate(pars["mu_alpha"])


def _classify_linear(form: EulerianLinear, ctx: ClassifyContext) -> LimitLaw:
    alpha, beta = form.alpha, form.beta
    if alpha.degree <= 0:
        return unknown("alpha constant in v but beta, gamma or the initial row is not linear")
    a0, b0 = poly_eval(alpha, 1), poly_eval(beta, 1)
    if a0 <= 0 or a0 + 2 * b0 <= 0 or a0 + b0 == 0:
        return unknown("positivity conditions alpha(1) > 0, alpha(1) + 2 beta(1) > 0 fail")
    mu, sigma2 = normal_params(alpha, beta)
    if sigma2 > 0:
        return normal(mu, sigma2)
    if sigma2 == 0:
        return degenerate(mu)
    return unknown("negative variance constant")


def _classify_nn(spec, form, nn: NnForm, M: int, ctx: ClassifyContext) -> LimitLaw:
    alpha, beta, beta1, gamma1 = (Fraction(x) for x in (nn.alpha, nn.beta, nn.beta1, nn.gamma1))
    if alpha == 0:
        return _bounded_branch(spec, ctx)
    if alpha < 0:
        return unknown("alpha < 0 in the non-normal shape")
    if beta > 0:
        if beta1 == 0:
            return poisson(gamma1 / beta) if gamma1 > 0 else degenerate(0)
        if beta1 < 0:
            ctx.warnings.append("discrete factorial moments taken from the limiting PGF")
            if gamma1 <= 0:
                return unknown("NegBinomial branch needs gamma1 > 0")
            return neg_binomial(-gamma1 / beta1, -beta1 / (beta - beta1))
        ell = gamma1 / beta1
        if ell.denominator == 1 and ell > 0 and beta1 < beta:
            return bernoulli_sum(int(ell), beta1 / beta)
        return unknown("beta1 > 0 without gamma1 = l * beta1 for a positive integer l")
    if beta == 0:
        return unknown("beta(1) = 0 in the non-normal shape")
    tau1 = nn.tau1
    try:
        ks = km_moments(nn, M)
    except MomentError as err:
        return unknown(str(err))
    if isinstance(form, BetaRR):
        law = _beta_rr_law(form)
        if law is not None:
            return law
        ctx.warnings.append("Beta-mixture parameters not all positive; generic moment route")
    if tau1 == Fraction(1, 2) and beta1 != 0:
        law = _rayleigh_or_half_normal(nn)
        if law is not None:
            return law
    law = _catalog_match(tau1, ks)
    return law if law is not None else moment_sequence(tau1, ks[1:])


def _beta_rr_law(form: BetaRR) -> Optional[LimitLaw]:
    a = Fraction(form.alpha)
    h0, h1 = Fraction(form.h0), Fraction(form.h1)
    if h0 + h1 <= 0:
        return None
    comps = [(h1 / (h0 + h1), form.p / a + 1, Fraction(form.q) / a),
             (h0 / (h0 + h1), Fraction(form.p) / a, form.q / a + 1)]
    comps = [(w, Fraction(x), Fraction(y)) for w, x, y in comps if w != 0]
    if any(x <= 0 or y <= 0 for _, x, y in comps):
        return None
    if len(comps) == 1:
        return beta_law(comps[0][1], comps[0][2])
    return beta_mixture(comps)


def _rayleigh_or_half_normal(nn: NnForm) -> Optional[LimitLaw]:
    alpha, beta1 = Fraction(nn.alpha), Fraction(nn.beta1)
    tau2 = nn.tau2
    rho1 = -Fraction(nn.c1) * alpha / (2 * Fraction(nn.c0) * beta1)
    rho2 = -Fraction(nn.gamma1) / beta1
    sigma2 = 8 * beta1 ** 2 / alpha ** 2
    if -2 * beta1 / alpha <= 0:
        return None
    h = Fraction(1, 2)
    if (rho1 == 0 and rho2 == tau2 + 3 * h and tau2 in (-h, h)) or \
            (rho1, tau2 - rho2, tau2) in {(1, -h, -h), (1, -h, h), (Fraction(2, 3), -h, 3 * h)}:
        return rayleigh(sigma2)
    if (rho1 == 0 and rho2 == 1 + tau2 and tau2 == 0) or \
            ((rho1, tau2) in {(1, 0), (h, 1)} and rho2 == tau2):
        return half_normal(sigma2)
    return None


def _rel_ok(ks: Sequence[float], template: Sequence[float], tol: float) -> bool:
    return all(abs(k - t) <= tol * max(abs(t), 1e-300) for k, t in zip(ks[1:], template[1:]))


def _nice(x: float) -> Fraction | float:
    f = Fraction(x).limit_denominator(1000)
    return f if abs(float(f) - x) < 1e-9 * max(1.0, abs(x)) else x


def _catalog_match(tau1: Fraction, ks: Sequence[float], tol: float = 1e-6) -> Optional[LimitLaw]:
    M = len(ks) - 1
    if M < 2:
        return None
    if tau1 == 1:
        if _rel_ok(ks, [1 / (m + 1) for m in range(M + 1)], tol):
            return uniform(0, 1)
        m1, m2 = ks[1], ks[2]
        # mean a/(a+b) and second moment m1 (a+1)/(a+b+1) determine (a, b)
        denom = m2 - m1 * m1
        if denom > 0 and m1 > 0:
            s = (m1 - m2) / denom
            a, b = m1 * s, (1 - m1) * s
            if a > 0 and b > 0 and _rel_ok(ks, [_beta_moment(a, b, m) for m in range(M + 1)], tol):
                return beta_law(_nice(a), _nice(b))
    p = float(tau1)
    target = ks[2] / ks[1] ** 2 if ks[1] > 0 else None
    if target is None or not 0 < p <= 1:
        return None

    def ratio(logq: float) -> float:
        q = math.exp(logq)
        return math.log(2) + 2 * math.lgamma(p + q) - math.lgamma(q) - math.lgamma(2 * p + q)

    lo, hi = -12.0, 12.0
    f_lo, f_hi = ratio(lo) - math.log(target), ratio(hi) - math.log(target)
    if f_lo * f_hi > 0:
        return None
    q = math.exp(optimize.brentq(lambda t: ratio(t) - math.log(target), lo, hi, xtol=1e-14))
    c = ks[1] * math.exp(math.lgamma(p + q) - math.lgamma(q))
    if _rel_ok(ks, [_ml_moment(p, q, c, m) for m in range(M + 1)], tol):
        return mittag_leffler(tau1, _nice(q), _nice(c), tau1)
    return None


def _bounded_branch(spec: RecurrenceSpec, ctx: ClassifyContext) -> LimitLaw:
    ctx.warnings.append("alpha vanishes: bounded-variance numeric branch")
    n1, n2 = spec.start + 200, spec.start + 400
    try:
        means, variances = general_mv_recurrence(spec, n2)
    except MomentError as err:
        return unknown(f"bounded branch failed: {err}")
    v1, v2 = variances[n1 - spec.start], variances[n2 - spec.start]
    if v2 > 2 * v1 + 1:
        return unknown("variance grows without a matching theorem")
    if v2 < Fraction(1, 10 ** 12):
        return degenerate(_nice(float(means[-1]) / n2))
    rows = dict(r for r in _take(spec, n2))
    s = moments_from_rows(rows[n2], 6)
    from .moments import factorial_to_raw
    raw = factorial_to_raw(list(s.factorial))
    return moment_sequence(0, [float(x) for x in raw[1:]])


def _take(spec, upto):
    for n, row in iter_rows(spec):
        if n == upto:
            yield n, row
            return
