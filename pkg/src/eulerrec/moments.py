"""Exact moments of the coefficient distribution.

``X_n`` takes the value k with probability ``[v^k]P_n(v) / P_n(1)``. Moments
come either straight from a row or from recurrences that never build rows.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Optional, Sequence, Union

from .expr import eval_at_n
from .poly import Poly, derivatives_at, poly_eval
from .recurrence import EulerianLinear, NnForm, RecurrenceSpec, canonicalize

Number = Union[int, Fraction, float]


class MomentError(ArithmeticError):
    """Vanishing denominator or invalid distribution."""


@dataclass(frozen=True)
class MomentSummary:
    n: int
    total: Fraction
    mean: Fraction
    variance: Fraction
    central: tuple  # M_{n,0..M}
    factorial: tuple  # Q_{n,0..M}


def _stirling1_signed(m: int) -> list[list[int]]:
    s = [[0] * (m + 1) for _ in range(m + 1)]
    s[0][0] = 1
    for i in range(1, m + 1):
        for j in range(1, i + 1):
            s[i][j] = s[i - 1][j - 1] - (i - 1) * s[i - 1][j]
    return s


def _stirling2(m: int) -> list[list[int]]:
    s = [[0] * (m + 1) for _ in range(m + 1)]
    s[0][0] = 1
    for i in range(1, m + 1):
        for j in range(1, i + 1):
            s[i][j] = j * s[i - 1][j] + s[i - 1][j - 1]
    return s


def raw_to_factorial(raw: Sequence) -> list:
    """E[X^j], j = 0..M  ->  E[X(X-1)...(X-j+1)]."""
    s = _stirling1_signed(len(raw) - 1)
    return [sum(s[m][j] * raw[j] for j in range(m + 1)) for m in range(len(raw))]


def factorial_to_raw(fact: Sequence) -> list:
    s = _stirling2(len(fact) - 1)
    return [sum(s[m][j] * fact[j] for j in range(m + 1)) for m in range(len(fact))]


def raw_to_central(raw: Sequence) -> list:
    mu = raw[1]
    return [sum(comb(m, j) * raw[j] * (-mu) ** (m - j) for j in range(m + 1))
            for m in range(len(raw))]


def moments_from_rows(row: Poly, M: int = 8, n: Optional[int] = None) -> MomentSummary:
    """Exact moments of one row by direct summation."""
    if row.is_zero():
        raise MomentError("zero row")
    if any(c < 0 for c in row.coeffs):
        raise MomentError("negative coefficient")
    M = max(M, 2)
    sums = [0] * (M + 1)
    for k, c in enumerate(row.coeffs):
        if c:
            pw = c
            for j in range(M + 1):
                sums[j] += pw
                pw *= k
    total = Fraction(sums[0])
    raw = [Fraction(s) / total for s in sums]
    central = raw_to_central(raw)
    central[1] = Fraction(0)
    return MomentSummary(n=-1 if n is None else n, total=total, mean=raw[1],
                         variance=central[2], central=tuple(central),
                         factorial=tuple(raw_to_factorial(raw)))


def _at_one(p: Poly, k: int) -> list:
    return derivatives_at(p, 1, k)


def mean_recurrence(form: EulerianLinear, upto: int) -> list[Fraction]:
    """mu_start .. mu_upto from the first-order recurrence for the mean."""
    a0, a1 = _at_one(form.alpha, 1)
    g0, g1 = _at_one(form.gamma, 1)
    b0 = poly_eval(form.beta, 1)
    mu = Fraction(poly_eval(form.initial.derivative(), 1), poly_eval(form.initial, 1))
    out = [mu]
    for n in range(form.start + 1, upto + 1):
        lam = a0 * n + g0
        if lam == 0:
            raise MomentError(f"alpha(1) n + gamma(1) vanishes at n={n}")
        mu = (1 - Fraction(b0, 1) / lam) * mu + Fraction(a1 * n + g1) / lam
        out.append(mu)
    return out


def _psi_diff(x: Fraction, n: int) -> Fraction:
    """psi(x + n) - psi(x) = sum_{j<n} 1/(x + j), exact for rational x."""
    return sum((1 / (x + j) for j in range(n)), Fraction(0))


def mean_closed_form(alpha, beta, gamma, alpha1, gamma1, mu0, n: int) -> Fraction:
    """Solved mean, indexed so that ``mu0`` is the mean at n = 0.

    The Gamma ratio of the generic branch telescopes to a finite product and
    the digamma differences of the two special branches telescope to finite
    sums, so every branch is evaluated exactly. A zero factor in the product
    plays the role of a reciprocal Gamma at a pole.
    """
    alpha, beta, gamma = Fraction(alpha), Fraction(beta), Fraction(gamma)
    alpha1, gamma1, mu0 = Fraction(alpha1), Fraction(gamma1), Fraction(mu0)
    if n == 0:
        return mu0
    if alpha == 0:
        raise MomentError("closed form needs alpha(1) != 0")
    if beta == 0:
        psi = _psi_diff(1 + gamma / alpha, n)
        return alpha1 * n / alpha + (alpha * gamma1 - alpha1 * gamma) / alpha ** 2 * psi + mu0
    if alpha + beta == 0:
        if alpha + gamma == 0:
            raise MomentError("alpha + gamma vanishes")
        psi = _psi_diff(1 + gamma / alpha, n)
        return ((alpha * (n + 1) + gamma) * (alpha1 / alpha ** 2 * psi + mu0 / (alpha + gamma))
                + (gamma1 / (alpha + gamma) - alpha1 / alpha) * n)
    ratio = Fraction(1)
    for j in range(1, n + 1):
        den = alpha * j + gamma
        if den == 0:
            raise MomentError(f"alpha j + gamma vanishes at j={j}")
        ratio *= (den - beta) / den
        if ratio == 0:
            break
    shift = gamma1 / beta + alpha1 * (beta - gamma) / (beta * (alpha + beta))
    return alpha1 * n / (alpha + beta) + shift + ratio * (mu0 - shift)


def mean_closed_form_for(form: EulerianLinear, n: int) -> Fraction:
    """:func:`mean_closed_form` for a canonical form, re-indexed from its start."""
    a0, a1 = _at_one(form.alpha, 1)
    g0, g1 = _at_one(form.gamma, 1)
    s = form.start
    mu0 = Fraction(poly_eval(form.initial.derivative(), 1), poly_eval(form.initial, 1))
    # n = s + k: alpha n + gamma = alpha k + (gamma + alpha s)
    return mean_closed_form(a0, poly_eval(form.beta, 1), g0 + a0 * s, a1, g1 + a1 * s, mu0, n - s)


def _shifted_coeffs(p: Poly, delta: Fraction, M: int, beta_like: bool) -> list:
    """j! [s^j] of e^{-delta s} p(e^s), times (1 - e^{-s}) when ``beta_like``."""
    out = []
    for j in range(M + 1):
        acc = Fraction(0)
        for k, c in enumerate(p.coeffs):
            if c:
                if beta_like:
                    acc += c * ((k - delta) ** j - (k - 1 - delta) ** j)
                else:
                    acc += c * (k - delta) ** j
        out.append(acc)
    return out


def central_moment_recurrence(form: EulerianLinear, M: int, upto: int) -> list[list[Fraction]]:
    """Table ``[M_{n,0}, ..., M_{n,M}]`` for n = start..upto, exactly."""
    init = moments_from_rows(form.initial, M) if all(c >= 0 for c in form.initial.coeffs) \
        else None
    if init is None:
        raise MomentError("initial row must have nonnegative coefficients")
    alpha, beta, gamma = form.alpha, form.beta, form.gamma
    a_at1, g_at1, b_at1 = poly_eval(alpha, 1), poly_eval(gamma, 1), poly_eval(beta, 1)
    mus = mean_recurrence(form, upto)
    table = [list(init.central)]
    for idx, n in enumerate(range(form.start + 1, upto + 1), 1):
        lam = a_at1 * n + g_at1
        mu_prev, delta = mus[idx - 1], mus[idx] - mus[idx - 1]
        A = _shifted_coeffs(alpha, delta, M, False)
        G = _shifted_coeffs(gamma, delta, M, False)
        B = _shifted_coeffs(beta, delta, M, True)
        prev = table[-1]
        row = [Fraction(1), Fraction(0)]
        for m in range(2, M + 1):
            acc = (lam - m * b_at1) * prev[m]
            for j in range(2, m + 1):
                acc += comb(m, j) * (n * A[j] + G[j] - mu_prev * B[j]) * prev[m - j]
            for j in range(2, m):
                acc -= comb(m, j) * B[j] * prev[m - j + 1]
            row.append(acc / lam)
        table.append(row)
    return table


def factorial_moment_recurrence(nn: NnForm, M: int, upto: int, exact: bool = True,
                                initial: Optional[Sequence] = None) -> list[list]:
    """Table ``[Q_{n,0}, ..., Q_{n,M}]`` for n = start..upto.

    With ``exact=False`` the same recurrence runs in floating point, which is
    what large n (thousands of steps) calls for.
    """
    conv = Fraction if exact else float
    if initial is None:
        q = [conv(1), conv(Fraction(nn.c1, nn.c0))] + [conv(0)] * (M - 1)
    else:
        q = [conv(x) for x in initial][: M + 1]
    q = q[: M + 1]
    alpha, beta, gamma = conv(nn.alpha), conv(nn.beta), conv(nn.gamma)
    beta1, gamma1 = conv(nn.beta1), conv(nn.gamma1)
    table = [q]
    for n in range(nn.start + 1, upto + 1):
        lam = alpha * n + gamma
        if lam == 0:
            raise MomentError(f"alpha n + gamma vanishes at n={n}")
        prev = table[-1]
        row = [conv(1)]
        for m in range(1, M + 1):
            row.append(((lam - m * beta) * prev[m] + m * (gamma1 - (m - 1) * beta1) * prev[m - 1])
                       / lam)
        table.append(row)
    return table


def nn_exact_mean(nn: NnForm, n: int) -> Fraction:
    """Closed-form E X_n of the non-normal shape (needs beta != 0)."""
    if nn.beta == 0:
        raise MomentError("closed-form mean needs beta != 0")
    base = Fraction(nn.gamma1, nn.beta)
    ratio = Fraction(1)
    for j in range(nn.start + 1, n + 1):
        den = nn.alpha * j + nn.gamma
        ratio *= Fraction(den - nn.beta, den)
    return base + (Fraction(nn.c1, nn.c0) - base) * ratio


def general_mv_recurrence(spec: RecurrenceSpec, upto: int) -> tuple[list, list]:
    """Exact (means, variances) for n = start..upto without building rows.

    Works for any first-order spec whose derivative multiplier vanishes at
    v = 1 and whose second-derivative multiplier has a double zero there;
    residue classes are followed as they come.
    """
    if spec.second_order or any(c.inhomog is not None for c in spec.classes):
        raise MomentError("general recurrence needs a first-order homogeneous spec")
    p0 = derivatives_at(spec.initial, 1, 2)
    if p0[0] == 0:
        raise MomentError("initial row sums to zero")
    mu = Fraction(p0[1], p0[0])
    r2 = Fraction(p0[2], p0[0])
    means, variances = [mu], [r2 + mu - mu * mu]
    for n in range(spec.start + 1, upto + 1):
        cls = spec.class_at(n)
        a = derivatives_at(eval_at_n(cls.a, n), 1, 2)
        B = derivatives_at(eval_at_n(cls.b, n), 1, 2)
        C = derivatives_at(eval_at_n(cls.b2, n), 1, 2)
        if B[0] != 0 or C[0] != 0 or C[1] != 0:
            raise MomentError("derivative multipliers must vanish at v=1 (to second order for b2)")
        if a[0] == 0:
            raise MomentError(f"a_n(1) vanishes at n={n}")
        lam = Fraction(a[0])
        mu, r2 = ((a[1] + (a[0] + B[1]) * mu) / lam,
                  (a[2] + (2 * a[1] + B[2]) * mu + (a[0] + 2 * B[1] + C[2]) * r2) / lam)
        means.append(mu)
        variances.append(r2 + mu - mu * mu)
    return means, variances


def summaries_from_rows(rows: Iterable[tuple[int, Poly]], M: int = 8) -> list[MomentSummary]:
    return [moments_from_rows(r, M, n) for n, r in rows]


def scaled_moments(spec: RecurrenceSpec, n: int, tau1, M: int = 4,
                   form=None) -> list[float]:
    """E[(X_n / n^tau1)^m] for m = 0..M as floats.

    Uses the factorial-moment recurrence when the spec has the non-normal
    shape (no rows needed), otherwise the exact row.
    """
    form = canonicalize(spec) if form is None else form
    nn = getattr(form, "nn", form)
    scale = float(n) ** float(tau1)
    if isinstance(nn, NnForm):
        fact = factorial_moment_recurrence(nn, M, n, exact=False)[-1]
        raw = factorial_to_raw(fact)
    else:
        from .recurrence import rows_at
        row = rows_at(spec, [n])[n]
        s = moments_from_rows(row, M)
        raw = [float(x) for x in factorial_to_raw(list(s.factorial))]
    return [float(raw[m]) / scale ** m for m in range(M + 1)]


def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, j) for j in range(1, n + 1)), Fraction(0))


def format_rational(x) -> str:
    """``p/q`` rendering used in CSV output (integers stay bare)."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def moments_csv(summaries: Sequence[MomentSummary], M: int) -> str:
    head = ["n", "total", "mean", "variance"] + [f"central{m}" for m in range(2, M + 1)] \
        + [f"factorial{m}" for m in range(1, M + 1)]
    lines = [",".join(head)]
    for s in summaries:
        vals = [str(s.n), format_rational(s.total), format_rational(s.mean),
                format_rational(s.variance)]
        vals += [format_rational(s.central[m]) for m in range(2, M + 1)]
        vals += [format_rational(s.factorial[m]) for m in range(1, M + 1)]
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"
