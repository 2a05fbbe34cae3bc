"""Mean and variance constants from a dominant singularity rho(v).

If [z^n]F(z, v) behaves like rho(v)^(-n), then with g(s) = log rho(e^s)

    mu = -g'(0),   sigma^2 = -g''(0).

Derivatives are taken numerically: central differences refined by two
Richardson steps (sixth order), swept over h = 2^-6 .. 2^-12.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from scipy import integrate

SERIES_WINDOW = 1e-4


class AnalyticError(ArithmeticError):
    """Extrapolation did not settle."""


@dataclass(frozen=True)
class RhoEntry:
    family: str
    params: tuple
    evaluator: Callable[[float], float]
    rho1: float
    alpha_beta: tuple = ()  # (alpha, beta) as coefficient lists, for cross-checks
    note: str = ""

    def __call__(self, v: float) -> float:
        if v == 1.0:
            return self.rho1
        return self.evaluator(v)


@dataclass(frozen=True)
class QuasiPowerResult:
    mu: float
    sigma2: float
    error: float
    step: float
    degenerate: bool

    def __iter__(self):
        return iter((self.mu, self.sigma2))


# well-conditioned building blocks, each analytic at the origin

def _log1p_over(w: float) -> float:
    """log(1 + w) / w."""
    if abs(w) < SERIES_WINDOW:
        return 1 - w / 2 + w * w / 3 - w ** 3 / 4
    return math.log1p(w) / w


def _asin_over_sqrt(t: float) -> float:
    """asin(sqrt t) / sqrt t, continued to t < 0 as asinh(sqrt -t) / sqrt -t."""
    if abs(t) < SERIES_WINDOW:
        return 1 + t / 6 + 3 * t * t / 40 + 5 * t ** 3 / 112
    if t > 0:
        r = math.sqrt(t)
        return math.asin(r) / r
    r = math.sqrt(-t)
    return math.asinh(r) / r


def _atanh_over_sqrt(t: float) -> float:
    """atanh(sqrt t) / sqrt t, continued to t < 0 as atan(sqrt -t) / sqrt -t."""
    if abs(t) < SERIES_WINDOW:
        return 1 + t / 3 + t * t / 5 + t ** 3 / 7
    if t > 0:
        r = math.sqrt(t)
        return math.atanh(r) / r
    r = math.sqrt(-t)
    return math.atan(r) / r


def _atan_over(t: float) -> float:
    if abs(t) < SERIES_WINDOW:
        return 1 - t * t / 3 + t ** 4 / 5
    return math.atan(t) / t


def _acos_over(x: float) -> float:
    """acos(x) / sqrt(1 - x^2), analytic at x = 1."""
    y = 1 - x
    return _asin_over_sqrt(y / 2) * math.sqrt(2 / (2 - y))


def _quad(f, a: float, b: float, alg: Optional[float] = None) -> float:
    opts = dict(epsabs=1e-13, epsrel=1e-13, limit=200)
    if alg is not None and alg != 0:
        # weight (x - a)^alg handles the endpoint singularity exactly
        val, _ = integrate.quad(f, a, b, weight="alg", wvar=(alg, 0), **opts)
    else:
        val, _ = integrate.quad(f, a, b, **opts)
    return val


def rho_catalog(family: str, params=()) -> RhoEntry:
    """Dominant singularities of the exactly solvable families.

    Integral forms are rewritten with t = 1 - (1 - v) u so that the integrand
    stays regular on both sides of v = 1.
    """
    fam = family.upper()
    ps = tuple(params)
    if fam == "A":
        (q,) = _need(fam, ps, 1)
        q = float(q)
        return RhoEntry(fam, ps, lambda v: _log1p_over(v - 1) / q, 1 / q,
                        ([0, q], [0, q]))
    if fam == "T":
        (q,) = _need(fam, ps, 1)
        qf = float(q)

        def rho(v):
            w = v - 1
            return _quad(lambda u: 1 / (1 + w * u), 0, 1, alg=qf - 1)
        return RhoEntry(fam, ps, rho, 1 / qf, ([0, qf], [0, 1]))
    if fam == "PQV":
        p, q = (float(x) for x in _need(fam, ps, 2))

        def rho(v):
            w = v - 1
            return v ** p * _quad(lambda u: (1 + w * u) ** (-p - 1), 0, 1, alg=p + q - 1)
        return RhoEntry(fam, ps, rho, 1 / (p + q), ([p, q], [0, 1]),
                        "read with (1-v)^(p+q) in the denominator")
    if fam == "V2V":
        return RhoEntry(fam, ps, lambda v: _atanh_over_sqrt(1 - v), 1.0, ([0, 1], [0, 2]))
    if fam == "DD":
        return RhoEntry(fam, ps, lambda v: _acos_over((1 + v) / 2), 1.0,
                        ([0.5, 0.5], [1.5, 0.5]))
    if fam == "QV":
        return RhoEntry(fam, ps, _acos_over, 1.0, ([0, 1], [1, 1]))
    if fam == "QV2":
        return RhoEntry(fam, ps, lambda v: _acos_over(1 / v) / v, 1.0, ([0, 0, 1], [0, 1, 1]))
    if fam == "CHEB":
        # arccos(2v/(1+v^2)) = 2|arctan((1-v)/(1+v))|; the analytic branch drops the modulus
        return RhoEntry(fam, ps, lambda v: 2 / (1 + v) * _atan_over((1 - v) / (1 + v)), 1.0,
                        ([0.5, 0, 0.5], [0.5, 0, 0.5]), "analytic branch of the arccos form")
    if fam == "V1PV":
        def rho(v):
            w = v - 1
            return _log1p_over(w) - 0.5 * _log1p_over(w / 2)
        return RhoEntry(fam, ps, rho, 0.5, ([0, 1, 1], [0, 1, 1]),
                        "log((1+v)/(2v))/(1-v) form")
    if fam == "2V2":
        return RhoEntry(fam, ps, lambda v: _log1p_over(v - 1) / (1 + v), 0.5,
                        ([0, 0, 2], [0, 1, 1]))
    if fam == "M":
        (q,) = _need(fam, ps, 1)
        qf = float(q)

        def rho(v):
            w = v - 1
            lw = _log1p_over(w)
            x = -lw * w / qf
            em = math.expm1(x) / x if abs(x) > 1e-300 else 1.0
            return em * lw / qf
        return RhoEntry(fam, ps, rho, 1 / qf, ([-1, qf + 1], [0, qf]))
    if fam == "CONST":
        return RhoEntry(fam, ps, lambda v: 1.0, 1.0)
    raise KeyError(f"unknown rho family {family!r}")


def _need(fam, ps, k):
    if len(ps) != k:
        raise ValueError(f"rho family {fam} takes {k} parameters")
    return ps


RHO_FAMILIES = ("A", "T", "PQV", "V2V", "DD", "QV", "QV2", "CHEB", "V1PV", "2V2", "M", "CONST")


def _richardson(d: Callable[[float], float], h: float) -> float:
    d1, d2, d4 = d(h), d(h / 2), d(h / 4)
    r1a, r1b = (4 * d2 - d1) / 3, (4 * d4 - d2) / 3
    return (16 * r1b - r1a) / 15


def _sweep(d: Callable[[float], float]) -> tuple[float, float, float]:
    steps = [2.0 ** -k for k in range(6, 13)]
    ests = [_richardson(d, h) for h in steps]
    best = (math.inf, ests[0], steps[0])
    prev_err = math.inf
    for i in range(1, len(ests)):
        err = abs(ests[i] - ests[i - 1])
        if err < best[0]:
            best = (err, ests[i - 1], steps[i - 1])
        if err > prev_err:
            # estimates started to drift apart: roundoff now dominates
            break
        prev_err = err
    return best


def quasi_power_params(entry: RhoEntry) -> QuasiPowerResult:
    """(mu, sigma^2) from log rho(e^s) at s = 0, with an error estimate."""
    g0 = math.log(abs(entry.rho1))

    def g(s: float) -> float:
        return math.log(abs(entry(math.exp(s))))

    err1, d1, h1 = _sweep(lambda h: (g(h) - g(-h)) / (2 * h))
    err2, d2, h2 = _sweep(lambda h: (g(h) - 2 * g0 + g(-h)) / (h * h))
    err = max(err1, err2)
    if err > 1e-6:
        raise AnalyticError(f"extrapolation did not converge (error estimate {err:.2e})")
    mu, sigma2 = -d1, -d2
    return QuasiPowerResult(mu, sigma2, err, min(h1, h2), abs(sigma2) < 1e-8)


def catalog_rows() -> list[tuple[RhoEntry, tuple]]:
    """Representative entries paired with their stated (mu, sigma^2)."""
    out = []
    for q in (1, 2, 3, Fraction(1, 2)):
        out.append((rho_catalog("A", (q,)), (Fraction(1, 2), Fraction(1, 12))))
    for q in (1, 2, 3, Fraction(5, 2)):
        q_ = Fraction(q)
        out.append((rho_catalog("T", (q,)), (q_ / (q_ + 1), q_ ** 2 / ((q_ + 1) ** 2 * (q_ + 2)))))
    for p, q in ((1, 1), (2, 1), (Fraction(1, 2), 3)):
        p_, q_ = Fraction(p), Fraction(q)
        out.append((rho_catalog("PQV", (p, q)),
                    (q_ / (p_ + q_ + 1), q_ * (p_ + 1) * (p_ + q_) / ((p_ + q_ + 1) ** 2 * (p_ + q_ + 2)))))
    out.append((rho_catalog("V2V"), (Fraction(1, 3), Fraction(2, 45))))
    out.append((rho_catalog("DD"), (Fraction(1, 6), Fraction(23, 180))))
    out.append((rho_catalog("QV"), (Fraction(1, 3), Fraction(8, 45))))
    out.append((rho_catalog("QV2"), (Fraction(2, 3), Fraction(8, 45))))
    out.append((rho_catalog("CHEB"), (Fraction(1, 2), Fraction(5, 12))))
    out.append((rho_catalog("V1PV"), (Fraction(3, 4), Fraction(7, 48))))
    out.append((rho_catalog("2V2"), (Fraction(1), Fraction(1, 3))))
    for q in (1, 2, 3):
        q_ = Fraction(q)
        out.append((rho_catalog("M", (q,)), ((q_ + 1) / (2 * q_), (q_ ** 2 - 1) / (12 * q_ ** 2))))
    return out
