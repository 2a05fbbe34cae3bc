"""Empirical checks that coefficient distributions approach a predicted law."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy import special

from .classify import DISCRETE, SCALED, LimitLaw, law_factorial_moments, law_moments, law_pmf
from .moments import moments_from_rows, scaled_moments
from .poly import Poly
from .recurrence import RecurrenceSpec, canonicalize, rows_at


@dataclass(frozen=True)
class ToleranceSet:
    moment_rel: Optional[float] = None  # None: 2%, or 10% when tau1 = 1/4
    tv: float = 1e-3
    slope: tuple = (-0.65, -0.35)
    moments_upto: int = 4

    def moment_tol(self, law: LimitLaw) -> float:
        if self.moment_rel is not None:
            return self.moment_rel
        return 0.10 if law.tau1 == Fraction(1, 4) else 0.02


@dataclass
class NRecord:
    n: int
    moment_errors: list
    ks: Optional[float] = None
    tv: Optional[float] = None


@dataclass
class VerificationReport:
    spec_name: str
    law: LimitLaw
    records: list = field(default_factory=list)
    slope: Optional[float] = None
    verdicts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.verdicts) and all(self.verdicts.values())

    def to_json(self) -> dict:
        return {"spec": self.spec_name, "law": self.law.to_json(),
                "records": [asdict(r) for r in self.records], "slope": self.slope,
                "verdicts": self.verdicts, "passed": self.passed, "notes": self.notes}


class VerificationError(ValueError):
    pass


def row_probabilities(row: Poly) -> np.ndarray:
    """Float pmf of a row; exact division before rounding."""
    total = sum(row.coeffs)
    if isinstance(total, int):
        return np.array([c / total for c in row.coeffs], dtype=float)
    total = Fraction(total)
    return np.array([float(Fraction(c) / total) for c in row.coeffs], dtype=float)


def float_moments(probs: np.ndarray, M: int) -> list[float]:
    """Central moments 0..M from a float pmf (round-early counterpart)."""
    k = np.arange(len(probs), dtype=float)
    mu = float(np.dot(k, probs))
    return [float(np.dot((k - mu) ** m, probs)) for m in range(M + 1)]


def ks_normal(row: Poly, mean: float, var: float) -> float:
    """Kolmogorov distance between the standardised row and the standard normal."""
    probs = row_probabilities(row)
    k = np.arange(len(probs), dtype=float)
    z = (k - mean) / math.sqrt(var)
    phi = special.ndtr(z)
    upper = np.cumsum(probs)
    lower = upper - probs
    return float(max(np.max(np.abs(upper - phi)), np.max(np.abs(lower - phi))))


def tv_distance(row: Poly, law: LimitLaw) -> float:
    probs = row_probabilities(row)
    ks = np.arange(len(probs))
    target = np.array(law_pmf(law, ks))
    tail = max(0.0, 1.0 - float(target.sum()))
    return 0.5 * (float(np.abs(probs - target).sum()) + tail)


def rate_fit(points: Sequence[tuple]) -> float:
    """Least-squares slope of log distance against log n."""
    if len(points) < 4:
        raise VerificationError("rate fit needs at least 4 points")
    ns = np.array([p[0] for p in points], dtype=float)
    ds = np.array([p[1] for p in points], dtype=float)
    if np.any(ds <= 0):
        raise VerificationError("distances must be positive")
    slope, _ = np.polyfit(np.log(ns), np.log(ds), 1)
    return float(slope)


def _rel(x: float, y: float) -> float:
    return abs(x - y) / abs(y) if y else abs(x)


def verify_law(spec: RecurrenceSpec, law: LimitLaw, ns: Sequence[int],
               tol: ToleranceSet = ToleranceSet()) -> VerificationReport:
    """Compare finite-n distributions with ``law`` at each n in ``ns``."""
    if law.kind == "Unknown":
        raise VerificationError("nothing to verify for an Unknown law")
    ns = sorted(set(ns))
    rep = VerificationReport(spec.name, law)
    M = tol.moments_upto
    if law.kind == "Normal":
        rows = rows_at(spec, ns)
        for n in ns:
            s = moments_from_rows(rows[n], M)
            var = s.variance
            std = [float(s.central[m] / var ** Fraction(m, 2)) if m % 2 == 0 else
                   float(s.central[m]) / float(var) ** (m / 2) for m in range(M + 1)]
            target = law_moments(law, M)
            errs = [abs(a - b) for a, b in zip(std[1:], target[1:])]
            rep.records.append(NRecord(n, errs, ks=ks_normal(rows[n], float(s.mean), float(var))))
        last = rep.records[-1]
        if M >= 4:
            rep.verdicts["kurtosis"] = last.moment_errors[3] <= tol.moment_tol(law) * 3
        if len(rep.records) > 1:
            rep.verdicts["ks_decreasing"] = rep.records[-1].ks < rep.records[0].ks
        if len(rep.records) >= 4:
            rep.slope = rate_fit([(r.n, r.ks) for r in rep.records])
            if law.params.get("var_scale") == "n":
                rep.verdicts["rate"] = tol.slope[0] <= rep.slope <= tol.slope[1]
    elif law.kind in DISCRETE:
        rows = rows_at(spec, ns)
        target = law_factorial_moments(law, M)
        for n in ns:
            s = moments_from_rows(rows[n], M)
            errs = [_rel(float(s.factorial[m]), float(target[m])) for m in range(1, M + 1)]
            rep.records.append(NRecord(n, errs, tv=tv_distance(rows[n], law)))
        rep.verdicts["tv"] = rep.records[-1].tv <= tol.tv
        rep.verdicts["factorial_moments"] = max(rep.records[-1].moment_errors) <= tol.moment_tol(law)
    elif law.kind in SCALED:
        form = canonicalize(spec)
        target = law_moments(law, M)
        for n in ns:
            got = scaled_moments(spec, n, law.tau1, M, form)
            rep.records.append(NRecord(n, [_rel(a, b) for a, b in zip(got[1:], target[1:])]))
        rep.verdicts["scaled_moments"] = max(rep.records[-1].moment_errors) <= tol.moment_tol(law)
    elif law.kind == "Degenerate":
        rows = rows_at(spec, ns)
        ratios = []
        for n in ns:
            s = moments_from_rows(rows[n], 2)
            ratios.append(float(s.variance) / max(n, 1))
            rep.records.append(NRecord(n, [ratios[-1]]))
        rep.verdicts["variance_per_n"] = ratios[-1] <= ratios[0] + 1e-12
        rep.notes.append("degenerate law: checks that variance/n does not grow")
    else:
        raise VerificationError(f"no verifier for {law.kind}")
    return rep
