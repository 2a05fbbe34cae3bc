"""Command-line front end: generate, classify, verify, moments, oeis.

Exit codes: 0 ok, 2 spec error, 3 generation error, 4 Unknown law under
``--strict``, 5 verification or match failure, 6 I/O error.  Failures print a
JSON object on stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import oeis
from .catalog import builtin_names, builtin_spec, catalog_spec
from .classify import classify, normal_params
from .expr import ExprError
from .moments import format_rational, moments_from_rows
from .recurrence import (BetaRR, EulerianLinear, GenerationError, RecurrenceSpec, SpecError,
                         canonicalize, iter_rows, load_spec)

EXIT_OK, EXIT_SPEC, EXIT_GEN, EXIT_UNKNOWN, EXIT_VERIFY, EXIT_IO = 0, 2, 3, 4, 5, 6

# catalog family -> analytic rho family and which parameter it takes
_RHO_OF = {"A": ("A", 1), "T": ("T", 1), "M": ("M", 1), "Q": ("QV", None)}


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str, **extra):
        super().__init__(message)
        self.code, self.kind, self.extra = code, kind, extra


@dataclass
class RunConfig:
    command: str
    spec_path: Optional[str] = None
    family: Optional[str] = None
    params: list = field(default_factory=list)
    builtin: Optional[str] = None
    rows: int = 10
    order: int = 4
    fmt: str = "csv"
    out: Optional[str] = None
    ns: list = field(default_factory=list)
    law: str = "auto"
    moment_tol: Optional[float] = None
    tv_tol: Optional[float] = None
    strict: bool = False
    offline: bool = False
    a_number: Optional[str] = None
    endpoint: Optional[str] = None
    cache_dir: Optional[str] = None
    first_row: Optional[int] = None
    k_start: Optional[int] = None

    def __post_init__(self):
        given = [x is not None for x in (self.spec_path, self.family, self.builtin)]
        if sum(given) > 1:
            raise CliError(EXIT_SPEC, "config", "give exactly one of --spec, --family, --builtin")
        if sum(given) == 0 and not (self.command == "oeis" and self.a_number):
            raise CliError(EXIT_SPEC, "config", "an input is required: --spec, --family or --builtin")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise CliError(EXIT_SPEC, "config", f"bad family parameter {text!r}") from None


def load_input(cfg: RunConfig) -> RecurrenceSpec:
    try:
        if cfg.spec_path is not None:
            return load_spec(cfg.spec_path)
        if cfg.family is not None:
            ps = [_fraction(p) for p in cfg.params]
            ps = [int(p) if p.denominator == 1 else p for p in ps]
            return catalog_spec(cfg.family, ps)
        name = cfg.builtin
        if name is None:
            name = oeis.REGISTRY[oeis.check_a_number(cfg.a_number)].spec
        return builtin_spec(name)
    except (SpecError, ExprError) as exc:
        raise CliError(EXIT_SPEC, "spec", str(exc)) from exc
    except KeyError as exc:
        raise CliError(EXIT_SPEC, "spec", f"no builtin spec for {exc.args[0]!r}") from exc
    except OSError as exc:
        raise CliError(EXIT_IO, "io", str(exc)) from exc


def _rows(spec: RecurrenceSpec, count: int) -> list:
    """``count`` rows after the initial one, so ``--rows 0`` gives P_start only."""
    if count < 0:
        raise CliError(EXIT_SPEC, "config", "--rows must be >= 0")
    out = []
    try:
        for n, row in iter_rows(spec):
            out.append((n, row))
            if n >= spec.start + count:
                break
    except (GenerationError, ArithmeticError) as exc:
        raise CliError(EXIT_GEN, "generation", str(exc)) from exc
    return out


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        try:
            Path(cfg.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise CliError(EXIT_IO, "io", str(exc)) from exc
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def rows_csv(rows) -> str:
    lines = ["n,k,value"]
    for n, row in rows:
        lines.extend(f"{n},{k},{format_rational(c)}" for k, c in enumerate(row.coeffs))
    return "\n".join(lines) + "\n"


def read_rows_csv(text: str) -> dict[int, list[Fraction]]:
    """Inverse of :func:`rows_csv`."""
    out: dict[int, list[Fraction]] = {}
    for line in text.splitlines()[1:]:
        n, k, val = line.split(",")
        row = out.setdefault(int(n), [])
        assert int(k) == len(row)
        row.append(Fraction(val))
    return out


def cmd_generate(cfg: RunConfig) -> int:
    spec = load_input(cfg)
    rows = _rows(spec, cfg.rows)
    if cfg.fmt == "json":
        text = _dump({"spec": spec.name, "rows": [
            {"n": n, "coeffs": [format_rational(c) for c in row.coeffs]} for n, row in rows]})
    else:
        text = rows_csv(rows)
    _emit(cfg, text)
    return EXIT_OK


def _cross_check(spec: RecurrenceSpec, law) -> Optional[dict]:
    meta = spec.meta or {}
    fam = meta.get("family")
    if fam is None:
        return None
    out: dict = {"family": fam}
    pred = meta.get("predicted")
    if pred is not None:
        out["family_prediction"] = {"mu": format_rational(pred[0]),
                                    "sigma2": format_rational(pred[1])}
    form = canonicalize(spec)
    if isinstance(form, EulerianLinear):
        mu, s2 = normal_params(form.alpha, form.beta)
        out["classifier"] = {"mu": format_rational(mu), "sigma2": format_rational(s2)}
        if pred is not None:
            out["classifier_matches_family"] = (mu, s2) == tuple(pred)
    if fam in _RHO_OF:
        from .analytic import AnalyticError, quasi_power_params, rho_catalog
        rho_fam, idx = _RHO_OF[fam]
        params = () if idx is None else (meta["params"][idx],)
        try:
            qp = quasi_power_params(rho_catalog(rho_fam, params))
        except AnalyticError as exc:
            out["quasi_powers"] = {"error": str(exc)}
        else:
            out["quasi_powers"] = {"mu": qp.mu, "sigma2": qp.sigma2, "error": qp.error}
            if pred is not None:
                out["quasi_powers_agree"] = (abs(qp.mu - float(pred[0])) < 1e-7
                                             and abs(qp.sigma2 - float(pred[1])) < 1e-7)
    return out


def _shape(form) -> str:
    if isinstance(form, BetaRR):
        return "BetaRR"
    return type(form).__name__


def cmd_classify(cfg: RunConfig) -> int:
    spec = load_input(cfg)
    try:
        law, ctx = classify(spec, M=max(cfg.order, 2))
    except (GenerationError, ArithmeticError) as exc:
        raise CliError(EXIT_GEN, "generation", str(exc)) from exc
    report = {"spec": spec.name, "shape": _shape(ctx.canonical), "law": law.to_json(),
              "summary": str(law), "warnings": ctx.warnings}
    check = _cross_check(spec, law)
    if check is not None:
        report["cross_check"] = check
    _emit(cfg, _dump(report))
    if law.kind == "Unknown" and cfg.strict:
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import ToleranceSet, VerificationError, verify_law

    if cfg.law != "auto":
        raise CliError(EXIT_SPEC, "config", "only --law auto is supported")
    if not cfg.ns:
        raise CliError(EXIT_SPEC, "config", "--ns is required")
    spec = load_input(cfg)
    law, _ = classify(spec)
    tol = ToleranceSet(moment_rel=cfg.moment_tol,
                       **({} if cfg.tv_tol is None else {"tv": cfg.tv_tol}))
    try:
        rep = verify_law(spec, law, cfg.ns, tol)
    except VerificationError as exc:
        raise CliError(EXIT_VERIFY, "verification", str(exc)) from exc
    except (GenerationError, ArithmeticError) as exc:
        raise CliError(EXIT_GEN, "generation", str(exc)) from exc
    _emit(cfg, _dump(rep.to_json()))
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_moments(cfg: RunConfig) -> int:
    from .moments import moments_csv

    spec = load_input(cfg)
    sums = [moments_from_rows(row, cfg.order, n) for n, row in _rows(spec, cfg.rows)]
    if cfg.fmt == "json":
        text = _dump({"spec": spec.name, "moments": [{
            "n": s.n, "total": format_rational(s.total), "mean": format_rational(s.mean),
            "variance": format_rational(s.variance),
            "central": [format_rational(x) for x in s.central],
            "factorial": [format_rational(x) for x in s.factorial]} for s in sums]})
    else:
        text = moments_csv(sums, cfg.order)
    _emit(cfg, text)
    return EXIT_OK


def cmd_oeis(cfg: RunConfig) -> int:
    if not cfg.a_number:
        raise CliError(EXIT_SPEC, "config", "--id is required")
    try:
        a = oeis.check_a_number(cfg.a_number)
    except ValueError as exc:
        raise CliError(EXIT_SPEC, "config", str(exc)) from exc
    spec = load_input(cfg)
    info = oeis.REGISTRY.get(a)
    layout = info.layout if info else oeis.Layout()
    if cfg.first_row is not None or cfg.k_start is not None:
        layout = oeis.Layout(first_row=layout.first_row if cfg.first_row is None else cfg.first_row,
                             k_start=layout.k_start if cfg.k_start is None else cfg.k_start,
                             width=layout.width)
    try:
        bfile = oeis.resolve_bfile(a, offline=cfg.offline, endpoint=cfg.endpoint,
                                   cache_dir=cfg.cache_dir)
    except (OSError, oeis.BFileError) as exc:
        raise CliError(EXIT_IO, "io", str(exc)) from exc
    try:
        match = oeis.match_spec(spec, bfile, layout, a)
    except (GenerationError, ArithmeticError) as exc:
        raise CliError(EXIT_GEN, "generation", str(exc)) from exc
    except ValueError as exc:
        raise CliError(EXIT_VERIFY, "match", str(exc)) from exc
    _emit(cfg, _dump({"spec": spec.name, **match.to_json()}))
    return EXIT_OK if match.full else EXIT_VERIFY


COMMANDS = {"generate": cmd_generate, "classify": cmd_classify, "verify": cmd_verify,
            "moments": cmd_moments, "oeis": cmd_oeis}


def _ns(text: str) -> list[int]:
    try:
        ns = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n-list {text!r}") from None
    if not ns or min(ns) < 0:
        raise argparse.ArgumentTypeError("n-list must hold non-negative integers")
    return ns


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eulerrec", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        src = sp.add_mutually_exclusive_group()
        src.add_argument("--spec", dest="spec_path", metavar="PATH")
        src.add_argument("--family", nargs="+", metavar=("F", "PARAM"),
                         help="catalog family and parameters, e.g. --family A 1 1 1")
        src.add_argument("--builtin", choices=builtin_names(), metavar="NAME")
        sp.add_argument("--out", metavar="PATH")
        if name in ("generate", "moments"):
            sp.add_argument("--rows", type=int, default=10)
            sp.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        if name in ("classify", "moments"):
            sp.add_argument("--order", type=int, default=4)
        if name == "classify":
            sp.add_argument("--strict", action="store_true")
        if name == "verify":
            sp.add_argument("--ns", type=_ns, required=True)
            sp.add_argument("--law", default="auto")
            sp.add_argument("--moment-tol", type=float)
            sp.add_argument("--tv-tol", type=float)
        if name == "oeis":
            sp.add_argument("--id", dest="a_number", required=True)
            sp.add_argument("--offline", action="store_true")
            sp.add_argument("--endpoint")
            sp.add_argument("--cache-dir")
            sp.add_argument("--first-row", type=int)
            sp.add_argument("--k-start", type=int)
    return p


def config_from_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    fam = ns.pop("family", None)
    if fam:
        ns["family"], ns["params"] = fam[0], fam[1:]
    if ns.get("command") == "oeis":
        # flags win over the environment
        if not ns.get("offline"):
            ns["offline"] = os.environ.get("EULERREC_OFFLINE", "") not in ("", "0")
        ns["endpoint"] = ns.get("endpoint") or os.environ.get(oeis.ENDPOINT_ENV)
        ns["cache_dir"] = ns.get("cache_dir") or os.environ.get(oeis.CACHE_ENV)
    return RunConfig(**{k: v for k, v in ns.items() if v is not None or k == "family"})


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = config_from_args(argv)
        return COMMANDS[cfg.command](cfg)
    except CliError as exc:
        err = {"error": exc.kind, "message": str(exc), "exit_code": exc.code, **exc.extra}
        sys.stderr.write(json.dumps(err) + "\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
