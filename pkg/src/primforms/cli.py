"""Command-line front end: dimension tables, newforms, charpolys, verification, export.

Exit codes: 0 success, 1 verification failures, 2 usage errors, 3 internal
consistency errors.  All numbers are printed exactly.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

from . import hecke, ringspace
from .exactnum import IntPoly, factor_int_poly
from .formula import verify as fverify
from .hecke import ClassificationError, cell, classes, good_primes, table_classes
from .ringspace import InternalConsistencyError, sturm_precision
from .specialseries import LEVELS

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
EXPORT_PRIMES = 3  # good primes listed in charpoly_per_prime


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    levels: list
    weights: list
    sign_class: object = None
    prec: int | None = None
    margin: int | None = None
    fmt: str = "text"
    dataset: str | None = None


def _parse_class(text: str | None, N: int | None):
    if text is None:
        return None
    if N == 9 or text in ("0", "*", "tw"):
        return text
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"bad class {text!r}") from None


def _weights(args) -> list[int]:
    if getattr(args, "weight", None) is not None:
        lo = hi = args.weight
    else:
        lo = getattr(args, "min_weight", None) or 2
        hi = getattr(args, "max_weight", None)
        if hi is None:
            raise UsageError("give --weight or --max-weight")
    if lo < 2 or (getattr(args, "weight", None) is not None and lo % 2):
        raise UsageError(f"weight must be even and >= 2, got {lo}")
    return [k for k in range(lo + lo % 2, hi + 1, 2)]


def _config(args, needs_levels: bool = True) -> RunConfig:
    levels = (args.level or list(LEVELS)) if needs_levels else []
    for N in levels:
        if N not in LEVELS:
            raise UsageError(f"level must be one of {LEVELS}, got {N}")
    N0 = levels[0] if len(levels) == 1 else None
    cfg = RunConfig(levels, _weights(args) if needs_levels else [],
                    _parse_class(getattr(args, "cls", None), N0), getattr(args, "prec", None),
                    getattr(args, "margin", None), getattr(args, "format", "text"),
                    getattr(args, "dataset", None))
    if cfg.prec is not None and cfg.prec < 2:
        raise UsageError("--prec must be at least 2")
    if cfg.margin is not None:
        if cfg.margin < 0:
            raise UsageError("--margin must be non-negative")
        if cfg.margin != ringspace.STURM_MARGIN:
            ringspace.STURM_MARGIN = cfg.margin
            hecke.clear_cache()
    return cfg


def _classes_for(N: int, wanted) -> list:
    labels = classes(N)
    if wanted is None:
        return labels
    if wanted not in labels:
        raise UsageError(f"class {wanted!r} does not exist at level {N}; choose from {labels}")
    return [wanted]


def _field_name(f) -> str:
    if f.field == "rational":
        return "Q"
    if f.field == "quadratic":
        return f"Q(sqrt({f.radicand}))"
    return f"degree {f.degree} (charpoly only)"


# --- dims ------------------------------------------------------------------

def cmd_dims(cfg: RunConfig, out) -> int:
    out.write(f"# precision: sturm bound + margin {ringspace.STURM_MARGIN} per cell\n")
    out.write("N\tk\ti\tpredicted\tcomputed\n")
    bad = 0
    for N in cfg.levels:
        for k in cfg.weights:
            for i in table_classes(N):
                if cfg.sign_class is not None and i != cfg.sign_class:
                    continue
                pred = hecke.predicted_count(N, k, i)
                comp = hecke.computed_count(N, k, i)
                flag = "" if pred == comp else "\tMISMATCH"
                bad += pred != comp
                label = "P0" if N == 9 else i
                out.write(f"{N}\t{k}\t{label}\t{pred}\t{comp}{flag}\n")
    if bad:
        out.write(f"# {bad} row(s) differ\n")
        return EXIT_INTERNAL
    return EXIT_OK


# --- newforms --------------------------------------------------------------

def _forms(N: int, k: int, wanted) -> list[tuple[object, object]]:
    c = cell(N, k)
    if c.d == 0:
        return []
    return [(i, f) for i in _classes_for(N, wanted) for f in c.eigenforms(i)]


def cmd_newforms(cfg: RunConfig, out) -> int:
    for N in cfg.levels:
        for k in cfg.weights:
            P = cfg.prec or sturm_precision(N, k)
            forms = _forms(N, k, cfg.sign_class)
            out.write(f"# level {N} weight {k}: {len(forms)} record(s), coefficients a_1..a_{P - 1}"
                      f" (precision {P})\n")
            c = cell(N, k) if forms else None
            for j, (i, f) in enumerate(forms, 1):
                out.write(f"form {j}\tclass {i}\tfield {_field_name(f)}\n")
                if f.coeffs is None:
                    for p in good_primes(N)[:EXPORT_PRIMES]:
                        out.write(f"  charpoly a_{p}: {c.form_charpoly(f, p)}\n")
                    t = f.orbit_trace
                    tr = [str(t.coeffs[n]) for n in range(1, min(P, t.prec))]
                    out.write(f"  orbit trace: {', '.join(tr)}\n")
                    continue
                g = c.extend(f, P) if f.prec < P else f
                for n in range(1, P):
                    out.write(f"  a_{n} = {g.a(n)}\n")
    return EXIT_OK


# --- charpoly --------------------------------------------------------------

def _factor_text(poly: IntPoly) -> str:
    factors, rest = factor_int_poly(poly)
    parts = [f"({q})" for q in factors]
    if rest is not None and rest.degree > 0:
        parts.append(f"({rest})")
        if not factors:
            return parts[0] + "  [no factor of degree <= 2]"
    return " * ".join(parts) if parts else "1"


def cmd_charpoly(cfg: RunConfig, p: int, out) -> int:
    N, = cfg.levels
    k, = cfg.weights
    if N % p == 0:
        raise UsageError(f"domain error: p={p} divides N={N}; a_p = +-p^kappa or 0 there")
    if p not in hecke.PRIMES and any(p % q == 0 for q in range(2, p)):
        raise UsageError(f"{p} is not prime")
    c = cell(N, k)
    if cfg.sign_class is not None:
        labels = _classes_for(N, cfg.sign_class)
    else:
        labels = ["0", "*"] if N == 9 else classes(N)
    poly = IntPoly([1])
    if c.d:
        for i in labels:
            poly = poly * c.block_charpoly(i, p)
    out.write(f"# level {N} weight {k} prime {p} classes {', '.join(str(i) for i in labels)}\n")
    out.write(f"{poly}\n")
    out.write(f"= {_factor_text(poly)}\n")
    return EXIT_OK


# --- verify ----------------------------------------------------------------

def cmd_verify(cfg: RunConfig, entry_ids, report_path, quiet, out) -> int:
    path = cfg.dataset or fverify.default_dataset_path()
    try:
        entries = fverify.load_dataset(path)
    except fverify.DatasetError as exc:
        out.write(f"dataset error: {path}: {exc}\n")
        return EXIT_FAIL
    except OSError as exc:
        raise UsageError(f"cannot read dataset: {exc}") from None
    if entry_ids:
        known = {e.id for e in entries}
        missing = [x for x in entry_ids if x not in known]
        if missing:
            raise UsageError(f"unknown entry id(s): {', '.join(missing)}")
        entries = [e for e in entries if e.id in entry_ids]
    out.write(f"# dataset: {path}\n")
    out.write("# precision: per entry, sturm bound + margin "
              f"{ringspace.STURM_MARGIN}" + (f", overridden to {cfg.prec}" if cfg.prec else "") + "\n")

    def progress(r):
        if not quiet or r.status != "pass":
            out.write(f"{r.status.upper()}\t{r.id}\t({r.level},{r.weight},{r.label})\tprec {r.precision}"
                      f"\t{r.detail}\n")

    reports, problems = fverify.verify_dataset(entries, cfg.prec, progress)
    if entry_ids:
        problems = []  # completeness only makes sense for the whole dataset
    for msg in problems:
        out.write(f"INCOMPLETE\t{msg}\n")
    with open(report_path, "w", encoding="utf-8") as fh:
        for r in reports:
            fh.write(r.to_json() + "\n")
    out.write(fverify.summary_line(reports) + "\n")
    out.write(f"# report: {report_path}\n")
    failed = any(r.status not in ("pass", "fail-annotated") for r in reports)
    return EXIT_FAIL if failed or problems else EXIT_OK


# --- export ----------------------------------------------------------------

def export_records(cfg: RunConfig) -> list[dict]:
    recs = []
    for N in cfg.levels:
        for k in cfg.weights:
            P = cfg.prec or sturm_precision(N, k)
            forms = _forms(N, k, cfg.sign_class)
            c = cell(N, k) if forms else None
            for i, f in forms:
                if f.coeffs is not None:
                    g = c.extend(f, P) if f.prec < P else f
                    coeffs = [str(g.a(n)) for n in range(1, P)]
                else:
                    coeffs = []
                cps = {str(p): str(c.form_charpoly(f, p)) for p in good_primes(N)[:EXPORT_PRIMES]}
                recs.append({
                    "level": N,
                    "weight": k,
                    "class": i,
                    "field_degree": 1 if f.field == "rational" else (2 if f.field == "quadratic" else f.degree),
                    "radicand": f.radicand if f.field == "quadratic" else None,
                    "coefficients": coeffs,
                    "charpoly_per_prime": cps,
                })
    return recs


def cmd_export(cfg: RunConfig, out) -> int:
    recs = export_records(cfg)
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["level", "weight", "class", "field_degree", "radicand", "coefficients",
                    "charpoly_per_prime"])
        for r in recs:
            w.writerow([r["level"], r["weight"], r["class"], r["field_degree"],
                        "" if r["radicand"] is None else r["radicand"], ";".join(r["coefficients"]),
                        ";".join(f"{p}:{q}" for p, q in r["charpoly_per_prime"].items())])
        out.write(buf.getvalue())
    else:
        out.write(json.dumps(recs, indent=1) + "\n")
    return EXIT_OK


# --- argument parsing ------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="primforms", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, weight_range):
        p.add_argument("--level", type=int, action="append", help="level (repeatable; default all)")
        if weight_range:
            p.add_argument("--weight", type=int, help="single even weight")
            p.add_argument("--min-weight", type=int, help="smallest weight of the range (default 2)")
            p.add_argument("--max-weight", type=int, help="largest weight of the range")
        p.add_argument("--class", dest="cls", help="restrict to one class (divisor of N, or 0/*/tw at level 9)")
        p.add_argument("--prec", type=int, help="number of coefficients (overrides the sturm bound)")
        p.add_argument("--margin", type=int, help="extra coefficients beyond the sturm bound (default 10)")

    p = sub.add_parser("dims", help="predicted vs computed newform counts")
    common(p, True)
    p = sub.add_parser("newforms", help="list eigenforms with exact coefficients")
    common(p, True)
    p = sub.add_parser("charpoly", help="characteristic polynomial of a_p over a class")
    common(p, False)
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--prime", type=int, required=True)
    p = sub.add_parser("verify", help="verify the formula dataset")
    p.add_argument("--entry", action="append", help="entry id (repeatable; default all)")
    p.add_argument("--dataset", help=f"dataset path (default ${fverify.DATASET_ENV} or the bundled file)")
    p.add_argument("--report", default="verify_report.jsonl", help="JSON lines report path")
    p.add_argument("--prec", type=int, help="number of coefficients compared (default sturm bound)")
    p.add_argument("--margin", type=int, help="extra coefficients beyond the sturm bound (default 10)")
    p.add_argument("--quiet", action="store_true", help="only print non-passing entries")
    p = sub.add_parser("export", help="export eigenform data as JSON or CSV")
    common(p, True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--output", help="write to a file instead of stdout")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "verify":
            cfg = _config(args, needs_levels=False)
            return cmd_verify(cfg, args.entry, args.report, args.quiet, out)
        cfg = _config(args)
        if args.command == "dims":
            return cmd_dims(cfg, out)
        if args.command == "newforms":
            return cmd_newforms(cfg, out)
        if args.command == "charpoly":
            if len(cfg.levels) != 1:
                raise UsageError("charpoly needs exactly one --level")
            return cmd_charpoly(cfg, args.prime, out)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                return cmd_export(cfg, fh)
        return cmd_export(cfg, out)
    except UsageError as exc:
        sys.stderr.write(f"primforms: {exc}\n")
        return EXIT_USAGE
    except (InternalConsistencyError, ClassificationError) as exc:
        sys.stderr.write(f"primforms: internal consistency error: {exc}\n")
        return EXIT_INTERNAL
    except OSError as exc:
        sys.stderr.write(f"primforms: {exc}\n")
        return EXIT_USAGE
