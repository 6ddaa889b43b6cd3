"""Dataset loading and verification of formula entries against computed newforms.

Dataset records are single lines

    id | N | k | class | multiplier | expression | bindings [| annotations]

with ``#`` comments.  Annotations are ``key=value`` pairs separated by ``;``:

* ``v2=V``: the relation ``v^2 = V`` for entries using ``v``;
* ``literal=TEXT``: the expression exactly as printed, when ``expression`` is a
  corrected reading; both are verified;
* ``literal_weight=K``: the weight as printed, when the record's weight is a
  corrected reading;
* ``expected=fail-or-corrected``: marks a suspected misprint;
* ``contain=1``: the entry lists only part of its class.
"""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, replace
from importlib import resources

from ..hecke import cell, good_primes
from ..qseries import QSeries, series_mul
from ..ringspace import sturm_precision
from ..specialseries import DELTA_WEIGHT, delta_series
from .algebra import (CapabilityError, UnsupportedEntryError, WeightError, evaluate_formal,
                      orbit_charpoly, single_values, sum_value, weight)
from .bindings import UnboundSymbolError, binding_set
from .parser import ParseError, count_markers, parse

DATASET_ENV = "PRIMFORMS_DATASET"
CHARPOLY_PRIMES = 3  # number of good primes whose orbit polynomials are compared


class DatasetError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class FormulaEntry:
    id: str
    level: int
    weight: int
    label: object  # int class, or "0" / "*" at level 9
    multiplier: str
    expression: str
    bindings: str
    annotations: dict = field(default_factory=dict, hash=False, compare=False)
    line: int = 0

    @property
    def v_square(self):
        v = self.annotations.get("v2")
        return int(v) if v is not None else None

    @property
    def literal(self):
        return self.annotations.get("literal")

    @property
    def literal_weight(self):
        w = self.annotations.get("literal_weight")
        return int(w) if w is not None else None

    @property
    def partial(self) -> bool:
        return self.annotations.get("contain") == "1"


@dataclass
class Outcome:
    ok: bool
    detail: str
    mismatch: dict | None = None
    matched: list = field(default_factory=list)


@dataclass
class Report:
    id: str
    level: int
    weight: int
    label: str
    status: str  # pass | fail | fail-annotated | unsupported
    detail: str
    precision: int
    conjugates: int = 0
    mismatch: dict | None = None
    literal: dict | None = None
    matched: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


# --- loading -----------------------------------------------------------------

def default_dataset_path() -> str:
    env = os.environ.get(DATASET_ENV)
    if env:
        return env
    return str(resources.files("primforms.formula") / "formulas.txt")


def _label(text: str, N: int, line: int):
    text = text.strip()
    if N == 9:
        if text not in ("0", "*"):
            raise DatasetError(f"level 9 class must be 0 or *, got {text!r}", line)
        return text
    try:
        return int(text)
    except ValueError:
        raise DatasetError(f"bad class {text!r}", line) from None


def parse_record(raw: str, line: int = 0) -> FormulaEntry:
    parts = [p.strip() for p in raw.split("|")]
    if len(parts) not in (7, 8):
        raise DatasetError(f"expected 7 or 8 fields, found {len(parts)}", line)
    ident, N, k, label, mult, expr, bset = parts[:7]
    try:
        N, k = int(N), int(k)
    except ValueError:
        raise DatasetError("level and weight must be integers", line) from None
    ann = {}
    if len(parts) == 8 and parts[7]:
        for item in parts[7].split(";"):
            if not item.strip():
                continue
            if "=" not in item:
                raise DatasetError(f"bad annotation {item.strip()!r}", line)
            key, val = item.split("=", 1)
            ann[key.strip()] = val.strip()
    if mult != f"Delta{N}":
        raise DatasetError(f"multiplier must be Delta{N}", line)
    return FormulaEntry(ident, N, k, _label(label, N, line), mult, expr, bset, ann, line)


def load_dataset(path: str | None = None) -> list[FormulaEntry]:
    path = path or default_dataset_path()
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_dataset(text)


def parse_dataset(text: str) -> list[FormulaEntry]:
    out = []
    seen = set()
    for no, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        e = parse_record(raw, no)
        if e.id in seen:
            raise DatasetError(f"duplicate id {e.id!r}", no)
        seen.add(e.id)
        out.append(e)
    return out


# --- verification ----------------------------------------------------------------

def _bindings_level(name: str) -> int:
    if not name.startswith("L"):
        raise UnboundSymbolError(f"unknown binding set {name!r}")
    return int(name[1:])


def _form_size(f) -> int:
    return f.degree if f.field == "charpoly" else 1


def _first_mismatch(vals, form, P):
    for n in range(P):
        want = form.a(n) if n else 0
        if vals[n] != want:
            return n, want
    return None


def _compare(text: str, entry: FormulaEntry, P: int) -> Outcome:
    try:
        expr = parse(text)
    except ParseError as exc:
        return Outcome(False, f"parse error: {exc}")
    try:
        b = binding_set(_bindings_level(entry.bindings))
        w = weight(expr, b)
    except (UnboundSymbolError, WeightError) as exc:
        return Outcome(False, f"{type(exc).__name__}: {exc}")
    target = entry.weight - DELTA_WEIGHT[entry.level]
    if w != target:
        return Outcome(False, f"weight {w}, expected {target}")
    c = cell(entry.level, entry.weight)
    forms = c.eigenforms(entry.label)
    formal, ctx = evaluate_formal(expr, b, P, entry.v_square)
    D = delta_series(entry.level, P)
    formal = {k: series_mul(v, D) if isinstance(v, QSeries) else D.scale(v) for k, v in formal.items()}
    pms, has_v = count_markers(expr)
    if has_v:
        return _compare_orbit(formal, ctx, entry, forms, c, P)
    try:
        conj = single_values(formal, ctx, P)
    except CapabilityError as exc:
        return Outcome(False, f"unsupported: {exc}")
    explicit = [(j, f) for j, f in enumerate(forms) if f.coeffs is not None]
    used = []
    for vals in conj:
        hit = None
        for j, f in explicit:
            if j not in used and _first_mismatch(vals, f, P) is None:
                hit = j
                break
        if hit is None:
            best = None
            for j, f in explicit:
                mm = _first_mismatch(vals, f, P)
                if mm is None:
                    return Outcome(False, f"two conjugates give the same form {j}")
                if best is None or mm[0] > best[0]:
                    best = (mm[0], mm[1], j)
            if best is None:
                return Outcome(False, "class has no form with explicit coefficients")
            n, want, j = best
            return Outcome(False, f"coefficient {n} differs from form {j}",
                           {"index": n, "expected": str(want), "got": str(vals[n]), "form": j})
        used.append(hit)
    return Outcome(True, f"{len(conj)} conjugate(s) matched", matched=used)


def _compare_orbit(formal, ctx, entry, forms, c, P) -> Outcome:
    try:
        s = sum_value(formal, ctx, P)
    except UnsupportedEntryError as exc:
        return Outcome(False, f"unsupported: {exc}")
    records = [(j, f) for j, f in enumerate(forms) if f.field == "charpoly"]
    hit = None
    for j, f in records:
        if f.orbit_trace.truncate(P) == s:
            hit = (j, f)
            break
    if hit is None:
        best = None
        for j, f in records:
            t = f.orbit_trace.truncate(P)
            n = next(i for i in range(P) if t.coeffs[i] != s.coeffs[i])
            if best is None or n > best[0]:
                best = (n, str(t.coeffs[n]), str(s.coeffs[n]), j)
        if best is None:
            return Outcome(False, "class has no charpoly-only orbit")
        n, want, got, j = best
        return Outcome(False, f"conjugate sum differs at coefficient {n}",
                       {"index": n, "expected": want, "got": got, "form": j})
    j, f = hit
    checked = []
    for p in good_primes(entry.level)[:CHARPOLY_PRIMES]:
        try:
            mine = orbit_charpoly(formal, ctx, p)
        except UnsupportedEntryError as exc:
            return Outcome(False, f"unsupported: {exc}")
        theirs = c.form_charpoly(f, p)
        if mine != theirs:
            return Outcome(False, f"orbit polynomial at p={p} differs",
                           {"index": p, "expected": str(theirs), "got": str(mine), "form": j})
        checked.append(p)
    return Outcome(True, f"conjugate sum and orbit polynomials at p={checked} matched", matched=[j])


def verify_entry(entry: FormulaEntry, prec: int | None = None) -> Report:
    """Compare ``Delta_N * expression`` with the computed newforms of the entry's class."""
    P = prec or sturm_precision(entry.level, entry.weight)
    pms = 0
    try:
        pms, has_v = count_markers(parse(entry.expression))
        nconj = 2 ** (pms + has_v)
    except ParseError:
        nconj = 0
    try:
        main = _compare(entry.expression, entry, P)
    except (UnsupportedEntryError, CapabilityError) as exc:
        main = Outcome(False, f"unsupported: {exc}")
    lit = None
    if entry.literal is not None or entry.literal_weight is not None:
        lit_entry = entry
        if entry.literal_weight is not None:
            lit_entry = replace(entry, weight=entry.literal_weight)
        try:
            lo = _compare(entry.literal or entry.expression, lit_entry, P)
        except (UnsupportedEntryError, CapabilityError) as exc:
            lo = Outcome(False, f"unsupported: {exc}")
        lit = {"status": "pass" if lo.ok else "fail", "detail": lo.detail, "mismatch": lo.mismatch}
    if main.ok:
        status = "fail-annotated" if lit is not None and lit["status"] == "fail" else "pass"
    elif main.detail.startswith("unsupported"):
        status = "unsupported"
    else:
        status = "fail"
    return Report(entry.id, entry.level, entry.weight, str(entry.label), status, main.detail, P,
                  nconj, main.mismatch, lit, main.matched)


def group_completeness(entries, reports) -> list[str]:
    """Classes whose complete (non-partial) entries do not cover every newform."""
    groups: dict = {}
    for e, r in zip(entries, reports):
        if e.partial or r.status not in ("pass", "fail-annotated"):
            continue
        groups.setdefault((e.level, e.weight, e.label), set()).update(r.matched)
    problems = []
    for (N, k, i), used in sorted(groups.items(), key=lambda t: (t[0][0], t[0][1], str(t[0][2]))):
        forms = cell(N, k).eigenforms(i)
        covered = sum(_form_size(forms[j]) for j in used)
        total = sum(_form_size(f) for f in forms)
        if covered != total:
            problems.append(f"({N},{k},{i}): entries cover {covered} of {total} newforms")
    return problems


def verify_dataset(entries, prec: int | None = None, progress=None) -> tuple[list[Report], list[str]]:
    reports = []
    for e in entries:
        r = verify_entry(e, prec)
        reports.append(r)
        if progress is not None:
            progress(r)
    return reports, group_completeness(entries, reports)


def summary_line(reports) -> str:
    count = {s: 0 for s in ("pass", "fail-annotated", "unsupported", "fail")}
    for r in reports:
        count[r.status] += 1
    return (f"entries: {len(reports)}, pass: {count['pass']}, fail-annotated: {count['fail-annotated']}, "
            f"unsupported: {count['unsupported']}, fail: {count['fail']}")
