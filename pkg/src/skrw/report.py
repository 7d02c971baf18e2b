"""Canonical JSON documents: structures, realizations, check reports.

Every emitted document is deterministic: dict insertion order is the
field order, rationals are "p/q" strings (bare "p" for integers), and
floats are rejected outright. Structure files round-trip byte-for-byte
through parse_structure + emit_parsed.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .discovery import GENERATOR_NAMES, NWSOStructure, TT_PAIRS
from .exact import Mat3, Rat
from .ncalg import BracketTables, NCPoly, S_LETTERS, T_LETTERS

SCHEMA_VERSION = 1

NAME_TO_LETTER = {name: i for i, name in enumerate(GENERATOR_NAMES)}


class DocumentError(ValueError):
    """Malformed or non-round-trippable JSON input."""


def format_rat(v: Rat) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


_RAT_SHAPE = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rat(text) -> Fraction:
    """Exact "p/q" or integer strings only; float literals are rejected."""
    if isinstance(text, bool) or isinstance(text, float):
        raise DocumentError(f"rational expected, got {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise DocumentError(f"rational expected, got {text!r}")
    compact = text.strip().replace(" ", "")
    if not _RAT_SHAPE.match(compact):
        raise DocumentError(f"not an exact rational: {text!r}")
    try:
        return Fraction(compact)
    except ZeroDivisionError:
        raise DocumentError(f"zero denominator in {text!r}") from None


def to_jsonable(obj):
    """Exact-value JSON conversion; floats are a contract violation."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        raise DocumentError("floating-point value in a canonical document")
    if isinstance(obj, Fraction):
        return format_rat(obj)
    if isinstance(obj, Mat3):
        return [[format_rat(obj[r, c]) for c in range(3)] for r in range(3)]
    if isinstance(obj, NCPoly):
        return _poly_terms(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return str(obj)


def dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _poly_terms(p: NCPoly) -> list:
    return [{"coefficient": format_rat(c),
             "word": [GENERATOR_NAMES[i] for i in w]}
            for w, c in p.sorted_terms()]


def _poly_from_terms(terms: list) -> NCPoly:
    acc: dict = {}
    for item in terms:
        try:
            word = tuple(NAME_TO_LETTER[g] for g in item["word"])
            coeff = parse_rat(item["coefficient"])
        except (KeyError, TypeError) as exc:
            raise DocumentError(f"bad term {item!r}: {exc}") from None
        acc[word] = acc.get(word, Fraction(0)) + coeff
    return NCPoly(acc)


def _name(i: int) -> str:
    return GENERATOR_NAMES[i]


def _structure_doc(generators, tables: BracketTables, r_map, t_map, sigma,
                   provenance: dict) -> dict:
    brackets = []
    for (a, b) in sorted(tables.entries):
        brackets.append({"left": _name(a), "right": _name(b),
                         "terms": _poly_terms(tables.bracket(a, b))})
    r_entries = []
    for (t, x) in sorted(r_map):
        r_entries.append({"left": _name(t), "right": _name(x),
                          "terms": _poly_terms(r_map[(t, x)])})
    t_entries = []
    for (a, b) in sorted(t_map):
        t_entries.append({
            "left": _name(a), "right": _name(b),
            "terms": [{"coefficient": format_rat(c),
                       "s": _name(m), "t": _name(q)}
                      for c, m, q in t_map[(a, b)]]})
    sigma_entries = [{"left": _name(a), "right": _name(b),
                      "value": format_rat(sigma[(a, b)])}
                     for (a, b) in sorted(sigma)]
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "structure",
        "generators": list(generators),
        "brackets": brackets,
        "r_map": r_entries,
        "t_map": t_entries,
        "sigma": sigma_entries,
        "provenance": provenance,
    }


def structure_provenance(metadata: dict) -> dict:
    """Provenance block: inputs, versions, and fixed conventions."""
    return {
        "parameters": metadata["parameters"],
        "versions": {"skrw": __version__, "schema": SCHEMA_VERSION},
        "decisions": {
            "j_convention": "direct",
            "classical_correction": "corrected",
            "t_normalization": metadata["t_normalization"],
            "tt_gauge": "classical-contraction",
        },
        "discovery": {
            "t_kernel_dimension": metadata["t_kernel_dimension"],
            "xi_solution_dimension": metadata["xi_solution_dimension"],
            "tt_gauge_dimension": metadata["tt_gauge_dimension"],
            "tt_formal_dimension": metadata["tt_formal_dimension"],
            "contraction_rho": format_rat(metadata["contraction_rho"]),
            "contraction_t_rescale": format_rat(metadata["contraction_t_rescale"]),
            "ttt_outcome": metadata["ttt_outcome"],
            "ordering_independent": metadata["ordering_independent"],
            "js": [format_rat(v) for v in metadata["js"]],
        },
    }


def emit_structure(s: NWSOStructure) -> str:
    doc = _structure_doc(s.generators, s.tables, s.r_map, s.t_map, s.sigma,
                         structure_provenance(s.metadata))
    return dump_json(doc)


@dataclass(frozen=True)
class ParsedStructure:
    generators: tuple[str, ...]
    tables: BracketTables
    r_map: dict
    t_map: dict
    sigma: dict
    provenance: dict


def parse_structure(text: str) -> ParsedStructure:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("kind") != "structure":
        raise DocumentError("not a structure document")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DocumentError(f"unsupported schema_version {doc.get('schema_version')!r}")
    gens = tuple(doc.get("generators", ()))
    if gens != GENERATOR_NAMES:
        raise DocumentError(f"unexpected generator list {gens!r}")

    def pair_of(entry) -> tuple[int, int]:
        try:
            return NAME_TO_LETTER[entry["left"]], NAME_TO_LETTER[entry["right"]]
        except KeyError as exc:
            raise DocumentError(f"unknown generator in {entry!r}") from None

    entries = {}
    for entry in doc.get("brackets", ()):
        a, b = pair_of(entry)
        if not a < b or (a, b) in entries:
            raise DocumentError(f"bad bracket pair ({entry['left']}, {entry['right']})")
        entries[(a, b)] = _poly_from_terms(entry["terms"])
    expected = {(a, b) for a in range(9) for b in range(9) if a < b}
    if set(entries) != expected:
        raise DocumentError("bracket table does not cover all generator pairs")

    r_map = {}
    for entry in doc.get("r_map", ()):
        t, x = pair_of(entry)
        r_map[(t, x)] = _poly_from_terms(entry["terms"])
    t_map = {}
    for entry in doc.get("t_map", ()):
        a, b = pair_of(entry)
        terms = []
        for item in entry["terms"]:
            try:
                terms.append((parse_rat(item["coefficient"]),
                              NAME_TO_LETTER[item["s"]], NAME_TO_LETTER[item["t"]]))
            except KeyError as exc:
                raise DocumentError(f"bad pair-map term {item!r}") from None
        t_map[(a, b)] = tuple(terms)
    sigma = {}
    for entry in doc.get("sigma", ()):
        a, b = pair_of(entry)
        sigma[(a, b)] = parse_rat(entry["value"])
    if set(t_map) != set(TT_PAIRS) or set(sigma) != set(TT_PAIRS):
        raise DocumentError("pair maps must cover all T-letter pairs")
    provenance = doc.get("provenance", {})
    if not isinstance(provenance, dict):
        raise DocumentError("provenance must be an object")
    return ParsedStructure(gens, BracketTables(entries), r_map, t_map, sigma,
                           provenance)


def emit_parsed(p: ParsedStructure) -> str:
    doc = _structure_doc(p.generators, p.tables, p.r_map, p.t_map, p.sigma,
                         p.provenance)
    return dump_json(doc)


def emit_realization(real) -> str:
    p = real.params
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "realization",
        "parameters": {name: format_rat(v) for name, v in
                       zip(("alpha", "beta", "gamma", "delta", "epsilon", "zeta"),
                           p.astuple())},
        "q": to_jsonable(real.q),
        "s": [to_jsonable(m) for m in real.s],
        "det_q": format_rat(real.q.det()),
        "versions": {"skrw": __version__, "schema": SCHEMA_VERSION},
    }
    return dump_json(doc)


def make_report(mode: str, checks: list, *, parameters=None, seed=None,
                count=None, experimental=None, samples=None) -> dict:
    """Assemble the canonical check report with derived exit status."""
    doc = {"schema_version": SCHEMA_VERSION, "kind": "report", "mode": mode}
    if parameters is not None:
        doc["parameters"] = parameters
    if seed is not None:
        doc["seed"] = seed
    if count is not None:
        doc["count"] = count
    doc["checks"] = to_jsonable(checks)
    if experimental is not None:
        doc["experimental"] = to_jsonable(experimental)
    if samples is not None:
        doc["samples"] = to_jsonable(samples)
    statuses = [c["status"] for c in checks]
    doc["summary"] = {
        "pass": statuses.count("pass"),
        "fail": statuses.count("fail"),
        "finding": statuses.count("finding"),
    }
    doc["exit_status"] = exit_status(checks)
    return doc


def exit_status(checks: list) -> int:
    """fail beats finding beats pass: 2, 3, 0."""
    statuses = {c["status"] for c in checks}
    bad = statuses - {"pass", "fail", "finding"}
    if bad:
        raise DocumentError(f"unknown check status {sorted(bad)!r}")
    if "fail" in statuses:
        return 2
    if "finding" in statuses:
        return 3
    return 0


def render_human(doc: dict) -> str:
    """Plain-text view of a report document."""
    lines = [f"mode: {doc.get('mode', '?')}"]
    for key in ("parameters", "seed", "count"):
        if key in doc:
            lines.append(f"{key}: {doc[key]}")
    for check in doc.get("checks", ()):
        mark = {"pass": "ok", "fail": "FAIL", "finding": "FINDING"}[check["status"]]
        line = f"  [{mark}] {check['name']}"
        if check.get("witness") is not None:
            line += f"  witness: {json.dumps(check['witness'])}"
        lines.append(line)
    exp = doc.get("experimental") or {}
    for name, block in exp.items():
        if isinstance(block, dict) and "outcome" in block:
            lines.append(f"  [experimental] {name}: {block['outcome']}")
        else:
            lines.append(f"  [experimental] {name}: {json.dumps(block)}")
    summary = doc.get("summary", {})
    lines.append("summary: {pass} pass, {fail} fail, {finding} finding".format(
        **{k: summary.get(k, 0) for k in ("pass", "fail", "finding")}))
    lines.append(f"exit: {doc.get('exit_status', '?')}")
    return "\n".join(lines) + "\n"


SWEEP_CSV_COLUMNS = ("index", "alpha", "beta", "gamma", "delta", "epsilon",
                     "zeta", "j12", "j23", "j31", "checks_failed",
                     "t_kernel_dimension", "claims_hold")


def sweep_csv(samples: list) -> str:
    """Flat per-sample table mirroring the JSON sweep report."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_CSV_COLUMNS)
    for row in samples:
        writer.writerow([row[k] for k in SWEEP_CSV_COLUMNS])
    return buf.getvalue()
