"""Command-line pipeline: realize, classical-check, discover, verify, sweep.

Exit codes: 0 all checks pass, 1 usage or input error, 2 verification
failure (the software found a broken invariant), 3 finding (the software
is fine but an audited claim did not check out).
"""

from __future__ import annotations

import argparse
import os
import sys

from .classical import jacobi_failures, jacobi_report, render, rw_so3_table
from .discovery import (ClaimViolationError, DiscoveryError, discover,
                        orthogonality_readings, solve_t_family, verify_tables)
from .realization import (DependentSError, RealizationError, SklyaninParams,
                          ZeroDenominatorError, expand_f, realize)
from .report import (DocumentError, dump_json, emit_realization, emit_structure,
                     format_rat, make_report, parse_rat, parse_structure,
                     render_human, sweep_csv)
from .sampling import child_rng, sample_locus, sample_realizable

PARAM_NAMES = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_params(text: str) -> SklyaninParams:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 6:
        raise UsageError(f"--params needs 6 comma-separated rationals, got {len(parts)}")
    try:
        return SklyaninParams(*(parse_rat(p) for p in parts))
    except DocumentError as exc:
        raise UsageError(str(exc)) from None


def parse_config(text: str) -> SklyaninParams:
    """key=value lines (commas allowed); values are exact rationals.

    Quotes around values are optional; floats are rejected with the
    offending line and field named.
    """
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for field in line.split(","):
            field = field.strip()
            if not field:
                continue
            if "=" not in field:
                raise UsageError(f"line {lineno}: expected key=value, got {field!r}")
            key, _, val = field.partition("=")
            key = key.strip()
            val = val.strip().strip("\"'")
            if key not in PARAM_NAMES:
                raise UsageError(f"line {lineno}: unknown parameter {key!r}")
            if key in values:
                raise UsageError(f"line {lineno}: duplicate parameter {key!r}")
            try:
                values[key] = parse_rat(val)
            except DocumentError as exc:
                raise UsageError(f"line {lineno}, {key}: {exc}") from None
    missing = [k for k in PARAM_NAMES if k not in values]
    if missing:
        raise UsageError(f"missing parameters: {', '.join(missing)}")
    return SklyaninParams(**values)


def _params_from(args) -> SklyaninParams:
    if args.params is not None:
        return parse_params(args.params)
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as fh:
                return parse_config(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
    raise UsageError("one of --params or --config is required")


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _emit(doc: dict, args) -> int:
    sys.stdout.write(render_human(doc) if args.human else dump_json(doc))
    if getattr(args, "out", None):
        _write(args.out, dump_json(doc))
    return doc["exit_status"]


def _ok(name: str) -> dict:
    return {"name": name, "status": "pass", "witness": None}


def _bad(name: str, status: str, witness) -> dict:
    return {"name": name, "status": status, "witness": witness}


def cmd_realize(args) -> int:
    params = _params_from(args)
    try:
        real = realize(params)
    except (ZeroDenominatorError, DependentSError) as exc:
        raise UsageError(f"degenerate parameters: {exc}") from None
    except RealizationError as exc:
        doc = make_report("realize",
                          [_bad("realization-dual-path", "fail", str(exc))],
                          parameters=str(params))
        return _emit(doc, args)
    text = emit_realization(real)
    if args.out:
        _write(args.out, text)
        j = expand_f(real)
        doc = make_report("realize", [_ok("realization-dual-path")],
                          parameters=str(params),
                          experimental={"structure_constants": {
                              "j12": j.js[0], "j23": j.js[1], "j31": j.js[2]}})
        sys.stdout.write(render_human(doc) if args.human else dump_json(doc))
        return doc["exit_status"]
    sys.stdout.write(text)
    return 0


def cmd_classical_check(args) -> int:
    checks = []
    experimental = {}
    corrected = rw_so3_table("corrected")
    bad = jacobi_failures(corrected)
    checks.append(_ok("jacobi-corrected") if not bad else _bad(
        "jacobi-corrected", "fail",
        [{"triple": list(tr), "residual": render(r)} for tr, r in bad[:3]]))

    literal = rw_so3_table("literal")
    bad_lit = jacobi_failures(literal)
    if bad_lit:
        tr0, r0 = bad_lit[0]
        checks.append(_bad(
            "jacobi-literal-printed-form", "finding",
            {"failing_triples": len(bad_lit),
             "total_triples": len(jacobi_report(literal)),
             "example": {"triple": list(tr0), "residual": render(r0)}}))
    else:
        checks.append(_ok("jacobi-literal-printed-form"))

    halfway = rw_so3_table("corrected-st")
    bad_st = jacobi_failures(halfway)
    experimental["jacobi_st_corrected_only"] = {
        "outcome": "pass" if not bad_st else "fail",
        "failing_triples": len(bad_st),
    }
    doc = make_report("classical-check", checks, experimental=experimental)
    return _emit(doc, args)


def cmd_discover(args) -> int:
    params = _params_from(args)
    checks = []
    try:
        real = realize(params)
    except (ZeroDenominatorError, DependentSError) as exc:
        raise UsageError(f"degenerate parameters: {exc}") from None
    except RealizationError as exc:
        checks.append(_bad("realization-dual-path", "fail", str(exc)))
        return _emit(make_report("discover", checks, parameters=str(params)), args)
    checks.append(_ok("realization-dual-path"))

    try:
        run = discover(real, degree_cap=args.degree_cap)
    except ClaimViolationError as exc:
        fam = exc.family
        checks.append(_bad(
            "t-kernel-claims", "finding",
            {"kernel_dimension": fam.kernel_dimension,
             "traceless_rank": fam.claims.traceless_rank,
             "trace_part_proportional_to_q": fam.claims.trace_ok,
             "detail": str(exc)}))
        return _emit(make_report("discover", checks, parameters=str(params)), args)
    except DiscoveryError as exc:
        checks.append(_bad("discovery-pipeline", "fail", str(exc)))
        return _emit(make_report("discover", checks, parameters=str(params)), args)

    checks.append(_ok("t-kernel-claims"))
    checks.append(_ok("xi-exact-certificate"))
    checks.append(_ok("tt-gauge-determined"))
    ver = verify_tables(run.structure.tables, degree_cap=args.degree_cap)
    checks.extend(ver["checks"])
    experimental = dict(ver["experimental"])
    experimental["t_trace_orthogonality"] = orthogonality_readings(real, run.family)
    meta = run.structure.metadata
    experimental["normalization"] = {
        "contraction_rho": meta["contraction_rho"],
        "classical_rescale": meta["contraction_t_rescale"],
        "ttt_outcome": meta["ttt_outcome"],
        "ordering_independent": meta["ordering_independent"],
    }
    doc = make_report("discover", checks, parameters=str(params),
                      experimental=experimental)
    if args.out:
        _write(args.out, emit_structure(run.structure))
    sys.stdout.write(render_human(doc) if args.human else dump_json(doc))
    return doc["exit_status"]


def cmd_verify(args) -> int:
    try:
        with open(args.structure, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read structure: {exc}") from None
    try:
        parsed = parse_structure(text)
    except DocumentError as exc:
        raise UsageError(f"bad structure file: {exc}") from None
    ver = verify_tables(parsed.tables, degree_cap=args.degree_cap)
    doc = make_report("verify", ver["checks"],
                      parameters=parsed.provenance.get("parameters"),
                      experimental=ver["experimental"])
    return _emit(doc, args)


SWEEP_CHECKS = ("realization-dual-path", "q-invertible", "s-orthogonality",
                "locus-trace-equivalence", "j-identity", "t-kernel-nonzero")


def cmd_sweep(args) -> int:
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    samples = []
    failed: dict = {name: [] for name in SWEEP_CHECKS}
    claim_violations = []
    witness_rank = None
    for i in range(args.count):
        rng = child_rng(args.seed, i)
        p, real = sample_realizable(rng, sample_locus)
        results = {name: True for name in SWEEP_CHECKS}
        results["q-invertible"] = real.q.det() != 0
        s = real.s
        q = real.q
        results["s-orthogonality"] = all(
            (s[a] * q * s[b] + s[b] * q * s[a]).trace() == 0
            for a in range(3) for b in range(3) if a < b)
        results["locus-trace-equivalence"] = all(
            (s[a] * s[b]).trace() == 0
            for a in range(3) for b in range(3) if a < b)
        j = expand_f(real)
        j12, j23, j31 = j.js
        results["j-identity"] = (j12 + j23 + j31 + j12 * j23 * j31) == 0
        fam = solve_t_family(real, require_claims=False)
        results["t-kernel-nonzero"] = fam.kernel_dimension > 0
        for name in SWEEP_CHECKS:
            if not results[name]:
                failed[name].append(i)
        if not fam.claims.ok:
            claim_violations.append(i)
            witness_rank = fam.claims.traceless_rank
        vals = p.astuple()
        samples.append({
            "index": i,
            **{PARAM_NAMES[k]: format_rat(vals[k]) for k in range(6)},
            "j12": format_rat(j12), "j23": format_rat(j23),
            "j31": format_rat(j31),
            "checks_failed": sum(1 for v in results.values() if not v),
            "t_kernel_dimension": fam.kernel_dimension,
            "claims_hold": fam.claims.ok,
        })
    checks = [
        _ok(name) if not failed[name] else _bad(
            name, "fail", {"sample_indices": failed[name][:10]})
        for name in SWEEP_CHECKS
    ]
    if claim_violations:
        checks.append(_bad(
            "t-kernel-claims", "finding",
            {"violating_samples": len(claim_violations),
             "total_samples": args.count,
             "first_indices": claim_violations[:10],
             "traceless_rank_seen": witness_rank}))
    else:
        checks.append(_ok("t-kernel-claims"))
    doc = make_report("sweep", checks, seed=args.seed, count=args.count,
                      samples=samples)
    if args.out:
        _write(args.out, dump_json(doc))
        root, _ = os.path.splitext(args.out)
        _write(root + ".csv", sweep_csv(samples))
    if args.figures:
        from .figures import write_figures
        paths = write_figures(samples, args.figures)
        print(f"wrote {len(paths)} figures under {args.figures}", file=sys.stderr)
    sys.stdout.write(render_human(doc) if args.human else dump_json(doc))
    return doc["exit_status"]


def _add_format_flags(sub) -> None:
    fmt = sub.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON report (default)")
    fmt.add_argument("--human", action="store_true", help="plain-text report")


def _add_param_flags(sub) -> None:
    sub.add_argument("--params", metavar="A,B,G,D,E,Z",
                     help="six comma-separated exact rationals")
    sub.add_argument("--config", metavar="FILE",
                     help="key=value file with alpha..zeta")


def build_parser() -> _Parser:
    parser = _Parser(prog="skrw", description=__doc__)
    subs = parser.add_subparsers(dest="mode", required=True)

    p = subs.add_parser("realize", help="matrix realization from parameters")
    _add_param_flags(p)
    p.add_argument("--out", metavar="FILE", help="write realization JSON here")
    _add_format_flags(p)
    p.set_defaults(handler=cmd_realize)

    p = subs.add_parser("classical-check",
                        help="Jacobi audit of the classical bracket table")
    p.add_argument("--out", metavar="FILE", help="also write the report here")
    _add_format_flags(p)
    p.set_defaults(handler=cmd_classical_check)

    p = subs.add_parser("discover",
                        help="full pipeline: T family, xi, [T,T], assembly")
    _add_param_flags(p)
    p.add_argument("--out", metavar="FILE", help="write structure JSON here")
    p.add_argument("--degree-cap", type=int, default=3)
    _add_format_flags(p)
    p.set_defaults(handler=cmd_discover)

    p = subs.add_parser("verify", help="re-check a stored structure file")
    p.add_argument("structure", metavar="STRUCTURE_FILE")
    p.add_argument("--out", metavar="FILE", help="also write the report here")
    p.add_argument("--degree-cap", type=int, default=3)
    _add_format_flags(p)
    p.set_defaults(handler=cmd_verify)

    p = subs.add_parser("sweep", help="seeded random samples on the locus")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="FILE",
                   help="write report JSON here (CSV written alongside)")
    p.add_argument("--figures", metavar="DIR", help="write summary PNGs here")
    _add_format_flags(p)
    p.set_defaults(handler=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
