"""Command-line front end: ``shiftconv <command> [options]``.

Exit codes: 0 on a completed run, 1 when the self-test fails, 2 for invalid
parameters, 3 when a sum or ladder does not converge.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

import mpmath

from . import __version__
from .conjectures import IDENTITIES, check_identity, footnote_family_scan, summarize_scan
from .convsum import (
    SigmaCache,
    TruncationConfig,
    decay_hint,
    extrapolate,
    lhs_partial_sums,
    lhs_tail_bound,
)
from .errors import BranchNotCoveredError, ConvergenceWarning, NonConvergenceError
from .identities import (
    ConvolutionSpec,
    informal_value_log,
    informal_value_pow,
    theorem1_rhs,
    theorem2_rhs,
)
from .reports import IdentityReport, RunManifest, encode_number, to_csv, to_json, write_atomic
from .weights import log_weight, power_weight
from .zeta import ZetaContext, kernel_self_test

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_INVALID = 2
EXIT_NONCONVERGENT = 3


class InvalidParameters(ValueError):
    pass


# -- argument parsing ----------------------------------------------------------


def parse_int_set(text: str) -> list[int]:
    """``"1..10"``, ``"1,2,-3"`` or a mix such as ``"-3..-1,4"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise InvalidParameters(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    if not out:
        raise InvalidParameters("no values given")
    return out


def parse_ladder(text: str) -> tuple[int, ...]:
    vals = []
    for part in text.split(","):
        x = float(part)
        if x != int(x) or x < 1:
            raise InvalidParameters(f"ladder entries must be positive integers, got {part!r}")
        vals.append(int(x))
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise InvalidParameters("ladder cutoffs must be strictly increasing")
    return tuple(vals)


def parse_exponent(text: str):
    """An integer, a decimal or a complex number such as ``-3+0.5j``."""
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    if "j" in text:
        z = complex(text)
        return mpmath.mpc(z.real, z.imag)
    return mpmath.mpf(text)


def _common(p: argparse.ArgumentParser, ladder: str, seed: bool = False) -> None:
    p.add_argument("--precision", type=int, default=50, help="working precision in decimal digits")
    p.add_argument("--ladder", default=ladder, help="comma-separated cutoffs, e.g. 1e3,1e4,1e5")
    p.add_argument("--tolerance", type=float, default=1e-3, help="relative tolerance for verdicts")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="JSON output (default)")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv", help="CSV summary output")
    p.set_defaults(format="json")
    p.add_argument("--out", help="output file (written atomically); standard output when omitted")
    p.add_argument("--cache-dir", help="directory for persisted sigma tables")
    p.add_argument("--threads", type=int, default=1, help="worker threads for the summation kernels")
    p.add_argument("--seed", type=int, default=0 if seed else None, help="random seed")


def _sum_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="shift n (nonzero)")
    p.add_argument("--r1", type=parse_exponent, required=True)
    p.add_argument("--r2", type=parse_exponent, required=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--P", type=int, help="power weight n2**P")
    grp.add_argument("--Q", type=int, help="log weight n2**Q log|n2|")
    p.add_argument("--d-cutoff", type=int, default=500, help="last d summed on the right-hand side")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shiftconv", description="Shifted convolution sums of divisor functions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval-sum", help="truncated sum against the exact right-hand side")
    _sum_args(p)
    _common(p, "1e3,1e4,1e5")

    p = sub.add_parser("eval-rhs", help="right-hand side with its term breakdown")
    _sum_args(p)
    _common(p, "1e5")

    p = sub.add_parser("check-conjecture", help="extrapolated check of a named identity")
    p.add_argument("--id", required=True, choices=sorted(IDENTITIES))
    p.add_argument("--n", default="1", help="shifts, e.g. 1..10 or -3,-1")
    p.add_argument("--extrapolation-order", type=int, default=1)
    p.add_argument("--points-per-decade", type=int, default=16)
    _common(p, "1e3,1e4,1e5")

    p = sub.add_parser("scan-family", help="random weights from the decaying family against the predicted value")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--n", default="1", help="shifts, e.g. 1,2")
    p.add_argument("--coefficient-range", type=int, default=3)
    p.add_argument("--extrapolation-order", type=int, default=1)
    p.add_argument("--points-per-decade", type=int, default=16)
    _common(p, "1e3,1e4,1e5", seed=True)

    p = sub.add_parser("self-test", help="numerical kernel checks")
    p.add_argument("--samples", type=int, default=20, help="random rational points per exponent")
    _common(p, "1e3", seed=True)
    return parser


# -- commands --------------------------------------------------------------------


def _spec(args) -> ConvolutionSpec:
    if args.n == 0:
        raise InvalidParameters("n must be nonzero")
    with_log = args.Q is not None
    return ConvolutionSpec(args.n, args.r1, args.r2, args.Q if with_log else args.P, with_log)


def _inputs(spec: ConvolutionSpec) -> dict:
    key = "Q" if spec.with_log else "P"
    return {"n": spec.n, "r1": str(spec.r1), "r2": str(spec.r2), key: spec.exponent}


def _rhs(ctx, spec, d_cutoff):
    if d_cutoff < 2 * abs(spec.n):
        raise InvalidParameters("--d-cutoff must be at least 2|n|")
    return (theorem2_rhs if spec.with_log else theorem1_rhs)(ctx, spec, d_cutoff)


def cmd_eval_rhs(args, ctx, cache):
    spec = _spec(args)
    rhs = _rhs(ctx, spec, args.d_cutoff)
    terms = dict(rhs.terms)
    notes = list(rhs.notes)
    try:
        informal = (informal_value_log if spec.with_log else informal_value_pow)(
            ctx, spec.n, spec.r1, spec.r2, spec.exponent
        )
        terms["informal_value"] = informal
    except BranchNotCoveredError as exc:
        notes.append(f"informal value not available: {exc}")
    verdict = "computed" if rhs.converged else "nonconvergent"
    rep = IdentityReport(
        "eval-rhs",
        "log" if spec.with_log else "power",
        _inputs(spec),
        rhs=rhs.total,
        error_bar=rhs.tail_estimate,
        verdict=verdict,
        terms=terms,
        truncation={"d_cutoff": rhs.d_cutoff, "kernel": rhs.kernel},
        notes=notes,
    )
    return [rep], (EXIT_OK if rhs.converged else EXIT_NONCONVERGENT)


def cmd_eval_sum(args, ctx, cache):
    spec = _spec(args)
    digits = args.precision
    rhs = _rhs(ctx, spec, args.d_cutoff)
    w = log_weight(spec.exponent) if spec.with_log else power_weight(spec.exponent)
    ladder = sorted(parse_ladder(args.ladder))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        sums = lhs_partial_sums(spec.n, spec.r1, spec.r2, w, ladder, threads=args.threads, cache=cache, with_abs=True)
    N, lhs, absum = sums[-1]
    rounding = 1024 * 2.0**-52 * absum
    tail = lhs_tail_bound(spec.n, spec.r1, spec.r2, spec.exponent, N, with_log=spec.with_log)
    notes = list(rhs.notes)
    rhs_val = complex(rhs.total)
    rhs_val = rhs_val.real if rhs_val.imag == 0 else rhs_val
    trunc = {"N": N, "d_cutoff": rhs.d_cutoff, "kernel": rhs.kernel}
    code = EXIT_OK
    if not rhs.converged:
        verdict, err, tol, value = "nonconvergent", None, None, lhs
        notes.append("right-hand side has no tail control for these parameters")
        code = EXIT_NONCONVERGENT
    elif tail is not None:
        # rigorous: truncation of both sides plus floating-point allowance
        err = tail + rounding + float(rhs.tail_estimate)
        tol, value = err, lhs
        trunc["lhs_tail_bound"] = encode_number(tail, digits)
        trunc["lhs_rounding"] = encode_number(rounding, digits)
        trunc["rhs_tail_estimate"] = encode_number(float(rhs.tail_estimate), digits)
        verdict = "pass" if abs(lhs - rhs_val) <= err else "fail"
        notes.append("verdict uses the combined rigorous truncation bound")
    else:
        hint = decay_hint(w, spec.r1, spec.r2, spec.n)
        try:
            value, err = extrapolate([(m, s) for m, s, _ in sums], hint)
        except NonConvergenceError as exc:
            value, err, tol, verdict = None, None, None, "nonconvergent"
            notes.append(str(exc))
            code = EXIT_NONCONVERGENT
        else:
            tol = args.tolerance * abs(rhs_val) if rhs_val else args.tolerance
            verdict = "pass" if abs(value - rhs_val) <= tol and err <= tol else "fail"
            notes.append("no rigorous tail bound; left side extrapolated")
    rep = IdentityReport(
        "eval-sum",
        "log" if spec.with_log else "power",
        _inputs(spec),
        lhs=value,
        rhs=rhs.total,
        discrepancy=None if value is None else value - rhs_val,
        error_bar=err,
        tolerance=tol,
        verdict=verdict,
        terms=dict(rhs.terms),
        ladder=[(m, s) for m, s, _ in sums],
        truncation=trunc,
        notes=notes,
    )
    return [rep], code


def _trunc(args) -> TruncationConfig:
    return TruncationConfig(parse_ladder(args.ladder), args.extrapolation_order, args.points_per_decade)


def cmd_check_conjecture(args, ctx, cache):
    ns = parse_int_set(args.n)
    if 0 in ns:
        raise InvalidParameters("n must be nonzero")
    trunc = _trunc(args)
    r1, r2, make, closed = IDENTITIES[args.id]
    reports, code = [], EXIT_OK
    for n in ns:
        rep = check_identity(args.id, n, r1, r2, make(n), closed(ctx, n), trunc, args.tolerance, args.threads, cache)
        if rep.verdict == "nonconvergent":
            code = EXIT_NONCONVERGENT
        reports.append(IdentityReport.from_conjecture(rep))
    return reports, code


def cmd_scan_family(args, ctx, cache):
    ns = parse_int_set(args.n)
    if 0 in ns:
        raise InvalidParameters("n must be nonzero")
    if not 0 <= args.degree <= 8:
        raise InvalidParameters("--degree must lie in 0..8")
    if args.samples < 1:
        raise InvalidParameters("--samples must be positive")
    reps = footnote_family_scan(
        ctx,
        args.degree,
        tuple(ns),
        _trunc(args),
        args.samples,
        args.seed,
        args.tolerance,
        args.coefficient_range,
        args.threads,
        cache,
    )
    for deg, row in summarize_scan(reps).items():
        print(f"degree {deg}: " + ", ".join(f"{k} {v}" for k, v in row.items() if k != "max_ratio")
              + f"; largest discrepancy {row['max_ratio']:.3g} error bars", file=sys.stderr)
    return [IdentityReport.from_conjecture(r, kind="family") for r in reps], EXIT_OK


def cmd_self_test(args, ctx, cache):
    rows = kernel_self_test(ctx, args.samples, args.seed)
    reports = [
        IdentityReport("self-test", name, {}, discrepancy=err, tolerance=tol, verdict="pass" if ok else "fail")
        for name, err, tol, ok in rows
    ]
    code = EXIT_OK if all(ok for *_, ok in rows) else EXIT_SELFTEST
    return reports, code


COMMANDS = {
    "eval-sum": cmd_eval_sum,
    "eval-rhs": cmd_eval_rhs,
    "check-conjecture": cmd_check_conjecture,
    "scan-family": cmd_scan_family,
    "self-test": cmd_self_test,
}


def _parameters(args) -> dict:
    skip = {"command", "format", "out"}
    out = {}
    for k, v in vars(args).items():
        if k in skip:
            continue
        out[k] = v if isinstance(v, (int, float, str, type(None))) else str(v)
    return out


def _summary(rep: IdentityReport) -> str:
    parts = [f"{rep.kind} {rep.identity}"]
    if "n" in rep.inputs:
        parts.append(f"n={rep.inputs['n']}")
    for name in ("lhs", "rhs", "discrepancy"):
        v = getattr(rep, name)
        if v is not None:
            parts.append(f"{name}={mpmath.nstr(mpmath.mpmathify(v), 12)}")
    parts.append(rep.verdict)
    return " ".join(parts)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.precision < 5:
            raise InvalidParameters("--precision must be at least 5")
        if args.threads < 1:
            raise InvalidParameters("--threads must be positive")
        ladder = list(parse_ladder(args.ladder))
        ctx = ZetaContext(args.precision)
        cache = SigmaCache(args.cache_dir, threads=args.threads)
        reports, code = COMMANDS[args.command](args, ctx, cache)
    except NonConvergenceError as exc:
        print(f"shiftconv: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENT
    except (InvalidParameters, ValueError) as exc:
        print(f"shiftconv: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    manifest = RunManifest(args.command, argv, _parameters(args), args.precision, ladder, args.seed)
    if args.format == "csv":
        text = to_csv(reports, args.precision)
    else:
        text = to_json(reports, manifest, args.precision)
    if args.out:
        write_atomic(args.out, text)
        if args.format == "csv":
            write_atomic(args.out + ".manifest.json", json.dumps(manifest.to_dict(), indent=2) + "\n")
    else:
        sys.stdout.write(text)
    for rep in reports:
        print(_summary(rep), file=sys.stderr)
    return code


def rerun(manifest: dict, out: str | None = None) -> int:
    """Repeat the run recorded in a manifest, optionally writing to another file."""
    argv = list(manifest["argv"])
    if "--out" in argv:
        i = argv.index("--out")
        del argv[i : i + 2]
    argv = [a for a in argv if not a.startswith("--out=")]
    if out is not None:
        argv += ["--out", out]
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
