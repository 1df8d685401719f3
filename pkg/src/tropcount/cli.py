"""Command-line interface: ``tropcount degree|triangulation|spectrum|verify``.

Exit codes: 0 ok, 1 bad input, 2 lengths not in general position,
3 a cross-check failed.
"""

from __future__ import annotations

import argparse
import json
import sys

from tropcount.constructions import preimage_by_construction
from tropcount.crossratio import CrossRatioSet
from tropcount.degree import DegreeResult, compute_degree, generic_degree, generic_lengths
from tropcount.errors import GenericityFailure, InvalidInput, NonGeneric
from tropcount.exactmath import format_rational, parse_rational
from tropcount.search import MODES, spectrum, verify_report
from tropcount.triangulation import (
    INTERPRETATIONS, Triangulation, derive_crossratios, parse_diagonals, parse_lengths,
)
from tropcount.verify import run_suite

EXIT_OK, EXIT_INPUT, EXIT_GENERIC, EXIT_VERIFY = 0, 1, 2, 3


class VerificationFailure(Exception):
    pass


def _emit(args, payload: dict, table: list[str]):
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(table))


def _curve_lines(result: DegreeResult) -> list[str]:
    lines = []
    for c in result.curves:
        edges = ", ".join(f"{{{s}}}={format_rational(v)}" for s, v in zip(c.tree.splits, c.tree.length_vector))
        lines.append(f"  mult {c.multiplicity}: {edges}")
    return lines


def _summary(curves, degree: int) -> str:
    mults = sorted({c.multiplicity for c in curves})
    count = len(curves)
    noun = "curve" if count == 1 else "curves"
    if len(mults) == 1:
        return f"{count} {noun} × mult {mults[0]}; degree {degree}"
    return f"{count} {noun} (mults {mults}); degree {degree}"


# -- subcommands -----------------------------------------------------------
def cmd_degree(args) -> int:
    text = sys.stdin.read() if args.file == "-" else open(args.file).read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{args.file}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    crs = CrossRatioSet.from_json(obj)
    if args.resample or all(v == 0 for v in crs.lengths):
        result = generic_degree(crs, args.seed, jobs=args.jobs)
    else:
        result = compute_degree(crs, jobs=args.jobs)
    head = _summary(result.curves, result.degree) if result.curves else f"0 curves; degree {result.degree}"
    _emit(args, result.to_json(), [head] + _curve_lines(result))
    return EXIT_OK


def _interp_arg(text: str, count: int):
    names = [x.strip() for x in text.split(",") if x.strip()]
    if len(names) == 1:
        return names[0]
    if len(names) != count:
        raise InvalidInput(f"give one interpretation or {count} comma-separated ones")
    return names


def cmd_triangulation(args) -> int:
    diagonals = parse_diagonals(args.diagonals)
    if args.lengths:
        lengths = parse_lengths(args.lengths)
    elif args.length:
        lengths = [parse_rational(args.length)] * len(diagonals)
    else:
        lengths = generic_lengths(diagonals, args.seed)
    t = Triangulation(args.n, diagonals, lengths)
    interp = _interp_arg(args.interp, len(diagonals))
    found = compute_degree(derive_crossratios(t, interp), jobs=args.jobs)
    built = preimage_by_construction(t, interp)
    agrees = found.multiset == built.multiset
    payload = {
        "n": t.n,
        "diagonals": [f"{a}-{b}" for a, b in t.diagonals],
        "interpretation": interp,
        "lengths": [format_rational(v) for v in t.lengths],
        **built.to_json(),
        "search_degree": found.degree,
        "oracle_agrees": agrees,
    }
    head = _summary(built.curves, built.degree) + ("; oracle agrees" if agrees else "; ORACLE DISAGREES")
    info = (f"d = {built.d}, k = {built.k}: expected {built.expected_count} curve(s), "
            f"each of mult {built.expected_multiplicity}")
    _emit(args, payload, [head, info] + _curve_lines(found))
    if not agrees:
        raise VerificationFailure("construction and search disagree")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    def progress(done, total):
        if args.progress:
            print(f"{done}/{total}", file=sys.stderr)

    report = spectrum(args.n, args.mode, args.budget, args.seed, jobs=args.jobs,
                      checkpoint=args.checkpoint, force=args.force,
                      shortcut=not args.no_shortcut, stop_at=args.stop_at, progress=progress)
    payload = report.to_json()
    lines = [f"n = {report.n}, mode {report.mode}: degrees {sorted(report.degrees)} "
             f"after {report.instances_checked} instances"]
    for d, u in sorted(report.witnesses.items()):
        lines.append(f"  {d}: " + " ".join("{" + ",".join(map(str, s)) + "}" for s in u))
    if args.verify:
        again = verify_report(report, seed=args.seed + 1)
        payload["verified"] = {str(d): v for d, v in again.items()}
        bad = {d: v for d, v in again.items() if d != v}
        lines.append("witnesses re-verified" if not bad else f"witness mismatch: {bad}")
        _emit(args, payload, lines)
        if bad:
            raise VerificationFailure(f"witnesses recomputed to different degrees: {bad}")
        return EXIT_OK
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.n_max > 9:
        raise InvalidInput("verify supports --n-max up to 9")
    log = print if args.format == "table" else None
    checks = run_suite(args.n_max, args.seed, args.jobs, log=log)
    if args.format == "json":
        print(json.dumps([{"name": c.name, "passed": c.passed, "cases": c.cases,
                           "seconds": round(c.seconds, 3), "failures": c.failures[:10]} for c in checks], indent=2))
    if not all(c.passed for c in checks):
        raise VerificationFailure("some checks failed")
    return EXIT_OK


# -- argument parsing ------------------------------------------------------
def _common(fmt: str = "json") -> argparse.ArgumentParser:
    # A fresh parent per subcommand: parents share their actions, so one
    # subcommand's default must not leak into the others.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    common.add_argument("--format", choices=("json", "table"), default=fmt)
    return common


def build_parser() -> argparse.ArgumentParser:

    p = argparse.ArgumentParser(prog="tropcount", description="Count rational tropical curves under cross-ratio conditions.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("degree", parents=[_common()], help="degree and preimage curves of a condition file")
    d.add_argument("file", help='JSON {"n": n, "crossratios": [{"pairs": [[a,b],[c,d]], "length": "p/q"}, ...]} or -')
    d.add_argument("--resample", action="store_true", help="ignore the file's lengths and draw generic ones")
    d.set_defaults(func=cmd_degree)

    t = sub.add_parser("triangulation", parents=[_common()], help="conditions from a triangulated polygon")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--diagonals", required=True, help="e.g. 2-4,4-6,2-6")
    t.add_argument("--interp", default="dual",
                   help=f"one of {', '.join(INTERPRETATIONS)}, or a comma list with one per diagonal")
    t.add_argument("--lengths", help="comma list of p/q, one per diagonal")
    t.add_argument("--length", help="one length for every diagonal")
    t.set_defaults(func=cmd_triangulation)

    s = sub.add_parser("spectrum", parents=[_common()], help="degrees reachable with n markings")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--mode", choices=MODES, default="sample")
    s.add_argument("--budget", type=int, help="number of instances (sample, climb) or a cap")
    s.add_argument("--checkpoint", help="JSON-lines file for resuming")
    s.add_argument("--force", action="store_true", help="allow exhaustive runs above n = 7 and full case splits above a million sets")
    s.add_argument("--stop-at", type=int, help="stop once this degree has been seen")
    s.add_argument("--no-shortcut", action="store_true", help="skip the counting test for degree 0")
    s.add_argument("--verify", action="store_true", help="recompute every witness with fresh lengths")
    s.add_argument("--progress", action="store_true", help="report progress on stderr")
    s.set_defaults(func=cmd_spectrum)

    v = sub.add_parser("verify", parents=[_common("table")], help="run the self-check suite")
    v.add_argument("--n-max", type=int, default=6)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInput, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NonGeneric, GenericityFailure) as exc:
        print(f"not in general position: {exc}", file=sys.stderr)
        return EXIT_GENERIC
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
