"""Command-line entry point: ``epsnets <group> <command> [options]``.

Exit status is 0 when every assertion of the command holds, 1 when one
fails (the JSON report is still written) and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import instances as io
from .construction import build_family, dual_space, eps_for_r, primal_space
from .instances import InstanceError
from .randomconstruction import lemma31_report
from .rangespace import RangeSpaceError, heavy_ranges, is_epsilon_net, vc_dimension
from .reports import (
    CertificateContradiction,
    duality_report,
    falsify_small_nets,
    growth_csv,
    growth_table,
    lemma21_report,
    lemma23_report,
)
from .solver import DEFAULT_BUDGET, SolverError, solve_net


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None


def _schedule_eps(c: int, d: int) -> Fraction | None:
    # only the (4, 3r-4) families come with a parameter-schedule eps
    if c == 4 and d >= 2 and (d + 4) % 3 == 0:
        return eps_for_r((d + 4) // 3)
    return None


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=1, default=str)
    print(text)
    if out:
        Path(out).write_text(text + "\n")


def _status(report: dict) -> int:
    return 0 if report.get("ok", True) else 1


def _eps_for(inst: io.Instance, given: Fraction | None) -> Fraction:
    eps = given if given is not None else inst.default_eps()
    if eps is None:
        raise UsageError("--eps is required: the instance records no default eps")
    return eps


# gen

def cmd_gen_pat(args) -> int:
    eps = _schedule_eps(args.c, args.d)
    inst = io.pat_instance(args.c, args.d, args.blowup, eps)
    io.save(inst, args.out)
    _emit({"kind": inst.kind, "parameters": inst.parameters, "rectangles": len(inst.family), "out": args.out}, None)
    return 0


def cmd_gen_random(args) -> int:
    inst = io.random_instance(args.n, args.r, args.seed)
    io.save(inst, args.out)
    _emit({"kind": inst.kind, "parameters": inst.parameters, "ranges": len(inst.range_space), "out": args.out}, None)
    return 0


def cmd_gen_dual4(args) -> int:
    inst = io.dual4_instance(io.load(args.inst))
    io.save(inst, args.out)
    _emit({"kind": inst.kind, "points": len(inst.points), "boxes": len(inst.boxes), "out": args.out}, None)
    return 0


def cmd_gen_halfspace(args) -> int:
    inst = io.halfspace_instance(io.load(args.inst))
    io.save(inst, args.out)
    _emit({"kind": inst.kind, "points": len(inst.points), "halfspaces": len(inst.halfspaces), "out": args.out}, None)
    return 0


# solve

def cmd_solve_net(args) -> int:
    if args.mode == "sample" and args.seed is None:
        raise UsageError("--seed is required for --mode sample")
    inst = io.load(args.inst)
    eps = _eps_for(inst, args.eps)
    rs = inst.space()
    res = solve_net(rs, eps, args.mode, args.seed, args.budget)
    verdict = is_epsilon_net(rs, eps, res.solution)
    report = {
        "inst": args.inst, "kind": inst.kind, "parameters": inst.parameters,
        "eps": str(eps), "mode": args.mode, "seed": args.seed, "budget": args.budget,
        "n": rs.n, "heavy_ranges": len(heavy_ranges(rs, eps)),
        "result": res.to_dict(),
        "verified_net": verdict.ok,
        "ok": verdict.ok and res.lower_bound <= res.size,
    }
    _emit(report, args.out)
    return _status(report)


# verify

def cmd_verify_lemma21(args) -> int:
    report = lemma21_report(args.c, args.d, args.r, args.budget)
    _emit(report, args.out)
    return _status(report)


def cmd_verify_lemma31(args) -> int:
    report = lemma31_report(args.n, args.r, args.i_size, args.trials, args.seed,
                            seeds=args.seeds, survival_trials=args.survival_trials)
    _emit(report, args.out)
    return _status(report)


def cmd_verify_vc(args) -> int:
    inst = io.load(args.inst)
    report = {"inst": args.inst, "kind": inst.kind, "max_d": args.max_d,
              "vc": vc_dimension(inst.space(), args.max_d)}
    if inst.family is not None and inst.family.blowup == 1:
        report["primal_vc"] = vc_dimension(primal_space(inst.family), args.max_d)
    if args.expect is not None:
        report["expect"] = args.expect
        report["ok"] = report["vc"] == args.expect
    _emit(report, args.out)
    return _status(report)


def cmd_verify_duality(args) -> int:
    report = duality_report(args.c, args.d, args.samples, args.seed)
    _emit(report, args.out)
    return _status(report)


def cmd_verify_lemma23(args) -> int:
    report = lemma23_report(args.sets, args.boxes, args.seed, args.max_points, args.max_dim)
    _emit(report, args.out)
    return _status(report)


# report

def cmd_report_growth(args) -> int:
    modes = tuple(m for m in args.modes.split(",") if m)
    bad = set(modes) - {"greedy", "exact", "sample"}
    if bad:
        raise UsageError(f"unknown modes: {sorted(bad)}")
    if "sample" in modes and args.seed is None:
        raise UsageError("--seed is required when the sample mode is requested")
    if args.r_min > args.r_max:
        raise UsageError("--r-min exceeds --r-max")
    rows = growth_table(range(args.r_min, args.r_max + 1), modes, args.budget,
                        0 if args.seed is None else args.seed)
    Path(args.out).write_text(growth_csv(rows))
    # the independence argument promises a net of at least half the family
    ok = all(row.certified and 2 * row.lower_bound >= row.n_rects for row in rows)
    report = {"out": args.out, "rows": [row.csv_record() for row in rows], "ok": ok}
    _emit(report, args.json_out)
    return _status(report)


def cmd_report_falsify(args) -> int:
    inst = io.load(args.inst)
    eps = _eps_for(inst, args.eps)
    rs = inst.space()
    if not 0 <= args.size <= rs.n:
        raise UsageError(f"--size must lie in [0, {rs.n}]")
    report = {"inst": args.inst, "eps": str(eps), "seed": args.seed}
    try:
        res = falsify_small_nets(rs, eps, args.size, args.samples, args.seed)
        report.update(res.to_dict(), ok=res.failures == res.samples)
    except CertificateContradiction as exc:
        report.update(size=args.size, samples=args.samples, error=str(exc), ok=False)
    _emit(report, args.out)
    return _status(report)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epsnets", description="Lower-bound instances for eps-nets and their certificates.")
    groups = parser.add_subparsers(dest="group", metavar="{gen,solve,verify,report}")
    groups.required = True

    gen = groups.add_parser("gen", help="generate instance files").add_subparsers(dest="command")
    gen.required = True
    p = gen.add_parser("pat", help="rectangle family R(c, d), optionally chain-blown-up")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--blowup", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_pat)
    p = gen.add_parser("random", help="staged random points with dyadic windows")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_random)
    for name, func, text in (("dual4", cmd_gen_dual4, "points and corner boxes in R^4"),
                             ("halfspace", cmd_gen_halfspace, "points and half-spaces in R^4")):
        p = gen.add_parser(name, help=text)
        p.add_argument("--inst", required=True)
        p.add_argument("--out", required=True)
        p.set_defaults(func=func)

    solve = groups.add_parser("solve", help="solve for nets").add_subparsers(dest="command")
    solve.required = True
    p = solve.add_parser("net", help="find an eps-net of an instance")
    p.add_argument("--inst", required=True)
    p.add_argument("--eps", type=_fraction, help="exact rational such as 1/128 (default: the instance's eps)")
    p.add_argument("--mode", choices=("exact", "greedy", "sample"), default="exact")
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--out", default="result.json")
    p.set_defaults(func=cmd_solve_net)

    verify = groups.add_parser("verify", help="check claimed properties").add_subparsers(dest="command")
    verify.required = True
    p = verify.add_parser("lemma21", help="maximum r-independent subfamily vs the bound")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_lemma21)
    p = verify.add_parser("lemma31", help="staged random construction checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--i-size", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--seeds", type=int, default=100, help="number of (point set, I) pairs")
    p.add_argument("--survival-trials", type=int, help="default: --trials")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_lemma31)
    p = verify.add_parser("vc", help="VC-dimension of an instance's range space")
    p.add_argument("--inst", required=True)
    p.add_argument("--max-d", type=int, default=4)
    p.add_argument("--expect", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_vc)
    p = verify.add_parser("duality", help="rectangle / corner-box incidence equivalence")
    p.add_argument("--c", type=int, default=4)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_duality)
    p = verify.add_parser("lemma23", help="corner boxes vs half-spaces after rescaling")
    p.add_argument("--sets", type=int, default=100)
    p.add_argument("--boxes", type=int, default=100)
    p.add_argument("--max-points", type=int, default=50)
    p.add_argument("--max-dim", type=int, default=4)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_lemma23)

    report = groups.add_parser("report", help="growth tables and falsification").add_subparsers(dest="command")
    report.required = True
    p = report.add_parser("growth", help="lower bounds and net sizes along the parameter schedule")
    p.add_argument("--r-min", type=int, default=2)
    p.add_argument("--r-max", type=int, default=3)
    p.add_argument("--modes", default="greedy", help="comma list of greedy, exact, sample")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="growth.csv")
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_report_growth)
    p = report.add_parser("falsify", help="random small candidates must all fail")
    p.add_argument("--inst", required=True)
    p.add_argument("--eps", type=_fraction)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report_falsify)
    return parser


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InstanceError as exc:
        print(f"error: malformed instance: {exc}", file=sys.stderr)
    except (UsageError, SolverError, RangeSpaceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 2


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
