"""Command-line entry point. All subcommands are batch-style: data goes to
files or stdout, diagnostics to stderr, nothing prompts."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from hullopt import bo, campaign as camp
from hullopt.drag import FluidProps, Scenario, WATER, evaluate_drag
from hullopt.foamcase import DEFAULT_LENGTH_SCALE, turbulence_ic, write_case
from hullopt.geometry import DesignVector, build_profile, design_bounds, export_profile_csv, export_stl

MIN_BUDGET = 12


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1 (argparse's default is 2, reserved here for runtime errors)
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _load_design(path: str) -> DesignVector:
    with open(path) as fh:
        return DesignVector.from_dict(json.load(fh))


def _scenario(args) -> Scenario:
    return Scenario(args.velocity, args.intensity)


def cmd_evaluate(args) -> int:
    design = _load_design(args.design)
    breakdown = evaluate_drag(design, _scenario(args), WATER)
    print(json.dumps(breakdown.to_dict(), indent=2, sort_keys=True))
    return 0


def cmd_optimize(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    scenario = _scenario(args)
    objective = camp.make_objective(args.evaluator, scenario, WATER, case_root=out / "cases")
    cfg = bo.BoConfig(bounds=tuple(design_bounds()), budget=args.budget, seed=args.seed,
                      log_model=True)
    trace = bo.optimize(objective, cfg)
    (out / "trace.jsonl").write_text(trace.to_jsonl())
    best = DesignVector.from_array(trace.best_design)
    (out / "optimal.json").write_text(json.dumps({
        "design": best.to_dict(),
        "drag_n": trace.best_drag,
        "velocity": scenario.velocity,
        "intensity": scenario.turbulence_intensity,
        "seed": args.seed,
    }, sort_keys=True, indent=2) + "\n")
    print(json.dumps({"best_drag_n": trace.best_drag, "out": str(out)}, sort_keys=True))
    return 0


def cmd_campaign(args) -> int:
    cfg = camp.CampaignConfig(out_dir=Path(args.out), budget=args.budget,
                              base_seed=args.seed, evaluator=args.evaluator,
                              parallel=args.parallel)
    result = camp.run_campaign(cfg)
    best = {str(s.index): s.best_drag for s in result.scenarios}
    print(json.dumps({"scenarios": len(result.scenarios), "best_drag_n": best,
                      "out": str(args.out)}, sort_keys=True))
    return 0


def cmd_cross_eval(args) -> int:
    result = camp.load_campaign(args.campaign)
    matrix = camp.cross_evaluate(result)
    out = Path(args.out) if args.out else Path(args.campaign) / "cross_eval.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(matrix.to_csv())
    print(json.dumps({"rows": int(matrix.values.size), "out": str(out)}, sort_keys=True))
    return 0


def cmd_report(args) -> int:
    result = camp.load_campaign(args.campaign)
    matrix = camp.cross_evaluate(result)
    out = Path(args.out) if args.out else Path(args.campaign) / "report"
    summary = camp.report(result, matrix, out)
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_export(args) -> int:
    design = _load_design(args.design)
    profile = build_profile(design)
    if not args.stl and not args.csv:
        raise ValueError("nothing to export: pass --stl and/or --csv")
    if args.stl:
        Path(args.stl).write_bytes(export_stl(profile, 200, 64))
    if args.csv:
        Path(args.csv).write_text(export_profile_csv(profile, 201))
    return 0


def cmd_foam_case(args) -> int:
    design = _load_design(args.design)
    scenario = _scenario(args)
    ic = turbulence_ic(scenario.velocity, scenario.turbulence_intensity, args.length_scale)
    write_case(Path(args.dir), build_profile(design), scenario, WATER, ic)
    print(json.dumps({"dir": args.dir, "k": ic.k, "omega": ic.omega}, sort_keys=True))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="hullopt",
                     description="Hull drag evaluation, Bayesian shape optimization, and the "
                                 "velocity x turbulence scenario study.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def add_scenario_flags(p):
        p.add_argument("--velocity", type=float, required=True, help="flow speed, m/s")
        p.add_argument("--intensity", type=float, required=True,
                       help="turbulence intensity, percent of mean flow")

    p = sub.add_parser("evaluate", help="drag breakdown of a design at one scenario")
    p.add_argument("--design", required=True, help="design JSON file")
    add_scenario_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("optimize", help="run one BO campaign at a scenario")
    add_scenario_flags(p)
    p.add_argument("--budget", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--evaluator", choices=("strip", "foam-manual"), default="strip")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("campaign", help="run all 25 scenarios")
    p.add_argument("--budget", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--evaluator", choices=("strip", "foam-manual"), default="strip")
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("cross-eval", help="evaluate every optimum in every scenario")
    p.add_argument("--campaign", required=True, help="campaign directory")
    p.add_argument("--out", default=None, help="matrix CSV path (default: <campaign>/cross_eval.csv)")
    p.set_defaults(func=cmd_cross_eval)

    p = sub.add_parser("report", help="write study reports from a finished campaign")
    p.add_argument("--campaign", required=True)
    p.add_argument("--out", default=None, help="report directory (default: <campaign>/report)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("export", help="write STL and/or profile CSV for a design")
    p.add_argument("--design", required=True)
    p.add_argument("--stl", default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("foam-case", help="emit a solver case directory for a design")
    p.add_argument("--design", required=True)
    add_scenario_flags(p)
    p.add_argument("--dir", required=True)
    p.add_argument("--length-scale", type=float, default=DEFAULT_LENGTH_SCALE,
                   help="turbulent length scale, m")
    p.set_defaults(func=cmd_foam_case)

    return parser


def _check_usage(parser, args) -> None:
    budget = getattr(args, "budget", None)
    if budget is not None and budget < MIN_BUDGET:
        parser.error(f"--budget must be >= {MIN_BUDGET}")
    if getattr(args, "parallel", 1) < 1:
        parser.error("--parallel must be >= 1")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_usage(parser, args)
    except SystemExit as exc:   # help exits 0, usage errors exit 1
        return int(exc.code or 0)
    try:
        return args.func(args) or 0
    except Exception as exc:
        sys.stderr.write(f"hullopt: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
