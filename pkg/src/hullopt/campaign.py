"""The 5x5 scenario study: one BO campaign per operating point, cross-evaluation
of every optimum under every scenario, and the quiet/slow vs rough/fast design
comparison that probes for a universally near-optimal hull.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from hullopt import bo
from hullopt.drag import FluidProps, Scenario, WATER, evaluate_drag
from hullopt.foamcase import turbulence_ic, write_case, parse_force_log
from hullopt.geometry import DesignVector, build_profile, design_bounds

VELOCITIES = (1.0, 2.5, 5.0, 7.5, 10.0)      # m/s
INTENSITIES = (0.1, 2.0, 5.0, 10.0, 20.0)    # percent
N_SCENARIOS = len(VELOCITIES) * len(INTENSITIES)

# The campaign binds the strip oracle at a finer station count than the
# module default: 1 mm spacing guarantees every profile segment (minimum
# knot spacing 2.5 mm at the shortest admissible nose) contains stations,
# so the optimizer cannot hide steep walls between quadrature points.
CAMPAIGN_STATIONS = 1000

# mid-range cylinder-ish hull used as a sanity yardstick for optimizer output
REFERENCE_DESIGN = DesignVector((0.1,) * 6, 0.4)

QUIET_SLOW_INDEX = 0     # (1 m/s, 0.1%)
ROUGH_FAST_INDEX = 24    # (10 m/s, 20%)


class PendingEvaluation(RuntimeError):
    """Raised by the manual CFD evaluator when a case still awaits solving."""


def scenario_matrix() -> tuple[Scenario, ...]:
    """The 25 (velocity, intensity) pairs, row-major by velocity then intensity."""
    return tuple(Scenario(v, i) for v in VELOCITIES for i in INTENSITIES)


def make_objective(evaluator: str, scenario: Scenario, fluid: FluidProps, case_root=None,
                   n_stations: int = CAMPAIGN_STATIONS):
    """Bind a drag evaluator to one scenario.

    ``strip``: the built-in analytic oracle. ``foam-manual``: emits a solver
    case per requested design and reads back ``forces.dat`` once an external
    solver has produced it; raises PendingEvaluation (aborting the run, to be
    resumed later) while a case is unsolved.
    """
    if evaluator == "strip":
        def objective(x):
            return evaluate_drag(DesignVector.from_array(x), scenario, fluid, n_stations).total
        return objective
    if evaluator == "foam-manual":
        if case_root is None:
            raise ValueError("foam-manual evaluator needs a case_root directory")
        root = Path(case_root)
        counter = {"n": 0}

        def objective(x):
            idx = counter["n"]
            counter["n"] += 1
            case = root / f"eval_{idx:04d}"
            forces = case / "forces.dat"
            if forces.exists():
                return parse_force_log(forces.read_text()).final_drag
            design = DesignVector.from_array(x)
            ic = turbulence_ic(scenario.velocity, scenario.turbulence_intensity)
            write_case(case, build_profile(design), scenario, fluid, ic, stl_resolution=(64, 32))
            (case / "design.json").write_text(json.dumps(design.to_dict(), sort_keys=True) + "\n")
            raise PendingEvaluation(
                f"case {case} written; run the solver, place forces.dat there, then rerun")
        return objective
    raise ValueError(f"unknown evaluator {evaluator!r}; expected 'strip' or 'foam-manual'")


@dataclass
class CampaignConfig:
    out_dir: Path
    budget: int = 100
    base_seed: int = 0
    evaluator: str = "strip"
    n_init: int = 10
    delta: float = 0.1
    parallel: int = 1
    fluid: FluidProps = WATER

    def metadata(self) -> dict:
        return {
            "budget": self.budget,
            "base_seed": self.base_seed,
            "evaluator": self.evaluator,
            "n_init": self.n_init,
            "delta": self.delta,
            "n_stations": CAMPAIGN_STATIONS,
            "log_model": True,
            "fluid": {"density": self.fluid.density,
                      "kinematic_viscosity": self.fluid.kinematic_viscosity},
            "velocities": list(VELOCITIES),
            "intensities": list(INTENSITIES),
        }


@dataclass
class ScenarioResult:
    index: int
    scenario: Scenario
    trace: bo.Trace
    seed: int

    @property
    def best_drag(self) -> float:
        return self.trace.best_drag

    @property
    def best_design(self) -> DesignVector:
        return DesignVector.from_array(self.trace.best_design)


@dataclass
class CampaignResult:
    metadata: dict
    scenarios: list[ScenarioResult] = field(default_factory=list)

    @property
    def fluid(self) -> FluidProps:
        f = self.metadata["fluid"]
        return FluidProps(f["density"], f["kinematic_viscosity"])


def _scenario_dir(out_dir: Path, index: int) -> Path:
    return Path(out_dir) / f"scenario_{index:02d}"


def _run_scenario(out_dir: str, index: int, velocity: float, intensity: float,
                  budget: int, n_init: int, delta: float, seed: int,
                  evaluator: str, density: float, viscosity: float) -> None:
    """Run one scenario's optimization and persist it (module-level so the
    parallel executor can pickle it)."""
    scenario = Scenario(velocity, intensity)
    fluid = FluidProps(density, viscosity)
    sdir = _scenario_dir(Path(out_dir), index)
    sdir.mkdir(parents=True, exist_ok=True)
    objective = make_objective(evaluator, scenario, fluid, case_root=sdir / "cases")
    cfg = bo.BoConfig(bounds=tuple(design_bounds()), budget=budget, n_init=n_init,
                      delta=delta, seed=seed, log_model=True)
    trace = bo.optimize(objective, cfg)
    (sdir / "trace.jsonl").write_text(trace.to_jsonl())
    best = DesignVector.from_array(trace.best_design)
    optimal = {
        "design": best.to_dict(),
        "drag_n": trace.best_drag,
        "velocity": velocity,
        "intensity": intensity,
        "seed": seed,
    }
    # optimal.json written last: its presence marks the scenario complete
    (sdir / "optimal.json").write_text(json.dumps(optimal, sort_keys=True, indent=2) + "\n")


def run_campaign(cfg: CampaignConfig) -> CampaignResult:
    """Run (or resume) all 25 scenarios; per-scenario seeds are base_seed + index,
    so scenarios are independent and parallel execution matches serial output."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta_path = out / "campaign.json"
    metadata = cfg.metadata()
    if meta_path.exists():
        existing = json.loads(meta_path.read_text())
        if existing != metadata:
            raise ValueError(f"{meta_path} holds a different campaign configuration; "
                             "use a fresh output directory")
    else:
        meta_path.write_text(json.dumps(metadata, sort_keys=True, indent=2) + "\n")

    pending = [(i, s) for i, s in enumerate(scenario_matrix())
               if not (_scenario_dir(out, i) / "optimal.json").exists()]
    jobs = [(str(out), i, s.velocity, s.turbulence_intensity, cfg.budget, cfg.n_init,
             cfg.delta, cfg.base_seed + i, cfg.evaluator,
             cfg.fluid.density, cfg.fluid.kinematic_viscosity) for i, s in pending]
    if cfg.parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallel) as pool:
            futures = [pool.submit(_run_scenario, *job) for job in jobs]
            for fut in futures:
                fut.result()
    else:
        for job in jobs:
            _run_scenario(*job)
    return load_campaign(out)


def load_campaign(out_dir) -> CampaignResult:
    out = Path(out_dir)
    metadata = json.loads((out / "campaign.json").read_text())
    result = CampaignResult(metadata)
    for index, scenario in enumerate(scenario_matrix()):
        sdir = _scenario_dir(out, index)
        optimal = json.loads((sdir / "optimal.json").read_text())
        trace = bo.Trace.from_jsonl((sdir / "trace.jsonl").read_text())
        if optimal["seed"] != metadata["base_seed"] + index:
            raise ValueError(f"scenario {index}: seed mismatch against campaign metadata")
        result.scenarios.append(ScenarioResult(index, scenario, trace,
                                               optimal["seed"]))
    return result


@dataclass
class CrossEvalMatrix:
    """values[i, j] = drag of scenario i's optimum evaluated under scenario j."""

    values: np.ndarray
    scenarios: tuple[Scenario, ...]

    def to_csv(self) -> str:
        lines = ["design_scenario,eval_scenario,velocity,intensity,drag_n"]
        for i in range(len(self.scenarios)):
            for j, s in enumerate(self.scenarios):
                lines.append(f"{i},{j},{s.velocity:.9g},{s.turbulence_intensity:.9g},"
                             f"{self.values[i, j]:.9g}")
        return "\n".join(lines) + "\n"


def cross_evaluate(result: CampaignResult, n_stations: int | None = None) -> CrossEvalMatrix:
    """Evaluate every scenario's optimum in every scenario (625 drag calls).

    Enforces the diagonal consistency invariant: re-evaluating an optimum in
    its own scenario must reproduce the campaign's recorded optimum (hence
    the station count defaults to the campaign's own binding).
    """
    scenarios = scenario_matrix()
    fluid = result.fluid
    if n_stations is None:
        n_stations = result.metadata.get("n_stations", CAMPAIGN_STATIONS)
    designs = [s.best_design for s in result.scenarios]
    values = np.empty((len(scenarios), len(scenarios)))
    for i, design in enumerate(designs):
        for j, scenario in enumerate(scenarios):
            values[i, j] = evaluate_drag(design, scenario, fluid, n_stations).total
        recorded = result.scenarios[i].best_drag
        if abs(values[i, i] - recorded) > 1e-9:
            raise RuntimeError(
                f"scenario {i}: cross-eval diagonal {values[i, i]!r} != campaign optimum {recorded!r}")
    return CrossEvalMatrix(values, scenarios)


def report(result: CampaignResult, matrix: CrossEvalMatrix, out_dir) -> dict:
    """Write the study outputs; returns the headline comparison summary.

    Files: the full cross-evaluation matrix, sampled optimal profiles per
    scenario, the quiet/slow (D1) vs rough/fast (D2) table with its win
    count over the scenarios native to neither design, and a plot-ready
    long-format drag table.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    (out / "cross_eval.csv").write_text(matrix.to_csv())

    xs = np.linspace(0.0, 1.0, 101)
    lines = ["scenario,velocity,intensity,x,r"]
    for sres in result.scenarios:
        profile = build_profile(sres.best_design)
        rs = profile.radius_at(xs)
        s = sres.scenario
        lines += [f"{sres.index},{s.velocity:.9g},{s.turbulence_intensity:.9g},{x:.9g},{r:.9g}"
                  for x, r in zip(xs, rs)]
    (out / "optimal_profiles.csv").write_text("\n".join(lines) + "\n")

    lines = ["scenario,design,drag_n"]
    for i in range(len(matrix.scenarios)):
        for j in range(len(matrix.scenarios)):
            lines.append(f"{j},{i},{matrix.values[i, j]:.9g}")
    (out / "scenario_design_drag.csv").write_text("\n".join(lines) + "\n")

    d1, d2 = QUIET_SLOW_INDEX, ROUGH_FAST_INDEX
    lines = ["eval_scenario,velocity,intensity,drag_d1,drag_d2,winner,native"]
    d1_wins = d2_wins = ties = 0
    for j, s in enumerate(matrix.scenarios):
        drag1, drag2 = matrix.values[d1, j], matrix.values[d2, j]
        native = j in (d1, d2)
        if drag2 < drag1:
            winner = "D2"
        elif drag1 < drag2:
            winner = "D1"
        else:
            winner = "tie"
        if not native:
            d1_wins += winner == "D1"
            d2_wins += winner == "D2"
            ties += winner == "tie"
        lines.append(f"{j},{s.velocity:.9g},{s.turbulence_intensity:.9g},"
                     f"{drag1:.9g},{drag2:.9g},{winner},{int(native)}")
    (out / "d1_d2_comparison.csv").write_text("\n".join(lines) + "\n")

    summary = {
        "d1_scenario": d1,
        "d2_scenario": d2,
        "compared_scenarios": len(matrix.scenarios) - 2,
        "d1_wins": d1_wins,
        "d2_wins": d2_wins,
        "ties": ties,
    }
    (out / "d1_d2_summary.json").write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
    return summary
