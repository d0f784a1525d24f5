"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``. The campaign criterion
executes the full 25-scenario study at budget 100 twice (once timed, once for
the byte-identity check), so this module takes several minutes.

Two checks are known-red and kept faithful rather than weakened; the
reasoning lives in the project's decision notes:
  * criterion 6's N-refinement bound over unrestricted random designs
    (short-nose separation walls are under-resolved at 200 stations), and
  * criterion 7's D2-beats-D1 count plus the reference-design example
    (the budget-100 optimizer cannot reach the efficient frontier on the
    penalty-wall landscape, so that comparison is seed noise; the underlying
    mechanism is demonstrated by the frozen witness pair in criterion 6).
"""

import json
import math
import struct
import time
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

from hullopt import bo, gp
from hullopt import campaign as camp
from hullopt.drag import Scenario, WATER, evaluate_drag
from hullopt.foamcase import parse_force_log, turbulence_ic, write_case
from hullopt.geometry import (
    DesignVector,
    HullProfile,
    build_profile,
    design_bounds,
    export_stl,
    volume,
    wetted_area,
)

from test_gp import dense_posterior_oracle

# frozen from direct high-precision evaluation of the confidence schedule
BETA_T1_D7 = 2.6432678926
BETA_T10_D7 = 5.6846548862


def announce(criterion, ok, detail):
    print(f"\nACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")


class Subchecks:
    def __init__(self, criterion):
        self.criterion = criterion
        self.failures = []

    def check(self, ok, label):
        print(f"  [{self.criterion}] {'pass' if ok else 'FAIL'}: {label}")
        if not ok:
            self.failures.append(label)

    def conclude(self):
        announce(self.criterion, not self.failures, f"{len(self.failures)} failed sub-check(s)")
        assert not self.failures, f"criterion {self.criterion}: {self.failures}"


def test_criterion_1_turbulence_initial_conditions():
    t0 = time.perf_counter()
    rough = turbulence_ic(10.0, 20.0, 0.07, 0.09)
    quiet = turbulence_ic(1.0, 0.1, 0.07, 0.09)
    elapsed = time.perf_counter() - t0
    ok = (abs(rough.k - 6.0) <= 1e-12 * 6.0
          and abs(rough.omega - 63.886) <= 0.01
          and abs(quiet.k - 1.5e-6) <= 1e-12 * 1.5e-6
          and abs(quiet.omega - 0.031944) <= 1e-5
          and elapsed < 1.0)
    announce(1, ok, f"k={rough.k!r}/{quiet.k!r} omega={rough.omega:.4f}/{quiet.omega:.6f} in {elapsed:.3f}s")
    assert ok


def test_criterion_2_confidence_schedule():
    b1 = bo.beta_schedule(1, 7, 0.1, 1.0)
    b10 = bo.beta_schedule(10, 7, 0.1, 1.0)
    betas = [bo.beta_schedule(t, 7, 0.1, 1.0) for t in range(1, 1001)]
    ok = (abs(b1 - BETA_T1_D7) <= 1e-5
          and abs(b10 - BETA_T10_D7) <= 1e-4
          and all(b2 >= b1_ for b1_, b2 in zip(betas, betas[1:])))
    announce(2, ok, f"beta(1)={b1:.7f} beta(10)={b10:.7f}, monotone over t=1..1000")
    assert ok


def test_criterion_3_gp_against_dense_oracle():
    worst = 0.0
    var_ok = True
    for seed in range(20):
        rng = np.random.default_rng(1000 + seed)
        n = int(rng.integers(3, 21))
        x = rng.uniform(size=(n, 7))
        y = np.sin(3 * x[:, 0]) + x[:, 1] ** 2 + 0.3 * rng.normal(size=n)
        model = gp.fit(x, y, seed=seed)
        q = rng.uniform(size=(25, 7))
        mean, std = gp.posterior(model, q)
        omean, ostd = dense_posterior_oracle(model, q)
        worst = max(worst, float(np.max(np.abs(mean - omean))), float(np.max(np.abs(std - ostd))))
        prior_var = (model.y_scale ** 2) * model.params.signal_variance
        var_ok &= bool(np.all(std ** 2 <= prior_var + 1e-9))
    ok = worst <= 1e-8 and var_ok
    announce(3, ok, f"max |posterior - dense oracle| = {worst:.2e}; variance bound {'held' if var_ok else 'VIOLATED'}")
    assert ok


def test_criterion_4_bo_competence_on_sphere():
    def sphere(x):
        return float(np.sum((np.asarray(x) - 0.3) ** 2))

    t0 = time.perf_counter()
    finals = []
    monotone = True
    for seed in range(10):
        cfg = bo.BoConfig(bounds=((0.0, 1.0),) * 7, budget=100, seed=seed)
        trace = bo.optimize(sphere, cfg)
        finals.append(trace.best_drag)
        bests = [r.best for r in trace.records]
        monotone &= all(b2 <= b1 for b1, b2 in zip(bests, bests[1:]))
    elapsed = time.perf_counter() - t0
    hits = sum(f <= 0.01 for f in finals)
    ok = hits >= 8 and monotone and elapsed < 120.0
    announce(4, ok, f"{hits}/10 seeds reached <= 0.01 (best {min(finals):.2e}), "
                    f"monotone={monotone}, {elapsed:.1f}s")
    assert ok


def test_criterion_5_geometry():
    sub = Subchecks(5)
    cylinder = HullProfile.from_knots([(0.0, 0.1), (1.0, 0.1)])
    sub.check(abs(wetted_area(cylinder) - 0.628319) <= 1e-6, "cylinder wetted area 0.628319 +- 1e-6")
    sub.check(abs(volume(cylinder) - 0.0314159) <= 1e-6, "cylinder volume 0.0314159 +- 1e-6")

    rng = np.random.default_rng(5005)
    lohi = np.array(design_bounds())
    tips_ok = True
    for _ in range(1000):
        d = DesignVector.from_array(rng.uniform(lohi[:, 0], lohi[:, 1]))
        p = build_profile(d)
        tips_ok &= (p.radius_at(0.0) == 0.0 and abs(p.radius_at(1.0)) < 1e-12
                    and abs(p.radius_at(d.nose_length) - 0.1) < 1e-12)
    sub.check(tips_ok, "r(0)=r(1)=0 and r(nose)=0.1 on 1000 random designs")

    edges = Counter()
    data = export_stl(build_profile(DesignVector((0.08, 0.12, 0.18, 0.16, 0.1, 0.04), 0.45)), 32, 20)
    count = struct.unpack("<I", data[80:84])[0]
    off = 84
    for _ in range(count):
        vals = struct.unpack("<12fH", data[off:off + 50])
        vs = [tuple(vals[3 + 3 * i:6 + 3 * i]) for i in range(3)]
        for a, b in ((0, 1), (1, 2), (2, 0)):
            edges[(vs[a], vs[b])] += 1
        off += 50
    sub.check(all(c == 1 and edges[(b, a)] == 1 for (a, b), c in edges.items()),
              "STL watertight: every directed edge once, reverse once")
    sub.conclude()


def test_criterion_6_drag_oracle_properties():
    sub = Subchecks(6)
    rng = np.random.default_rng(606)
    lohi = np.array(design_bounds())

    mono_ok = True
    nonneg_ok = True
    for _ in range(50):
        d = DesignVector.from_array(rng.uniform(lohi[:, 0], lohi[:, 1]))
        by_u = [evaluate_drag(d, Scenario(u, 20.0)) for u in (1.0, 2.5, 5.0, 7.5, 10.0)]
        by_i = [evaluate_drag(d, Scenario(5.0, i)) for i in (0.1, 2.0, 5.0, 10.0, 20.0)]
        for b in by_u + by_i:
            nonneg_ok &= min(b.friction, b.form, b.separation) >= 0.0
        mono_ok &= all(b2.total > b1.total for b1, b2 in zip(by_u, by_u[1:]))
        mono_ok &= all(b2.total >= b1.total - 1e-12 for b1, b2 in zip(by_i, by_i[1:]))
    sub.check(nonneg_ok, "all breakdown components non-negative (50 random designs)")
    sub.check(mono_ok, "strict monotonicity in U, monotonicity in intensity (50 random designs)")

    # faithful reading: unrestricted random designs/scenarios. Known red:
    # short-nose separation walls are under-resolved at 200 stations.
    worst = 0.0
    violations = 0
    for _ in range(100):
        d = DesignVector.from_array(rng.uniform(lohi[:, 0], lohi[:, 1]))
        s = Scenario(float(rng.uniform(1.0, 10.0)), float(rng.uniform(0.1, 20.0)))
        coarse = evaluate_drag(d, s, n_stations=200).total
        fine = evaluate_drag(d, s, n_stations=2000).total
        rel = abs(coarse - fine) / fine
        worst = max(worst, rel)
        violations += rel >= 0.01
    sub.check(violations == 0,
              f"N-refinement < 1% on 100 random designs (violations={violations}, worst={worst:.1%})")

    fixture = json.loads((Path(__file__).parent / "data" / "coupling_witness.json").read_text())
    a = DesignVector.from_dict(fixture["design_a"])
    b = DesignVector.from_dict(fixture["design_b"])
    s_low = Scenario(**fixture["scenario_low"])
    s_high = Scenario(**fixture["scenario_high"])
    flip = (evaluate_drag(a, s_low).total < evaluate_drag(b, s_low).total
            and evaluate_drag(a, s_high).total > evaluate_drag(b, s_high).total)
    sub.check(flip, "stored witness pair reproduces its drag ordering flip")
    sub.conclude()


@pytest.fixture(scope="module")
def full_campaign(tmp_path_factory):
    root = tmp_path_factory.mktemp("acceptance")
    cfg = camp.CampaignConfig(out_dir=root / "primary", budget=100, base_seed=0, parallel=4)
    t0 = time.perf_counter()
    result = camp.run_campaign(cfg)
    elapsed = time.perf_counter() - t0
    return root, result, elapsed


def tree_bytes(root: Path) -> dict:
    return {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_criterion_7_campaign_reproduction(full_campaign):
    root, result, elapsed = full_campaign
    sub = Subchecks(7)
    sub.check(elapsed < 600.0, f"25-scenario budget-100 campaign in {elapsed:.0f}s (< 600s)")
    sub.check(all(len(s.trace.records) == 100 for s in result.scenarios), "25 traces of length 100")

    matrix = camp.cross_evaluate(result)
    diag_ok = all(abs(matrix.values[i, i] - result.scenarios[i].best_drag) <= 1e-9 for i in range(25))
    sub.check(diag_ok, "cross-eval diagonal equals campaign optima within 1e-9")

    rerun_cfg = camp.CampaignConfig(out_dir=root / "rerun", budget=100, base_seed=0, parallel=2)
    camp.run_campaign(rerun_cfg)
    sub.check(tree_bytes(root / "primary") == tree_bytes(root / "rerun"),
              "rerun with the same seed is byte-identical (across worker counts)")

    summary = camp.report(result, matrix, root / "primary" / "report")
    # known red at base_seed 0: budget-100 optima are optimizer noise on this
    # landscape, so the D1/D2 comparison collapses to seed luck (see notes);
    # the physical mechanism is covered by criterion 6's witness pair.
    sub.check(summary["d2_wins"] > 12,
              f"rough/fast optimum beats quiet/slow in > 12 shared scenarios (got {summary['d2_wins']}/23)")
    sub.conclude()


def test_run_campaign_reference_design_example(full_campaign):
    # spec-level example for the campaign runner, kept faithful (known red in
    # the low-intensity column at this budget/seed; same root cause as above)
    _, result, _ = full_campaign
    n = result.metadata["n_stations"]
    failures = []
    for s in result.scenarios:
        ref = evaluate_drag(camp.REFERENCE_DESIGN, s.scenario, result.fluid, n).total
        if not s.best_drag <= ref:
            failures.append((s.index, s.scenario.label(), s.best_drag, ref))
    announce("7-example", not failures,
             f"per-scenario optimum <= reference-design drag; exceptions: {failures or 'none'}")
    assert not failures


def test_criterion_8_case_emission_and_force_parsing(tmp_path):
    sub = Subchecks(8)
    golden = Path(__file__).parent / "golden" / "foamcase"
    profile = build_profile(DesignVector((0.1,) * 6, 0.4))
    golden_ok = True
    for index, scenario in enumerate(camp.scenario_matrix()):
        ic = turbulence_ic(scenario.velocity, scenario.turbulence_intensity)
        case = write_case(tmp_path / f"c{index}", profile, scenario, WATER, ic, stl_resolution=(8, 4))
        for field in ("k", "omega"):
            emitted = (case / "0" / field).read_text()
            golden_ok &= emitted == (golden / f"scenario_{index:02d}_{field}").read_text()
    sub.check(golden_ok, "0/k and 0/omega byte-equal to goldens for all 25 scenarios")

    rough = (tmp_path / "c24" / "0" / "k").read_text()
    sub.check("uniform 6;" in rough, "'uniform 6;' present for (10 m/s, 20%)")

    const = parse_force_log("# h\n" + "".join(f"{t} 3.5 0 0\n" for t in range(10)))
    steps = parse_force_log("".join(f"{t} {v} 0 0\n" for t, v in enumerate([10] * 4 + [2] * 6)))
    sub.check(const.final_drag == pytest.approx(3.5), "constant force series averages to 3.5")
    sub.check(steps.final_drag == pytest.approx(2.0), "trailing-20% mean of step series is 2.0")
    try:
        parse_force_log("# only comments\n")
        empty_ok = False
    except ValueError:
        empty_ok = True
    sub.check(empty_ok, "comment-only log raises")
    sub.conclude()
