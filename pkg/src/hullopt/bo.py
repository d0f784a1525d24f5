"""Sequential Bayesian optimization with a lower-confidence-bound rule.

The confidence width follows the schedule that makes cumulative regret vanish
asymptotically for GP bandits; the acquisition is minimized over random
candidates refined by a coordinate pattern search. Runs are fully determined
by (seed, objective, config).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from hullopt import gp

FAILURE_DRAG = 1e9   # sentinel for failed evaluations; excluded from GP data
_N_CANDIDATES = 2048


@dataclass
class BoConfig:
    bounds: tuple[tuple[float, float], ...]
    budget: int = 100
    n_init: int = 10      # Latin-hypercube seed points, included in the budget
    delta: float = 0.1
    v: float = 1.0
    seed: int = 0
    # model the objective in log space (objective must be positive); traces
    # and incumbents stay in raw units. Helps the surrogate when values span
    # orders of magnitude, e.g. penalty-dominated drag landscapes.
    log_model: bool = False

    def __post_init__(self):
        self.bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if self.n_init < 2:
            raise ValueError("n_init must be >= 2")
        if not (self.n_init < self.budget):
            raise ValueError("budget must exceed n_init")
        if not (0 < self.delta < 1):
            raise ValueError("delta must be in (0, 1)")
        if any(lo >= hi for lo, hi in self.bounds):
            raise ValueError("each bound must satisfy lo < hi")


@dataclass
class TraceRecord:
    t: int
    x: tuple[float, ...]
    drag: float
    best: float
    beta: float
    acq: float | None    # None for the initial design points

    def to_json(self) -> str:
        return json.dumps({"t": self.t, "x": list(self.x), "drag": self.drag,
                           "best": self.best, "beta": self.beta, "acq": self.acq})

    @classmethod
    def from_json(cls, line: str) -> "TraceRecord":
        d = json.loads(line)
        return cls(d["t"], tuple(d["x"]), d["drag"], d["best"], d["beta"], d["acq"])


@dataclass
class Trace:
    records: list[TraceRecord] = field(default_factory=list)

    @property
    def best_drag(self) -> float:
        return self.records[-1].best

    @property
    def best_design(self) -> np.ndarray:
        best = min(self.records, key=lambda r: r.drag)
        return np.array(best.x)

    def to_jsonl(self) -> str:
        return "".join(r.to_json() + "\n" for r in self.records)

    @classmethod
    def from_jsonl(cls, text: str) -> "Trace":
        return cls([TraceRecord.from_json(line) for line in text.splitlines() if line.strip()])


def beta_schedule(t: int, d: int, delta: float = 0.1, v: float = 1.0) -> float:
    """Confidence multiplier at iteration t for a d-dimensional search."""
    if t < 1 or d < 1:
        raise ValueError("t and d must be >= 1")
    if not (0 < delta < 1):
        raise ValueError("delta must be in (0, 1)")
    if not (v > 0):
        raise ValueError("v must be positive")
    tau = 2.0 * math.log(t ** (d / 2.0 + 2.0) * math.pi ** 2 / (3.0 * delta))
    return math.sqrt(v * max(tau, 0.0))


def lcb(mean, std, beta):
    """Acquisition value; lower is more promising (drag is minimized)."""
    return mean - beta * std


def latin_hypercube(n: int, bounds, rng: np.random.Generator) -> np.ndarray:
    """n stratified samples over the box, one stratum per sample and dimension."""
    d = len(bounds)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    strata = rng.permuted(np.tile(np.arange(n), (d, 1)), axis=1).T
    u = (strata + rng.uniform(size=(n, d))) / n
    return lo + u * (hi - lo)


def propose_next(model: gp.GpModel, bounds, beta: float, rng: np.random.Generator) -> np.ndarray:
    """Approximate argmin of the LCB over the box.

    Random candidates (plus a perturbed incumbent) seed a coordinate pattern
    search with a shrinking step; result is deterministic given the rng state.
    """
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    span = hi - lo

    cands = rng.uniform(lo, hi, size=(_N_CANDIDATES, len(bounds)))
    incumbent = lo + model.x_train[int(np.argmin(model.y_train))] * span
    perturbed = np.clip(incumbent + rng.normal(size=len(bounds)) * 0.05 * span, lo, hi)
    cands = np.vstack([cands, perturbed])

    mean, std = gp.posterior(model, cands)
    acq = lcb(mean, std, beta)
    best = cands[int(np.argmin(acq))].copy()
    best_val = float(np.min(acq))

    step = 0.05
    while step >= 1e-4:
        probes = np.repeat(best[None, :], 2 * len(bounds), axis=0)
        for i in range(len(bounds)):
            probes[2 * i, i] = min(best[i] + step * span[i], hi[i])
            probes[2 * i + 1, i] = max(best[i] - step * span[i], lo[i])
        mean, std = gp.posterior(model, probes)
        vals = lcb(mean, std, beta)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best, best_val = probes[k].copy(), float(vals[k])
        else:
            step *= 0.5
    return best


def _safe_eval(objective, x: np.ndarray) -> float:
    """Designated failures (ValueError / non-finite) become the sentinel;
    anything else propagates and aborts the run."""
    try:
        drag = float(objective(x))
    except (ValueError, ArithmeticError):
        return FAILURE_DRAG
    return drag if math.isfinite(drag) else FAILURE_DRAG


def optimize(objective, cfg: BoConfig) -> Trace:
    """Run the full sequential loop: seeded initial design, then fit/propose/
    evaluate until the budget is spent. Failed evaluations are recorded with
    the sentinel drag and left out of the surrogate's training data."""
    rng = np.random.default_rng(cfg.seed)
    d = len(cfg.bounds)
    trace = Trace()
    xs: list[np.ndarray] = []
    ys: list[float] = []
    best = math.inf

    for t, x in enumerate(latin_hypercube(cfg.n_init, cfg.bounds, rng), start=1):
        drag = _safe_eval(objective, x)
        xs.append(x)
        ys.append(drag)
        best = min(best, drag)
        trace.records.append(TraceRecord(t, tuple(x), drag, best,
                                         beta_schedule(t, d, cfg.delta, cfg.v), None))
    if all(y >= FAILURE_DRAG for y in ys):
        raise RuntimeError(f"all {cfg.n_init} initial evaluations failed; check the objective")

    span = np.array([hi - lo for lo, hi in cfg.bounds])
    lo = np.array([b[0] for b in cfg.bounds])
    for t in range(cfg.n_init + 1, cfg.budget + 1):
        keep = [i for i, y in enumerate(ys) if y < FAILURE_DRAG]
        if cfg.log_model:
            keep = [i for i in keep if ys[i] > 0]
            if not keep:
                raise RuntimeError("log_model requires positive objective values; none seen")
        y_model = np.log([ys[i] for i in keep]) if cfg.log_model else np.array([ys[i] for i in keep])
        model = gp.fit(np.array([xs[i] for i in keep]), y_model,
                       bounds=cfg.bounds, optimize_hyperparams=True, seed=cfg.seed)
        beta = beta_schedule(t, d, cfg.delta, cfg.v)
        x = propose_next(model, cfg.bounds, beta, rng)
        while any(np.max(np.abs((x - xi) / span)) < gp.DUPLICATE_TOL for xi in xs):
            x = rng.uniform(lo, lo + span)   # rare: proposal landed on a known point
        mean, std = gp.posterior(model, x)
        acq = float(lcb(mean, std, beta))   # in model space when log_model is set
        drag = _safe_eval(objective, x)
        xs.append(x)
        ys.append(drag)
        best = min(best, drag)
        trace.records.append(TraceRecord(t, tuple(x), drag, best, beta, acq))
    return trace


def regret(trace: Trace, f_star: float) -> tuple[float, float]:
    """(simple, cumulative) regret against a known optimum; both nonnegative
    for minimization."""
    simple = trace.best_drag - f_star
    cumulative = sum(r.drag - f_star for r in trace.records)
    return simple, cumulative
