"""Drag-minimal hull search workbench: geometry, surrogate drag model,
GP-based Bayesian optimization, and the velocity x turbulence scenario study."""

from hullopt.geometry import DesignVector, HullProfile, build_profile, design_bounds
from hullopt.drag import DragBreakdown, FluidProps, Scenario, evaluate_drag
from hullopt.gp import GpModel, KernelParams, fit, posterior
from hullopt.bo import BoConfig, Trace, optimize
from hullopt.foamcase import TurbulenceIC, turbulence_ic, write_case, parse_force_log
from hullopt.campaign import scenario_matrix, run_campaign, cross_evaluate

__version__ = "0.1.0"

__all__ = [
    "DesignVector", "HullProfile", "build_profile", "design_bounds",
    "DragBreakdown", "FluidProps", "Scenario", "evaluate_drag",
    "GpModel", "KernelParams", "fit", "posterior",
    "BoConfig", "Trace", "optimize",
    "TurbulenceIC", "turbulence_ic", "write_case", "parse_force_log",
    "scenario_matrix", "run_campaign", "cross_evaluate",
    "__version__",
]
