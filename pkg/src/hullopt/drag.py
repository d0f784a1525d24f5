"""Deterministic drag estimate for axisymmetric hulls.

Boundary-layer strip integration with flat-plate friction laws, a
turbulence-intensity-driven laminar/turbulent transition point, a Hoerner-type
form factor, and a slope-based separation penalty that punishes spike/step
shapes a pressure solver would reject. Pure functions throughout; all
constants are fixed here so results are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hullopt.geometry import DesignVector, HullProfile, build_profile

# transition: critical length Reynolds number decays toward the tripped value
# as free-stream turbulence intensity grows
RE_CRIT_FLOOR = 5e5
RE_CRIT_SPAN = 4.5e6

CF_CAP = 0.05          # keeps the leading-edge singularity finite
C_SEP = 2.0            # separation penalty strength
SLOPE_LIMIT = 0.3      # |dr/dx| beyond which the penalty engages


@dataclass(frozen=True)
class Scenario:
    """One operating point: speed through the water and free-stream
    turbulence intensity (percent of mean flow velocity)."""

    velocity: float
    turbulence_intensity: float

    def __post_init__(self):
        if not (self.velocity > 0):
            raise ValueError(f"velocity must be positive, got {self.velocity!r}")
        if not (0 < self.turbulence_intensity < 100):
            raise ValueError(
                f"turbulence intensity must be in (0, 100) percent, got {self.turbulence_intensity!r}")

    def label(self) -> str:
        return f"{self.velocity:g}mps_{self.turbulence_intensity:g}pct"


@dataclass(frozen=True)
class FluidProps:
    """Fresh water at 20 C by default."""

    density: float = 998.2
    kinematic_viscosity: float = 1.004e-6

    def __post_init__(self):
        if self.density <= 0 or self.kinematic_viscosity <= 0:
            raise ValueError("fluid properties must be positive")


WATER = FluidProps()


@dataclass(frozen=True)
class DragBreakdown:
    """Drag components in Newtons; total = friction + form + separation."""

    friction: float
    form: float
    separation: float
    total: float
    transition_x: float
    reynolds_length: float

    def to_dict(self) -> dict:
        return {
            "friction_n": self.friction,
            "form_n": self.form,
            "separation_n": self.separation,
            "total_n": self.total,
            "transition_x_m": self.transition_x,
            "reynolds_length": self.reynolds_length,
        }


def reynolds(velocity: float, length: float, kinematic_viscosity: float) -> float:
    return velocity * length / kinematic_viscosity


def transition_x(velocity: float, intensity_pct: float, kinematic_viscosity: float) -> float:
    """Axial station (m) where the boundary layer trips turbulent.

    Quiet, slow flow keeps long laminar runs (clamped to the full hull);
    fast or turbulent flow trips near the nose.
    """
    re_crit = RE_CRIT_FLOOR + RE_CRIT_SPAN * math.exp(-intensity_pct)
    return min(max(re_crit * kinematic_viscosity / velocity, 0.0), 1.0)


def local_cf(re_x, regime: str):
    """Local flat-plate skin-friction coefficient, capped at CF_CAP."""
    if regime == "laminar":
        cf = 0.664 / np.sqrt(re_x)
    elif regime == "turbulent":
        cf = 0.0592 / np.power(re_x, 0.2)
    else:
        raise ValueError(f"regime must be 'laminar' or 'turbulent', got {regime!r}")
    return np.minimum(cf, CF_CAP)


def form_factor(max_diameter: float, length: float) -> float:
    """Body-of-revolution pressure-drag multiplier on flat-plate friction."""
    ratio = max_diameter / length
    return 1.5 * ratio ** 1.5 + 7.0 * ratio ** 3


def evaluate_drag(design: DesignVector, scenario: Scenario,
                  fluid: FluidProps = WATER, n_stations: int = 200) -> DragBreakdown:
    """Total drag force on the hull at the given operating point.

    Raises ValueError for out-of-bounds designs (optimizers map that to a
    failure sentinel). Deterministic and pure.
    """
    profile = build_profile(design)
    return profile_drag(profile, scenario, fluid, n_stations)


def profile_drag(profile: HullProfile, scenario: Scenario,
                 fluid: FluidProps = WATER, n_stations: int = 200) -> DragBreakdown:
    """Strip-integrated drag of an already-built profile."""
    u = scenario.velocity
    nu = fluid.kinematic_viscosity
    q = 0.5 * fluid.density * u * u
    length = profile.hull_length

    x = (np.arange(n_stations) + 0.5) * (length / n_stations)
    dx = length / n_stations
    r = profile.radius_at(x)
    drdx = profile.slope_at(x)

    x_tr = transition_x(u, scenario.turbulence_intensity, nu)
    re_x = u * x / nu
    cf = np.where(x < x_tr, local_cf(re_x, "laminar"), local_cf(re_x, "turbulent"))

    strip = 2.0 * np.pi * r * np.sqrt(1.0 + drdx * drdx) * dx
    raw_friction = float(q * np.sum(cf * strip))

    k_form = form_factor(2.0 * profile.max_radius(), length)
    form = k_form * raw_friction

    excess = np.maximum(0.0, np.abs(drdx) - SLOPE_LIMIT)
    separation = float(q * C_SEP * np.sum(excess * excess * 2.0 * np.pi * r * dx))

    total = raw_friction + form + separation
    return DragBreakdown(
        friction=raw_friction,
        form=form,
        separation=separation,
        total=total,
        transition_x=x_tr,
        reynolds_length=reynolds(u, length, nu),
    )
