"""Axisymmetric hull geometry: design variables, radius profile, derived quantities.

A hull is a 1 m body of revolution whose maximum diameter is pinned at 0.2 m
(fineness ratio 5) at the nose/tail junction. Six control diameters plus the
nose length fully determine the radius curve r(x), interpolated with a
shape-preserving monotone cubic Hermite spline so the radius never overshoots
the control values.
"""

from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass

import numpy as np

HULL_LENGTH = 1.0
MAX_RADIUS = 0.1  # fineness ratio 5 on a 1 m hull -> max diameter 0.2 m
N_CONTROLS = 6
DIAMETER_BOUNDS = (0.0, 0.2)
NOSE_BOUNDS = (0.01, 0.90)
# Control knots sit at quarter fractions of the nose run and of the tail run.
CONTROL_FRACTIONS = (0.25, 0.5, 0.75)

STL_HEADER_TEXT = b"hullopt body-of-revolution surface"


def design_bounds() -> list[tuple[float, float]]:
    """(lo, hi) per optimization variable: six diameters, then nose length."""
    return [DIAMETER_BOUNDS] * N_CONTROLS + [NOSE_BOUNDS]


@dataclass(frozen=True)
class DesignVector:
    """The seven free variables of a hull: control diameters (m) and nose length (m).

    Tail length is derived as ``HULL_LENGTH - nose_length`` and never stored.
    Construction does not enforce bounds; use :func:`validate_design`.
    """

    control_diameters: tuple[float, ...]
    nose_length: float

    def __post_init__(self):
        diameters = tuple(float(d) for d in self.control_diameters)
        if len(diameters) != N_CONTROLS:
            raise ValueError(f"expected {N_CONTROLS} control diameters, got {len(diameters)}")
        object.__setattr__(self, "control_diameters", diameters)
        object.__setattr__(self, "nose_length", float(self.nose_length))

    def as_array(self) -> np.ndarray:
        return np.array(self.control_diameters + (self.nose_length,))

    @classmethod
    def from_array(cls, x) -> "DesignVector":
        x = np.asarray(x, dtype=float)
        if x.shape != (N_CONTROLS + 1,):
            raise ValueError(f"expected {N_CONTROLS + 1} values, got shape {x.shape}")
        return cls(tuple(x[:N_CONTROLS]), x[N_CONTROLS])

    def to_dict(self) -> dict:
        return {"control_diameters": list(self.control_diameters), "nose_length": self.nose_length}

    @classmethod
    def from_dict(cls, d: dict) -> "DesignVector":
        return cls(tuple(d["control_diameters"]), d["nose_length"])


@dataclass(frozen=True)
class BoundViolation:
    """One out-of-range component: index 0-5 are diameters, 6 is nose_length."""

    index: int
    value: float
    bound: tuple[float, float]

    def __str__(self):
        name = f"control_diameters[{self.index}]" if self.index < N_CONTROLS else "nose_length"
        return f"{name}={self.value:g} outside [{self.bound[0]:g}, {self.bound[1]:g}]"


def validate_design(design: DesignVector) -> list[BoundViolation]:
    """Check every bound; returns an empty list iff the design is valid."""
    violations = []
    for i, d in enumerate(design.control_diameters):
        if not (DIAMETER_BOUNDS[0] <= d <= DIAMETER_BOUNDS[1]) or not np.isfinite(d):
            violations.append(BoundViolation(i, d, DIAMETER_BOUNDS))
    nl = design.nose_length
    if not (NOSE_BOUNDS[0] <= nl <= NOSE_BOUNDS[1]) or not np.isfinite(nl):
        violations.append(BoundViolation(N_CONTROLS, nl, NOSE_BOUNDS))
    return violations


def _monotone_slopes(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Fritsch-Carlson knot slopes: the resulting Hermite spline is monotone
    on every interval, so values never leave [min(y_k, y_k+1), max(...)]."""
    n = len(x)
    h = np.diff(x)
    delta = np.diff(y) / h
    m = np.empty(n)
    m[0] = delta[0]
    m[-1] = delta[-1]
    for i in range(1, n - 1):
        m[i] = 0.0 if delta[i - 1] * delta[i] <= 0 else 0.5 * (delta[i - 1] + delta[i])
    for i in range(n - 1):
        if delta[i] == 0.0:
            m[i] = 0.0
            m[i + 1] = 0.0
            continue
        a = m[i] / delta[i]
        b = m[i + 1] / delta[i]
        s = math.hypot(a, b)
        if s > 3.0:
            m[i] = (3.0 / s) * a * delta[i]
            m[i + 1] = (3.0 / s) * b * delta[i]
    return m


@dataclass(frozen=True, eq=False)
class HullProfile:
    """Radius curve r(x) of a body of revolution, piecewise cubic Hermite.

    Immutable after construction; evaluation is pure, so profiles are safe to
    share across workers.
    """

    knots_x: np.ndarray
    knots_r: np.ndarray
    slopes: np.ndarray
    nose_length: float | None = None
    hull_length: float = HULL_LENGTH

    @classmethod
    def from_knots(cls, knots, nose_length=None, hull_length=HULL_LENGTH) -> "HullProfile":
        """Build a profile through arbitrary (x, r) knots (used directly only
        by synthetic test shapes; hull designs go through build_profile)."""
        knots = sorted((float(x), float(r)) for x, r in knots)
        xs = np.array([k[0] for k in knots])
        rs = np.array([k[1] for k in knots])
        if len(xs) < 2:
            raise ValueError("need at least two knots")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("knot stations must be strictly increasing")
        return cls(xs, rs, _monotone_slopes(xs, rs), nose_length, hull_length)

    def _segments(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.knots_x[0]) or np.any(x > self.knots_x[-1]):
            raise ValueError(f"x outside [{self.knots_x[0]:g}, {self.knots_x[-1]:g}]")
        idx = np.clip(np.searchsorted(self.knots_x, x, side="right") - 1, 0, len(self.knots_x) - 2)
        h = self.knots_x[idx + 1] - self.knots_x[idx]
        t = (x - self.knots_x[idx]) / h
        return idx, h, t

    def radius_at(self, x):
        """Radius r(x), vectorized; raises on x outside the hull."""
        scalar = np.isscalar(x)
        idx, h, t = self._segments(x)
        y0, y1 = self.knots_r[idx], self.knots_r[idx + 1]
        m0, m1 = self.slopes[idx], self.slopes[idx + 1]
        t2 = t * t
        t3 = t2 * t
        r = (y0 * (2 * t3 - 3 * t2 + 1) + h * m0 * (t3 - 2 * t2 + t)
             + y1 * (-2 * t3 + 3 * t2) + h * m1 * (t3 - t2))
        return float(r) if scalar else r

    def slope_at(self, x):
        """dr/dx, continuous across knots."""
        scalar = np.isscalar(x)
        idx, h, t = self._segments(x)
        y0, y1 = self.knots_r[idx], self.knots_r[idx + 1]
        m0, m1 = self.slopes[idx], self.slopes[idx + 1]
        t2 = t * t
        s = (y0 * (6 * t2 - 6 * t) / h + m0 * (3 * t2 - 4 * t + 1)
             + y1 * (-6 * t2 + 6 * t) / h + m1 * (3 * t2 - 2 * t))
        return float(s) if scalar else s

    def max_radius(self) -> float:
        # monotone interpolation cannot overshoot, so knots carry the extremes
        return float(np.max(self.knots_r))


def build_profile(design: DesignVector) -> HullProfile:
    """Turn a valid design into its radius profile.

    Knots: tips at r=0, the nose/tail junction forced to r=0.1 (max diameter
    0.2), and the six control radii at quarter fractions of each run.
    """
    violations = validate_design(design)
    if violations:
        raise ValueError("invalid design: " + "; ".join(str(v) for v in violations))
    nose = design.nose_length
    tail = HULL_LENGTH - nose
    radii = [min(max(d / 2.0, 0.0), MAX_RADIUS) for d in design.control_diameters]
    knots = [(0.0, 0.0)]
    knots += [(f * nose, radii[i]) for i, f in enumerate(CONTROL_FRACTIONS)]
    knots += [(nose, MAX_RADIUS)]
    knots += [(nose + f * tail, radii[3 + i]) for i, f in enumerate(CONTROL_FRACTIONS)]
    knots += [(HULL_LENGTH, 0.0)]
    return HullProfile.from_knots(knots, nose_length=nose)


def _midpoints(profile: HullProfile, n: int):
    length = profile.hull_length
    x = (np.arange(n) + 0.5) * (length / n)
    return x, length / n


def wetted_area(profile: HullProfile, n: int = 200) -> float:
    """Lateral surface area of the body of revolution, midpoint rule."""
    x, dx = _midpoints(profile, n)
    r = profile.radius_at(x)
    s = profile.slope_at(x)
    return float(np.sum(2.0 * np.pi * r * np.sqrt(1.0 + s * s)) * dx)


def volume(profile: HullProfile, n: int = 200) -> float:
    """Enclosed volume, midpoint rule."""
    x, dx = _midpoints(profile, n)
    r = profile.radius_at(x)
    return float(np.sum(np.pi * r * r) * dx)


def export_stl(profile: HullProfile, n_axial: int, n_circ: int) -> bytes:
    """Closed binary-STL surface of revolution about the x axis.

    ``n_axial`` counts axial segments (stations = n_axial + 1); the first and
    last segments are triangle fans meeting apex points on the axis, interior
    segments are quad bands split into two triangles each.
    """
    if n_axial < 2:
        raise ValueError("n_axial must be >= 2")
    if n_circ < 3:
        raise ValueError("n_circ must be >= 3")
    xs = np.linspace(0.0, profile.hull_length, n_axial + 1)
    rs = profile.radius_at(xs)
    theta = 2.0 * np.pi * np.arange(n_circ) / n_circ
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    # rings for interior stations only; tips collapse to apex points
    rings = {}
    for j in range(1, n_axial):
        rings[j] = np.column_stack([np.full(n_circ, xs[j]), rs[j] * cos_t, rs[j] * sin_t])
    apex_nose = np.array([xs[0], 0.0, 0.0])
    apex_tail = np.array([xs[-1], 0.0, 0.0])

    tris = []
    nxt = lambda k: (k + 1) % n_circ
    for k in range(n_circ):
        # nose fan: outward normal faces away from the axis / upstream
        tris.append((apex_nose, rings[1][nxt(k)], rings[1][k]))
    for j in range(1, n_axial - 1):
        a, b = rings[j], rings[j + 1]
        for k in range(n_circ):
            tris.append((a[k], a[nxt(k)], b[nxt(k)]))
            tris.append((a[k], b[nxt(k)], b[k]))
    for k in range(n_circ):
        tris.append((apex_tail, rings[n_axial - 1][k], rings[n_axial - 1][nxt(k)]))

    buf = io.BytesIO()
    buf.write(STL_HEADER_TEXT.ljust(80, b" "))
    buf.write(struct.pack("<I", len(tris)))
    for v1, v2, v3 in tris:
        n = np.cross(v2 - v1, v3 - v1)
        norm = np.linalg.norm(n)
        n = n / norm if norm > 0 else n
        buf.write(struct.pack("<12fH", *n, *v1, *v2, *v3, 0))
    return buf.getvalue()


def export_profile_csv(profile: HullProfile, n: int) -> str:
    """``x,r`` table of n uniform samples, 9 significant digits."""
    if n < 2:
        raise ValueError("need at least two samples")
    xs = np.linspace(0.0, profile.hull_length, n)
    rs = profile.radius_at(xs)
    lines = ["x,r"]
    lines += [f"{x:.9g},{r:.9g}" for x, r in zip(xs, rs)]
    return "\n".join(lines) + "\n"
