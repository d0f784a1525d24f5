"""OpenFOAM-style case emission and force-log parsing.

Computes the inlet turbulence initial conditions from velocity and intensity,
writes a ready-to-mesh case tree (dictionaries plus the hull STL), and parses
a solver's force output back into a drag number. Never launches a solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from hullopt.drag import FluidProps, Scenario
from hullopt.geometry import HullProfile, export_stl

C_MU = 0.09
DEFAULT_LENGTH_SCALE = 0.07   # 7% of the 1 m hull length
STL_RESOLUTION = (120, 64)


@dataclass(frozen=True)
class TurbulenceIC:
    """Inlet turbulent kinetic energy k (m^2/s^2) and specific dissipation
    rate omega (1/s), with the length scale and model constant that fixed them."""

    k: float
    omega: float
    length_scale: float
    c_mu: float = C_MU

    def __post_init__(self):
        if self.k <= 0 or self.omega <= 0 or self.length_scale <= 0:
            raise ValueError("k, omega and length_scale must be positive")


def turbulence_ic(velocity: float, intensity_pct: float,
                  length_scale: float = DEFAULT_LENGTH_SCALE, c_mu: float = C_MU) -> TurbulenceIC:
    """k = 3/2 (U I)^2 and omega = sqrt(k) / (l * C_mu^(1/4))."""
    if velocity <= 0 or intensity_pct <= 0 or length_scale <= 0 or c_mu <= 0:
        raise ValueError("velocity, intensity, length scale and C_mu must be positive")
    intensity = intensity_pct / 100.0
    k = 1.5 * (velocity * intensity) ** 2
    omega = math.sqrt(k) / (length_scale * c_mu ** 0.25)
    return TurbulenceIC(k, omega, length_scale, c_mu)


def _g9(value: float) -> str:
    """9 significant digits, trailing zeros trimmed (6.0 -> '6')."""
    return f"{value:.9g}"


def _foam_file(cls: str, obj: str, body: str) -> str:
    return (
        "FoamFile\n"
        "{\n"
        "    version     2.0;\n"
        "    format      ascii;\n"
        f"    class       {cls};\n"
        f"    object      {obj};\n"
        "}\n"
        "\n"
        f"{body}"
    )


def _field_file(cls: str, obj: str, dimensions: str, internal: str, boundary: str) -> str:
    body = (
        f"dimensions      {dimensions};\n"
        "\n"
        f"internalField   uniform {internal};\n"
        "\n"
        "boundaryField\n"
        "{\n"
        f"{boundary}"
        "}\n"
    )
    return _foam_file(cls, obj, body)


def _case_files(scenario: Scenario, fluid: FluidProps, ic: TurbulenceIC) -> dict[str, str]:
    u = _g9(scenario.velocity)
    k = _g9(ic.k)
    omega = _g9(ic.omega)
    nu = _g9(fluid.kinematic_viscosity)
    rho = _g9(fluid.density)

    u_boundary = (
        f"    inlet     {{ type fixedValue; value uniform ({u} 0 0); }}\n"
        "    outlet    { type zeroGradient; }\n"
        "    hull      { type noSlip; }\n"
        "    farfield  { type slip; }\n"
    )
    k_boundary = (
        f"    inlet     {{ type fixedValue; value uniform {k}; }}\n"
        "    outlet    { type zeroGradient; }\n"
        f"    hull      {{ type kqRWallFunction; value uniform {k}; }}\n"
        "    farfield  { type slip; }\n"
    )
    omega_boundary = (
        f"    inlet     {{ type fixedValue; value uniform {omega}; }}\n"
        "    outlet    { type zeroGradient; }\n"
        f"    hull      {{ type omegaWallFunction; value uniform {omega}; }}\n"
        "    farfield  { type slip; }\n"
    )

    control_dict = _foam_file("dictionary", "controlDict", (
        "application     simpleFoam;\n"
        "startFrom       startTime;\n"
        "startTime       0;\n"
        "stopAt          endTime;\n"
        "// endTime / write controls are solver-setup dependent; set before running\n"
        "endTime         1000;\n"
        "deltaT          1;\n"
        "writeControl    timeStep;\n"
        "writeInterval   100;\n"
        "\n"
        "functions\n"
        "{\n"
        "    forces\n"
        "    {\n"
        "        type            forces;\n"
        "        libs            (\"libforces.so\");\n"
        "        patches         (hull);\n"
        "        rho             rhoInf;\n"
        f"        rhoInf          {rho};\n"
        "        CofR            (0 0 0);\n"
        "        writeControl    timeStep;\n"
        "        writeInterval   1;\n"
        "    }\n"
        "}\n"
    ))
    fv_schemes = _foam_file("dictionary", "fvSchemes", (
        "// scheme choices are mesh dependent; defaults below are a starting skeleton\n"
        "ddtSchemes      { default steadyState; }\n"
        "gradSchemes     { default Gauss linear; }\n"
        "divSchemes      { default none; div(phi,U) bounded Gauss linearUpwind grad(U);\n"
        "                  div(phi,k) bounded Gauss upwind; div(phi,omega) bounded Gauss upwind;\n"
        "                  div((nuEff*dev2(T(grad(U))))) Gauss linear; }\n"
        "laplacianSchemes { default Gauss linear corrected; }\n"
        "interpolationSchemes { default linear; }\n"
        "snGradSchemes   { default corrected; }\n"
    ))
    fv_solution = _foam_file("dictionary", "fvSolution", (
        "// solver/relaxation settings are case dependent; tune before running\n"
        "solvers\n"
        "{\n"
        "    p      { solver GAMG; smoother GaussSeidel; tolerance 1e-6; relTol 0.1; }\n"
        "    \"(U|k|omega)\" { solver smoothSolver; smoother symGaussSeidel; tolerance 1e-7; relTol 0.1; }\n"
        "}\n"
        "SIMPLE { nNonOrthogonalCorrectors 0; }\n"
        "relaxationFactors { fields { p 0.3; } equations { U 0.7; \"(k|omega)\" 0.7; } }\n"
    ))
    transport = _foam_file("dictionary", "transportProperties", (
        "transportModel  Newtonian;\n"
        f"nu              nu [0 2 -1 0 0 0 0] {nu};\n"
    ))
    turbulence = _foam_file("dictionary", "turbulenceProperties", (
        "simulationType  RAS;\n"
        "RAS\n"
        "{\n"
        "    RASModel        kOmegaSST;\n"
        "    turbulence      on;\n"
        "    printCoeffs     on;\n"
        "}\n"
    ))

    return {
        "0/U": _field_file("volVectorField", "U", "[0 1 -1 0 0 0 0]", f"({u} 0 0)", u_boundary),
        "0/k": _field_file("volScalarField", "k", "[0 2 -2 0 0 0 0]", k, k_boundary),
        "0/omega": _field_file("volScalarField", "omega", "[0 0 -1 0 0 0 0]", omega, omega_boundary),
        "constant/transportProperties": transport,
        "constant/turbulenceProperties": turbulence,
        "system/controlDict": control_dict,
        "system/fvSchemes": fv_schemes,
        "system/fvSolution": fv_solution,
    }


def write_case(case_dir, profile: HullProfile, scenario: Scenario,
               fluid: FluidProps, ic: TurbulenceIC,
               stl_resolution: tuple[int, int] = STL_RESOLUTION) -> Path:
    """Emit the case tree; byte-identical for identical inputs."""
    root = Path(case_dir)
    files = _case_files(scenario, fluid, ic)
    for rel, text in files.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    stl_path = root / "constant" / "triSurface" / "hull.stl"
    stl_path.parent.mkdir(parents=True, exist_ok=True)
    stl_path.write_bytes(export_stl(profile, *stl_resolution))
    return root


@dataclass
class ForceLog:
    """Parsed force history: (time, streamwise force) samples and the
    converged average over the trailing 20% of rows."""

    samples: list[tuple[float, float]]
    final_drag: float
    malformed: list[int]   # 1-based line numbers that failed to parse


def parse_force_log(text: str) -> ForceLog:
    """Parse a force function-object table: '#' comments, then whitespace-
    separated ``time Fx Fy Fz ...`` rows (parentheses tolerated)."""
    samples = []
    malformed = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.replace("(", " ").replace(")", " ").split()
        try:
            time, fx = float(fields[0]), float(fields[1])
        except (IndexError, ValueError):
            malformed.append(lineno)
            continue
        samples.append((time, fx))
    if not samples:
        raise ValueError("force log contains no data rows")
    tail = max(1, len(samples) // 5)
    final = sum(fx for _, fx in samples[-tail:]) / tail
    return ForceLog(samples, final, malformed)
