#!/usr/bin/env python3
"""Regenerate the golden 0/k and 0/omega files for the 25 study scenarios.

Each emitted value is cross-checked against a high-precision (mpmath)
evaluation of k = 3/2 (U I)^2 and omega = sqrt(k) / (l C_mu^(1/4)) before the
golden is written, so the byte-pin never certifies a wrong number.
"""

import tempfile
from pathlib import Path

import mpmath as mp

from hullopt.campaign import scenario_matrix
from hullopt.drag import WATER
from hullopt.foamcase import C_MU, DEFAULT_LENGTH_SCALE, turbulence_ic, write_case
from hullopt.geometry import DesignVector, build_profile

mp.mp.dps = 40
GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden" / "foamcase"


def reference_ic(velocity, intensity_pct):
    i = mp.mpf(str(intensity_pct)) / 100
    k = mp.mpf("1.5") * (mp.mpf(str(velocity)) * i) ** 2
    omega = mp.sqrt(k) / (mp.mpf(str(DEFAULT_LENGTH_SCALE)) * mp.mpf(str(C_MU)) ** mp.mpf("0.25"))
    return k, omega


def main() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    profile = build_profile(DesignVector((0.1,) * 6, 0.4))
    for index, scenario in enumerate(scenario_matrix()):
        ic = turbulence_ic(scenario.velocity, scenario.turbulence_intensity)
        k_ref, omega_ref = reference_ic(scenario.velocity, scenario.turbulence_intensity)
        assert abs(ic.k - float(k_ref)) <= 1e-12 * float(k_ref), (index, ic.k, k_ref)
        assert abs(ic.omega - float(omega_ref)) <= 1e-12 * float(omega_ref), (index, ic.omega, omega_ref)
        with tempfile.TemporaryDirectory() as tmp:
            case = write_case(tmp, profile, scenario, WATER, ic, stl_resolution=(8, 4))
            for field in ("k", "omega"):
                text = (case / "0" / field).read_text()
                (GOLDEN / f"scenario_{index:02d}_{field}").write_text(text)
    print(f"wrote {2 * (index + 1)} goldens to {GOLDEN}")


if __name__ == "__main__":
    main()
