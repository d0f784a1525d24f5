#!/usr/bin/env python3
"""End-to-end study driver: 25-scenario campaign, cross-evaluation, reports.

Equivalent to:
    hullopt campaign --budget 100 --seed 0 --out <dir> --parallel 4
    hullopt cross-eval --campaign <dir>
    hullopt report --campaign <dir>
"""

import argparse
import json
import sys
import time
from pathlib import Path

from hullopt import campaign as camp


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="study_out", help="campaign directory")
    parser.add_argument("--budget", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--parallel", type=int, default=4)
    args = parser.parse_args()

    t0 = time.perf_counter()
    cfg = camp.CampaignConfig(out_dir=Path(args.out), budget=args.budget,
                              base_seed=args.seed, parallel=args.parallel)
    result = camp.run_campaign(cfg)
    print(f"campaign done in {time.perf_counter() - t0:.0f}s", file=sys.stderr)

    matrix = camp.cross_evaluate(result)
    (Path(args.out) / "cross_eval.csv").write_text(matrix.to_csv())
    summary = camp.report(result, matrix, Path(args.out) / "report")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
