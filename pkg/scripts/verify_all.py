"""Run every verification suite through the CLI entry point and print a
one-line summary per suite; reports go to a directory as JSON."""

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

from conifold_rh.cli import SUITES, CommandConfig, run


@dataclass
class VerifyAllConfig:
    outdir: str = "verify_reports"
    v: complex = 0.2 + 0.5j
    w: complex = 1.0
    jobs: int = 1
    variant: str = "corrected"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--outdir", default=VerifyAllConfig.outdir)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--variant", choices=("printed", "corrected"), default="corrected")
    a = ap.parse_args()
    cfg = VerifyAllConfig(a.outdir, jobs=a.jobs, variant=a.variant)
    os.makedirs(cfg.outdir, exist_ok=True)
    worst = 0
    for suite in SUITES:
        path = os.path.join(cfg.outdir, f"{suite}.json")
        t0 = time.perf_counter()
        code = run(CommandConfig("verify", {"suite": suite, "v": cfg.v, "w": cfg.w,
                                            "jobs": cfg.jobs, "variant": cfg.variant}, output=path))
        dt = time.perf_counter() - t0
        rep = json.load(open(path)) if code in (0, 1) else {}
        print(f"{suite:18s} exit {code}  max residual {rep.get('max_residual')!s:>24}  "
              f"samples {rep.get('samples', '-'):>4}  {dt:6.1f}s")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
