"""Accuracy of F near its lattice of zeros and poles, against a 40-digit
product evaluated with mpmath, and the local order at each lattice point."""

import argparse
import math
import sys
from dataclasses import dataclass

import mpmath

from conifold_rh.msine import SineArgs, eval_F


@dataclass
class NearLatticeConfig:
    w1: complex = 1.0
    w2: complex = 0.8 + 0.6j
    radius: int = 3
    offsets: tuple[float, ...] = (1e-4, 1e-8, 1e-12)


def reference(z, w1, w2, terms=400):
    with mpmath.workdps(40):
        z, w1, w2 = (mpmath.mpc(u) for u in (z, w1, w2))
        if mpmath.im(w1 / w2) <= 0:
            w1, w2 = w2, w1
        x1, x2 = mpmath.exp(2j * mpmath.pi * z / w1), mpmath.exp(2j * mpmath.pi * z / w2)
        qa, qb = mpmath.exp(-2j * mpmath.pi * w2 / w1), mpmath.exp(2j * mpmath.pi * w1 / w2)
        p = mpmath.mpf(1)
        for k in range(1, terms):
            p /= 1 - x1 * qa ** k
        for k in range(terms):
            p *= 1 - x2 * qb ** k
        return complex(p)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--radius", type=int, default=NearLatticeConfig.radius)
    cfg = NearLatticeConfig(radius=ap.parse_args().radius)
    print(f"{'a':>3} {'b':>3} {'order':>6} " + " ".join(f"rel@{d:.0e}".rjust(10) for d in cfg.offsets))
    rng = range(-cfg.radius, cfg.radius + 1)
    for a in rng:
        for b in rng:
            z0 = a * cfg.w1 + b * cfg.w2
            f = lambda z: eval_F(SineArgs(z, cfg.w1, cfg.w2)).value
            order = math.log10(abs(f(z0 + 1e-6)) / abs(f(z0 + 1e-7)))
            errs = [abs(f(z0 + d) / reference(z0 + d, cfg.w1, cfg.w2) - 1) for d in cfg.offsets]
            print(f"{a:3d} {b:3d} {order:6.2f} " + " ".join(f"{e:10.1e}" for e in errs))
    return 0


if __name__ == "__main__":
    sys.exit(main())
