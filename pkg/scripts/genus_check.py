"""Genus expansion of log tau: extracted g = 2, 3 coefficients against the
displayed ones and their negatives, for both variants and a few points v."""

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field

from conifold_rh import asym
from conifold_rh.numlib import parse_complex


@dataclass
class GenusConfig:
    points: list[complex] = field(default_factory=lambda: [0.2 + 0.5j, 0.35 + 0.3j, 0.6 + 0.8j])
    w: complex = 1.0
    variants: tuple[str, ...] = ("printed", "corrected")


def run(cfg: GenusConfig) -> list[dict]:
    out = []
    for v in cfg.points:
        for variant in cfg.variants:
            for ray in asym.default_rays(asym.Kind.TAU):
                g = asym.genus_check(v, cfg.w, ray, variant)
                out.append({"v": str(v), "variant": variant, "ray": round(ray, 4),
                            "slope": round(g.slope, 3),
                            "g2_rel": g.g2_rel_error, "g2_rel_negated": g.g2_rel_error_negated,
                            "g3_rel": g.g3_rel_error, "g3_rel_negated": g.g3_rel_error_negated})
    return out


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--v", nargs="+", type=parse_complex)
    ap.add_argument("--w", type=parse_complex, default=1.0)
    a = ap.parse_args()
    cfg = GenusConfig(w=a.w) if a.v is None else GenusConfig(a.v, a.w)
    res = run(cfg)
    json.dump({"config": {k: str(x) for k, x in asdict(cfg).items()}, "rows": res},
              sys.stdout, indent=1)
    print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
