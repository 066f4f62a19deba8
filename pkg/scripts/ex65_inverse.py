"""Newton sweep over right-hand sides for F(x) = (x1, -x2) + h(x) + N_C(x).

With h = 0 every run is checked against the closed-form inverse; with
--perturbed the smooth part gets a second-order term and only residuals
and empirical error ratios are tabulated.
"""

import argparse
import time
from collections import Counter
from dataclasses import dataclass

import numpy as np

from scdkit import GeneralizedEquation, PolyhedralSet, SolverOptions, named_map, solve

A = np.array([[-0.5, -1.0], [-0.5, 1.0]])


@dataclass(frozen=True)
class SweepConfig:
    per_region: int = 50
    radius: float = 0.1
    seed: int = 0
    perturbed: bool = False
    face_strategy: str = "WholeCriticalCone"


def inverse(y):
    """Region index and the roots of F(x) = y for h = 0."""
    y1, y2 = y
    z1 = np.array([4 * y1 + 2 * y2, 2 * y1 + y2]) / 3
    z2 = np.array([y1, -y2])
    z3 = np.array([4 * y1 - 2 * y2, -2 * y1 + y2]) / 3
    if -0.5 * y1 + y2 > 0 and 2 * y1 + y2 >= 0:
        return 1, [z1]
    if -0.5 * y1 + y2 <= 0 and -0.5 * y1 - y2 <= 0:
        return 2, [z1, z2, z3]
    if -0.5 * y1 - y2 > 0 and 2 * y1 - y2 >= 0:
        return 3, [z3]
    return 4, [np.zeros(2)]


def sample(cfg: SweepConfig, rng):
    counts = Counter()
    while min(counts[k] for k in (1, 2, 3, 4)) < cfg.per_region:
        th = rng.uniform(0, 2 * np.pi)
        y = rng.uniform(0.5, 2.0) * np.array([np.cos(th), np.sin(th)])
        if cfg.perturbed:
            y *= 0.05
        region, roots = inverse(y)
        if counts[region] < cfg.per_region:
            counts[region] += 1
            yield region, y, roots


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--per-region", type=int, default=SweepConfig.per_region)
    ap.add_argument("--radius", type=float, default=SweepConfig.radius)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    ap.add_argument("--perturbed", action="store_true")
    ap.add_argument("--face-strategy", default=SweepConfig.face_strategy)
    cfg = SweepConfig(**{k: v for k, v in vars(ap.parse_args(argv)).items()})

    rng = np.random.default_rng(cfg.seed)
    smooth = named_map("ex65_perturbed" if cfg.perturbed else "ex65", 2)
    ge = GeneralizedEquation(smooth, PolyhedralSet(A, np.zeros(2)))
    opts = SolverOptions(face_strategy=cfg.face_strategy)

    hist, misses, worst_ratio = Counter(), 0, 0.0
    t0 = time.perf_counter()
    print(f"{'region':>6} {'y1':>9} {'y2':>9} {'iters':>5} {'residual':>10} {'root err':>10}")
    for region, y, roots in sample(cfg, rng):
        start = roots[rng.integers(len(roots))]
        d = rng.normal(size=2)
        x0 = start + cfg.radius * d / np.linalg.norm(d)
        tr = solve(ge.with_target(y), x0, opts)
        hist[len(tr.iterations)] += 1
        err = min(np.linalg.norm(tr.x - z) for z in roots)
        if not cfg.perturbed:
            misses += not (tr.converged and err <= 1e-8)
            ref = min(roots, key=lambda z: np.linalg.norm(tr.x - z))
            ratios = solve(ge.with_target(y), x0, opts, reference=ref).rate_ratios
            worst_ratio = max(worst_ratio, ratios[-1] if ratios else 0.0)
        else:
            misses += not tr.converged
        shown = "-" if cfg.perturbed else f"{err:.2e}"
        print(f"{region:>6} {y[0]:>9.4f} {y[1]:>9.4f} {len(tr.iterations):>5} {tr.residual:>10.2e} {shown:>10}")
    elapsed = time.perf_counter() - t0

    print()
    print(f"runs: {sum(hist.values())}  failures: {misses}  time: {elapsed:.2f}s")
    print("iterations: " + ", ".join(f"{k}: {v}" for k, v in sorted(hist.items())))
    if not cfg.perturbed:
        print(f"largest final error ratio: {worst_ratio:.2e}")


if __name__ == "__main__":
    main()
