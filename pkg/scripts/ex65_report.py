"""Bundle table and regularity report at a graph point of a problem file."""

import argparse
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from scdkit import GeneralizedEquation, analyze, bundle_at, graph_point
from scdkit.subspace import c_matrix, is_regular, operator_norm

ROOT = Path(__file__).resolve().parents[1]


@dataclass(frozen=True)
class ReportConfig:
    problem: Path = ROOT / "problems" / "ex65.json"
    x: tuple = (0.0, 0.0)
    v: tuple = (0.0, 0.0)
    samples: int = 10000
    seed: int = 0


def _vec(text):
    return tuple(float(t) for t in text.split(","))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--problem", type=Path, default=ReportConfig.problem)
    ap.add_argument("--x", type=_vec, default=ReportConfig.x)
    ap.add_argument("--v", type=_vec, default=ReportConfig.v)
    ap.add_argument("--samples", type=int, default=ReportConfig.samples)
    ap.add_argument("--seed", type=int, default=ReportConfig.seed)
    cfg = ReportConfig(**vars(ap.parse_args(argv)))

    ge = GeneralizedEquation.load(cfg.problem)
    p = graph_point(ge, cfg.x, cfg.v)
    bundle = bundle_at(ge, p)

    print(f"{'face':>10} {'dim':>3} {'regular':>7} {'|C_L|':>8}  C_L")
    for F, L in zip(bundle.faces, bundle.members):
        if is_regular(L):
            C = c_matrix(L)
            print(f"{str(F.active):>10} {F.dim:>3} {'yes':>7} {operator_norm(C):>8.4f}  {(np.round(C, 6) + 0.0).tolist()}")
        else:
            print(f"{str(F.active):>10} {F.dim:>3} {'no':>7} {'inf':>8}")

    rep = analyze(ge, cfg.x, cfg.v, samples=cfg.samples, seed=cfg.seed)
    print()
    print(f"SCD regular:        {rep.scd_regular}")
    print(f"scd-reg modulus:    {rep.scd_reg_modulus:.6f}")
    print(f"certificate:        {rep.smr_certificate.status} ({rep.smr_certificate.method})")
    if rep.smr_certificate.witness:
        print(f"  witness weights:  {np.round(rep.smr_certificate.witness['weights'], 6).tolist()}")
    print(f"tilt stable:        {rep.tilt_stable}")
    for note in rep.notes:
        print(f"note: {note}")


if __name__ == "__main__":
    main()
