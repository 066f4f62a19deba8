"""Command-line front end: ``scdkit {solve,analyze,faces}``.

Exit codes: 0 success, 1 input error, 2 solver did not converge,
3 certificate refuted under ``--expect-certified``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from .diagnostics import REFUTED, analyze
from .errors import SCDError
from .newton import FACE_STRATEGIES, SolverOptions, solve
from .polyhedral import EPS_ACT, critical_cone, sp_star_normal_cone
from .problem import GeneralizedEquation

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_REFUTED = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _csv(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",") if t.strip()], dtype=float)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scdkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--problem", required=True, type=Path, help="problem JSON file")
        p.add_argument("--y-target", type=_csv, help="override the problem's y_target")
        p.add_argument("--output", type=Path, help="write JSON here instead of stdout")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("solve", help="run the Newton method")
    common(p)
    p.add_argument("--x0", type=_csv, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--face-strategy", choices=FACE_STRATEGIES, default=FACE_STRATEGIES[0])
    p.add_argument("--reference", type=_csv, help="known solution, enables rate ratios")

    p = sub.add_parser("analyze", help="regularity report at a graph point")
    common(p)
    p.add_argument("--x", type=_csv, required=True)
    p.add_argument("--v", type=_csv, required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--expect-certified", action="store_true")
    p.add_argument("--assume-hypomonotone", action="store_true")

    p = sub.add_parser("faces", help="faces of the critical cone and their subspaces")
    common(p)
    p.add_argument("--x", type=_csv, required=True)
    p.add_argument("--v", type=_csv, required=True)
    return parser


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(obj: Any, output: Optional[Path]) -> None:
    text = dumps(obj)
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8")


def _check_len(name: str, vec: np.ndarray, n: int) -> None:
    if vec.shape != (n,):
        raise UsageError(f"--{name} must have {n} entries, got {vec.size}")


def faces_report(ge: GeneralizedEquation, x, v) -> dict[str, Any]:
    K = critical_cone(ge.set, x, v)
    bundle = sp_star_normal_cone(ge.set, x, v)
    out = []
    for F, L in zip(bundle.faces, bundle.members):
        out.append(
            {
                "active": list(F.active),
                "dim": F.dim,
                "rays": F.generators.rays.tolist(),
                "lineality": F.generators.lineality.T.tolist(),
                "projection": F.projection.tolist(),
                "subspace": L.to_json(),
            }
        )
    return {
        "critical_cone": {"A_ineq": K.A_ineq.tolist(), "A_eq": K.A_eq.tolist()},
        "activity_tol": EPS_ACT,
        "n_faces": len(out),
        "faces": out,
    }


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        ge = GeneralizedEquation.load(args.problem)
        if args.y_target is not None:
            _check_len("y-target", args.y_target, ge.n)
            ge = ge.with_target(args.y_target)

        if args.command == "solve":
            _check_len("x0", args.x0, ge.n)
            if args.reference is not None:
                _check_len("reference", args.reference, ge.n)
            opts = SolverOptions(args.tol, args.max_iter, args.face_strategy)
            trace = solve(ge, args.x0, opts, reference=args.reference)
            _emit(trace.to_json(), args.output)
            return EXIT_OK if trace.converged else EXIT_NOT_CONVERGED

        _check_len("x", args.x, ge.n)
        _check_len("v", args.v, ge.n)
        if args.command == "analyze":
            rep = analyze(
                ge, args.x, args.v, samples=args.samples, seed=args.seed,
                assume_hypomonotone=args.assume_hypomonotone,
            )
            _emit(rep.to_json(), args.output)
            if args.expect_certified and rep.smr_certificate.status == REFUTED:
                return EXIT_REFUTED
            return EXIT_OK

        _emit(faces_report(ge, args.x, args.v), args.output)
        return EXIT_OK
    except (UsageError, SCDError, OSError, ValueError, KeyError) as exc:
        print(f"scdkit: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
