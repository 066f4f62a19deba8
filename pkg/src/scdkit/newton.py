"""SCD semismooth* Newton iteration for 0 in f(x) + N_C(x) - y_target."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .bundle import DUAL, DerivativeBundle
from .errors import NoRegularSubspace, NotRegular, SCDError
from .polyhedral import project
from .problem import GeneralizedEquation, GraphPoint, bundle_at, graph_point
from .subspace import Subspace, adjoint, c_matrix, is_regular, operator_norm

log = logging.getLogger(__name__)

WHOLE_CRITICAL_CONE = "WholeCriticalCone"
LINEALITY_FACE = "LinealityFace"
LARGEST_REGULAR = "LargestRegular"
FACE_STRATEGIES = (WHOLE_CRITICAL_CONE, LINEALITY_FACE, LARGEST_REGULAR)

CONVERGED = "Converged"
MAX_ITERATIONS = "MaxIterations"
NO_REGULAR_SUBSPACE = "NoRegularSubspace"
APPROXIMATION_FAILED = "ApproximationFailed"


@dataclass(frozen=True)
class SolverOptions:
    tol_residual: float = 1e-10
    max_iter: int = 50
    face_strategy: str = WHOLE_CRITICAL_CONE
    eta_check: Optional[float] = None

    def __post_init__(self):
        if not self.tol_residual > 0:
            raise ValueError("tol_residual must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.face_strategy not in FACE_STRATEGIES:
            raise ValueError(f"face_strategy must be one of {FACE_STRATEGIES}")


@dataclass
class Iteration:
    x: np.ndarray
    xhat: np.ndarray
    yhat: np.ndarray
    subspace: Subspace
    c_norm: float
    residual: float
    face: Optional[tuple[int, ...]] = None
    eta: Optional[float] = None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "x": self.x.tolist(),
            "xhat": self.xhat.tolist(),
            "yhat": self.yhat.tolist(),
            "c_norm": float(self.c_norm),
            "residual": float(self.residual),
        }
        if self.face is not None:
            out["face"] = list(self.face)
        if self.eta is not None:
            out["eta"] = float(self.eta)
        return out


@dataclass
class NewtonTrace:
    iterations: list[Iteration] = field(default_factory=list)
    status: str = MAX_ITERATIONS
    rate_ratios: list[float] = field(default_factory=list)
    x: Optional[np.ndarray] = None
    residual: float = float("inf")
    message: str = ""

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    def to_json(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "iterations": [it.to_json() for it in self.iterations],
            "rate_ratios": [float(r) for r in self.rate_ratios],
            "x": None if self.x is None else self.x.tolist(),
            "residual": float(self.residual),
            "message": self.message,
        }


def natural_residual(ge: GeneralizedEquation, x) -> float:
    """|x - P_C(x - g(x))|, zero exactly at solutions."""
    x = np.asarray(x, dtype=float)
    return float(np.linalg.norm(x - project(ge.set, x - ge.g(x))))


def approximation_step(ge: GeneralizedEquation, x) -> GraphPoint:
    """Graph point from the natural map.

    With w = x - g(x) and xhat = P_C(w), the residual w - xhat is a normal
    to C at xhat, so (xhat, g(xhat) + w - xhat) lies on gph F.
    """
    x = np.asarray(x, dtype=float)
    w = x - ge.g(x)
    xhat = project(ge.set, w)
    return graph_point(ge, xhat, w - xhat)


def _face_dims(bundle: DerivativeBundle) -> list[int]:
    if bundle.faces:
        return [F.dim for F in bundle.faces]
    return [0] * len(bundle)


def _face_keys(bundle: DerivativeBundle) -> list[tuple]:
    if bundle.faces:
        return [F.active for F in bundle.faces]
    return [(i,) for i in range(len(bundle))]


def select_index(bundle: DerivativeBundle, strategy: str = WHOLE_CRITICAL_CONE) -> int:
    if not len(bundle):
        raise NoRegularSubspace("empty bundle")
    dims = _face_dims(bundle)
    keys = _face_keys(bundle)
    scan = sorted(range(len(bundle)), key=lambda i: (-dims[i], keys[i]))
    if strategy == WHOLE_CRITICAL_CONE:
        preferred = [scan[0]]
    elif strategy == LINEALITY_FACE:
        preferred = [min(range(len(bundle)), key=lambda i: (dims[i], keys[i]))]
    elif strategy == LARGEST_REGULAR:
        preferred = []
    else:
        raise ValueError(f"unknown face strategy {strategy!r}")
    for i in preferred + scan:
        if is_regular(bundle.members[i]):
            return i
    raise NoRegularSubspace("no member of the bundle is regular")


def select_subspace(bundle: DerivativeBundle, strategy: str = WHOLE_CRITICAL_CONE) -> Subspace:
    return bundle.members[select_index(bundle, strategy)]


def newton_step(p: GraphPoint, L: Subspace) -> np.ndarray:
    """x+ = xhat - C_L^T yhat, solved as A dx = -B yhat with L = rge(B^T, A^T)."""
    if not is_regular(L):
        raise NotRegular("selected subspace is not regular")
    Bt, At = L.upper, L.lower
    dx = -np.linalg.solve(At.T, Bt.T @ p.y)
    return p.x + dx


def primal_newton_step(p: GraphPoint, L: Subspace) -> np.ndarray:
    """Same step through the primal subspace L* = rge(B, A): A q = -yhat, dx = B q."""
    Ls = adjoint(L)
    q = np.linalg.solve(Ls.lower, -p.y)
    return p.x + Ls.upper @ q


def solve(
    ge: GeneralizedEquation,
    x0,
    opts: Optional[SolverOptions] = None,
    reference=None,
) -> NewtonTrace:
    opts = opts or SolverOptions()
    x = np.asarray(x0, dtype=float).reshape(-1).copy()
    ref = None if reference is None else np.asarray(reference, dtype=float).reshape(-1)
    trace = NewtonTrace()
    xs = [x.copy()]

    for _ in range(opts.max_iter):
        res = natural_residual(ge, x)
        if res <= opts.tol_residual:
            trace.status = CONVERGED
            break
        try:
            p = approximation_step(ge, x)
            bundle = bundle_at(ge, p, DUAL)
        except SCDError as exc:
            trace.status, trace.message = APPROXIMATION_FAILED, str(exc)
            break
        try:
            idx = select_index(bundle, opts.face_strategy)
        except NoRegularSubspace as exc:
            trace.status, trace.message = NO_REGULAR_SUBSPACE, str(exc)
            break
        L = bundle.members[idx]
        x_new = newton_step(p, L)
        alt = primal_newton_step(p, L)
        if np.linalg.norm(alt - x_new) > 1e-9 * (1.0 + np.linalg.norm(x_new)):
            log.warning("primal and dual Newton steps disagree by %.3e", np.linalg.norm(alt - x_new))

        eta = None
        if ref is not None:
            err = np.linalg.norm(x - ref)
            if err > 0:
                eta = float(np.hypot(np.linalg.norm(p.x - ref), np.linalg.norm(p.y)) / err)
            if opts.eta_check is not None and eta is not None and eta > opts.eta_check:
                log.info("approximation step exceeded eta bound: %.3e > %.3e", eta, opts.eta_check)
        face = bundle.faces[idx].active if bundle.faces else None
        trace.iterations.append(
            Iteration(x.copy(), p.x.copy(), p.y.copy(), L, operator_norm(c_matrix(L)), res, face, eta)
        )
        x = x_new
        xs.append(x.copy())
    else:
        trace.status = CONVERGED if natural_residual(ge, x) <= opts.tol_residual else MAX_ITERATIONS

    trace.x = x
    trace.residual = natural_residual(ge, x)
    if ref is not None:
        errs = [float(np.linalg.norm(xi - ref)) for xi in xs]
        trace.rate_ratios = [b / a for a, b in zip(errs, errs[1:]) if a > 0]
    return trace
