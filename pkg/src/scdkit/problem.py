"""The inclusion 0 in f(x) + N_C(x) - y_target and its derivative bundles."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .bundle import DUAL, PRIMAL, DerivativeBundle, dedupe
from .errors import DimensionMismatch, NotANormal, PointNotInSet
from .polyhedral import PolyhedralSet, in_normal_cone, sp_star_normal_cone
from .subspace import Subspace, graph_of, sum_rule_matrix, transform


@dataclass(frozen=True, eq=False)
class SmoothMap:
    n: int
    eval: Callable[[np.ndarray], np.ndarray]
    jac: Callable[[np.ndarray], np.ndarray]
    kind: str = "affine"
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        return np.asarray(self.eval(np.asarray(x, dtype=float)), dtype=float)

    def jacobian(self, x) -> np.ndarray:
        return np.atleast_2d(np.asarray(self.jac(np.asarray(x, dtype=float)), dtype=float))

    def to_json(self) -> dict[str, Any]:
        return dict(self.params)


def affine_map(M, q=None) -> SmoothMap:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    n = M.shape[0]
    if M.shape != (n, n):
        raise DimensionMismatch(f"M must be square, got {M.shape}")
    q = np.zeros(n) if q is None else np.asarray(q, dtype=float).reshape(n)
    M.setflags(write=False)
    q.setflags(write=False)
    return SmoothMap(
        n,
        lambda x: M @ x + q,
        lambda x: M,
        kind="affine",
        params={"kind": "affine", "M": M.tolist(), "q": q.tolist()},
    )


def zero_map(n: int) -> SmoothMap:
    return affine_map(np.zeros((n, n)))


# Builtin nonlinearities. Each entry maps a name to (n, f, jac); n = None
# means the map is defined in every dimension.
def _ex65(x):
    return np.array([x[0], -x[1]])


def _ex65_jac(x):
    return np.diag([1.0, -1.0])


def _ex65_pert(x):
    # h(0) = 0 and grad h(0) = 0
    return np.array([x[0] + x[0] * x[1], -x[1] + np.sin(x[1]) - x[1] + x[0] ** 2])


def _ex65_pert_jac(x):
    return np.array([[1.0 + x[1], x[0]], [2.0 * x[0], -2.0 + np.cos(x[1])]])


def _cubic(x):
    return x + x**3


def _cubic_jac(x):
    return np.diag(1.0 + 3.0 * x**2)


def _rotation_pert(x):
    return np.array([x[0] - x[1] + 0.25 * np.sin(x[0]), x[0] + x[1] + 0.1 * x[1] ** 2])


def _rotation_pert_jac(x):
    return np.array([[1.0 + 0.25 * np.cos(x[0]), -1.0], [1.0, 1.0 + 0.2 * x[1]]])


BUILTINS: dict[str, tuple[Optional[int], Callable, Callable]] = {
    "ex65": (2, _ex65, _ex65_jac),
    "ex65_perturbed": (2, _ex65_pert, _ex65_pert_jac),
    "identity": (None, lambda x: x.copy(), lambda x: np.eye(x.shape[0])),
    "cubic": (None, _cubic, _cubic_jac),
    "rotation_perturbed": (2, _rotation_pert, _rotation_pert_jac),
}


def named_map(name: str, n: int) -> SmoothMap:
    try:
        dim, f, jac = BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown builtin map {name!r}; known: {sorted(BUILTINS)}") from None
    if dim is not None and dim != n:
        raise DimensionMismatch(f"builtin {name!r} is defined for n={dim}, not n={n}")
    return SmoothMap(n, f, jac, kind="named", params={"kind": "named", "name": name})


def smooth_from_json(data: dict[str, Any], n: int) -> SmoothMap:
    kind = data.get("kind")
    if kind == "affine":
        sm = affine_map(data["M"], data.get("q"))
        if sm.n != n:
            raise DimensionMismatch(f"affine map has n={sm.n}, problem has n={n}")
        return sm
    if kind == "named":
        return named_map(data["name"], n)
    raise ValueError(f"unknown smooth map kind {kind!r}")


@dataclass(frozen=True, eq=False)
class GeneralizedEquation:
    smooth: SmoothMap
    set: PolyhedralSet
    y_target: np.ndarray = None

    def __post_init__(self):
        if self.smooth.n != self.set.n:
            raise DimensionMismatch(f"map has n={self.smooth.n}, set has n={self.set.n}")
        y = np.zeros(self.n) if self.y_target is None else np.asarray(self.y_target, float).reshape(-1)
        if y.shape != (self.n,):
            raise DimensionMismatch(f"y_target must have length {self.n}")
        y.setflags(write=False)
        object.__setattr__(self, "y_target", y)

    @property
    def n(self) -> int:
        return self.set.n

    def g(self, x) -> np.ndarray:
        """The shifted smooth part f(x) - y_target."""
        return self.smooth(x) - self.y_target

    def with_target(self, y_target) -> "GeneralizedEquation":
        return GeneralizedEquation(self.smooth, self.set, y_target)

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "smooth": self.smooth.to_json(),
            "C": self.set.to_json(),
            "y_target": self.y_target.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "GeneralizedEquation":
        n = int(data["n"])
        smooth = smooth_from_json(data["smooth"], n)
        C = PolyhedralSet.from_json(data["C"], n=n)
        return cls(smooth, C, data.get("y_target"))

    @classmethod
    def load(cls, path) -> "GeneralizedEquation":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True, eq=False)
class GraphPoint:
    """(x, y) with y in F(x); v = y + y_target - f(x) is the normal part."""

    x: np.ndarray
    y: np.ndarray
    v: np.ndarray


def graph_point(ge: GeneralizedEquation, x, v) -> GraphPoint:
    x = np.asarray(x, dtype=float).reshape(-1)
    v = np.asarray(v, dtype=float).reshape(-1)
    if x.shape != (ge.n,) or v.shape != (ge.n,):
        raise DimensionMismatch(f"x and v must have length {ge.n}")
    if not ge.set.contains(x):
        raise PointNotInSet(f"x = {x} is not in C")
    if not in_normal_cone(ge.set, x, v):
        raise NotANormal(f"v = {v} is not in N_C({x})")
    return GraphPoint(x, ge.g(x) + v, v)


def bundle_at(ge: GeneralizedEquation, p: GraphPoint, flavor: str = DUAL) -> DerivativeBundle:
    """Sp F (primal) or Sp*F (dual) at a graph point via the sum rule."""
    base = sp_star_normal_cone(ge.set, p.x, p.v)
    J = ge.smooth.jacobian(p.x)
    if flavor == PRIMAL:
        T = sum_rule_matrix(J)
    elif flavor == DUAL:
        T = sum_rule_matrix(J.T)
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    members = [transform(L, T) for L in base.members]
    return DerivativeBundle(tuple(members), flavor=flavor, point=p, faces=base.faces)


def lift_jacobians(jacobians: Sequence, flavor: str = PRIMAL) -> list[Subspace]:
    """{rge(I, A)} (primal) or {rge(I, A^T)} (dual), one per distinct matrix."""
    mats = [np.atleast_2d(np.asarray(A, dtype=float)) for A in jacobians]
    if not mats:
        return []
    n = mats[0].shape[0]
    for A in mats:
        if A.shape != (n, n):
            raise DimensionMismatch(f"expected {n}x{n} matrices, got {A.shape}")
    if flavor == DUAL:
        mats = [A.T for A in mats]
    elif flavor != PRIMAL:
        raise ValueError(f"unknown flavor {flavor!r}")
    subs = [graph_of(A) for A in mats]
    return [subs[i] for i in dedupe(subs)]


def lipschitz_bases(ge: GeneralizedEquation, p: GraphPoint) -> list[np.ndarray]:
    """Normalized 2n x n bases of the primal bundle for the certificate.

    gph(f + N_C) is mapped to the graph of a Lipschitz map by
    (x, y) -> (x + y - f(x), x); the normalized basis of the member built
    from face projection B is (B; I - B + grad f(x) B).
    """
    base = sp_star_normal_cone(ge.set, p.x, p.v)
    J = ge.smooth.jacobian(p.x)
    I = np.eye(ge.n)
    out = []
    for F in base.faces:
        B = F.projection
        out.append(np.vstack([B, I - B + J @ B]))
    return out
