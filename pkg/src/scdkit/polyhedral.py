"""Polyhedral sets and cones in H-representation.

Covers Euclidean projection, tangent and critical cones, generator
enumeration (double description), face enumeration, and the derivative
bundle of the normal-cone mapping built from the faces of a critical cone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import scipy.linalg
import scipy.optimize

from .bundle import DUAL, DerivativeBundle
from .errors import (
    DimensionMismatch,
    InfeasibleSet,
    NotANormal,
    PointNotInSet,
    QPFailure,
    ScaleLimitExceeded,
)
from .subspace import from_blocks

EPS_ACT = 1e-8
EPS_NORMAL = 1e-8
EPS_ZERO = 1e-9
MAX_DIM = 12


def _as_rows(M, n: int) -> np.ndarray:
    if M is None:
        return np.zeros((0, n))
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return np.zeros((0, n))
    M = np.atleast_2d(M)
    if M.shape[1] != n:
        raise DimensionMismatch(f"rows must have length {n}, got {M.shape[1]}")
    return M


def _normalize(M: np.ndarray, rhs: np.ndarray, equality: bool):
    norms = np.linalg.norm(M, axis=1)
    zero = norms <= 1e-14
    if equality and np.any(np.abs(rhs[zero]) > EPS_ACT):
        raise InfeasibleSet("zero equality row with nonzero right-hand side")
    if not equality and np.any(rhs[zero] < -EPS_ACT):
        raise InfeasibleSet("zero inequality row with negative right-hand side")
    keep = ~zero
    norms = norms[keep]
    # rows already unit up to rounding are left alone so JSON round trips are exact
    norms[np.abs(norms - 1.0) <= 4 * np.finfo(float).eps] = 1.0
    return M[keep] / norms[:, None], rhs[keep] / norms


def _null_space(M: np.ndarray, n: int) -> np.ndarray:
    if M.shape[0] == 0:
        return np.eye(n)
    return scipy.linalg.null_space(M, rcond=EPS_ZERO)


def _orth(M: np.ndarray, n: int) -> np.ndarray:
    if M.size == 0:
        return np.zeros((n, 0))
    return scipy.linalg.orth(M, rcond=EPS_ZERO)


class PolyhedralSet:
    """{x : A x <= b, E x = e} with unit-norm rows.

    Construction solves a feasibility LP once and keeps the feasible point
    as the warm start of every projection.
    """

    def __init__(self, A, b, E=None, e=None, n: Optional[int] = None):
        if n is None:
            for M in (A, E):
                if M is not None and np.asarray(M).size:
                    n = np.atleast_2d(np.asarray(M)).shape[1]
                    break
            else:
                raise DimensionMismatch("cannot infer dimension from empty constraints")
        self.n = int(n)
        A = _as_rows(A, self.n)
        E = _as_rows(E, self.n)
        b = np.asarray(b if b is not None else [], dtype=float).reshape(-1)
        e = np.asarray(e if e is not None else [], dtype=float).reshape(-1)
        if b.shape[0] != A.shape[0] or e.shape[0] != E.shape[0]:
            raise DimensionMismatch("right-hand side length does not match row count")
        self.A, self.b = _normalize(A, b, equality=False)
        self.E, self.e = _normalize(E, e, equality=True)
        for M in (self.A, self.b, self.E, self.e):
            M.setflags(write=False)
        self._feasible = self._find_feasible_point()

    @property
    def m(self) -> int:
        return self.A.shape[0]

    def _find_feasible_point(self) -> np.ndarray:
        if self.m == 0 and self.E.shape[0] == 0:
            return np.zeros(self.n)
        res = scipy.optimize.linprog(
            np.zeros(self.n),
            A_ub=self.A if self.m else None,
            b_ub=self.b if self.m else None,
            A_eq=self.E if self.E.shape[0] else None,
            b_eq=self.e if self.E.shape[0] else None,
            bounds=[(None, None)] * self.n,
            method="highs",
        )
        if res.status != 0:
            raise InfeasibleSet(f"feasibility LP failed: {res.message}")
        return np.asarray(res.x, dtype=float)

    def contains(self, x, tol: float = EPS_ACT) -> bool:
        x = np.asarray(x, dtype=float)
        ok = True
        if self.m:
            ok = ok and bool(np.all(self.A @ x - self.b <= tol))
        if self.E.shape[0]:
            ok = ok and bool(np.all(np.abs(self.E @ x - self.e) <= tol))
        return ok

    def active(self, x, tol: float = EPS_ACT) -> np.ndarray:
        """Indices of inequality rows with A_i x - b_i >= -tol."""
        x = np.asarray(x, dtype=float)
        if not self.m:
            return np.zeros(0, dtype=int)
        return np.flatnonzero(self.A @ x - self.b >= -tol)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"A": self.A.tolist(), "b": self.b.tolist()}
        if self.E.shape[0]:
            out["E"] = self.E.tolist()
            out["e"] = self.e.tolist()
        return out

    @classmethod
    def from_json(cls, data: dict[str, Any], n: Optional[int] = None) -> "PolyhedralSet":
        return cls(data.get("A"), data.get("b"), data.get("E"), data.get("e"), n=n)

    def __repr__(self):
        return f"PolyhedralSet(n={self.n}, m={self.m}, equalities={self.E.shape[0]})"


@dataclass(frozen=True, eq=False)
class PolyhedralCone:
    """{u : A_ineq u <= 0, A_eq u = 0}."""

    n: int
    A_ineq: np.ndarray
    A_eq: np.ndarray

    def __post_init__(self):
        A_ineq = _as_rows(self.A_ineq, self.n)
        A_eq = _as_rows(self.A_eq, self.n)
        A_ineq, _ = _normalize(A_ineq, np.zeros(A_ineq.shape[0]), equality=False)
        A_eq, _ = _normalize(A_eq, np.zeros(A_eq.shape[0]), equality=True)
        object.__setattr__(self, "A_ineq", A_ineq)
        object.__setattr__(self, "A_eq", A_eq)

    @classmethod
    def whole_space(cls, n: int) -> "PolyhedralCone":
        return cls(n, np.zeros((0, n)), np.zeros((0, n)))

    def contains(self, u, tol: float = EPS_ZERO) -> bool:
        u = np.asarray(u, dtype=float)
        scale = max(1.0, float(np.linalg.norm(u)))
        return bool(
            np.all(self.A_ineq @ u <= tol * scale)
            and np.all(np.abs(self.A_eq @ u) <= tol * scale)
        )


@dataclass(frozen=True, eq=False)
class ConeGenerators:
    """V-representation: cone = span(lineality) + cone(rays).

    ``lineality`` is n x k with orthonormal columns; ``rays`` is r x n with
    unit rows, each orthogonal to the lineality space.
    """

    lineality: np.ndarray
    rays: np.ndarray

    @property
    def n(self) -> int:
        return self.lineality.shape[0]

    def vectors(self) -> list[np.ndarray]:
        return [c for c in self.lineality.T] + [r for r in self.rays]

    def __len__(self):
        return self.lineality.shape[1] + self.rays.shape[0]


@dataclass(frozen=True, eq=False)
class Face:
    parent: PolyhedralCone
    active: tuple[int, ...]
    generators: ConeGenerators
    span_basis: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.span_basis.shape[1]

    @property
    def projection(self) -> np.ndarray:
        return self.span_basis @ self.span_basis.T


def _kkt_system(G: np.ndarray, r: np.ndarray):
    """Split r = p + G^T mu with G p = 0."""
    if G.shape[0] == 0:
        return r.copy(), np.zeros(0)
    mu, *_ = np.linalg.lstsq(G.T, r, rcond=None)
    return r - G.T @ mu, mu


def _independent(G: np.ndarray, row: np.ndarray) -> bool:
    if G.shape[0] == 0:
        return True
    coef, *_ = np.linalg.lstsq(G.T, row, rcond=None)
    return np.linalg.norm(G.T @ coef - row) > 1e-9


def project_with_multipliers(C: PolyhedralSet, x):
    """Primal active-set solve of min 0.5 |z - x|^2 over C.

    Returns ``(z, lam, nu)`` where ``lam >= 0`` are the inequality
    multipliers (length m) and ``nu`` the equality multipliers, so that
    ``x - z = A^T lam + E^T nu``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (C.n,):
        raise DimensionMismatch(f"point must have length {C.n}")
    m, q = C.m, C.E.shape[0]
    if C.contains(x, tol=0.0):
        return x.copy(), np.zeros(m), np.zeros(q)

    z = C._feasible.copy()
    working: list[int] = []
    G = C.E.copy()
    for i in C.active(z, tol=1e-12):
        if _independent(G, C.A[i]):
            working.append(int(i))
            G = np.vstack([G, C.A[i]])

    scale = 1.0 + float(np.linalg.norm(x)) + float(np.linalg.norm(z))
    for _ in range(100 * max(m, 1)):
        G = np.vstack([C.E, C.A[working]]) if working else C.E
        p, mu = _kkt_system(G, x - z)
        if np.linalg.norm(p) <= 1e-13 * scale:
            lam_w = mu[q:]
            if lam_w.size == 0 or lam_w.min() >= -1e-12 * scale:
                lam = np.zeros(m)
                lam[working] = np.maximum(lam_w, 0.0)
                return z, lam, mu[:q]
            working.pop(int(np.argmin(lam_w)))
            continue
        alpha, blocking = 1.0, None
        if m:
            Ap = C.A @ p
            slack = C.b - C.A @ z
            for i in np.flatnonzero(Ap > 1e-14 * scale):
                if i in working:
                    continue
                t = max(slack[i], 0.0) / Ap[i]
                if t < alpha:
                    alpha, blocking = t, int(i)
        z = z + alpha * p
        if blocking is not None:
            working.append(blocking)
    raise QPFailure("active-set projection exceeded its iteration cap")


def project(C: PolyhedralSet, x) -> np.ndarray:
    return project_with_multipliers(C, x)[0]


def projection_kkt_residual(C: PolyhedralSet, x, z, lam, nu) -> float:
    """Max violation of stationarity, feasibility and complementarity."""
    x, z = np.asarray(x, float), np.asarray(z, float)
    parts = [np.linalg.norm(z - x + C.A.T @ lam + C.E.T @ nu)]
    if C.m:
        slack = C.A @ z - C.b
        parts += [max(0.0, slack.max()), max(0.0, -lam.min()), np.abs(lam * slack).max()]
    if C.E.shape[0]:
        parts.append(np.abs(C.E @ z - C.e).max())
    return float(max(parts))


def _require_member(C: PolyhedralSet, x: np.ndarray) -> None:
    if x.shape != (C.n,):
        raise DimensionMismatch(f"point must have length {C.n}")
    if not C.contains(x):
        raise PointNotInSet(f"x = {x} violates the constraints by more than {EPS_ACT}")


def tangent_cone(C: PolyhedralSet, x) -> PolyhedralCone:
    x = np.asarray(x, dtype=float)
    _require_member(C, x)
    return PolyhedralCone(C.n, C.A[C.active(x)], C.E)


def normal_residual(C: PolyhedralSet, x, xstar) -> float:
    """Distance from xstar to N_C(x), via nonnegative least squares."""
    x = np.asarray(x, dtype=float)
    xstar = np.asarray(xstar, dtype=float)
    cols = [C.A[C.active(x)].T, C.E.T, -C.E.T]
    M = np.hstack(cols)
    if M.shape[1] == 0:
        return float(np.linalg.norm(xstar))
    _, res = scipy.optimize.nnls(M, xstar)
    return float(res)


def in_normal_cone(C: PolyhedralSet, x, xstar) -> bool:
    xstar = np.asarray(xstar, dtype=float)
    return normal_residual(C, x, xstar) <= EPS_NORMAL * max(1.0, float(np.linalg.norm(xstar)))


def critical_cone(C: PolyhedralSet, x, xstar) -> PolyhedralCone:
    x = np.asarray(x, dtype=float)
    xstar = np.asarray(xstar, dtype=float)
    T = tangent_cone(C, x)
    if xstar.shape != (C.n,):
        raise DimensionMismatch(f"normal vector must have length {C.n}")
    if not in_normal_cone(C, x, xstar):
        raise NotANormal(f"{xstar} is not a normal to C at {x}")
    norm = np.linalg.norm(xstar)
    if norm <= EPS_ACT:
        return T
    return PolyhedralCone(C.n, T.A_ineq, np.vstack([T.A_eq, xstar / norm]))


def _check_scale(n: int) -> None:
    if n > MAX_DIM:
        raise ScaleLimitExceeded(f"dimension {n} exceeds the enumeration limit {MAX_DIM}")


def cone_generators(K: PolyhedralCone) -> ConeGenerators:
    """Lineality basis and extreme rays by the double-description method.

    Inequalities are inserted one at a time. While a lineality direction
    is cut by the new row, it is turned into a ray; otherwise rays are
    combined across the hyperplane for every adjacent (+, -) pair, with
    adjacency decided combinatorially from the tight-row sets.
    """
    n = K.n
    _check_scale(n)
    lin = _null_space(K.A_eq, n)
    rays = np.zeros((0, n))
    processed: list[np.ndarray] = []

    def _clean(R: np.ndarray, L: np.ndarray) -> np.ndarray:
        if R.shape[0] == 0:
            return R
        if L.shape[1]:
            R = R - (R @ L) @ L.T
        norms = np.linalg.norm(R, axis=1)
        R = R[norms > EPS_ZERO] / norms[norms > EPS_ZERO, None]
        out: list[np.ndarray] = []
        for r in R:
            if all(np.linalg.norm(r - s) > 1e-9 for s in out):
                out.append(r)
        return np.array(out).reshape(-1, n)

    for a in K.A_ineq:
        s = a @ lin
        if lin.shape[1] and np.max(np.abs(s)) > EPS_ZERO:
            j = int(np.argmax(np.abs(s)))
            l0 = lin[:, j] * (-np.sign(s[j]))
            a_l0 = a @ l0
            rest = np.delete(lin, j, axis=1)
            rest = rest - np.outer(l0, (a @ rest) / a_l0)
            lin = _orth(rest, n)
            if rays.shape[0]:
                rays = rays - np.outer((rays @ a) / a_l0, l0)
            rays = _clean(np.vstack([rays, l0]), lin)
        elif rays.shape[0]:
            vals = rays @ a
            pos = np.flatnonzero(vals > EPS_ZERO)
            neg = np.flatnonzero(vals < -EPS_ZERO)
            keep = [i for i in range(rays.shape[0]) if vals[i] <= EPS_ZERO]
            new = [rays[i] for i in keep]
            if pos.size and neg.size:
                P = np.array(processed).reshape(-1, n)
                tight = np.abs(rays @ P.T) <= EPS_ZERO if P.shape[0] else np.zeros((rays.shape[0], 0), bool)
                for i in pos:
                    for k in neg:
                        common = tight[i] & tight[k]
                        adjacent = True
                        for r in range(rays.shape[0]):
                            if r in (i, k):
                                continue
                            if np.all(tight[r] | ~common):
                                adjacent = False
                                break
                        if adjacent:
                            new.append(vals[i] * rays[k] - vals[k] * rays[i])
            rays = _clean(np.array(new).reshape(-1, n), lin)
        processed.append(a)

    rays = _clean(rays, lin)
    order = np.lexsort(np.round(rays.T[::-1], 12)) if rays.shape[0] else np.zeros(0, int)
    return ConeGenerators(lin, rays[order])


def faces(K: PolyhedralCone) -> list[Face]:
    """All faces of K, each exactly once, ordered by their active sets.

    Faces are F_J = {u in K : A_J u = 0}; a face is generated by the
    lineality space together with the extreme rays it contains, so the
    distinct faces are the distinct intersections of the per-row sets of
    tight rays.
    """
    _check_scale(K.n)
    gens = cone_generators(K)
    m = K.A_ineq.shape[0]
    r = gens.rays.shape[0]
    if r:
        tight = np.abs(gens.rays @ K.A_ineq.T) <= EPS_ZERO
    else:
        tight = np.zeros((0, m), dtype=bool)
    row_sets = [frozenset(np.flatnonzero(tight[:, i]).tolist()) for i in range(m)]

    family = {frozenset(range(r))}
    for S in row_sets:
        family |= {T & S for T in family}

    out: list[Face] = []
    for T in family:
        idx = sorted(T)
        active = tuple(i for i in range(m) if T <= row_sets[i])
        sub = ConeGenerators(gens.lineality, gens.rays[idx].reshape(-1, K.n))
        span = _orth(np.hstack([gens.lineality, sub.rays.T]), K.n)
        out.append(Face(K, active, sub, span))
    out.sort(key=lambda F: F.active)
    return out


def sp_star_normal_cone(C: PolyhedralSet, x, xstar) -> DerivativeBundle:
    """Bundle {rge(B, I - B)} over the faces of the critical cone.

    B is the orthogonal projection onto the span of a face; the subspaces
    are self-adjoint, so the primal and dual bundles coincide.
    """
    K = critical_cone(C, x, xstar)
    I = np.eye(C.n)
    members, fs = [], []
    for F in faces(K):
        B = F.projection
        members.append(from_blocks(B, I - B))
        fs.append(F)
    return DerivativeBundle(
        tuple(members),
        flavor=DUAL,
        point=(np.asarray(x, float), np.asarray(xstar, float)),
        faces=tuple(fs),
    )
