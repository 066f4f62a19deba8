"""Calculus on n-dimensional subspaces of R^{2n}.

A subspace is stored through an orthonormal 2n x n basis. The first n rows
are the "upper" block and the last n rows the "lower" block of every
vector (u, v) in the subspace.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NotRegular, RankDeficient, SingularTransform

EPS_ORTH = 1e-10
EPS_RANK = 1e-9
EPS_EQ = 1e-9


@dataclass(frozen=True, eq=False)
class Subspace:
    n: int
    basis: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.shape != (2 * self.n, self.n):
            raise DimensionMismatch(
                f"basis must be {2 * self.n}x{self.n}, got {basis.shape}"
            )
        gram = basis.T @ basis
        if not np.allclose(gram, np.eye(self.n), atol=EPS_ORTH, rtol=0.0):
            raise ValueError("basis columns are not orthonormal")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def upper(self) -> np.ndarray:
        return self.basis[: self.n]

    @property
    def lower(self) -> np.ndarray:
        return self.basis[self.n :]

    @property
    def projection(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        if other.n != self.n:
            return False
        return distance(self, other) <= EPS_EQ

    __hash__ = None

    def __repr__(self):
        return f"Subspace(n={self.n}, basis={np.array2string(self.basis, precision=4)})"

    def to_json(self) -> dict[str, Any]:
        return {"n": self.n, "basis": [float(v) for v in self.basis.ravel()]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Subspace":
        n = int(data["n"])
        flat = np.asarray(data["basis"], dtype=float)
        if flat.size != 2 * n * n:
            raise DimensionMismatch(f"expected {2 * n * n} basis entries, got {flat.size}")
        return from_basis(flat.reshape(2 * n, n))


def _check_half_dim(M: np.ndarray) -> int:
    if M.ndim != 2 or M.shape[0] != 2 * M.shape[1]:
        raise DimensionMismatch(f"expected a 2n x n matrix, got shape {M.shape}")
    return M.shape[1]


def from_basis(M) -> Subspace:
    """Return the subspace spanned by the columns of a 2n x n matrix.

    The canonical basis comes from a column-pivoted QR factorization, so any
    two matrices with the same range produce subspaces that compare equal.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    n = _check_half_dim(M)
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= EPS_RANK * sv[0]:
        raise RankDeficient(f"matrix has numerical rank < {n}")
    Q, _, _ = scipy.linalg.qr(M, mode="economic", pivoting=True)
    return Subspace(n, Q)


def from_blocks(upper, lower) -> Subspace:
    """Shorthand for ``rge(upper, lower)``."""
    upper = np.atleast_2d(np.asarray(upper, dtype=float))
    lower = np.atleast_2d(np.asarray(lower, dtype=float))
    return from_basis(np.vstack([upper, lower]))


def graph_of(A) -> Subspace:
    """rge(I, A): the graph of the linear map A."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    return from_blocks(np.eye(A.shape[0]), A)


def distance(L1: Subspace, L2: Subspace) -> float:
    """Spectral norm of the difference of the orthogonal projections."""
    if L1.n != L2.n:
        raise DimensionMismatch(f"n={L1.n} vs n={L2.n}")
    return operator_norm(L1.projection - L2.projection)


def complement_basis(L: Subspace) -> np.ndarray:
    Q, _ = np.linalg.qr(L.basis, mode="complete")
    return Q[:, L.n :]


def symplectic(n: int) -> np.ndarray:
    """The block matrix [[0, -I], [I, 0]]."""
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, -I], [I, Z]])


def adjoint(L: Subspace) -> Subspace:
    """L* = S_n L^perp = {(-v*, u*) : (u*, v*) in L^perp}."""
    return from_basis(symplectic(L.n) @ complement_basis(L))


def is_regular(L: Subspace) -> bool:
    sv = np.linalg.svd(L.lower, compute_uv=False)
    # the canonical basis is orthonormal, so its largest singular value is 1
    return bool(sv[-1] > EPS_RANK)


def c_matrix(L: Subspace) -> np.ndarray:
    """The unique matrix C with L = rge(C, I)."""
    if not is_regular(L):
        raise NotRegular("lower block of the basis is singular")
    # C = upper @ inv(lower)
    return np.linalg.solve(L.lower.T, L.upper.T).T


def transform(L: Subspace, T) -> Subspace:
    """Image {T z : z in L} under a nonsingular 2n x 2n matrix."""
    T = np.asarray(T, dtype=float)
    if T.shape != (2 * L.n, 2 * L.n):
        raise DimensionMismatch(f"transform must be {2 * L.n}x{2 * L.n}, got {T.shape}")
    check_nonsingular(T)
    return from_basis(T @ L.basis)


def check_nonsingular(T: np.ndarray) -> None:
    sv = np.linalg.svd(T, compute_uv=False)
    # relative test on the smallest singular value; a determinant test
    # rejects well-conditioned unit-triangular matrices once n grows
    if sv[0] == 0.0 or sv[-1] <= EPS_RANK * sv[0]:
        raise SingularTransform("transform matrix is numerically singular")


def operator_norm(M) -> float:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def sum_rule_matrix(jac) -> np.ndarray:
    """[[I, 0], [jac, I]], the linear part of (x, y) -> (x, y + h(x))."""
    jac = np.atleast_2d(np.asarray(jac, dtype=float))
    n = jac.shape[0]
    return np.block([[np.eye(n), np.zeros((n, n))], [jac, np.eye(n)]])
