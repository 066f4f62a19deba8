"""Regularity certificates computed from derivative bundles."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np
import scipy.linalg

from .bundle import DUAL, PRIMAL, DerivativeBundle
from .errors import DimensionMismatch, EmptyBundle, NotRegular
from .polyhedral import EPS_ACT
from .problem import GeneralizedEquation, bundle_at, graph_point, lipschitz_bases
from .subspace import EPS_RANK, c_matrix, is_regular, operator_norm

EPS_PSD = 1e-9
WITNESS_TOL = 1e-7

CERTIFIED = "Certified"
REFUTED = "Refuted"
INCONCLUSIVE = "Inconclusive"


def _num(x: float) -> Any:
    """JSON encoding of a modulus; +inf becomes a flag object."""
    return {"inf": True} if np.isinf(x) else float(x)


@dataclass
class MemberInfo:
    id: int
    regular: bool
    c_norm: Optional[float] = None
    c_psd: Optional[bool] = None
    face: Optional[tuple[int, ...]] = None

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "regular": self.regular,
            "c_norm": self.c_norm,
            "c_psd": self.c_psd,
            "face": None if self.face is None else list(self.face),
        }


@dataclass
class Certificate:
    status: str
    method: str
    samples: int = 0
    witness: Optional[dict[str, Any]] = None

    def to_json(self) -> dict[str, Any]:
        return {"status": self.status, "method": self.method, "samples": self.samples, "witness": self.witness}


@dataclass
class Verdict:
    positive: bool
    reason: str = ""
    modulus: Optional[float] = None

    def to_json(self) -> dict[str, Any]:
        return {
            "positive": self.positive,
            "reason": self.reason,
            "modulus": None if self.modulus is None else _num(self.modulus),
        }


@dataclass
class RegularityReport:
    scd_regular: bool
    scd_reg_modulus: float
    per_member: list[MemberInfo]
    smr_certificate: Optional[Certificate] = None
    lsubreg: Optional[float] = None
    monotone_strongly_regular: Optional[bool] = None
    tilt_stable: Optional[bool] = None
    tilt_modulus: Optional[float] = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {
            "scd_regular": self.scd_regular,
            "scd_reg_modulus": _num(self.scd_reg_modulus),
            "per_member": [m.to_json() for m in self.per_member],
            "smr_certificate": None if self.smr_certificate is None else self.smr_certificate.to_json(),
            "lsubreg": None if self.lsubreg is None else _num(self.lsubreg),
            "monotone_strongly_regular": self.monotone_strongly_regular,
            "tilt_stable": self.tilt_stable,
            "tilt_modulus": None if self.tilt_modulus is None else _num(self.tilt_modulus),
            "notes": list(self.notes),
        }


def is_psd(C: np.ndarray, tol: float = EPS_PSD) -> bool:
    """<C p, p> >= 0 for all p, tested on the symmetric part."""
    C = np.atleast_2d(C)
    return bool(np.linalg.eigvalsh(0.5 * (C + C.T)).min() >= -tol)


def scd_regularity(bundle: DerivativeBundle) -> RegularityReport:
    if not len(bundle):
        raise EmptyBundle("the bundle is empty at this point")
    info = []
    modulus = 0.0
    for i, L in enumerate(bundle.members):
        face = bundle.faces[i].active if bundle.faces else None
        if is_regular(L):
            C = c_matrix(L)
            norm = operator_norm(C)
            modulus = max(modulus, norm)
            info.append(MemberInfo(i, True, norm, is_psd(C), face))
        else:
            info.append(MemberInfo(i, False, None, None, face))
    regular = all(m.regular for m in info)
    return RegularityReport(regular, modulus if regular else float("inf"), info)


def subregularity_modulus(bundle: DerivativeBundle, semismooth_star_assumed: bool = True) -> float:
    """The scd-reg modulus; it equals the strong subregularity modulus
    around the point when the map is SCD semismooth*.
    """
    rep = scd_regularity(bundle)
    if not rep.scd_regular:
        raise NotRegular("bundle contains an irregular subspace")
    return rep.scd_reg_modulus


def _lower_singular(Z: np.ndarray, n: int) -> tuple[bool, float]:
    s_low = np.linalg.svd(Z[n:], compute_uv=False)[-1]
    s_top = np.linalg.svd(Z, compute_uv=False)[0]
    return bool(s_low <= EPS_RANK * s_top), float(s_low)


def _pencil_roots(P: np.ndarray, Q: np.ndarray) -> list[float]:
    """t in [0, 1] with det(t P + (1 - t) Q) = 0."""
    # (t P + (1-t) Q) v = 0  <=>  Q v = t (Q - P) v
    w = scipy.linalg.eigvals(Q, Q - P)
    if np.all(~np.isfinite(w)) and abs(np.linalg.det(Q)) <= EPS_RANK:
        return [0.5]
    roots = []
    for t in w:
        if np.isfinite(t) and abs(t.imag) <= 1e-9 * max(1.0, abs(t.real)) and -1e-12 <= t.real <= 1 + 1e-12:
            roots.append(float(np.clip(t.real, 0.0, 1.0)))
    return sorted(roots)


def _witness(mats: list[np.ndarray], weights: np.ndarray, n: int) -> Optional[dict[str, Any]]:
    Z = sum(w * M for w, M in zip(weights, mats))
    s_low = float(np.linalg.svd(Z[n:], compute_uv=False)[-1])
    if s_low > WITNESS_TOL * max(1.0, float(np.linalg.svd(Z, compute_uv=False)[0])):
        return None
    return {"weights": [float(w) for w in weights], "min_singular_value": s_low}


def _segment_witness(mats, wa, wb, n) -> Optional[dict[str, Any]]:
    Za = sum(w * M for w, M in zip(wa, mats))
    Zb = sum(w * M for w, M in zip(wb, mats))
    for t in _pencil_roots(Za[n:], Zb[n:]):
        wit = _witness(mats, t * wa + (1 - t) * wb, n)
        if wit is not None:
            return wit
    return None


def strong_regularity_certificate(
    matrices: Sequence, samples: int = 10000, seed: int = 0
) -> Certificate:
    """Nonsingularity of the lower block over the convex hull of bases.

    Vertices and pairs are decided exactly (pairs through a generalized
    eigenvalue problem). For three or more matrices, random convex
    combinations are drawn; a sign change of the determinant between two
    sampled points is resolved to an exact singular point on the segment.
    A sampled pass never yields ``Certified``.
    """
    mats = [np.atleast_2d(np.asarray(Z, dtype=float)) for Z in matrices]
    if not mats:
        raise ValueError("need at least one matrix")
    n = mats[0].shape[1]
    for Z in mats:
        if Z.shape != (2 * n, n):
            raise DimensionMismatch(f"expected {2 * n}x{n} bases, got {Z.shape}")
    m = len(mats)
    eye = np.eye(m)

    for i in range(m):
        singular, _ = _lower_singular(mats[i], n)
        if singular:
            return Certificate(REFUTED, "Pairwise", 0, _witness(mats, eye[i], n))
    for i, j in itertools.combinations(range(m), 2):
        wit = _segment_witness(mats, eye[i], eye[j], n)
        if wit is not None:
            return Certificate(REFUTED, "Pairwise", 0, wit)
    if m <= 2:
        return Certificate(CERTIFIED, "Pairwise", 0)

    rng = np.random.default_rng(seed)
    W = rng.dirichlet(np.ones(m), size=samples)
    lowers = np.stack([Z[n:] for Z in mats])
    dets = np.linalg.det(np.einsum("sk,kij->sij", W, lowers))
    vertex_dets = np.linalg.det(lowers)
    ref_sign = np.sign(vertex_dets[0])
    flips = np.flatnonzero(np.sign(dets) != ref_sign)
    if flips.size:
        wit = _segment_witness(mats, eye[0], W[flips[0]], n)
        if wit is not None:
            return Certificate(REFUTED, "Sampled", samples, wit)
    for w in W[np.argsort(np.abs(dets))[:10]]:
        wit = _witness(mats, w, n)
        if wit is not None:
            return Certificate(REFUTED, "Sampled", samples, wit)
    return Certificate(INCONCLUSIVE, "Sampled", samples)


def _psd_verdict(bundle: DerivativeBundle, what: str) -> Verdict:
    rep = scd_regularity(bundle)
    if not rep.scd_regular:
        bad = [m.id for m in rep.per_member if not m.regular]
        return Verdict(False, f"not SCD regular: members {bad} are irregular")
    bad = [m.id for m in rep.per_member if not m.c_psd]
    if bad:
        return Verdict(False, f"C_L is not positive semidefinite for members {bad}")
    return Verdict(True, f"SCD regular and every C_L is positive semidefinite ({what})", rep.scd_reg_modulus)


def monotone_strong_regularity(bundle: DerivativeBundle) -> Verdict:
    """Strong metric regularity test for locally maximally hypomonotone maps.

    The hypomonotonicity hypothesis is not checked; callers assert it.
    """
    return _psd_verdict(bundle, "strong metric regularity")


def tilt_stability(bundle: DerivativeBundle) -> Verdict:
    """Tilt stability of xbar for q, from the primal bundle of the
    subgradient mapping at (xbar, 0). On success ``modulus`` is the tilt
    modulus.
    """
    return _psd_verdict(bundle, "tilt stability")


def analyze(
    ge: GeneralizedEquation,
    x,
    v,
    samples: int = 10000,
    seed: int = 0,
    assume_hypomonotone: bool = False,
) -> RegularityReport:
    """Full regularity report at the graph point (x, f(x) + v - y_target)."""
    p = graph_point(ge, x, v)
    dual = bundle_at(ge, p, DUAL)
    primal = bundle_at(ge, p, PRIMAL)
    rep = scd_regularity(dual)
    rep.notes.append(f"faces identified with activity tolerance {EPS_ACT:g}")
    near = np.setdiff1d(ge.set.active(p.x, tol=1e3 * EPS_ACT), ge.set.active(p.x))
    if near.size:
        rep.notes.append(f"rows {near.tolist()} are within {1e3 * EPS_ACT:g} of active; the face lattice may be fragile")
    primal_rep = scd_regularity(primal)
    if primal_rep.scd_regular != rep.scd_regular or (
        rep.scd_regular and abs(primal_rep.scd_reg_modulus - rep.scd_reg_modulus) > 1e-9
    ):
        rep.notes.append("primal and dual bundles disagree on the regularity modulus")

    if rep.scd_regular:
        # f + N_C with polyhedral C is SCD semismooth* at every graph point
        rep.lsubreg = subregularity_modulus(dual, semismooth_star_assumed=True)
        rep.notes.append("lsubreg equals the scd-reg modulus: f + N_C with polyhedral C is SCD semismooth*")
    else:
        rep.notes.append("not SCD regular: F is not strongly metrically subregular around the point")

    rep.smr_certificate = strong_regularity_certificate(lipschitz_bases(ge, p), samples=samples, seed=seed)

    if assume_hypomonotone:
        rep.monotone_strongly_regular = monotone_strong_regularity(primal).positive
        rep.notes.append("monotone strong-regularity verdict relies on the asserted local maximal hypomonotonicity")

    J = ge.smooth.jacobian(p.x)
    if not np.allclose(J, J.T, atol=1e-9):
        rep.notes.append("tilt stability skipped: the Jacobian of f is not symmetric")
    elif np.linalg.norm(p.y) > 1e-9:
        rep.notes.append("tilt stability skipped: y != 0, so x is not a stationary point")
    else:
        verdict = tilt_stability(primal)
        rep.tilt_stable = verdict.positive
        rep.tilt_modulus = verdict.modulus
    return rep
