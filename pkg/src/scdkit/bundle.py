from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from .subspace import EPS_EQ, Subspace, distance

PRIMAL = "primal"
DUAL = "dual"


@dataclass(frozen=True)
class DerivativeBundle:
    """A finite collection of subspaces attached to one graph point.

    ``faces`` is parallel to ``members`` when the bundle was generated from
    the faces of a critical cone, and empty otherwise.
    """

    members: tuple[Subspace, ...]
    flavor: str = DUAL
    point: Any = None
    faces: tuple = field(default=())

    def __post_init__(self):
        if self.flavor not in (PRIMAL, DUAL):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "faces", tuple(self.faces))
        if self.faces and len(self.faces) != len(self.members):
            raise ValueError("faces must be parallel to members")

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def n(self) -> Optional[int]:
        return self.members[0].n if self.members else None


def dedupe(subspaces: Sequence[Subspace], tol: float = EPS_EQ) -> list[int]:
    """Indices of the first occurrence of every distinct subspace."""
    keep: list[int] = []
    for i, L in enumerate(subspaces):
        if all(distance(L, subspaces[j]) > tol for j in keep):
            keep.append(i)
    return keep


def same_members(a: Sequence[Subspace], b: Sequence[Subspace], tol: float = EPS_EQ) -> bool:
    """Set equality of two subspace collections under the d_Z metric."""
    if len(a) != len(b):
        return False
    matched = [False] * len(b)
    for L in a:
        for j, M in enumerate(b):
            if not matched[j] and distance(L, M) <= tol:
                matched[j] = True
                break
        else:
            return False
    return True
