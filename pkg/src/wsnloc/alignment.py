"""Anchor-based alignment of a relative map into the world frame.

Least-squares orthogonal fitting over the anchor nodes via SVD of the 3x3
covariance between the centered point sets. Reflections are allowed: MDS
output has arbitrary chirality, so roughly half of all runs need one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mds import RelativeMap
from .topology import NodeSet

MIN_ANCHORS = 4

# Two vanishing singular values (relative to the largest) leave the rotation
# underdetermined; the fit is still returned but flagged.
_DEGENERACY_RTOL = 1e-9


@dataclass
class RigidTransform:
    """Orthogonal rotation-or-reflection plus translation, x -> R x + t."""

    rotation: np.ndarray
    translation: np.ndarray
    degenerate: bool = False

    def flat(self) -> list[float]:
        """12 numbers: row-major rotation then translation."""
        return [float(v) for v in self.rotation.ravel()] + [float(v) for v in self.translation]


@dataclass
class AnchorSet:
    """Node ids with known true positions, used to pin the absolute frame."""

    indices: np.ndarray
    true_positions: np.ndarray

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=int)
        self.true_positions = np.asarray(self.true_positions, dtype=float)
        if len(self.indices) != len(self.true_positions):
            raise ValueError("indices and true_positions disagree in length")
        if len(self.indices) < MIN_ANCHORS:
            raise ValueError(f"need at least {MIN_ANCHORS} anchors")
        if len(np.unique(self.indices)) != len(self.indices):
            raise ValueError("anchor indices must be distinct")

    def __len__(self) -> int:
        return len(self.indices)


@dataclass
class AbsoluteMap:
    """Estimated node coordinates in the world frame."""

    coords: np.ndarray


def draw_anchors(nodes: NodeSet, count: int, seed: int) -> AnchorSet:
    """Pick `count` anchor nodes uniformly without replacement."""
    if count < MIN_ANCHORS:
        raise ValueError(f"need at least {MIN_ANCHORS} anchors, got {count}")
    if count > nodes.n:
        raise ValueError(f"cannot draw {count} anchors from {nodes.n} nodes")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(nodes.n, size=count, replace=False))
    return AnchorSet(idx, nodes.positions[idx])


def fit_transform(P, Q) -> RigidTransform:
    """Least-squares orthogonal transform mapping point set P onto Q.

    Centers both sets, takes the SVD of the 3x3 covariance H = P'^T Q',
    and evaluates both orientation candidates V diag(1, 1, +-1) U^T,
    keeping whichever leaves the smaller residual. det(R) may be -1.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape != Q.shape or P.ndim != 2 or P.shape[1] != 3:
        raise ValueError("P and Q must be matching (N, 3) arrays")
    if len(P) < MIN_ANCHORS:
        raise ValueError(f"need at least {MIN_ANCHORS} corresponding points")

    p_bar = P.mean(axis=0)
    q_bar = Q.mean(axis=0)
    Pc = P - p_bar
    Qc = Q - q_bar
    H = Pc.T @ Qc
    U, S, Vt = np.linalg.svd(H)

    best_R = None
    best_res = np.inf
    for s in (1.0, -1.0):
        R = (Vt.T * np.array([1.0, 1.0, s])) @ U.T
        res = float(((Pc @ R.T - Qc) ** 2).sum())
        if res < best_res:
            best_R, best_res = R, res

    t = q_bar - best_R @ p_bar
    degenerate = bool(S[1] < _DEGENERACY_RTOL * S[0])
    return RigidTransform(best_R, t, degenerate)


def apply_transform(T: RigidTransform, relative: RelativeMap) -> AbsoluteMap:
    """Map every relative coordinate into the world frame."""
    return AbsoluteMap(relative.coords @ T.rotation.T + T.translation)
