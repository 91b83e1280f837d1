"""Classical multidimensional scaling.

Square the distance matrix, double-center it into a scalar-product matrix,
eigendecompose, and keep the leading components as coordinates. The output
is a relative map: correct up to translation, rotation, and reflection.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .distmatrix import DistanceMatrix


@dataclass
class CenteredGram:
    """Scalar-product matrix B = -1/2 * T * D^2 * T with T = I - 11'/n."""

    B: np.ndarray


@dataclass
class RelativeMap:
    """MDS coordinates (column means ~ 0) with the retained eigenvalues.

    n_clamped counts retained eigenvalues that came out negative and were
    clamped to zero; shortest-path input matrices are routinely slightly
    non-Euclidean, so a nonzero count is normal there.
    """

    coords: np.ndarray
    eigenvalues: np.ndarray
    n_clamped: int = 0


def double_center(D: DistanceMatrix) -> CenteredGram:
    """Turn squared distances into centered scalar products."""
    n = D.n
    if n < 2:
        raise ValueError("need at least 2 points to center")
    T = np.eye(n) - np.ones((n, n)) / n
    B = -0.5 * T @ (D.values**2) @ T
    return CenteredGram((B + B.T) / 2.0)


def embed(gram: CenteredGram, dims: int = 3) -> RelativeMap:
    """Spectral embedding of the centered Gram matrix into `dims` coordinates."""
    n = len(gram.B)
    if not 1 <= dims <= n:
        raise ValueError(f"dims must be in [1, {n}], got {dims}")
    try:
        evals, evecs = np.linalg.eigh(gram.B)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigendecomposition failed to converge: {exc}") from exc
    top = evals[-dims:][::-1]
    vecs = evecs[:, -dims:][:, ::-1]
    n_clamped = int((top < 0).sum())
    lam = np.clip(top, 0.0, None)
    return RelativeMap(vecs * np.sqrt(lam), lam, n_clamped)


def classical_mds(D: DistanceMatrix, dims: int = 3) -> RelativeMap:
    """Full classical MDS: double-center then embed."""
    return embed(double_center(D), dims)


def save_map_csv(coords: np.ndarray, path, eigenvalues: np.ndarray | None = None):
    """Write `id,x,y,z` rows; relative maps append their eigenvalues as a sidecar line."""
    coords = np.asarray(coords, float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "x", "y", "z"])
        for i, row in enumerate(coords):
            writer.writerow([i] + [format(v, ".17g") for v in row])
        if eigenvalues is not None:
            fh.write("# eigenvalues," + ",".join(format(v, ".17g") for v in eigenvalues) + "\n")
