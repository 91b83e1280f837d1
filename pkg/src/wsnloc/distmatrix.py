"""All-pairs distance estimation from the range graph.

Two interchangeable strategies fill the matrix: classic shortest paths
(Dijkstra, additive relaxation) and a heuristic that shortens multi-hop
estimates. Plain path summation always returns the longest consistent
distance; the heuristic instead places the far node of two chained hops at
the midpoint of its feasible arc (it must be out of radio range of the
near node, yet within hop reach of the middle one), which on average lands
much closer to the true separation. Hop pairs combined this way act as
virtual edges next to the measured ones, and shortest paths over the
augmented graph yield the full matrix, so every estimate decomposes into
single measured hops and arc-combined hop pairs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .ranging import RangeGraph
from .topology import NodeSet


@dataclass
class DistanceMatrix:
    """Symmetric n x n estimated distances, zero diagonal, finite everywhere."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise ValueError("distance matrix must be square")

    @property
    def n(self) -> int:
        return len(self.values)


def _ha(d1, d2, R):
    # Arc-midpoint estimate for the far endpoint of two chained hops:
    #   a^2 = d1^2 + d2^2 + 2 d1 d2 sin(theta / 2)
    #   theta = arccos((d1^2 + d2^2 - R^2) / (2 d1 d2)), argument clipped
    # Clipping covers multi-hop accumulations where |d1 - d2| >= R (angle 0)
    # and short chains where d1 + d2 <= R (angle pi, a = d1 + d2).
    d1sq = d1 * d1
    d2sq = d2 * d2
    arg = np.clip((d1sq + d2sq - R * R) / (2.0 * d1 * d2), -1.0, 1.0)
    return np.sqrt(d1sq + d2sq + 2.0 * d1 * d2 * np.sin(0.5 * np.arccos(arg)))


def ha_combine(d1, d2, R):
    """Combine two chained hop distances into one estimate.

    Accepts scalars or arrays. The result always satisfies a <= d1 + d2
    (enforced exactly, so the heuristic can never exceed plain summation)
    and exceeds R whenever the angle argument is interior.
    """
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    if R <= 0:
        raise ValueError("R must be positive")
    if np.any(d1 <= 0) or np.any(d2 <= 0):
        raise ValueError("hop distances must be positive")
    a = np.minimum(_ha(d1, d2, R), d1 + d2)
    return float(a) if a.ndim == 0 else a


def _all_sources_shortest(weights: np.ndarray) -> np.ndarray:
    """Dijkstra from every source at once; dense, vectorized over sources.

    Each iteration settles the nearest unsettled node of every source row
    and relaxes its outgoing edges additively. O(n) iterations of O(n^2)
    array work, comfortably inside the O(n^3) budget at these sizes.
    """
    n = len(weights)
    w_all = weights.copy()
    np.fill_diagonal(w_all, np.inf)  # self-loops never relax

    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    settled = np.zeros((n, n), dtype=bool)
    rows = np.arange(n)

    for _ in range(n):
        u = np.where(settled, np.inf, dist).argmin(axis=1)
        settled[rows, u] = True
        cand = dist[rows, u][:, None] + w_all[u, :]
        np.minimum(dist, cand, out=dist)

    if not np.all(np.isfinite(dist)):
        raise RuntimeError("unreachable pair: input graph was not connected")
    # Forward and reverse path sums can differ in the last ulp; keep the
    # smaller so the matrix is exactly symmetric.
    return np.minimum(dist, dist.T)


def dijkstra_all_pairs(graph: RangeGraph) -> DistanceMatrix:
    """Minimum-total-weight path distance for every node pair."""
    return DistanceMatrix(_all_sources_shortest(graph.weights))


def _two_hop_virtual_edges(weights: np.ndarray, R: float) -> np.ndarray:
    """Best arc-midpoint estimate between the two-hop neighbors of each node."""
    n = len(weights)
    virtual = np.full((n, n), np.inf)
    for mid in range(n):
        w = weights[:, mid]
        idx = np.nonzero(np.isfinite(w) & (w > 0))[0]
        if len(idx) < 2:
            continue
        hops = w[idx]
        a = np.minimum(_ha(hops[:, None], hops[None, :], R),
                       hops[:, None] + hops[None, :])
        block = np.ix_(idx, idx)
        virtual[block] = np.minimum(virtual[block], a)
    return virtual


def ha_all_pairs(graph: RangeGraph, R: float | None = None) -> DistanceMatrix:
    """All-pairs distances with heuristic two-hop combination.

    Non-linked pairs sharing a middle node get a virtual edge carrying the
    arc-midpoint estimate of their two hops; shortest paths over measured
    plus virtual edges give the matrix. Because every virtual edge is
    capped at the sum of its hops, no entry can exceed the plain
    shortest-path distance. R defaults to the graph's radio range, the
    nominal network-wide range every node knows.
    """
    if R is None:
        R = graph.radio_range
    weights = graph.weights
    linked = np.isfinite(weights) & (weights > 0)
    # Direct measurements stay authoritative; virtual edges only fill
    # non-linked pairs.
    augmented = np.where(linked, weights, _two_hop_virtual_edges(weights, R))
    np.fill_diagonal(augmented, 0.0)
    return DistanceMatrix(_all_sources_shortest(augmented))


def matrix_error(est: DistanceMatrix, nodes: NodeSet, R: float) -> float:
    """Mean |estimated - true| over unordered pairs, normalized by R."""
    if est.n != nodes.n:
        raise ValueError("matrix size does not match node count")
    pos = nodes.positions
    diff = pos[:, None, :] - pos[None, :, :]
    true_d = np.sqrt((diff**2).sum(axis=2))
    iu = np.triu_indices(est.n, k=1)
    return float(np.abs(est.values[iu] - true_d[iu]).mean() / R)


def save_matrix_csv(matrix: DistanceMatrix, path):
    """First line holds n, then n rows of n comma-separated distances."""
    with open(path, "w", newline="") as fh:
        fh.write(f"{matrix.n}\n")
        writer = csv.writer(fh, lineterminator="\n")
        for row in matrix.values:
            writer.writerow([format(v, ".17g") for v in row])


def load_matrix_csv(path) -> DistanceMatrix:
    with open(path, newline="") as fh:
        n = int(fh.readline())
        values = np.array([[float(v) for v in rec] for rec in csv.reader(fh)])
    if values.shape != (n, n):
        raise ValueError(f"expected {n}x{n} matrix, got {values.shape}")
    return DistanceMatrix(values)
