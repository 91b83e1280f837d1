"""Measured connectivity: which node pairs can range each other, and how noisily.

A pair is linked iff its true distance is within the radio range R and, on
mountain terrain, line of sight is clear. Measured distances carry additive
uniform noise on [0, e_r * R], one draw per unordered pair: RSSI-style
ranging overestimates, so the noise is a one-sided inflation whose
magnitude is capped at e_r * R.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DisconnectedGraphError
from .topology import MOUNTAIN, NodeSet, los_pair_mask

# Measured distances are clamped to this fraction of R so that heavy noise
# on a short edge can never produce a zero or negative range.
MIN_MEASURED_FRACTION = 1e-6


@dataclass(frozen=True)
class NoiseModel:
    """Relative range error: measurement noise is uniform on [0, e_r*R]."""

    e_r: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.e_r <= 0.5:
            raise ValueError(f"e_r must lie in [0, 0.5], got {self.e_r}")


@dataclass
class RangeGraph:
    """Symmetric measured-distance graph.

    weights[i, j] is the measured distance for linked pairs, inf for
    unlinked pairs, and 0 on the diagonal. true_positions is carried along
    for evaluation only; the localization pipeline never reads it.
    """

    weights: np.ndarray
    radio_range: float
    true_positions: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 2 or self.weights.shape[0] != self.weights.shape[1]:
            raise ValueError("weights must be a square matrix")
        if self.radio_range <= 0:
            raise ValueError("radio_range must be positive")

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def num_edges(self) -> int:
        iu = np.triu_indices(self.n, k=1)
        return int(np.isfinite(self.weights[iu]).sum())

    def edge_list(self):
        """Yield (i, j, measured) for every edge, i < j."""
        ii, jj = np.triu_indices(self.n, k=1)
        keep = np.isfinite(self.weights[ii, jj])
        for i, j in zip(ii[keep], jj[keep]):
            yield int(i), int(j), float(self.weights[i, j])


def _component_count(adj: np.ndarray) -> int:
    n = len(adj)
    seen = np.zeros(n, dtype=bool)
    components = 0
    while not seen.all():
        components += 1
        frontier = np.zeros(n, dtype=bool)
        frontier[int(np.argmin(seen))] = True
        while frontier.any():
            seen |= frontier
            frontier = adj[frontier].any(axis=0) & ~seen
    return components


def build_graph(nodes: NodeSet, R: float, noise: NoiseModel = NoiseModel(),
                seed: int = 0) -> RangeGraph:
    """Build the measured range graph for a deployment.

    Link decisions use the true distances (and line of sight on mountains);
    noise perturbs only the measured values, so the edge set is independent
    of e_r. Raises DisconnectedGraphError when the result is not one
    component, carrying the component count.
    """
    if R <= 0:
        raise ValueError("radio range must be positive")
    pos = nodes.positions
    n = nodes.n
    diff = pos[:, None, :] - pos[None, :, :]
    true_d = np.sqrt((diff**2).sum(axis=2))

    adj = true_d <= R
    np.fill_diagonal(adj, False)
    if nodes.terrain is not None and nodes.terrain.kind == MOUNTAIN:
        ii, jj = np.nonzero(np.triu(adj, k=1))
        visible = los_pair_mask(nodes.terrain, pos, ii, jj)
        adj[:] = False
        adj[ii[visible], jj[visible]] = True
        adj |= adj.T

    # One noise draw per unordered pair, in fixed (i < j) order, regardless
    # of which pairs end up linked: the same seed yields the same underlying
    # noise stream for every e_r.
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, k=1)
    u = rng.uniform(0.0, noise.e_r * R, size=len(iu[0]))
    measured = np.maximum(true_d[iu] + u, MIN_MEASURED_FRACTION * R)

    weights = np.full((n, n), np.inf)
    np.fill_diagonal(weights, 0.0)
    keep = adj[iu]
    ii, jj = iu[0][keep], iu[1][keep]
    weights[ii, jj] = measured[keep]
    weights[jj, ii] = measured[keep]

    components = _component_count(adj)
    if components != 1:
        raise DisconnectedGraphError(components)
    return RangeGraph(weights, R, true_positions=pos)


def avg_connectivity(graph: RangeGraph) -> float:
    """Average neighbor count, 2|E| / n."""
    return 2.0 * graph.num_edges / graph.n


def component_count(graph: RangeGraph) -> int:
    """Number of connected components (1 for a usable graph)."""
    adj = np.isfinite(graph.weights)
    np.fill_diagonal(adj, False)
    return _component_count(adj)


def save_edges_csv(graph: RangeGraph, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "j", "measured_distance"])
        for i, j, d in graph.edge_list():
            writer.writerow([i, j, format(d, ".17g")])


def load_edges_csv(path, n: int, radio_range: float,
                   true_positions: np.ndarray | None = None) -> RangeGraph:
    """Rebuild a RangeGraph from an edge CSV; caller supplies n and R."""
    weights = np.full((n, n), np.inf)
    np.fill_diagonal(weights, 0.0)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["i", "j", "measured_distance"]:
            raise ValueError(f"unexpected edge CSV header {header!r}")
        for rec in reader:
            i, j, d = int(rec[0]), int(rec[1]), float(rec[2])
            weights[i, j] = d
            weights[j, i] = d
    return RangeGraph(weights, radio_range, true_positions=true_positions)
