"""Accuracy metrics and the per-trial result record."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .alignment import AbsoluteMap, AnchorSet
from .topology import NodeSet


@dataclass
class TrialResult:
    """One localization run of one algorithm; field order matches the CSV columns."""

    topology: str
    n: int
    radio_range: float
    num_anchors: int
    e_r: float
    trial: int
    algorithm: str
    avg_connectivity: float
    error_pct: float
    matrix_error: float
    resamples: int
    seed: int


def estimation_error(est: AbsoluteMap, truth: NodeSet, anchors: AnchorSet,
                     R: float) -> float:
    """Mean non-anchor position error normalized by R, in percent.

    Anchors are excluded from the sum: their estimates are pinned by the
    alignment and would only dilute the metric.
    """
    if len(est.coords) != truth.n:
        raise ValueError("estimate and truth disagree in node count")
    free = np.ones(truth.n, dtype=bool)
    free[anchors.indices] = False
    n_free = int(free.sum())
    if n_free == 0:
        raise ValueError("no non-anchor nodes to evaluate")
    dists = np.linalg.norm(est.coords[free] - truth.positions[free], axis=1)
    return float(dists.sum() / (n_free * R) * 100.0)
