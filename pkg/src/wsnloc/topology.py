"""Ground-truth node deployments: random cube, regular grid, and 3D surface terrains.

All coordinates are expressed in units of r (one unit length). Every
generator is a pure function of its parameters and seed, so repeated calls
reproduce node sets byte-for-byte.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

VALLEY = "valley"
MOUNTAIN = "mountain"

# Radio clearance above the terrain, in r. Antennas sit slightly above the
# ground; without this every node on the (concave) summit cap of a smooth
# mountain would be cut off from the rest of the network by its own local
# curvature, and mountain deployments could never form a connected graph.
LOS_CLEARANCE = 1.0

_LOS_SAMPLES = 100
_LOS_EPS = 1e-9


@dataclass(frozen=True)
class TerrainSpec:
    """Single Gaussian bump (mountain, peak_height > 0) or bowl (valley, < 0)."""

    kind: str
    center: tuple[float, float] = (50.0, 50.0)
    peak_height: float = 40.0
    spread: float = 25.0
    base_side: float = 100.0

    def __post_init__(self):
        if self.kind not in (VALLEY, MOUNTAIN):
            raise ValueError(f"unknown terrain kind {self.kind!r}")
        if self.spread <= 0:
            raise ValueError("spread must be positive")
        if self.base_side <= 0:
            raise ValueError("base_side must be positive")

    def height(self, x, y):
        """Terrain height at (x, y); accepts scalars or arrays."""
        cx, cy = self.center
        rho2 = (np.asarray(x, float) - cx) ** 2 + (np.asarray(y, float) - cy) ** 2
        return self.peak_height * np.exp(-rho2 / (2.0 * self.spread**2))


@dataclass
class NodeSet:
    """Ground-truth positions of the deployed sensors, one row per node."""

    positions: np.ndarray
    terrain: TerrainSpec | None = None

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        if self.positions.ndim != 2 or self.positions.shape[1] != 3:
            raise ValueError("positions must be an (n, 3) array")
        if len(self.positions) < 1:
            raise ValueError("at least one node required")

    @property
    def n(self) -> int:
        return len(self.positions)


def _check_count(n: int):
    # Absolute-map construction needs at least 4 anchors, so deployments
    # below 4 nodes can never be localized.
    if n < 4:
        raise ValueError(f"need at least 4 nodes, got {n}")


def gen_random_cube(n: int, side: float, seed: int) -> NodeSet:
    """n nodes i.i.d. uniform over the cube [0, side]^3."""
    _check_count(n)
    if side <= 0:
        raise ValueError("side must be positive")
    rng = np.random.default_rng(seed)
    return NodeSet(rng.uniform(0.0, side, size=(n, 3)))


def gen_random_square(n: int, side: float, seed: int) -> NodeSet:
    """n nodes uniform over the square [0, side]^2 at z = 0 (planar deployment)."""
    _check_count(n)
    if side <= 0:
        raise ValueError("side must be positive")
    rng = np.random.default_rng(seed)
    pts = np.zeros((n, 3))
    pts[:, :2] = rng.uniform(0.0, side, size=(n, 2))
    return NodeSet(pts)


def gen_grid(points_per_axis: int, spacing: float) -> NodeSet:
    """Regular lattice of points_per_axis^3 nodes, row-major node order."""
    if points_per_axis < 2:
        raise ValueError("points_per_axis must be at least 2")
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    idx = np.arange(points_per_axis, dtype=float)
    pts = np.stack(np.meshgrid(idx, idx, idx, indexing="ij"), axis=-1)
    return NodeSet(pts.reshape(-1, 3) * spacing)


def gen_surface(spec: TerrainSpec, n: int, seed: int) -> NodeSet:
    """n nodes uniform over the terrain base, z pinned to the surface height."""
    _check_count(n)
    rng = np.random.default_rng(seed)
    pts = np.empty((n, 3))
    pts[:, :2] = rng.uniform(0.0, spec.base_side, size=(n, 2))
    pts[:, 2] = spec.height(pts[:, 0], pts[:, 1])
    return NodeSet(pts, terrain=spec)


def _segment_points(p, q):
    # 100 uniformly spaced interior points, endpoints excluded.
    t = np.linspace(0.0, 1.0, _LOS_SAMPLES + 2)[1:-1]
    return p + t[:, None] * (q - p)


def line_of_sight(spec: TerrainSpec, p, q, clearance: float = LOS_CLEARANCE) -> bool:
    """True when the radio path p -> q clears the terrain.

    A valley never blocks its own surface nodes. For a mountain the straight
    segment (lifted by the antenna clearance) is sampled at 100 interior
    points and must stay above the terrain at every one of them.
    """
    if spec.kind == VALLEY:
        return True
    seg = _segment_points(np.asarray(p, float), np.asarray(q, float))
    h = spec.height(seg[:, 0], seg[:, 1])
    return bool(np.all(seg[:, 2] + clearance > h + _LOS_EPS))


def los_pair_mask(spec: TerrainSpec, positions: np.ndarray, ii, jj,
                  clearance: float = LOS_CLEARANCE) -> np.ndarray:
    """Vectorized line_of_sight over the node pairs (ii[k], jj[k])."""
    if spec.kind == VALLEY:
        return np.ones(len(ii), dtype=bool)
    t = np.linspace(0.0, 1.0, _LOS_SAMPLES + 2)[1:-1]
    p = positions[ii]
    seg = p[:, None, :] + t[None, :, None] * (positions[jj] - p)[:, None, :]
    h = spec.height(seg[..., 0], seg[..., 1])
    return np.all(seg[..., 2] + clearance > h + _LOS_EPS, axis=1)


def save_nodes_csv(nodes: NodeSet, path):
    """Write `id,x,y,z` rows; coordinates keep full double precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "x", "y", "z"])
        for i, row in enumerate(nodes.positions):
            writer.writerow([i] + [format(v, ".17g") for v in row])


def load_nodes_csv(path) -> NodeSet:
    """Inverse of save_nodes_csv (terrain metadata is not persisted)."""
    rows = []
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:4] != ["id", "x", "y", "z"]:
            raise ValueError(f"unexpected node CSV header {header!r}")
        for rec in reader:
            rows.append([float(rec[1]), float(rec[2]), float(rec[3])])
    return NodeSet(np.array(rows))
