"""3D wireless sensor network localization via multidimensional scaling.

Pipeline: deploy nodes (topology) -> measure noisy ranges within radio
range (ranging) -> estimate all-pairs distances by shortest paths or the
heuristic arc-midpoint rule (distmatrix) -> classical MDS relative map
(mds) -> anchor-based orthogonal alignment (alignment) -> error metrics
(evaluation). The harness sweeps the whole experiment matrix.
"""

from .alignment import (AbsoluteMap, AnchorSet, RigidTransform, apply_transform,
                        draw_anchors, fit_transform)
from .distmatrix import (DistanceMatrix, dijkstra_all_pairs, ha_all_pairs,
                         ha_combine, matrix_error)
from .errors import ConfigurationError, DisconnectedGraphError
from .evaluation import TrialResult, estimation_error
from .harness import (ALGORITHMS, IMDS, MDS_MAP, ResultTable, SweepConfig,
                      compare_distance_methods, derive_seed, make_topology,
                      read_csv, run_sweep, run_trial, write_csv)
from .mds import CenteredGram, RelativeMap, classical_mds, double_center, embed
from .ranging import (NoiseModel, RangeGraph, avg_connectivity, build_graph,
                      component_count)
from .topology import (MOUNTAIN, VALLEY, NodeSet, TerrainSpec, gen_grid,
                       gen_random_cube, gen_random_square, gen_surface,
                       line_of_sight)

__all__ = [
    "AbsoluteMap", "AnchorSet", "RigidTransform", "apply_transform",
    "draw_anchors", "fit_transform",
    "DistanceMatrix", "dijkstra_all_pairs", "ha_all_pairs", "ha_combine",
    "matrix_error",
    "ConfigurationError", "DisconnectedGraphError",
    "TrialResult", "estimation_error",
    "ALGORITHMS", "IMDS", "MDS_MAP", "ResultTable", "SweepConfig",
    "compare_distance_methods", "derive_seed", "make_topology", "read_csv",
    "run_sweep", "run_trial", "write_csv",
    "CenteredGram", "RelativeMap", "classical_mds", "double_center", "embed",
    "NoiseModel", "RangeGraph", "avg_connectivity", "build_graph",
    "component_count",
    "MOUNTAIN", "VALLEY", "NodeSet", "TerrainSpec", "gen_grid",
    "gen_random_cube", "gen_random_square", "gen_surface", "line_of_sight",
]
