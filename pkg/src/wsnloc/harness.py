"""Experiment harness: run the full topology x anchors x range x noise matrix.

Every trial is a pure function of the base seed and its coordinates in the
sweep, so sweeps reproduce byte-for-byte regardless of worker count. Both
algorithms inside a trial share the same deployment, range graph, noise,
and anchors, making the comparison paired.
"""

from __future__ import annotations

import csv
import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .alignment import apply_transform, draw_anchors, fit_transform
from .distmatrix import dijkstra_all_pairs, ha_all_pairs, matrix_error
from .errors import ConfigurationError, DisconnectedGraphError
from .evaluation import TrialResult, estimation_error
from .mds import classical_mds
from .ranging import NoiseModel, avg_connectivity, build_graph
from .topology import (MOUNTAIN, VALLEY, TerrainSpec, gen_grid, gen_random_cube,
                       gen_random_square, gen_surface)

MDS_MAP = "MDS-MAP"
IMDS = "IMDS"
ALGORITHMS = (MDS_MAP, IMDS)

MAX_RESAMPLES = 50

CSV_HEADER = ["topology", "n", "R", "num_anchors", "e_r", "trial", "algorithm",
              "avg_connectivity", "error_pct", "matrix_error", "resamples", "seed"]


def _build_cube(seed):
    return gen_random_cube(100, 100.0, seed)


def _build_grid(seed):
    return gen_grid(5, 25.0)


def _build_valley(seed):
    return gen_surface(TerrainSpec(VALLEY, peak_height=-40.0), 100, seed)


def _build_mountain(seed):
    return gen_surface(TerrainSpec(MOUNTAIN, peak_height=40.0), 100, seed)


TOPOLOGY_BUILDERS = {
    "cube": _build_cube,
    "grid": _build_grid,
    "valley": _build_valley,
    "mountain": _build_mountain,
}


def _fmt_part(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def derive_seed(base_seed: int, *parts) -> int:
    """Stable 64-bit seed mixed from the base seed and trial coordinates.

    SHA-256 over the '|'-joined decimal representations; platform- and
    run-independent, so any single trial can be reproduced in isolation.
    """
    text = "|".join([str(base_seed)] + [_fmt_part(p) for p in parts])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def make_topology(name: str, seed: int):
    try:
        builder = TOPOLOGY_BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown topology {name!r}") from None
    return builder(seed)


def run_trial(topology: str, num_anchors: int, R: float, e_r: float, trial: int,
              base_seed: int, algorithms=ALGORITHMS) -> list[TrialResult]:
    """Run one trial of every requested algorithm on one shared network.

    Deployment and noise seeds deliberately exclude the anchor count, so
    the same networks recur across anchor settings and anchor-count
    comparisons are paired too. Disconnected draws are regenerated with a
    derived seed, up to MAX_RESAMPLES times; the count is reported.
    """
    R = float(R)
    e_r = float(e_r)
    noise = NoiseModel(e_r)

    graph = None
    for resample in range(MAX_RESAMPLES + 1):
        point_seed = derive_seed(base_seed, topology, R, e_r, trial, resample)
        nodes = make_topology(topology, derive_seed(point_seed, "nodes"))
        try:
            graph = build_graph(nodes, R, noise, derive_seed(point_seed, "noise"))
        except DisconnectedGraphError:
            continue
        break
    if graph is None:
        raise ConfigurationError(
            f"{topology}: no connected graph in {MAX_RESAMPLES + 1} attempts "
            f"at R={R}; increase the radio range")

    anchors = draw_anchors(nodes, num_anchors, derive_seed(point_seed, "anchors", num_anchors))
    connectivity = avg_connectivity(graph)

    results = []
    for algorithm in algorithms:
        if algorithm == MDS_MAP:
            D = dijkstra_all_pairs(graph)
        elif algorithm == IMDS:
            D = ha_all_pairs(graph)
        else:
            raise ValueError(f"unknown algorithm {algorithm!r}")
        relative = classical_mds(D, dims=3)
        transform = fit_transform(relative.coords[anchors.indices], anchors.true_positions)
        estimate = apply_transform(transform, relative)
        results.append(TrialResult(
            topology=topology, n=nodes.n, radio_range=R, num_anchors=num_anchors,
            e_r=e_r, trial=trial, algorithm=algorithm,
            avg_connectivity=connectivity,
            error_pct=estimation_error(estimate, nodes, anchors, R),
            matrix_error=matrix_error(D, nodes, R),
            resamples=resample, seed=point_seed))
    return results


@dataclass
class SweepConfig:
    """Axes of the experiment matrix plus trial count and base seed."""

    topologies: tuple = ("cube", "grid")
    anchor_counts: tuple = (4, 6, 10, 15)
    radio_ranges: tuple = (25.0, 30.0, 35.0, 40.0, 45.0)
    range_errors: tuple = (0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30)
    trials: int = 30
    base_seed: int = 1
    algorithms: tuple = ALGORITHMS

    def __post_init__(self):
        self.topologies = tuple(self.topologies)
        self.anchor_counts = tuple(int(a) for a in self.anchor_counts)
        self.radio_ranges = tuple(float(r) for r in self.radio_ranges)
        self.range_errors = tuple(float(e) for e in self.range_errors)
        self.algorithms = tuple(self.algorithms)
        for name, values in [("topologies", self.topologies),
                             ("anchor_counts", self.anchor_counts),
                             ("radio_ranges", self.radio_ranges),
                             ("range_errors", self.range_errors),
                             ("algorithms", self.algorithms)]:
            if not values:
                raise ValueError(f"{name} must not be empty")
        unknown = set(self.topologies) - set(TOPOLOGY_BUILDERS)
        if unknown:
            raise ValueError(f"unknown topologies: {sorted(unknown)}")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

    def points(self):
        """Trial coordinates in canonical (output) order."""
        for topology in self.topologies:
            for num_anchors in self.anchor_counts:
                for R in self.radio_ranges:
                    for e_r in self.range_errors:
                        for trial in range(self.trials):
                            yield topology, num_anchors, R, e_r, trial


@dataclass
class AggregateStats:
    """Per-configuration summary over trials (failed trials excluded)."""

    trials: int
    mean_error_pct: float
    std_error_pct: float
    mean_connectivity: float
    mean_matrix_error: float


def _nan_result(topology, num_anchors, R, e_r, trial, base_seed, algorithm):
    return TrialResult(
        topology=topology, n=0, radio_range=float(R), num_anchors=num_anchors,
        e_r=float(e_r), trial=trial, algorithm=algorithm,
        avg_connectivity=float("nan"), error_pct=float("nan"),
        matrix_error=float("nan"), resamples=MAX_RESAMPLES,
        seed=derive_seed(base_seed, topology, float(R), float(e_r), trial, MAX_RESAMPLES))


@dataclass
class ResultTable:
    """Sweep output rows in canonical order plus per-configuration aggregates."""

    rows: list
    aggregates: dict = field(init=False)

    def __post_init__(self):
        self.aggregates = compute_aggregates(self.rows)


def compute_aggregates(rows) -> dict:
    groups: dict = {}
    for row in rows:
        key = (row.topology, row.n, row.radio_range, row.num_anchors, row.e_r, row.algorithm)
        groups.setdefault(key, []).append(row)
    aggregates = {}
    for key, members in groups.items():
        errors = np.array([m.error_pct for m in members])
        ok = ~np.isnan(errors)
        errors = errors[ok]
        aggregates[key] = AggregateStats(
            trials=int(ok.sum()),
            mean_error_pct=float(errors.mean()) if len(errors) else float("nan"),
            std_error_pct=float(errors.std(ddof=1)) if len(errors) > 1 else 0.0,
            mean_connectivity=float(np.mean([m.avg_connectivity for m, k in zip(members, ok) if k]))
            if ok.any() else float("nan"),
            mean_matrix_error=float(np.mean([m.matrix_error for m, k in zip(members, ok) if k]))
            if ok.any() else float("nan"))
    return aggregates


def _sweep_worker(args):
    topology, num_anchors, R, e_r, trial, base_seed, algorithms = args
    try:
        return run_trial(topology, num_anchors, R, e_r, trial, base_seed, algorithms)
    except ConfigurationError:
        return [_nan_result(topology, num_anchors, R, e_r, trial, base_seed, alg)
                for alg in algorithms]


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> ResultTable:
    """Run the whole matrix; rows come back in canonical order for any job count."""
    tasks = [(topology, num_anchors, R, e_r, trial, cfg.base_seed, cfg.algorithms)
             for topology, num_anchors, R, e_r, trial in cfg.points()]
    if jobs <= 1:
        per_trial = [_sweep_worker(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (jobs * 8))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_trial = list(pool.map(_sweep_worker, tasks, chunksize=chunk))
    return ResultTable([row for rows in per_trial for row in rows])


def write_csv(table: ResultTable, path):
    """Canonical sweep CSV; floats carry 10 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in table.rows:
            writer.writerow([
                r.topology, r.n, format(r.radio_range, ".10g"), r.num_anchors,
                format(r.e_r, ".10g"), r.trial, r.algorithm,
                format(r.avg_connectivity, ".10g"), format(r.error_pct, ".10g"),
                format(r.matrix_error, ".10g"), r.resamples, r.seed])


def read_csv(path) -> ResultTable:
    rows = []
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected sweep CSV header {header!r}")
        for rec in reader:
            rows.append(TrialResult(
                topology=rec[0], n=int(rec[1]), radio_range=float(rec[2]),
                num_anchors=int(rec[3]), e_r=float(rec[4]), trial=int(rec[5]),
                algorithm=rec[6], avg_connectivity=float(rec[7]),
                error_pct=float(rec[8]), matrix_error=float(rec[9]),
                resamples=int(rec[10]), seed=int(rec[11])))
    return ResultTable(rows)


AGG_HEADER = ["topology", "n", "R", "num_anchors", "e_r", "algorithm", "trials",
              "mean_connectivity", "mean_error_pct", "std_error_pct", "mean_matrix_error"]


def write_aggregates_csv(table: ResultTable, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AGG_HEADER)
        for (topology, n, R, num_anchors, e_r, algorithm), agg in table.aggregates.items():
            writer.writerow([
                topology, n, format(R, ".10g"), num_anchors, format(e_r, ".10g"),
                algorithm, agg.trials, format(agg.mean_connectivity, ".10g"),
                format(agg.mean_error_pct, ".10g"), format(agg.std_error_pct, ".10g"),
                format(agg.mean_matrix_error, ".10g")])


def write_plot_script(table: ResultTable, agg_csv_path, script_path):
    """Emit a gnuplot script drawing error-vs-connectivity curves per (topology, N, e_r)."""
    combos = []
    algorithms = []
    for (topology, _n, _R, num_anchors, e_r, algorithm) in table.aggregates:
        combo = (topology, num_anchors, e_r)
        if combo not in combos:
            combos.append(combo)
        if algorithm not in algorithms:
            algorithms.append(algorithm)
    lines = [
        "# Generated plot script: estimation error vs average connectivity.",
        "# Render with: gnuplot <this file>",
        "set datafile separator ','",
        "set terminal pngcairo size 800,600",
        "set xlabel 'average connectivity'",
        "set ylabel 'estimation error (% of R)'",
        "set key top right",
        "set grid",
    ]
    for topology, num_anchors, e_r in combos:
        er_txt = format(e_r, ".10g")
        png = f"error_{topology}_N{num_anchors}_er{er_txt}.png"
        lines.append(f"set output '{png}'")
        lines.append(f"set title '{topology}, {num_anchors} anchors, e_r={er_txt}'")
        plots = []
        for algorithm in algorithms:
            cond = (f"strcol(1) eq '{topology}' && $4 == {num_anchors} "
                    f"&& $5 == {er_txt} && strcol(6) eq '{algorithm}'")
            plots.append(f"'{Path(agg_csv_path).name}' using "
                         f"(({cond}) ? $8 : 1/0):9 with linespoints title '{algorithm}'")
        lines.append("plot " + ", \\\n     ".join(plots))
    with open(script_path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


DISTANCE_CSV_HEADER = ["R", "e_r", "mean_connectivity",
                       "mean_matrix_error_dijkstra", "mean_matrix_error_ha"]


def compare_distance_methods(n: int = 100, side: float = 100.0,
                             radio_ranges=(15.0, 17.0, 19.0, 21.0),
                             range_errors=(0.0, 0.10, 0.20, 0.30),
                             trials: int = 30, base_seed: int = 1) -> list[dict]:
    """Distance-matrix error of shortest-path vs heuristic estimation.

    Planar deployment: n nodes uniform in a side x side square, connectivity
    swept through the radio range. Returns one row per (R, e_r) with mean
    matrix errors over the trials; the same deployments and underlying noise
    stream recur across e_r values, so curves are directly comparable.
    """
    rows = []
    for R in radio_ranges:
        R = float(R)
        per_error = {float(e_r): {"dijkstra": [], "ha": [], "conn": []}
                     for e_r in range_errors}
        for trial in range(trials):
            for e_r, bucket in per_error.items():
                noise = NoiseModel(e_r)
                graph = None
                for resample in range(MAX_RESAMPLES + 1):
                    point_seed = derive_seed(base_seed, "square", R, trial, resample)
                    nodes = gen_random_square(n, side, derive_seed(point_seed, "nodes"))
                    try:
                        graph = build_graph(nodes, R, noise, derive_seed(point_seed, "noise"))
                    except DisconnectedGraphError:
                        continue
                    break
                if graph is None:
                    raise ConfigurationError(
                        f"square: no connected graph in {MAX_RESAMPLES + 1} attempts at R={R}")
                bucket["dijkstra"].append(matrix_error(dijkstra_all_pairs(graph), nodes, R))
                bucket["ha"].append(matrix_error(ha_all_pairs(graph), nodes, R))
                bucket["conn"].append(avg_connectivity(graph))
        for e_r, bucket in per_error.items():
            rows.append({
                "R": R, "e_r": e_r,
                "mean_connectivity": float(np.mean(bucket["conn"])),
                "mean_matrix_error_dijkstra": float(np.mean(bucket["dijkstra"])),
                "mean_matrix_error_ha": float(np.mean(bucket["ha"]))})
    return rows


def write_distance_csv(rows: list[dict], path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DISTANCE_CSV_HEADER)
        for row in rows:
            writer.writerow([format(row[k], ".10g") for k in DISTANCE_CSV_HEADER])


def load_config_file(path) -> dict:
    """Key-value sweep configuration; '#' comments, comma-separated lists."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


_LIST_KEYS = {"topologies", "anchor_counts", "radio_ranges", "range_errors", "algorithms"}
_INT_KEYS = {"trials", "base_seed"}


def build_sweep_config(file_values: dict | None = None, **overrides) -> SweepConfig:
    """Merge config-file values with explicit overrides (overrides win)."""
    kwargs = {}
    for key, value in (file_values or {}).items():
        if key in _LIST_KEYS:
            kwargs[key] = tuple(part.strip() for part in value.split(",") if part.strip())
        elif key in _INT_KEYS:
            kwargs[key] = int(value)
        else:
            raise ValueError(f"unknown configuration key {key!r}")
    for key, value in overrides.items():
        if value is not None:
            kwargs[key] = value
    return SweepConfig(**kwargs)
