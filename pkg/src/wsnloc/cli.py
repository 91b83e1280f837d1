"""Command-line front-end: generate networks, localize, run sweeps."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .alignment import apply_transform, draw_anchors, fit_transform
from .distmatrix import dijkstra_all_pairs, ha_all_pairs
from .errors import ConfigurationError, DisconnectedGraphError
from .evaluation import estimation_error
from .mds import classical_mds, save_map_csv
from .ranging import (NoiseModel, avg_connectivity, build_graph, component_count,
                      load_edges_csv, save_edges_csv)
from .topology import (MOUNTAIN, VALLEY, TerrainSpec, gen_grid, gen_random_cube,
                       gen_random_square, gen_surface, load_nodes_csv, save_nodes_csv)

ALGORITHM_FLAGS = {"mdsmap": harness.MDS_MAP, "imds": harness.IMDS}


def _parse_list(text: str, cast) -> tuple:
    return tuple(cast(part.strip()) for part in text.split(",") if part.strip())


def _make_nodes(args):
    if args.topology == "cube":
        return gen_random_cube(args.n, args.side, args.seed)
    if args.topology == "square":
        return gen_random_square(args.n, args.side, args.seed)
    if args.topology == "grid":
        return gen_grid(args.per_axis, args.spacing)
    kind = VALLEY if args.topology == "valley" else MOUNTAIN
    peak = args.peak_height
    if peak is None:
        peak = -40.0 if kind == VALLEY else 40.0
    spec = TerrainSpec(kind, center=(args.side / 2, args.side / 2),
                       peak_height=peak, spread=args.spread, base_side=args.side)
    return gen_surface(spec, args.n, args.seed)


def _add_generation_flags(parser, topology_required: bool):
    parser.add_argument("--topology", choices=["cube", "square", "grid", "valley", "mountain"],
                        required=topology_required)
    parser.add_argument("--n", type=int, default=100, help="node count (non-grid topologies)")
    parser.add_argument("--side", type=float, default=100.0, help="deployment side length in r")
    parser.add_argument("--per-axis", type=int, default=5, help="grid points per axis")
    parser.add_argument("--spacing", type=float, default=25.0, help="grid spacing in r")
    parser.add_argument("--peak-height", type=float, default=None,
                        help="surface peak height in r (negative for valley depth)")
    parser.add_argument("--spread", type=float, default=25.0, help="surface spread sigma in r")
    parser.add_argument("--er", type=float, default=0.0, help="range error as fraction of R")
    parser.add_argument("--seed", type=int, default=1)


def cmd_generate(args) -> int:
    nodes = _make_nodes(args)
    graph = build_graph(nodes, args.range, NoiseModel(args.er),
                        harness.derive_seed(args.seed, "noise"))
    nodes_path = f"{args.out_prefix}_nodes.csv"
    edges_path = f"{args.out_prefix}_edges.csv"
    save_nodes_csv(nodes, nodes_path)
    save_edges_csv(graph, edges_path)
    print(f"wrote {nodes_path} ({nodes.n} nodes) and {edges_path} "
          f"({graph.num_edges} edges, connectivity {avg_connectivity(graph):.3g})",
          file=sys.stderr)
    return 0


def cmd_localize(args) -> int:
    if args.nodes or args.edges:
        if not (args.nodes and args.edges):
            raise SystemExit("--nodes and --edges must be given together")
        nodes = load_nodes_csv(args.nodes)
        graph = load_edges_csv(args.edges, nodes.n, args.range,
                               true_positions=nodes.positions)
        components = component_count(graph)
        if components != 1:
            raise DisconnectedGraphError(components)
    else:
        if args.topology is None:
            raise SystemExit("either --nodes/--edges or --topology is required")
        nodes = _make_nodes(args)
        graph = build_graph(nodes, args.range, NoiseModel(args.er),
                            harness.derive_seed(args.seed, "noise"))

    algorithm = ALGORITHM_FLAGS[args.algorithm]
    if args.anchors < 4:
        raise SystemExit("at least 4 anchors are required")
    D = dijkstra_all_pairs(graph) if algorithm == harness.MDS_MAP else ha_all_pairs(graph)
    relative = classical_mds(D, dims=3)
    anchors = draw_anchors(nodes, args.anchors,
                           harness.derive_seed(args.seed, "anchors", args.anchors))
    transform = fit_transform(relative.coords[anchors.indices], anchors.true_positions)
    estimate = apply_transform(transform, relative)
    save_map_csv(estimate.coords, args.out)
    if args.transform_out:
        record = {"rotation_rows_then_translation": transform.flat(),
                  "degenerate": transform.degenerate,
                  "anchor_ids": [int(i) for i in anchors.indices]}
        Path(args.transform_out).write_text(json.dumps(record, indent=1) + "\n")
    err = estimation_error(estimate, nodes, anchors, args.range)
    print(f"error_pct={err:.10g} connectivity={avg_connectivity(graph):.10g}")
    return 0


def cmd_sweep(args) -> int:
    file_values = harness.load_config_file(args.config) if args.config else None
    cfg = harness.build_sweep_config(
        file_values,
        topologies=_parse_list(args.topologies, str) if args.topologies else None,
        anchor_counts=_parse_list(args.anchor_counts, int) if args.anchor_counts else None,
        radio_ranges=_parse_list(args.radio_ranges, float) if args.radio_ranges else None,
        range_errors=_parse_list(args.range_errors, float) if args.range_errors else None,
        trials=args.trials, base_seed=args.base_seed,
        algorithms=tuple(ALGORITHM_FLAGS[a] for a in _parse_list(args.algorithms, str))
        if args.algorithms else None)
    table = harness.run_sweep(cfg, jobs=args.jobs)
    harness.write_csv(table, args.out)
    written = [args.out]
    if args.emit_plots:
        agg_path = Path(args.out).with_suffix(".agg.csv")
        script_path = Path(args.out).with_suffix(".gp")
        harness.write_aggregates_csv(table, agg_path)
        harness.write_plot_script(table, agg_path, script_path)
        written += [str(agg_path), str(script_path)]
    print(f"wrote {', '.join(written)} ({len(table.rows)} rows)", file=sys.stderr)
    return 0


def cmd_compare_distances(args) -> int:
    rows = harness.compare_distance_methods(
        n=args.n, side=args.side,
        radio_ranges=_parse_list(args.ranges, float),
        range_errors=_parse_list(args.errors, float),
        trials=args.trials, base_seed=args.base_seed)
    harness.write_distance_csv(rows, args.out)
    print(f"wrote {args.out} ({len(rows)} rows)", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wsnloc",
        description="3D wireless sensor network localization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write node and edge CSVs for a deployment")
    _add_generation_flags(p, topology_required=True)
    p.add_argument("--range", type=float, required=True, help="radio range R in r")
    p.add_argument("--out-prefix", default="network")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("localize", help="run one localization and report the error")
    _add_generation_flags(p, topology_required=False)
    p.add_argument("--range", type=float, required=True, help="radio range R in r")
    p.add_argument("--nodes", help="node CSV (with --edges, instead of generating)")
    p.add_argument("--edges", help="edge CSV (with --nodes)")
    p.add_argument("--algorithm", choices=sorted(ALGORITHM_FLAGS), default="imds")
    p.add_argument("--anchors", type=int, default=10)
    p.add_argument("--out", default="map.csv")
    p.add_argument("--transform-out", default=None,
                   help="also write the fitted transform (12 numbers) as JSON")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("sweep", help="run the full experiment matrix")
    p.add_argument("--config", help="key-value configuration file")
    p.add_argument("--topologies", help="comma list: cube,grid,valley,mountain")
    p.add_argument("--anchor-counts", help="comma list of anchor counts")
    p.add_argument("--radio-ranges", help="comma list of radio ranges in r")
    p.add_argument("--range-errors", help="comma list of e_r fractions")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--base-seed", type=int, default=None)
    p.add_argument("--algorithms", help="comma list: mdsmap,imds")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--out", default="results.csv")
    p.add_argument("--emit-plots", action="store_true",
                   help="also write an aggregate CSV and a gnuplot script")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare-distances",
                       help="distance-matrix error of both estimators on a planar network")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--side", type=float, default=100.0)
    p.add_argument("--ranges", default="15,17,19,21")
    p.add_argument("--errors", default="0,0.1,0.2,0.3")
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--base-seed", type=int, default=1)
    p.add_argument("--out", default="distance_error.csv")
    p.set_defaults(func=cmd_compare_distances)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DisconnectedGraphError, ConfigurationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
