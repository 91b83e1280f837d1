import numpy as np
import pytest

from wsnloc.alignment import AbsoluteMap, AnchorSet
from wsnloc.evaluation import estimation_error
from wsnloc.topology import NodeSet, gen_random_cube


def setup_network(n=100, n_anchors=10, seed=0):
    nodes = gen_random_cube(n, 100.0, seed=seed)
    anchors = AnchorSet(np.arange(n_anchors), nodes.positions[:n_anchors])
    return nodes, anchors


def test_perfect_estimate_is_zero():
    nodes, anchors = setup_network()
    est = AbsoluteMap(nodes.positions.copy())
    assert estimation_error(est, nodes, anchors, R=35.0) == 0.0


def test_single_node_off_by_R():
    # 90 free nodes, one displaced by exactly R: 100/90 percent
    nodes, anchors = setup_network()
    coords = nodes.positions.copy()
    coords[50, 0] += 35.0
    est = AbsoluteMap(coords)
    assert estimation_error(est, nodes, anchors, R=35.0) == pytest.approx(100.0 / 90.0)


def test_anchor_perturbation_ignored():
    nodes, anchors = setup_network()
    coords = nodes.positions.copy()
    coords[:10] += 1000.0
    est = AbsoluteMap(coords)
    assert estimation_error(est, nodes, anchors, R=35.0) == 0.0


def test_scale_consistency():
    nodes, anchors = setup_network(seed=3)
    rng = np.random.default_rng(1)
    est = AbsoluteMap(nodes.positions + rng.normal(0, 5, nodes.positions.shape))
    base = estimation_error(est, nodes, anchors, R=35.0)
    doubled_nodes = NodeSet(nodes.positions * 2.0)
    doubled_anchors = AnchorSet(anchors.indices, doubled_nodes.positions[:10])
    doubled_est = AbsoluteMap(est.coords * 2.0)
    doubled = estimation_error(doubled_est, doubled_nodes, doubled_anchors, R=70.0)
    assert doubled == pytest.approx(base, rel=1e-12)


def test_rigid_motion_invariance():
    nodes, anchors = setup_network(seed=4)
    rng = np.random.default_rng(2)
    est = AbsoluteMap(nodes.positions + rng.normal(0, 5, nodes.positions.shape))
    base = estimation_error(est, nodes, anchors, R=35.0)

    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    t = rng.uniform(-50, 50, 3)
    moved_nodes = NodeSet(nodes.positions @ q.T + t)
    moved_anchors = AnchorSet(anchors.indices, moved_nodes.positions[:10])
    moved_est = AbsoluteMap(est.coords @ q.T + t)
    moved = estimation_error(moved_est, moved_nodes, moved_anchors, R=35.0)
    assert moved == pytest.approx(base, rel=1e-9)


def test_all_anchor_network_rejected():
    nodes = gen_random_cube(5, 100.0, seed=5)
    anchors = AnchorSet(np.arange(5), nodes.positions)
    est = AbsoluteMap(nodes.positions.copy())
    with pytest.raises(ValueError):
        estimation_error(est, nodes, anchors, R=35.0)


def test_size_mismatch_rejected():
    nodes, anchors = setup_network()
    est = AbsoluteMap(nodes.positions[:50].copy())
    with pytest.raises(ValueError):
        estimation_error(est, nodes, anchors, R=35.0)
