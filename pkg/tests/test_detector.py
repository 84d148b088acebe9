import numpy as np
import pytest
from sklearn.cluster import DBSCAN

from brnn.detector import (Detection, cluster_readout, dbscan, detect, detect_clusters,
                           match_detections, match_threshold, minmax_norm, threshold_select)
from oracles import quadratic_dbscan, same_partition, union_find_components


def test_minmax_norm():
    np.testing.assert_allclose(minmax_norm(np.array([2.0, 4.0, 6.0])), [0, 0.5, 1])
    assert np.all(minmax_norm(np.full((3, 3), 7.0)) == 0)


def test_threshold_is_strict_and_row_major():
    f = np.array([[0.0, 0.5], [0.6, 1.0]])
    pts = threshold_select(f, 0.5)
    np.testing.assert_array_equal(pts, [[0, 1], [1, 1]])
    assert len(threshold_select(f, 1.0)) == 0


def test_superlevel_sets_nest(rng):
    f = minmax_norm(rng.normal(size=(20, 20)))
    prev = None
    for g in [0.9, 0.5, 0.2, 0.05]:
        cur = {tuple(p) for p in threshold_select(f, g)}
        if prev is not None:
            assert prev <= cur
        prev = cur


def test_dbscan_examples():
    labels, clusters = dbscan(np.array([[0, 0], [1, 0], [2, 0]]), 3, 1)
    assert list(labels) == [0, 0, 0] and len(clusters) == 1
    labels, _ = dbscan(np.array([[0, 0], [10, 0]]), 3, 1)
    assert list(labels) == [0, 1]
    labels, clusters = dbscan(np.zeros((0, 2)), 3, 1)
    assert len(labels) == 0 and clusters == []


def test_dbscan_noise_with_min_samples():
    pts = np.array([[0, 0], [1, 0], [0, 1], [20, 20]])
    labels, _ = dbscan(pts, 1.5, 3)
    assert list(labels) == [0, 0, 0, -1]


def test_dbscan_rejects_bad_parameters():
    with pytest.raises(ValueError):
        dbscan(np.zeros((2, 2)), 0, 1)
    with pytest.raises(ValueError):
        dbscan(np.zeros((2, 2)), 1, 0)


@pytest.mark.parametrize("seed", range(20))
def test_dbscan_min1_equals_components(seed):
    r = np.random.default_rng(seed)
    pts = np.round(r.uniform(0, 30, size=(r.integers(1, 120), 2)), 1)
    labels, _ = dbscan(pts, 3.0, 1)
    assert same_partition(labels, union_find_components(pts, 3.0))


@pytest.mark.parametrize("seed", range(20))
def test_dbscan_matches_quadratic_reference(seed):
    r = np.random.default_rng(100 + seed)
    pts = r.integers(0, 25, size=(r.integers(1, 150), 2)).astype(float)
    min_samples = int(r.integers(2, 9))
    labels, _ = dbscan(pts, 2.0, min_samples)
    assert list(labels) == quadratic_dbscan(pts, 2.0, min_samples)


@pytest.mark.parametrize("seed", range(5))
def test_dbscan_agrees_with_sklearn_on_core_points(seed):
    r = np.random.default_rng(200 + seed)
    pts = r.integers(0, 40, size=(120, 2)).astype(float)
    labels, _ = dbscan(pts, 2.0, 4)
    ref = DBSCAN(eps=2.0, min_samples=4).fit(pts)
    core = np.zeros(len(pts), bool)
    core[ref.core_sample_indices_] = True
    # Border points may be claimed by either neighbouring cluster.
    assert same_partition(labels[core], ref.labels_[core])
    np.testing.assert_array_equal(labels == -1, ref.labels_ == -1)


def test_cluster_readout_centroid_and_direction():
    mag = np.ones((3, 3))
    phi = np.zeros((3, 3))
    phi[0, 1] = np.pi / 2
    d = cluster_readout(np.array([[0, 0], [1, 0], [2, 0]]), mag, phi, frame_index=4)
    assert (d.x, d.y) == (1.0, 0.0)
    assert d.direction == pytest.approx(np.arctan2(1 / 3, 2 / 3))
    assert d.energy == pytest.approx(np.hypot(1 / 3, 2 / 3))
    assert d.n_points == 3 and d.frame_index == 4


def test_cluster_readout_energy_bounded_by_mean_magnitude(rng):
    mag = rng.uniform(0, 5, (6, 6))
    phi = rng.uniform(-np.pi, np.pi, (6, 6))
    pts = np.array([[x, y] for x in range(6) for y in range(3)], dtype=float)
    d = cluster_readout(pts, mag, phi)
    assert d.energy <= mag[:3, :].mean() + 1e-12


def test_cluster_readout_rejects_empty():
    with pytest.raises(ValueError):
        cluster_readout(np.zeros((0, 2)), np.ones((2, 2)), np.zeros((2, 2)))


def test_detect_end_to_end():
    act = np.zeros((20, 20))
    act[2:4, 2:4] = 1.0
    act[15, 15] = 0.8
    mag = np.ones_like(act)
    phi = np.full_like(act, 0.3)
    dets = detect(act, mag, phi, gamma=0.5, eps=3, min_samples=1, frame_index=2)
    assert [(d.x, d.y, d.n_points) for d in dets] == [(2.5, 2.5, 4), (15.0, 15.0, 1)]
    assert all(d.direction == pytest.approx(0.3) for d in dets)
    assert len(detect_clusters(act, 0.9, 3, 1)) == 1


def test_match_threshold():
    assert match_threshold(8.0, 4.0) == pytest.approx(8.0)
    np.testing.assert_allclose(match_threshold([4.0, 8.0], 4.0), [6.0, 8.0])


def test_match_strict_boundary():
    tp, fp, hits = match_detections([(5.0, 0.0)], [[0.0, 0.0]], 5.0)
    assert (tp, fp, list(hits)) == (0, 1, [False])
    tp, fp, hits = match_detections([(4.99, 0.0)], [[0.0, 0.0]], 5.0)
    assert (tp, fp, list(hits)) == (1, 0, [True])


def test_match_is_one_to_one_and_greedy():
    dets = [Detection(1, 0, 0, 1, 1), Detection(2, 0, 0, 1, 1), Detection(50, 50, 0, 1, 1)]
    truth = [[0.0, 0.0], [3.0, 0.0]]
    tp, fp, hits = match_detections(dets, truth, 4.0)
    assert tp == 2 and fp == 1 and hits.all()
    tp, fp, hits = match_detections(dets[:2], [[0.0, 0.0]], 4.0)
    assert tp == 1 and fp == 1


def test_match_per_target_radius():
    tp, _, hits = match_detections([(3.0, 0.0), (13.0, 0.0)], [[0, 0], [10, 0]], [2.0, 5.0])
    assert tp == 1 and list(hits) == [False, True]


def test_match_empty_inputs():
    assert match_detections([], [[0.0, 0.0]], 1.0)[:2] == (0, 0)
    tp, fp, hits = match_detections([(0.0, 0.0)], np.zeros((0, 2)), 1.0)
    assert (tp, fp, hits.size) == (0, 1, 0)
