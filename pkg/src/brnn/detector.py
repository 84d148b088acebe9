"""Turning activation maps into target detections.

Normalise, threshold, cluster the surviving pixels with DBSCAN and read out a
centroid, a population-coded direction and an energy per cluster.
"""

from dataclasses import asdict, dataclass

import numpy as np
from scipy.spatial import cKDTree


@dataclass
class Detection:
    """One candidate target.

    ``x``/``y`` are the cluster centroid in pixels (column, row),
    ``direction`` is in ``(-pi, pi]`` in image coordinates and ``energy`` is
    the length of the mean energy vector of the member pixels.
    """

    x: float
    y: float
    direction: float
    energy: float
    n_points: int
    frame_index: int = -1

    def to_dict(self):
        return asdict(self)


def minmax_norm(field):
    """Rescale to ``[0, 1]``; a constant field maps to zeros."""
    field = np.asarray(field, dtype=np.float64)
    lo, hi = field.min(), field.max()
    if hi <= lo:
        return np.zeros_like(field)
    return (field - lo) / (hi - lo)


def threshold_select(norm_field, gamma):
    """Coordinates ``(x, y)`` of pixels strictly above ``gamma``, in row-major order."""
    rows, cols = np.nonzero(np.asarray(norm_field) > gamma)
    return np.column_stack([cols, rows]).astype(np.float64)


def dbscan(points, eps, min_samples=1):
    """Density-based clustering of 2-D points.

    A point is a core point when at least ``min_samples`` points (itself
    included) lie within Euclidean distance ``eps``. Clusters grow from core
    points in input order; a border point joins the first cluster that reaches
    it. Noise is discarded.

    Returns
    -------
    labels : ndarray of int
        Cluster index per point, -1 for noise.
    clusters : list of ndarray
        Member indices of each cluster, in label order.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if min_samples < 1:
        raise ValueError(f"min_samples must be >= 1, got {min_samples}")
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    n = len(pts)
    labels = np.full(n, -1, dtype=np.intp)
    if n == 0:
        return labels, []
    neighbours = cKDTree(pts).query_ball_point(pts, r=eps)
    is_core = np.fromiter((len(nb) >= min_samples for nb in neighbours), dtype=bool, count=n)
    label = 0
    for seed in range(n):
        if labels[seed] != -1 or not is_core[seed]:
            continue
        labels[seed] = label
        stack = [seed]
        while stack:
            i = stack.pop()
            if not is_core[i]:
                continue
            for j in neighbours[i]:
                if labels[j] == -1:
                    labels[j] = label
                    stack.append(j)
        label += 1
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(label + 1))
    clusters = [order[bounds[k]:bounds[k + 1]] for k in range(label)]
    return labels, clusters


def cluster_readout(points, magnitude, direction, frame_index=-1):
    """Population-coded readout of one cluster.

    Each member pixel contributes the vector ``magnitude * (cos phi, sin phi)``;
    the cluster's direction and energy are the angle and length of the mean
    vector.

    Parameters
    ----------
    points : ndarray of shape (n, 2)
        Member coordinates ``(x, y)``.
    magnitude, direction : ndarray of shape (h, w)
        Per-pixel maximal energy over orientations and direction map.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("empty cluster")
    cols = pts[:, 0].astype(np.intp)
    rows = pts[:, 1].astype(np.intp)
    mag = magnitude[rows, cols]
    phi = direction[rows, cols]
    ex = np.mean(mag * np.cos(phi))
    ey = np.mean(mag * np.sin(phi))
    cx, cy = pts.mean(axis=0)
    angle = float(np.arctan2(ey, ex))
    if angle == -np.pi:
        angle = np.pi
    return Detection(float(cx), float(cy), angle, float(np.hypot(ex, ey)), len(pts), frame_index)


def detect_clusters(activation, gamma, eps, min_samples):
    """Member coordinates ``(x, y)`` of every cluster in one activation map."""
    pts = threshold_select(minmax_norm(activation), gamma)
    _, clusters = dbscan(pts, eps, min_samples)
    return [pts[c] for c in clusters]


def detect(activation, energy_magnitude, direction, gamma, eps, min_samples, frame_index=-1):
    """Normalise, threshold, cluster and read out one activation map."""
    return [cluster_readout(c, energy_magnitude, direction, frame_index)
            for c in detect_clusters(activation, gamma, eps, min_samples)]


def match_threshold(diameter, px_per_degree, ratio=0.5, margin_deg=1.0):
    """Match radius ``ratio * d + margin`` in pixels for a target of ``diameter`` pixels."""
    return ratio * np.asarray(diameter, dtype=np.float64) + margin_deg * px_per_degree


def match_detections(detections, truth, d_th):
    """Greedy one-to-one matching of detections to true target centres.

    Candidate pairs closer than the target's match radius are taken in
    ascending order of distance; every detection left unmatched is a false
    positive.

    Parameters
    ----------
    detections : sequence of Detection or (x, y) pairs
    truth : array-like of shape (n_targets, 2)
    d_th : float or array-like of shape (n_targets,)
        Match radius in pixels, per target when an array.

    Returns
    -------
    tp, fp : int
    hits : ndarray of bool, one flag per true target
    """
    det_xy = np.array([(d.x, d.y) if isinstance(d, Detection) else tuple(d) for d in detections],
                      dtype=np.float64).reshape(-1, 2)
    truth = np.asarray(truth, dtype=np.float64).reshape(-1, 2)
    hits = np.zeros(len(truth), dtype=bool)
    if len(det_xy) == 0 or len(truth) == 0:
        return 0, len(det_xy), hits
    radius = np.broadcast_to(np.asarray(d_th, dtype=np.float64), (len(truth),))
    dist = np.hypot(det_xy[:, None, 0] - truth[None, :, 0], det_xy[:, None, 1] - truth[None, :, 1])
    di, ti = np.nonzero(dist < radius[None, :])
    order = np.lexsort((ti, di, dist[di, ti]))
    used = np.zeros(len(det_xy), dtype=bool)
    for k in order:
        if not used[di[k]] and not hits[ti[k]]:
            used[di[k]] = True
            hits[ti[k]] = True
    tp = int(used.sum())
    return tp, len(det_xy) - tp, hits
