"""Detection metrics: Weber contrast, TPR/FPR and ROC utilities."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RocPoint:
    """One operating point; ``fpr`` counts false positives per frame."""

    gamma: float
    tpr: float
    fpr: float


def weber_contrast(frame, cx, cy, diameter):
    """``|mean(target) - mean(annulus)| / 255``.

    The target is the disc of ``diameter`` pixels at ``(cx, cy)``; the
    background is the surrounding annulus of the same width.
    """
    frame = np.asarray(frame, dtype=np.float64)
    h, w = frame.shape
    r = diameter / 2.0
    if cx - 3 * r < 0 or cy - 3 * r < 0 or cx + 3 * r > w - 1 or cy + 3 * r > h - 1:
        raise ValueError("target region and its annulus must lie inside the frame")
    yy, xx = np.ogrid[:h, :w]
    d2 = (xx - cx) ** 2 + (yy - cy) ** 2
    inner = d2 <= r**2
    ring = (d2 > r**2) & (d2 <= (3 * r) ** 2)
    if not inner.any() or not ring.any():
        raise ValueError("target region is empty")
    return abs(frame[inner].mean() - frame[ring].mean()) / 255.0


def tpr_fpr(n_true_detections, n_actual_targets, n_false_positives, n_frames, gamma=float("nan")):
    """``TPR = N_TD / N_AT`` and ``FPR = N_FP / N_T``."""
    if n_actual_targets <= 0:
        raise ValueError("no actual targets in run; TPR undefined")
    if n_frames <= 0:
        raise ValueError("no frames in run")
    return RocPoint(float(gamma), n_true_detections / n_actual_targets, n_false_positives / n_frames)


def tpr_at_fpr(points, fpr):
    """TPR of a ROC curve at a given false-positive rate.

    The curve runs through ``(0, 0)`` and the sorted operating points, and is
    interpolated linearly; beyond the largest measured FPR it stays flat.
    """
    pts = sorted(((p.fpr, p.tpr) for p in points))
    xs = np.array([0.0] + [x for x, _ in pts])
    ys = np.array([0.0] + [y for _, y in pts])
    # Several gammas can share an FPR; keep the best TPR for each.
    ux, inv = np.unique(xs, return_inverse=True)
    uy = np.zeros_like(ux)
    np.maximum.at(uy, inv, ys)
    uy = np.maximum.accumulate(uy)
    return float(np.interp(fpr, ux, uy))
