"""Experiment drivers: tuning curves, polar energy profiles, direction
tracking, ROC sweeps and throughput timing."""

import logging
import time
from dataclasses import dataclass

import numpy as np

from .detector import detect_clusters, match_detections, match_threshold
from .metrics import RocPoint, tpr_fpr
from .model import BRNN
from .synth import Scene, SceneSpec, TargetSpec, single_target_scene

log = logging.getLogger(__name__)

#: Threshold grid used for ROC curves: 0.01..0.09 and 0.1..0.9.
DEFAULT_GAMMAS = tuple(float(g) for g in np.round(np.r_[np.arange(1, 10) * 0.01,
                                                         np.arange(1, 10) * 0.1], 2))

TUNING_VARIABLES = ("contrast", "size", "velocity")

_TUNING_KEYS = {"contrast": "contrast", "size": "diameter", "velocity": "speed"}


def angular_error(a, b):
    """Absolute difference of two angles, folded into ``[0, pi]``."""
    d = np.mod(np.asarray(a) - np.asarray(b) + np.pi, 2 * np.pi) - np.pi
    return np.abs(d)


# -- tuning curves ------------------------------------------------------------


def tuning_scene(diameter=3.0, speed=300.0, contrast=1.0, n_frames=90, orbit=10.0, **scene_kw):
    """Single dark target circling over a white background.

    The circular orbit keeps the target in view at any speed. ``contrast``
    is the Weber contrast against the white ground.
    """
    target = TargetSpec(diameter=diameter, luminance=1.0 - contrast, speed=speed,
                        path="circular", radius=orbit)
    return SceneSpec(n_frames=n_frames, targets=[target], **scene_kw)


def target_response(model, scene, warmup=20):
    """Strength of the ganglion response to the single target of ``scene``.

    On a blank ground every active ganglion pixel is driven by the target,
    so the response of a frame is the maximum of ``V`` over the frame. The
    result is the mean over frames after the first ``warmup``, which are
    skipped while the temporal filters charge up.
    """
    if warmup >= scene.spec.n_frames:
        raise ValueError("warmup must be shorter than the scene")
    model.fit()
    vals = []
    for t in range(scene.spec.n_frames):
        acts = model.activations(scene.render(t))
        if t >= warmup:
            vals.append(acts.ganglion.v.max())
    return float(np.mean(vals))


def tuning_sweep(variable, grid, model=None, normalize=False, diameter=3.0, speed=300.0,
                 contrast=1.0, n_frames=90, warmup=20, **scene_kw):
    """Response for each value of ``variable`` in ``grid``.

    ``variable`` is one of ``"contrast"``, ``"size"`` (degrees) or
    ``"velocity"`` (degrees per second); the other two stay at the given
    defaults. Returns ``(grid, responses)``; with ``normalize`` the responses
    are min-max scaled.
    """
    if variable not in TUNING_VARIABLES:
        raise ValueError(f"variable must be one of {TUNING_VARIABLES}, got {variable!r}")
    model = BRNN() if model is None else model
    out = []
    for value in grid:
        kw = dict(diameter=diameter, speed=speed, contrast=contrast)
        kw[_TUNING_KEYS[variable]] = value
        scene = Scene(tuning_scene(n_frames=n_frames, **kw, **scene_kw))
        out.append(target_response(model, scene, warmup=warmup))
        log.info("%s=%s response=%.6g", variable, value, out[-1])
    resp = np.asarray(out)
    if normalize and resp.max() > resp.min():
        resp = (resp - resp.min()) / (resp.max() - resp.min())
    return np.asarray(grid, dtype=float), resp


# -- direction ----------------------------------------------------------------


def energy_polar(model, scene, gamma=None):
    """Summed motion energy per orientation over the detected points.

    For each frame the points of every detected cluster (taken on ``V``)
    form the target set, and ``E_on^theta + E_off^theta`` is summed over
    them. Returns an array of shape ``(n_frames, 8)``; frames without
    detections hold zeros.
    """
    model.fit()
    gamma = model.gamma if gamma is None else gamma
    out = np.zeros((scene.spec.n_frames, 8))
    for t in range(scene.spec.n_frames):
        acts = model.activations(scene.render(t))
        clusters = detect_clusters(acts.ganglion.v, gamma, model.eps, model.min_samples)
        if not clusters:
            continue
        pts = np.concatenate(clusters).astype(np.intp)
        cols, rows = pts[:, 0], pts[:, 1]
        out[t] = (acts.energy.on[:, rows, cols] + acts.energy.off[:, rows, cols]).sum(axis=1)
    return out


@dataclass
class TrackingResult:
    """Per-frame direction estimates against the truth."""

    estimate: np.ndarray
    truth: np.ndarray
    error: np.ndarray

    @property
    def mean_error(self):
        """Mean absolute error in radians over frames with an estimate."""
        ok = np.isfinite(self.error)
        return float(self.error[ok].mean()) if ok.any() else float("nan")

    @property
    def coverage(self):
        """Fraction of frames with an estimate."""
        return float(np.isfinite(self.error).mean())


def direction_tracking(model, scene, warmup=20):
    """Population-coded direction of the strongest detection in each frame.

    Frames before ``warmup`` and frames without a detection get ``nan``.
    The truth is the direction of the first target.
    """
    model.fit()
    n = scene.spec.n_frames
    est = np.full(n, np.nan)
    for t in range(n):
        res = model.step(scene.render(t))
        if t >= warmup and res.detections:
            est[t] = max(res.detections, key=lambda d: d.energy).direction
    truth = scene.truth.direction[:, 0]
    return TrackingResult(est, truth, angular_error(est, truth))


def direction_scene(path="linear", angle=np.pi / 4, n_frames=60, **kw):
    """Default single-target direction stimulus: 1 degree dark dot at 150 deg/s."""
    return single_target_scene(diameter=1.0, speed=150.0, path=path, angle=angle,
                               n_frames=n_frames, **kw)


# -- ROC ----------------------------------------------------------------------


def roc_sweep(model, frames, truth, px_per_deg, gammas=DEFAULT_GAMMAS,
              inhibition=(False, True), ratio=0.5, margin_deg=1.0):
    """TPR/FPR at every threshold, processing the sequence once.

    Parameters
    ----------
    model : BRNN
    frames : iterable of 2-D arrays
    truth : dict
        ``frame -> (centres (n, 2), sizes (n,))``; frames absent from the
        dict have no targets.
    px_per_deg : float
        Scale used for the ``ratio * d + margin_deg`` match radius.
    inhibition : sequence of bool
        Variants to evaluate.

    Returns
    -------
    dict
        ``inhibition flag -> list of RocPoint`` in the order of ``gammas``.
    """
    model.fit()
    counts = {(i, g): [0, 0, 0] for i in inhibition for g in gammas}
    n_frames = 0
    empty = (np.zeros((0, 2)), np.zeros(0))
    for t, frame in enumerate(frames):
        acts = model.activations(frame)
        n_frames += 1
        centres, sizes = truth.get(t, empty)
        d_th = match_threshold(sizes, px_per_deg, ratio, margin_deg)
        for inh in inhibition:
            for g in gammas:
                dets = model.detect(acts, gamma=g, inhibition=inh, frame_index=t).detections
                tp, fp, _ = match_detections(dets, centres, d_th)
                c = counts[inh, g]
                c[0] += tp
                c[1] += fp
                c[2] += len(centres)
    out = {}
    for inh in inhibition:
        out[inh] = []
        for g in gammas:
            tp, fp, n_at = counts[inh, g]
            out[inh].append(tpr_fpr(tp, n_at, fp, n_frames, g))
    return out


def scene_roc(spec, model=None, **kw):
    """:func:`roc_sweep` on a synthetic scene."""
    model = BRNN() if model is None else model
    scene = Scene(spec)
    return roc_sweep(model, scene.frames(), scene.truth.as_table(), spec.px_per_deg, **kw)


# -- throughput ---------------------------------------------------------------


def throughput(model=None, shape=(240, 320), n_frames=20, warmup=2, seed=0):
    """Seconds per frame for random frames of ``shape`` (rows, columns).

    Returns ``(mean, std)`` over ``n_frames`` timed frames after ``warmup``
    untimed ones. Each frame runs the full pipeline including detection.
    """
    model = (BRNN() if model is None else model).fit()
    rng = np.random.default_rng(seed)
    times = []
    for k in range(warmup + n_frames):
        frame = rng.uniform(0, 255, size=shape)
        t0 = time.perf_counter()
        model.step(frame)
        if k >= warmup:
            times.append(time.perf_counter() - t0)
    return float(np.mean(times)), float(np.std(times))


__all__ = ["DEFAULT_GAMMAS", "TUNING_VARIABLES", "RocPoint", "TrackingResult", "angular_error",
           "direction_scene", "direction_tracking", "energy_polar", "roc_sweep", "scene_roc",
           "target_response", "throughput", "tuning_scene", "tuning_sweep"]
