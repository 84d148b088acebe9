"""The full detector as a scikit-learn style estimator."""

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from ._validation import check_frame, check_frames, check_odd_size, check_positive
from .detector import Detection, detect
from .frontend import PhotoreceptorState, bipolar_bandpass, dog_kernel, onoff_split
from .ganglion import (EnergyTensor, GanglionField, apply_inhibition, ganglion_response,
                       inhibition_set, motion_energy)
from .spatial import KernelBank, sac_bank, wac_mediate
from .temporal import CascadeParams, CascadeState


@dataclass
class FrameActivations:
    """Threshold-independent outputs of one frame."""

    photoreceptor: np.ndarray
    energy: EnergyTensor
    wa_on: np.ndarray
    wa_off: np.ndarray
    ganglion: GanglionField


@dataclass
class FrameResult:
    activations: FrameActivations
    ganglion: GanglionField
    candidates: list = field(default_factory=list)
    detections: list = field(default_factory=list)


class BRNN(BaseEstimator, TransformerMixin):
    """Retina-inspired detector of small moving targets.

    The model is stateful across frames (photoreceptor memory and the
    leaky-integrator cascades), so frames are processed in order. ``fit``
    validates the hyperparameters and builds the kernels; it learns nothing
    from data. ``transform`` maps a frame sequence to ganglion activation
    maps and ``predict`` to per-frame detections, each starting from a clean
    state. :meth:`step` processes a live stream one frame at a time.

    Parameters
    ----------
    n_history, decay_u : photoreceptor memory length and decay steepness.
    dog_gain, dog_sigma1, dog_sigma2, dog_size : bipolar DoG kernel.
    decay, transmission, tau, gain, n_fast, n_slow, offset, dt :
        leaky-integrator cascade (``A``, ``C``, ``tau``, ``K``, taps, ``m``, step).
    gabor_wavelength, gabor_sigma, gabor_size : direction-selective Gabor bank.
    surround_wavelength, surround_sigma, surround_size : centre-surround
        kernel (``lambda_W``, ``sigma_W``, ``M_W``); the wavelength defaults
        to ``2 * surround_size / 3``.
    surround_weight : float
        Total weight of the uniform inhibitory surround, spread evenly over
        the ``surround_size**2`` window. ``surround_size**2`` puts a weight of
        one on every tap.
    w_on, w_off : ON/OFF recombination weights.
    inhibition : bool
        Apply directionally selective inhibition before the final detection.
    inhibition_threshold : int
        Candidates per direction interval above which it is inhibited.
    gamma, eps, min_samples : detection threshold and DBSCAN parameters.
    """

    def __init__(self, n_history=5, decay_u=1.0,
                 dog_gain=1.0, dog_sigma1=1.0, dog_sigma2=2.0, dog_size=13,
                 decay=60.0, transmission=60.0, tau=5.0, gain=5.0,
                 n_fast=2, n_slow=4, offset=1, dt=0.05,
                 gabor_wavelength=4.0, gabor_sigma=0.3, gabor_size=5,
                 surround_wavelength=None, surround_sigma=1.2, surround_size=15,
                 surround_weight=4.0,
                 w_on=0.5, w_off=0.5, inhibition=True, inhibition_threshold=6,
                 gamma=0.1, eps=3.0, min_samples=1):
        self.n_history = n_history
        self.decay_u = decay_u
        self.dog_gain = dog_gain
        self.dog_sigma1 = dog_sigma1
        self.dog_sigma2 = dog_sigma2
        self.dog_size = dog_size
        self.decay = decay
        self.transmission = transmission
        self.tau = tau
        self.gain = gain
        self.n_fast = n_fast
        self.n_slow = n_slow
        self.offset = offset
        self.dt = dt
        self.gabor_wavelength = gabor_wavelength
        self.gabor_sigma = gabor_sigma
        self.gabor_size = gabor_size
        self.surround_wavelength = surround_wavelength
        self.surround_sigma = surround_sigma
        self.surround_size = surround_size
        self.surround_weight = surround_weight
        self.w_on = w_on
        self.w_off = w_off
        self.inhibition = inhibition
        self.inhibition_threshold = inhibition_threshold
        self.gamma = gamma
        self.eps = eps
        self.min_samples = min_samples

    # -- setup -------------------------------------------------------------

    def _validate_params(self):
        if self.n_history < 0:
            raise ValueError(f"n_history must be >= 0, got {self.n_history}")
        check_odd_size(self.gabor_size, "gabor_size")
        check_odd_size(self.surround_size, "surround_size")
        check_positive(self.eps, "eps")
        check_positive(self.surround_weight, "surround_weight")
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.min_samples < 1:
            raise ValueError(f"min_samples must be >= 1, got {self.min_samples}")
        if self.w_on < 0 or self.w_off < 0:
            raise ValueError("w_on and w_off must be nonnegative")

    def fit(self, X=None, y=None):
        """Build the kernels and reset the state.

        ``X`` is optional; when given it fixes the frame shape.
        """
        self._validate_params()
        self.cascade_params_ = CascadeParams(
            decay=self.decay, transmission=self.transmission, tau=self.tau, gain=self.gain,
            n_fast=self.n_fast, n_slow=self.n_slow, offset=self.offset, dt=self.dt)
        dog = dog_kernel(self.dog_gain, self.dog_sigma1, self.dog_sigma2, self.dog_size)
        self.kernels_ = KernelBank.build(
            dog, self.gabor_wavelength, self.gabor_sigma, self.gabor_size,
            self.surround_wavelength, self.surround_sigma, self.surround_size,
            self.surround_weight)
        self.frame_shape_ = None
        if X is not None:
            self.frame_shape_ = check_frames(X).shape[1:]
        self.reset()
        return self

    def _check_fitted(self):
        if not hasattr(self, "kernels_"):
            raise NotFittedError("call fit() before processing frames")

    def reset(self):
        """Forget all frame history."""
        self._check_fitted()
        self._photoreceptor = PhotoreceptorState(self.n_history, self.decay_u)
        self._cascades = None
        self.n_frames_seen_ = 0
        return self

    def _init_state(self, shape):
        if self.frame_shape_ is not None and tuple(shape) != tuple(self.frame_shape_):
            raise ValueError(f"frame shape {shape} does not match fitted shape {self.frame_shape_}")
        self.frame_shape_ = tuple(shape)
        self._cascades = (CascadeState(self.cascade_params_, shape),
                          CascadeState(self.cascade_params_, shape))

    # -- per-frame computation --------------------------------------------

    def _energy(self, fast, slow):
        """Motion energy at all eight orientations for one polarity.

        Only the first four orientations are filtered: flipping the
        orientation by pi keeps the even Gabor and negates the odd one, so
        ``E^{theta + pi} = -E^theta`` exactly.
        """
        k = self.kernels_
        sa1, sb1, sa2, sb2 = sac_bank(fast, slow, k.even[:4], k.odd[:4])
        e = motion_energy(sa1, sb1, sa2, sb2)
        return np.concatenate([e, -e])

    def activations(self, frame):
        """Advance the model by one frame and return its activations."""
        self._check_fitted()
        frame = check_frame(frame, shape=self.frame_shape_ if self._cascades else None)
        if self._cascades is None:
            self._init_state(frame.shape)
        p = self._photoreceptor.update(frame)
        b_on, b_off = onoff_split(p)
        dog = self.kernels_.dog
        casc_on, casc_off = self._cascades
        casc_on.step(bipolar_bandpass(b_on, dog))
        casc_off.step(bipolar_bandpass(b_off, dog))
        prm = self.cascade_params_
        on_fast, on_slow = casc_on.readout(prm.n_fast), casc_on.readout(prm.n_slow)
        off_fast, off_slow = casc_off.readout(prm.n_fast), casc_off.readout(prm.n_slow)
        energy = EnergyTensor.from_polarities(self._energy(on_fast, on_slow),
                                              self._energy(off_fast, off_slow),
                                              self.w_on, self.w_off)
        wa_on, wa_off = wac_mediate(on_slow, off_slow, self.kernels_.surround)
        gang = ganglion_response(energy, wa_on, wa_off)
        self.n_frames_seen_ += 1
        return FrameActivations(p, energy, wa_on, wa_off, gang)

    def detect(self, acts, gamma=None, inhibition=None, frame_index=-1):
        """Detection on precomputed activations.

        Candidates are found on ``V``; with inhibition on, their directions
        select the inhibited orientations, ``V'`` is formed and detection is
        repeated on it.
        """
        gamma = self.gamma if gamma is None else gamma
        inhibition = self.inhibition if inhibition is None else inhibition
        energy = acts.energy
        mag, phi = energy.magnitude, energy.direction
        candidates = detect(acts.ganglion.v, mag, phi, gamma, self.eps, self.min_samples, frame_index)
        if not inhibition:
            return FrameResult(acts, acts.ganglion, candidates, candidates)
        inhibited = inhibition_set(candidates, self.inhibition_threshold)
        if not inhibited:
            return FrameResult(acts, acts.ganglion, candidates, candidates)
        gang = apply_inhibition(acts.ganglion, energy, acts.wa_on, acts.wa_off, inhibited)
        final = detect(gang.vi, mag, phi, gamma, self.eps, self.min_samples, frame_index)
        return FrameResult(acts, gang, candidates, final)

    def step(self, frame):
        """Process the next frame of a stream; returns a :class:`FrameResult`."""
        acts = self.activations(frame)
        return self.detect(acts, frame_index=self.n_frames_seen_ - 1)

    # -- sequence API -------------------------------------------------------

    def iter_results(self, frames):
        self._check_fitted()
        self.reset()
        for frame in frames:
            yield self.step(frame)

    def transform(self, X):
        """Ganglion activation maps (after inhibition) for a frame sequence.

        Returns an array of shape ``(n_frames, height, width)``.
        """
        X = check_frames(X)
        return np.stack([r.ganglion.vi for r in self.iter_results(X)])

    def predict(self, X):
        """Detections for every frame of a sequence, as a list of lists."""
        X = check_frames(X)
        return [r.detections for r in self.iter_results(X)]


def detections_table(per_frame):
    """Flatten per-frame detections into one list, ordered by frame."""
    out = []
    for i, dets in enumerate(per_frame):
        for d in dets:
            if d.frame_index < 0:
                d = Detection(d.x, d.y, d.direction, d.energy, d.n_points, i)
            out.append(d)
    return out
