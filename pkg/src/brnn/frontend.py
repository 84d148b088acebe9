"""Photoreceptor and first bipolar stage.

Raw frames become a luminance-change signal, which is split into ON and OFF
half-waves and bandpassed with a difference of Gaussians.
"""

from collections import deque

import numpy as np

from ._validation import check_frame, check_odd_size, check_positive
from .spatial import convolve2d


def decay_coefficients(n_history, u=1.0):
    """History weights ``p_i = 1 / (1 + exp(u * i))`` for ``i = 1..n_history``."""
    if n_history < 0:
        raise ValueError(f"n_history must be >= 0, got {n_history}")
    i = np.arange(1, n_history + 1, dtype=np.float64)
    return 1.0 / (1.0 + np.exp(u * i))


class PhotoreceptorState:
    """Per-pixel luminance-change detector with a fading memory.

    Each update returns ``P(t) = I(t) - I(t-1) + sum_i p_i P(t-i)``. The first
    frame only primes the state and yields a zero field.

    Parameters
    ----------
    n_history : int
        Number of past outputs fed back (``N_p``).
    u : float
        Steepness of the decay coefficients.
    """

    def __init__(self, n_history=5, u=1.0):
        self.n_history = int(n_history)
        self.u = float(u)
        self.decay_coeffs = decay_coefficients(self.n_history, self.u)
        self.history = deque(maxlen=max(self.n_history, 1))
        self.prev_frame = None

    @property
    def shape(self):
        return None if self.prev_frame is None else self.prev_frame.shape

    def reset(self):
        self.history.clear()
        self.prev_frame = None

    def update(self, frame):
        frame = check_frame(frame, shape=self.shape)
        if self.prev_frame is None:
            self.prev_frame = frame.copy()
            return np.zeros_like(frame)
        p = frame - self.prev_frame
        # history[0] is P(t-1), history[1] is P(t-2), ...
        for coeff, past in zip(self.decay_coeffs, self.history):
            p += coeff * past
        if self.n_history:
            self.history.appendleft(p.copy())
        self.prev_frame = frame.copy()
        return p


def photoreceptor_update(frame, state):
    """Advance ``state`` with ``frame`` and return the luminance-change field."""
    return state.update(frame)


def onoff_split(p):
    """Half-wave split into ``(B_on, B_off)``, both nonnegative, ``B_on - B_off == p``."""
    p = np.asarray(p, dtype=np.float64)
    return np.maximum(p, 0.0), np.maximum(-p, 0.0)


def dog_kernel(gain=1.0, sigma1=1.0, sigma2=2.0, size=13):
    """Sampled difference of Gaussians.

    ``g(x, y) = F/(sqrt(2 pi) s1) exp(-r^2/2s1^2) - F/(sqrt(2 pi) s2) exp(-r^2/2s2^2)``

    Note the one-dimensional normalisation: with ``sigma1 < sigma2`` the
    kernel sums to a negative number, so wide uniform patches are inverted
    while features narrower than the positive core pass.
    """
    check_positive(sigma1, "sigma1")
    check_positive(sigma2, "sigma2")
    if sigma1 >= sigma2:
        raise ValueError(f"sigma1 must be smaller than sigma2, got {sigma1} >= {sigma2}")
    size = check_odd_size(size)
    r = size // 2
    y, x = np.mgrid[-r : r + 1, -r : r + 1].astype(np.float64)
    rr = x**2 + y**2
    norm = gain / np.sqrt(2.0 * np.pi)
    return norm * (np.exp(-rr / (2 * sigma1**2)) / sigma1 - np.exp(-rr / (2 * sigma2**2)) / sigma2)


def default_dog_size(sigma2):
    """Smallest odd extent covering +-3 sigma2."""
    size = int(np.ceil(6.0 * sigma2))
    return size + 1 if size % 2 == 0 else size


def bipolar_bandpass(b, kernel):
    """Spatially bandpass one half-wave signal with the DoG kernel."""
    return convolve2d(b, kernel)
