"""Spatial filtering: the shared 2-D convolution engine, the direction-selective
Gabor bank (starburst amacrine stage) and the center-surround kernel (wide-field
amacrine stage).

Kernels are stored as ``K[row, col]`` with the origin at the central element, so
``K[y + r, x + r] = g(x, y)`` for a kernel of radius ``r``. ``x`` runs along
columns and ``y`` along rows (downwards); every angle in the package is measured
in these image coordinates.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage, signal

from ._validation import check_frame, check_odd_size, check_positive

#: The eight filtering orientations, 0, pi/4, ..., 7pi/4.
ORIENTATIONS = np.arange(8) * (np.pi / 4)

# Above this many kernel taps the FFT route is cheaper than direct correlation.
_FFT_MIN_TAPS = 81


def _lattice(size):
    r = size // 2
    y, x = np.mgrid[-r : r + 1, -r : r + 1].astype(np.float64)
    return x, y


def _check_kernel(kernel, shape):
    k = np.asarray(kernel, dtype=np.float64)
    if k.ndim != 2 or k.shape[0] % 2 == 0 or k.shape[1] % 2 == 0:
        raise ValueError(f"kernel must be 2-D with odd extents, got shape {k.shape}")
    if k.shape[0] > shape[0] or k.shape[1] > shape[1]:
        raise ValueError(f"kernel {k.shape} is larger than field {shape}")
    return k


def convolve2d(field, kernel):
    """Same-size 2-D convolution with replicate-edge padding.

    ``out[i, j] = sum_{u, v} K[u, v] * field[i - u + r, j - v + r]``, i.e. the
    kernel is point-reflected before sliding. For the even kernels of the
    pipeline this is the same as correlation; for the odd (quadrature) Gabor
    kernel it fixes the sign of the motion energy so that motion along the
    filter orientation gives positive energy.

    Small kernels go through :func:`scipy.ndimage.correlate`, large ones
    through an FFT of the edge-padded field. The FFT result is forced to exact
    zero wherever the kernel window holds no input, so silent regions stay
    silent instead of carrying round-off noise.
    """
    f = check_frame(field, name="field")
    k = _check_kernel(kernel, f.shape)
    if k.size < _FFT_MIN_TAPS:
        return ndimage.correlate(f, k[::-1, ::-1], mode="nearest")
    ry, rx = k.shape[0] // 2, k.shape[1] // 2
    padded = np.pad(f, ((ry, ry), (rx, rx)), mode="edge")
    out = signal.fftconvolve(padded, k, mode="valid")
    support = ndimage.maximum_filter(f != 0, size=k.shape, mode="nearest")
    out[~support] = 0.0
    return out


def convolve_bank(field, kernels):
    """Convolve one field with a stack of equally sized kernels.

    Returns an array of shape ``(n_kernels, height, width)``; each slice equals
    ``convolve2d(field, kernels[i])``. The field is unrolled once into its
    shifted copies and contracted against all kernels in a single product,
    which is much cheaper than separate passes for the small Gabor kernels.
    """
    f = check_frame(field, name="field")
    ks = np.asarray(kernels, dtype=np.float64)
    if ks.ndim != 3:
        raise ValueError(f"kernels must have shape (n, size, size), got {ks.shape}")
    _check_kernel(ks[0], f.shape)
    ks = ks[:, ::-1, ::-1]
    n, sy, sx = ks.shape
    ry, rx = sy // 2, sx // 2
    h, w = f.shape
    padded = np.pad(f, ((ry, ry), (rx, rx)), mode="edge")
    windows = np.lib.stride_tricks.sliding_window_view(padded, (sy, sx))
    # windows[i, j] is the neighbourhood of pixel (i, j); contract over taps.
    cols = windows.reshape(h * w, sy * sx)
    out = cols @ ks.reshape(n, sy * sx).T
    return np.ascontiguousarray(out.T).reshape(n, h, w)


def gabor_kernel(wavelength, theta, sigma, psi=0.0, size=5):
    """Sampled Gabor function ``exp(-(x'^2+y'^2)/2s^2) cos(2 pi x'/wavelength + psi)``.

    ``x' = x cos(theta) + y sin(theta)`` and ``y' = -x sin(theta) + y cos(theta)``.
    """
    check_positive(wavelength, "wavelength")
    check_positive(sigma, "sigma")
    size = check_odd_size(size)
    x, y = _lattice(size)
    xr = x * np.cos(theta) + y * np.sin(theta)
    yr = -x * np.sin(theta) + y * np.cos(theta)
    envelope = np.exp(-(xr**2 + yr**2) / (2.0 * sigma**2))
    return envelope * np.cos(2.0 * np.pi * xr / wavelength + psi)


def center_surround_kernel(wavelength, sigma, size, inhibition=1.0):
    """Antagonistic kernel ``2 exp(-(x^2+y^2)/2s^2) cos(2 pi x/wavelength) - c``.

    ``c`` is the uniform surround inhibition per tap. With ``inhibition=1``
    the centre value is 1 and the far surround tends to -1. See
    :func:`surround_inhibition` for the value used by the model.
    """
    check_positive(wavelength, "wavelength")
    check_positive(sigma, "sigma")
    size = check_odd_size(size, "size")
    x, y = _lattice(size)
    return 2.0 * np.exp(-(x**2 + y**2) / (2.0 * sigma**2)) * np.cos(2.0 * np.pi * x / wavelength) - inhibition


def surround_inhibition(weight, size):
    """Per-tap surround inhibition for a total surround weight ``weight``.

    The inhibitory surround is spread evenly over the ``size x size`` window,
    so growing the window dilutes the inhibition each tap carries.
    """
    check_positive(weight, "weight")
    return weight / size**2


def default_surround_wavelength(size):
    """Default wavelength of the centre-surround carrier, two thirds of the kernel extent."""
    return 2.0 * size / 3.0


@dataclass(frozen=True)
class KernelBank:
    """All fixed kernels of one model configuration.

    Attributes
    ----------
    dog : ndarray
        Difference-of-Gaussians bandpass kernel of the bipolar stage.
    even, odd : ndarray of shape (8, s, s)
        Gabor kernels with phase 0 and pi/2 at each of :data:`ORIENTATIONS`.
    surround : ndarray
        Centre-surround kernel of the wide-field amacrine stage.
    """

    dog: np.ndarray
    even: np.ndarray
    odd: np.ndarray
    surround: np.ndarray
    orientations: np.ndarray = field(default_factory=lambda: ORIENTATIONS.copy())

    @classmethod
    def build(cls, dog, gabor_wavelength=4.0, gabor_sigma=0.3, gabor_size=5,
              surround_wavelength=None, surround_sigma=1.2, surround_size=15,
              surround_weight=4.0):
        if surround_wavelength is None:
            surround_wavelength = default_surround_wavelength(surround_size)
        even = np.stack([gabor_kernel(gabor_wavelength, t, gabor_sigma, 0.0, gabor_size)
                         for t in ORIENTATIONS])
        odd = np.stack([gabor_kernel(gabor_wavelength, t, gabor_sigma, np.pi / 2, gabor_size)
                        for t in ORIENTATIONS])
        surround = center_surround_kernel(surround_wavelength, surround_sigma, surround_size,
                                          surround_inhibition(surround_weight, surround_size))
        for k in (dog, even, odd, surround):
            k.setflags(write=False)
        return cls(dog=dog, even=even, odd=odd, surround=surround)


@dataclass
class SacResponses:
    """Starburst amacrine outputs of one polarity at one orientation.

    ``sa1``/``sb1`` filter the slow bipolar signal with the even/odd Gabor,
    ``sa2``/``sb2`` filter the fast one.
    """

    sa1: np.ndarray
    sb1: np.ndarray
    sa2: np.ndarray
    sb2: np.ndarray


def sac_filter(fast, slow, even, odd):
    """Direction-selective spatial filtering of one polarity at one orientation."""
    return SacResponses(
        sa1=convolve2d(slow, even),
        sb1=convolve2d(slow, odd),
        sa2=convolve2d(fast, even),
        sb2=convolve2d(fast, odd),
    )


def sac_bank(fast, slow, even, odd):
    """Filter fast and slow signals with a whole Gabor bank at once.

    Returns ``(sa1, sb1, sa2, sb2)``, each of shape ``(n_orientations, h, w)``.
    """
    slow_even, slow_odd = np.split(convolve_bank(slow, np.concatenate([even, odd])), 2)
    fast_even, fast_odd = np.split(convolve_bank(fast, np.concatenate([even, odd])), 2)
    return slow_even, slow_odd, fast_even, fast_odd


def wac_mediate(slow_on, slow_off, kernel):
    """Rectified centre-surround mediation of the slow ON and OFF signals.

    ``WA = [[B_slow]^+ (x) g_W]^+`` for each polarity; outputs are nonnegative.
    """
    wa_on = np.maximum(convolve2d(np.maximum(slow_on, 0.0), kernel), 0.0)
    wa_off = np.maximum(convolve2d(np.maximum(slow_off, 0.0), kernel), 0.0)
    return wa_on, wa_off
