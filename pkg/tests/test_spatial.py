import numpy as np
import pytest

from brnn.spatial import (ORIENTATIONS, KernelBank, center_surround_kernel, convolve2d,
                          convolve_bank, default_surround_wavelength, gabor_kernel, sac_bank,
                          sac_filter, surround_inhibition, wac_mediate)


def brute_force_convolve(field, kernel):
    """Loop implementation: out[y, x] = sum_{i,j} K[i, j] f[y - i + r, x - j + r],
    with the field extended by repeating its edge pixels."""
    kh, kw = kernel.shape
    ry, rx = kh // 2, kw // 2
    h, w = field.shape
    out = np.zeros_like(field, dtype=float)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for i in range(kh):
                for j in range(kw):
                    yy = min(max(y - (i - ry), 0), h - 1)
                    xx = min(max(x - (j - rx), 0), w - 1)
                    acc += kernel[i, j] * field[yy, xx]
            out[y, x] = acc
    return out


@pytest.mark.parametrize("ksize", [3, 5])
def test_convolve_matches_brute_force_direct(rng, ksize):
    f = rng.normal(size=(9, 11))
    k = rng.normal(size=(ksize, ksize))
    np.testing.assert_allclose(convolve2d(f, k), brute_force_convolve(f, k), atol=1e-10)


def test_convolve_matches_brute_force_fft_path(rng):
    # 13x13 = 169 taps goes through the FFT branch.
    f = rng.normal(size=(16, 18))
    k = rng.normal(size=(13, 13))
    np.testing.assert_allclose(convolve2d(f, k), brute_force_convolve(f, k), atol=1e-9)


def test_convolve_fft_path_keeps_exact_zeros():
    f = np.zeros((40, 40))
    f[5, 5] = 3.0
    out = convolve2d(f, np.ones((15, 15)))
    assert np.all(out[20:, :] == 0)
    assert np.all(out[:, 20:] == 0)


def test_convolve_is_true_convolution():
    f = np.zeros((7, 7))
    f[3, 3] = 1.0
    k = np.arange(9.0).reshape(3, 3)
    np.testing.assert_array_equal(convolve2d(f, k)[2:5, 2:5], k)


def test_convolve_rejects_oversized_kernel():
    with pytest.raises(ValueError):
        convolve2d(np.zeros((4, 4)), np.ones((5, 5)))


def test_convolve_bank_matches_single(rng):
    f = rng.normal(size=(12, 10))
    ks = rng.normal(size=(4, 5, 5))
    got = convolve_bank(f, ks)
    for i in range(4):
        np.testing.assert_allclose(got[i], convolve2d(f, ks[i]), atol=1e-10)


def test_gabor_parity():
    even = gabor_kernel(4.0, 0.0, 1.0, 0.0, 7)
    odd = gabor_kernel(4.0, 0.0, 1.0, np.pi / 2, 7)
    np.testing.assert_allclose(even, even[::-1, ::-1])
    np.testing.assert_allclose(odd, -odd[::-1, ::-1], atol=1e-15)
    assert even[3, 3] == pytest.approx(1.0)


def test_gabor_opposite_orientation():
    for theta in ORIENTATIONS[:4]:
        e0 = gabor_kernel(4.0, theta, 0.3, 0.0)
        e1 = gabor_kernel(4.0, theta + np.pi, 0.3, 0.0)
        o0 = gabor_kernel(4.0, theta, 0.3, np.pi / 2)
        o1 = gabor_kernel(4.0, theta + np.pi, 0.3, np.pi / 2)
        np.testing.assert_allclose(e1, e0, atol=1e-12)
        np.testing.assert_allclose(o1, -o0, atol=1e-12)


def test_gabor_orientation_axis():
    # theta = pi/2 varies along rows only (y axis of the image).
    k = gabor_kernel(8.0, np.pi / 2, 2.0, np.pi / 2, 5)
    assert abs(k[2, 0]) < 1e-12 and abs(k[0, 2]) > 1e-3


def test_center_surround_values():
    k = center_surround_kernel(10.0, 1.2, 15, inhibition=1.0)
    assert k[7, 7] == pytest.approx(1.0)
    assert k[0, 0] == pytest.approx(-1.0, abs=1e-6)
    np.testing.assert_allclose(k, k[::-1, ::-1])


def test_surround_inhibition_scaling():
    assert surround_inhibition(1.0, 15) == pytest.approx(1 / 225)
    assert surround_inhibition(225.0, 15) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        surround_inhibition(0.0, 15)


def test_default_surround_wavelength():
    assert default_surround_wavelength(15) == pytest.approx(10.0)


def test_kernel_bank_is_read_only():
    from brnn.frontend import dog_kernel
    bank = KernelBank.build(dog_kernel())
    assert bank.even.shape == (8, 5, 5) and bank.odd.shape == (8, 5, 5)
    assert bank.surround.shape == (15, 15)
    with pytest.raises(ValueError):
        bank.surround[0, 0] = 1.0


def test_sac_bank_matches_single_filters(rng):
    fast, slow = rng.normal(size=(2, 12, 12))
    even = np.stack([gabor_kernel(4.0, t, 0.3, 0.0) for t in ORIENTATIONS])
    odd = np.stack([gabor_kernel(4.0, t, 0.3, np.pi / 2) for t in ORIENTATIONS])
    sa1, sb1, sa2, sb2 = sac_bank(fast, slow, even, odd)
    one = sac_filter(fast, slow, even[3], odd[3])
    np.testing.assert_allclose(sa1[3], one.sa1, atol=1e-12)
    np.testing.assert_allclose(sb1[3], one.sb1, atol=1e-12)
    np.testing.assert_allclose(sa2[3], one.sa2, atol=1e-12)
    np.testing.assert_allclose(sb2[3], one.sb2, atol=1e-12)


def test_wac_prefers_small_blob_over_wide_patch():
    from brnn.model import BRNN
    k = BRNN(surround_size=15, surround_sigma=1.2).fit().kernels_.surround
    blob = np.zeros((25, 25))
    blob[11:14, 11:14] = 1.0
    patch = np.ones((25, 25))
    wa_blob, _ = wac_mediate(blob, np.zeros_like(blob), k)
    wa_patch, _ = wac_mediate(patch, np.zeros_like(patch), k)
    # brute-force values at the centre agree with the fast path
    assert wa_blob[12, 12] == pytest.approx(max(brute_force_convolve(blob, k)[12, 12], 0.0))
    assert wa_blob[12, 12] > wa_patch[12, 12]


def test_wac_is_rectified(rng):
    k = center_surround_kernel(10.0, 1.2, 15)
    on, off = wac_mediate(rng.normal(size=(20, 20)), rng.normal(size=(20, 20)), k)
    assert on.min() >= 0 and off.min() >= 0
