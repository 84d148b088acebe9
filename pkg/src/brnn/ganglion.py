"""Ganglion stage: opponent motion energy, direction map, size-gated
activation and directionally selective inhibition."""

from dataclasses import dataclass

import numpy as np

from .spatial import ORIENTATIONS

_N_BINS = 8
_BIN_WIDTH = 2 * np.pi / _N_BINS


def motion_energy(sa1, sb1, sa2, sb2):
    """Opponent energy ``SA1 * SB2 - SA2 * SB1``.

    Positive when the motion has a component along the filter orientation,
    negative against it, and zero when fast and slow inputs coincide.
    """
    return sa1 * sb2 - sa2 * sb1


def combine_onoff(e_on, e_off, w_on=0.5, w_off=0.5):
    if w_on < 0 or w_off < 0:
        raise ValueError("ON/OFF weights must be nonnegative")
    return w_on * e_on + w_off * e_off


def direction_map(e_0, e_90):
    """Per-pixel direction ``arctan2(E^{pi/2}, E^0)`` in ``(-pi, pi]``.

    Pixels with no energy on either axis get direction 0.
    """
    phi = np.arctan2(e_90, e_0)
    # arctan2 returns -pi for (-0.0, negative); fold onto +pi.
    phi[phi == -np.pi] = np.pi
    return phi


@dataclass
class EnergyTensor:
    """Motion energies of one frame.

    ``on``, ``off`` and ``combined`` have shape ``(8, h, w)`` and are indexed
    like :data:`~brnn.spatial.ORIENTATIONS`.
    """

    on: np.ndarray
    off: np.ndarray
    combined: np.ndarray
    direction: np.ndarray
    w_on: float = 0.5
    w_off: float = 0.5

    @classmethod
    def from_polarities(cls, e_on, e_off, w_on=0.5, w_off=0.5):
        combined = combine_onoff(e_on, e_off, w_on, w_off)
        # Orientation index 2 is pi/2.
        direction = direction_map(combined[0], combined[2])
        return cls(e_on, e_off, combined, direction, w_on, w_off)

    @property
    def magnitude(self):
        """``max_theta E^theta`` of the combined energy."""
        return self.combined.max(axis=0)


@dataclass
class GanglionField:
    """Ganglion activations before (``v_*``) and after (``vi_*``) inhibition."""

    v_on: np.ndarray
    v_off: np.ndarray
    v: np.ndarray
    vi_on: np.ndarray
    vi_off: np.ndarray
    vi: np.ndarray
    inhibited: frozenset = frozenset()


def ganglion_response(energy, wa_on, wa_off):
    """Size-gated activation ``V_pm = max_theta E_pm^theta * WA_pm``,
    ``V = [w_on V_on + w_off V_off]^+``.

    The inhibited fields are initialised to copies of the uninhibited ones.
    """
    v_on = energy.on.max(axis=0) * wa_on
    v_off = energy.off.max(axis=0) * wa_off
    v = np.maximum(energy.w_on * v_on + energy.w_off * v_off, 0.0)
    return GanglionField(v_on, v_off, v, v_on.copy(), v_off.copy(), v.copy())


def normalize_angle(phi):
    """Map angles onto ``[0, 2 pi)``."""
    out = np.mod(phi, 2 * np.pi)
    # mod can round tiny negatives up to exactly 2 pi.
    return np.where(out >= 2 * np.pi, 0.0, out)


def _orientation_index(angle):
    return int(round(float(normalize_angle(angle)) / _BIN_WIDTH)) % _N_BINS


def inhibition_set(directions, threshold=6):
    """Orientations to inhibit, given candidate-target directions.

    The circle is cut into eight half-open intervals ``[k pi/4, (k+1) pi/4)``.
    When strictly more than ``threshold`` directions fall into one interval,
    both of its end orientations are inhibited. Returns a frozenset of
    orientation indices into :data:`~brnn.spatial.ORIENTATIONS`.
    """
    phis = normalize_angle(np.asarray([getattr(d, "direction", d) for d in directions], dtype=float))
    if phis.size == 0:
        return frozenset()
    bins = np.minimum((phis // _BIN_WIDTH).astype(int), _N_BINS - 1)
    counts = np.bincount(bins, minlength=_N_BINS)
    out = set()
    for k in np.flatnonzero(counts > threshold):
        out.add(int(k))
        out.add(int((k + 1) % _N_BINS))
    return frozenset(out)


def inhibited_angles(indices):
    """Orientation angles of a set of orientation indices."""
    return sorted(float(ORIENTATIONS[i]) for i in indices)


def apply_inhibition(field, energy, wa_on, wa_off, inhibited):
    """Subtract the strongest energy among the inhibited orientations.

    ``V'_pm = V_pm - max_{theta in inhibited} E_pm^theta * WA_pm`` and
    ``V' = [w_on V'_on + w_off V'_off]^+``. An empty set leaves ``V' = V``.
    Returns a new :class:`GanglionField`.
    """
    idx = sorted(inhibited)
    if not idx:
        return GanglionField(field.v_on, field.v_off, field.v,
                             field.v_on.copy(), field.v_off.copy(), field.v.copy(), frozenset())
    vi_on = field.v_on - energy.on[idx].max(axis=0) * wa_on
    vi_off = field.v_off - energy.off[idx].max(axis=0) * wa_off
    vi = np.maximum(energy.w_on * vi_on + energy.w_off * vi_off, 0.0)
    return GanglionField(field.v_on, field.v_off, field.v, vi_on, vi_off, vi, frozenset(idx))
