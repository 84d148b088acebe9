"""Band-pass temporal filtering with a cascade of leaky integrators.

Every layer obeys ``tau dz_n/dt = -A z_n + C z_{n-1}`` with ``z_0`` the input.
A readout ``K (z_n - z_{n+m})`` is a biphasic band-pass filter whose latency
grows with the tap depth ``n``; a shallow tap gives the fast response and a
deep tap the slow one.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_frame


@dataclass(frozen=True)
class CascadeParams:
    """Parameters of the leaky-integrator cascade.

    ``decay`` and ``transmission`` are ``A`` and ``C``; ``dt`` is the Euler
    step taken once per frame (a model parameter, not the frame period).
    """

    decay: float = 60.0
    transmission: float = 60.0
    tau: float = 5.0
    gain: float = 5.0
    n_fast: int = 2
    n_slow: int = 4
    offset: int = 1
    dt: float = 0.05

    def __post_init__(self):
        if not (self.tau > 0 and self.dt > 0 and self.decay > 0 and self.transmission > 0):
            raise ValueError("tau, dt, decay and transmission must be positive")
        if self.offset < 1:
            raise ValueError(f"offset must be >= 1, got {self.offset}")
        if not 1 <= self.n_fast < self.n_slow:
            raise ValueError(f"need 1 <= n_fast < n_slow, got {self.n_fast}, {self.n_slow}")

    @property
    def a(self):
        return self.decay / self.tau

    @property
    def b(self):
        return self.transmission / self.tau

    @property
    def depth(self):
        """Index of the deepest layer that any readout touches."""
        return self.n_slow + self.offset


class CascadeState:
    """Layers ``z_0..z_depth`` of one cascade, all zero at construction."""

    def __init__(self, params, shape, depth=None):
        self.params = params
        depth = params.depth if depth is None else int(depth)
        self.layers = np.zeros((depth + 1,) + tuple(shape))

    @property
    def shape(self):
        return self.layers.shape[1:]

    def step(self, inp):
        """Load ``inp`` into ``z_0`` and advance every deeper layer one Euler step.

        All layers advance from the previous step's values of their
        predecessor, except layer 1 which sees the input just loaded.
        """
        inp = check_frame(inp, name="input", shape=self.shape)
        p = self.params
        z = self.layers
        z[0] = inp
        h = p.dt / p.tau
        # RHS is evaluated on the old layers before assignment: synchronous update.
        z[1:] += h * (-p.decay * z[1:] + p.transmission * z[:-1])
        return self

    def readout(self, n):
        """``K (z_n - z_{n+m})``."""
        m = self.params.offset
        if n < 1 or n + m >= self.layers.shape[0]:
            raise ValueError(f"tap {n} (+{m}) outside cascade of depth {self.layers.shape[0] - 1}")
        return self.params.gain * (self.layers[n] - self.layers[n + m])


def cascade_step(state, inp):
    return state.step(inp)


def cascade_readout(state, n):
    return state.readout(n)


def fast_slow_responses(state_on, state_off):
    """Read fast and slow taps from the ON and OFF cascades.

    Returns ``(on_fast, on_slow, off_fast, off_slow)``.
    """
    p = state_on.params
    return (state_on.readout(p.n_fast), state_on.readout(p.n_slow),
            state_off.readout(p.n_fast), state_off.readout(p.n_slow))


def impulse_response_analytic(params, n, t):
    """Closed-form unit-impulse response of the readout at tap ``n``.

    ``K e^{-at} [b^n t^{n-1}/(n-1)! - b^{n+m} t^{n+m-1}/(n+m-1)!]``
    """
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    a, b, m = params.a, params.b, params.offset
    first = b**n * t ** (n - 1) / math.factorial(n - 1)
    second = b ** (n + m) * t ** (n + m - 1) / math.factorial(n + m - 1)
    return params.gain * np.exp(-a * t) * (first - second)


def extrema_times(a, b, n):
    """Times of the positive peak and negative trough of the impulse response.

    Valid for a tap offset of one; roots of
    ``ab(n-1)! t^2 - (a+b) n! t + (n-1) n! = 0``.
    """
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    nf, n1f = math.factorial(n), math.factorial(n - 1)
    disc = ((a + b) * nf) ** 2 - 4.0 * a * b * n1f * (n - 1) * nf
    root = math.sqrt(disc)
    denom = 2.0 * a * b * n1f
    return ((a + b) * nf - root) / denom, ((a + b) * nf + root) / denom


def simulate_impulse_response(params, n, n_steps):
    """Discrete impulse response of the readout at tap ``n``.

    A unit-area impulse (height ``1/dt`` for one step) is fed on a single
    pixel. Returns ``(t, response)`` with ``t[k] = k dt``: the step that
    loads the impulse leaves ``z_1 = C/tau``, the closed-form value at
    ``t = 0+``, so that state is sampled at time zero.
    """
    state = CascadeState(params, (1, 1), depth=n + params.offset)
    out = np.empty(n_steps)
    impulse = np.full((1, 1), 1.0 / params.dt)
    zero = np.zeros((1, 1))
    for k in range(n_steps):
        state.step(impulse if k == 0 else zero)
        out[k] = state.readout(n)[0, 0]
    t = np.arange(n_steps) * params.dt
    return t, out
