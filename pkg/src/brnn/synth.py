"""Synthetic stimuli with exact ground truth.

Scenes are described in degrees of visual angle and converted to pixels via
the field of view. Targets are filled discs drawn with supersampled coverage
over either a uniform background or a clutter texture that scrolls left to
right with wraparound.
"""

from dataclasses import dataclass, field, replace

import numpy as np


def deg_to_px(fov, width):
    """Pixels per degree for a frame ``width`` pixels wide spanning ``fov`` degrees."""
    if fov <= 0:
        raise ValueError(f"fov must be positive, got {fov}")
    return width / fov


def speed_px_per_frame(speed_deg_s, px_per_deg, frame_rate):
    return speed_deg_s * px_per_deg / frame_rate


@dataclass
class TargetSpec:
    """One moving disc.

    ``path`` is ``"linear"`` (constant heading ``angle``), ``"circular"``
    (orbit of ``radius`` degrees around ``center``, starting at phase
    ``angle``) or ``"random"`` (random start and heading from the scene seed).
    Linear and random targets bounce off the frame edges and each other.
    ``start``/``center`` are in pixels; ``None`` means frame centre for
    linear/circular paths.
    """

    diameter: float = 1.0
    luminance: float = 0.0
    speed: float = 150.0
    path: str = "linear"
    angle: float = 0.0
    radius: float = 8.0
    start: tuple = None
    center: tuple = None

    def __post_init__(self):
        if self.path not in ("linear", "circular", "random"):
            raise ValueError(f"unknown path {self.path!r}")
        if not 0.0 <= self.luminance <= 1.0:
            raise ValueError(f"luminance must lie in [0, 1], got {self.luminance}")
        if self.diameter <= 0:
            raise ValueError(f"diameter must be positive, got {self.diameter}")


@dataclass
class SceneSpec:
    """Synthetic scene.

    ``background`` is ``"uniform"`` (intensity ``255 * background_luminance``)
    or ``"clutter"`` (seeded value-noise texture with that mean luminance, or
    ``texture`` when given). The background scrolls right at
    ``background_speed`` degrees per second.
    """

    width: int = 128
    height: int = 128
    fov: float = 32.0
    frame_rate: float = 300.0
    n_frames: int = 180
    background: str = "uniform"
    background_luminance: float = 1.0
    background_speed: float = 0.0
    clutter_contrast: float = 0.35
    texture: np.ndarray = None
    targets: list = field(default_factory=list)
    seed: int = 0
    supersample: int = 4

    def __post_init__(self):
        if self.fov <= 0 or self.frame_rate <= 0:
            raise ValueError("fov and frame_rate must be positive")
        if self.width <= 0 or self.height <= 0 or self.n_frames <= 0:
            raise ValueError("width, height and n_frames must be positive")
        if self.background not in ("uniform", "clutter"):
            raise ValueError(f"unknown background {self.background!r}")
        for t in self.targets:
            if t.diameter >= self.fov:
                raise ValueError(f"target diameter {t.diameter} not smaller than fov {self.fov}")

    @property
    def px_per_deg(self):
        return deg_to_px(self.fov, self.width)


@dataclass
class GroundTruth:
    """Per-frame target records; arrays have shape ``(n_frames, n_targets)``."""

    x: np.ndarray
    y: np.ndarray
    diameter: np.ndarray
    direction: np.ndarray

    @property
    def n_frames(self):
        return self.x.shape[0]

    def centers(self, t):
        return np.column_stack([self.x[t], self.y[t]])

    def as_table(self):
        """Dict ``frame -> (centres (n, 2), diameters (n,))`` as read from a truth file."""
        return {t: (self.centers(t), self.diameter[t].copy()) for t in range(self.n_frames)}

    def rows(self):
        """``(frame, target_id, x, y, d_px, direction_rad)`` tuples."""
        n_frames, n_targets = self.x.shape
        for t in range(n_frames):
            for k in range(n_targets):
                yield (t, k, float(self.x[t, k]), float(self.y[t, k]),
                       float(self.diameter[t, k]), float(self.direction[t, k]))


# -- kinematics -------------------------------------------------------------


def _in_bounds(pos, radii, width, height):
    lo = radii
    return ((pos[:, 0] - lo >= 0) & (pos[:, 0] + lo <= width - 1)
            & (pos[:, 1] - lo >= 0) & (pos[:, 1] + lo <= height - 1))


def step_targets(pos, vel, radii, width, height):
    """Advance bouncing targets by one frame.

    A target whose next position would leave the frame, or which is
    approaching another target it would overlap, has its whole velocity
    negated before moving. Returns new ``(pos, vel)`` arrays.
    """
    pos = np.asarray(pos, dtype=np.float64)
    vel = np.array(vel, dtype=np.float64)
    radii = np.asarray(radii, dtype=np.float64)
    nxt = pos + vel
    flip = ~_in_bounds(nxt, radii, width, height)
    n = len(pos)
    for i in range(n):
        for j in range(i + 1, n):
            gap = nxt[i] - nxt[j]
            if np.hypot(*gap) < radii[i] + radii[j]:
                closing = np.dot(pos[i] - pos[j], vel[i] - vel[j]) < 0
                if closing:
                    flip[i] = flip[j] = True
    vel[flip] *= -1.0
    new = pos + vel
    # Keep centres admissible even if a flip pushes a target against a wall.
    new[:, 0] = np.clip(new[:, 0], radii, width - 1 - radii)
    new[:, 1] = np.clip(new[:, 1], radii, height - 1 - radii)
    return new, vel


def _random_starts(rng, radii, width, height, taken, tries=1000):
    out = []
    for r in radii:
        for _ in range(tries):
            p = rng.uniform([r, r], [width - 1 - r, height - 1 - r])
            if all(np.hypot(*(p - q)) >= r + rq + 1 for q, rq in taken):
                break
        taken.append((p, r))
        out.append(p)
    return out


def trajectories(spec):
    """Ground truth for every frame of ``spec``."""
    scale = spec.px_per_deg
    n_t = len(spec.targets)
    rng = np.random.default_rng(spec.seed)
    xs = np.zeros((spec.n_frames, n_t))
    ys = np.zeros((spec.n_frames, n_t))
    dirs = np.zeros((spec.n_frames, n_t))
    diam = np.tile([t.diameter * scale for t in spec.targets], (spec.n_frames, 1))
    radii = diam[0] / 2 if n_t else np.zeros(0)
    centre = np.array([(spec.width - 1) / 2, (spec.height - 1) / 2])

    moving = [k for k, t in enumerate(spec.targets) if t.path != "circular"]
    pos = np.zeros((n_t, 2))
    vel = np.zeros((n_t, 2))
    taken = []
    for k in moving:
        t = spec.targets[k]
        v = speed_px_per_frame(t.speed, scale, spec.frame_rate)
        if t.path == "random":
            (pos[k],) = _random_starts(rng, [radii[k]], spec.width, spec.height, taken)
            heading = rng.uniform(0, 2 * np.pi)
        else:
            pos[k] = centre if t.start is None else t.start
            heading = t.angle
            taken.append((pos[k], radii[k]))
        vel[k] = v * np.array([np.cos(heading), np.sin(heading)])

    idx = np.array(moving, dtype=int)
    for f in range(spec.n_frames):
        if idx.size:
            xs[f, idx] = pos[idx, 0]
            ys[f, idx] = pos[idx, 1]
            dirs[f, idx] = np.arctan2(vel[idx, 1], vel[idx, 0])
            new, nv = step_targets(pos[idx], vel[idx], radii[idx], spec.width, spec.height)
            pos[idx], vel[idx] = new, nv
        for k, t in enumerate(spec.targets):
            if t.path != "circular":
                continue
            c = centre if t.center is None else np.asarray(t.center, dtype=float)
            r = t.radius * scale
            omega = speed_px_per_frame(t.speed, scale, spec.frame_rate) / r
            phase = t.angle + omega * f
            xs[f, k] = c[0] + r * np.cos(phase)
            ys[f, k] = c[1] + r * np.sin(phase)
            dirs[f, k] = np.arctan2(np.sin(phase + np.pi / 2), np.cos(phase + np.pi / 2))
    return GroundTruth(xs, ys, diam, dirs)


# -- rendering --------------------------------------------------------------


def value_noise(height, width, seed=0, cells=(32, 16, 8, 4)):
    """Tileable multi-octave value noise with zero mean and unit std."""
    rng = np.random.default_rng(seed)
    out = np.zeros((height, width))
    amp = 1.0
    for cell in cells:
        gh, gw = max(1, -(-height // cell)), max(1, -(-width // cell))
        grid = rng.standard_normal((gh, gw))
        yy = np.arange(height) / cell
        xx = np.arange(width) / cell
        y0 = np.floor(yy).astype(int)
        x0 = np.floor(xx).astype(int)
        fy = yy - y0
        fx = xx - x0
        # smoothstep fade, indices wrap so the texture tiles
        fy = fy * fy * (3 - 2 * fy)
        fx = fx * fx * (3 - 2 * fx)
        a = grid[np.ix_(y0 % gh, x0 % gw)]
        b = grid[np.ix_(y0 % gh, (x0 + 1) % gw)]
        c = grid[np.ix_((y0 + 1) % gh, x0 % gw)]
        d = grid[np.ix_((y0 + 1) % gh, (x0 + 1) % gw)]
        top = a + (b - a) * fx[None, :]
        bot = c + (d - c) * fx[None, :]
        out += amp * (top + (bot - top) * fy[:, None])
        amp *= 0.5
    out -= out.mean()
    std = out.std()
    return out / std if std > 0 else out


def clutter_texture(height, width, mean=0.2, contrast=0.35, seed=0):
    """Grey-level clutter in ``[0, 255]`` with the given mean luminance."""
    n = value_noise(height, width, seed)
    return 255.0 * np.clip(mean + contrast * mean * n, 0.0, 1.0)


def _scroll(texture, shift, height, width):
    """Sample a tiled texture displaced right by ``shift`` pixels (linear interpolation)."""
    th, tw = texture.shape
    rows = np.arange(height) % th
    src = np.arange(width) - shift
    x0 = np.floor(src).astype(int)
    fx = src - x0
    left = texture[np.ix_(rows, x0 % tw)]
    right = texture[np.ix_(rows, (x0 + 1) % tw)]
    return left * (1 - fx) + right * fx


def disc_coverage(height, width, cx, cy, radius, supersample=4):
    """Fraction of each pixel covered by a disc, estimated on a ``s x s`` subgrid."""
    s = int(supersample)
    offs = (np.arange(s) + 0.5) / s - 0.5
    x0 = max(int(np.floor(cx - radius - 1)), 0)
    x1 = min(int(np.ceil(cx + radius + 1)), width - 1)
    y0 = max(int(np.floor(cy - radius - 1)), 0)
    y1 = min(int(np.ceil(cy + radius + 1)), height - 1)
    cov = np.zeros((height, width))
    if x0 > x1 or y0 > y1:
        return cov
    ys = np.arange(y0, y1 + 1)[:, None] + offs[None, :]
    xs = np.arange(x0, x1 + 1)[:, None] + offs[None, :]
    inside = ((ys[:, None, :, None] - cy) ** 2 + (xs[None, :, None, :] - cx) ** 2) <= radius**2
    cov[y0 : y1 + 1, x0 : x1 + 1] = inside.mean(axis=(2, 3))
    return cov


class Scene:
    """Precomputed kinematics of a :class:`SceneSpec`; rendering is pure in ``t``."""

    def __init__(self, spec):
        self.spec = spec
        self.truth = trajectories(spec)
        if spec.background == "clutter":
            self.texture = (np.asarray(spec.texture, dtype=np.float64) if spec.texture is not None
                            else clutter_texture(spec.height, spec.width, spec.background_luminance,
                                                 spec.clutter_contrast, spec.seed + 7919))
        else:
            self.texture = None

    def __len__(self):
        return self.spec.n_frames

    def background(self, t):
        spec = self.spec
        if self.texture is None:
            return np.full((spec.height, spec.width), 255.0 * spec.background_luminance)
        shift = t * speed_px_per_frame(spec.background_speed, spec.px_per_deg, spec.frame_rate)
        return _scroll(self.texture, shift, spec.height, spec.width)

    def render(self, t):
        """Frame ``t`` as a float array in ``[0, 255]``."""
        spec = self.spec
        if not 0 <= t < spec.n_frames:
            raise IndexError(f"frame {t} outside [0, {spec.n_frames})")
        img = self.background(t)
        for k, target in enumerate(spec.targets):
            cov = disc_coverage(spec.height, spec.width, self.truth.x[t, k], self.truth.y[t, k],
                                self.truth.diameter[t, k] / 2, spec.supersample)
            img = img * (1 - cov) + 255.0 * target.luminance * cov
        return img

    def frames(self):
        return np.stack([self.render(t) for t in range(self.spec.n_frames)])

    def truth_row(self, t):
        tr = self.truth
        return [(k, tr.x[t, k], tr.y[t, k], tr.diameter[t, k], tr.direction[t, k])
                for k in range(tr.x.shape[1])]


def render_frame(spec, t):
    """Render frame ``t`` and its ground-truth rows."""
    scene = Scene(spec)
    return scene.render(t), scene.truth_row(t)


def generate(spec):
    """Whole sequence: ``(frames, ground_truth)``."""
    scene = Scene(spec)
    return scene.frames(), scene.truth


# -- standard scenes --------------------------------------------------------


def single_target_scene(diameter=1.0, speed=150.0, luminance=0.0, path="linear", angle=0.0,
                        n_frames=180, radius=8.0, start=None, **scene_kw):
    """One target over a white background (128 x 128, 32 degree field, 300 Hz)."""
    target = TargetSpec(diameter=diameter, luminance=luminance, speed=speed, path=path,
                        angle=angle, radius=radius, start=start)
    return SceneSpec(n_frames=n_frames, targets=[target], **scene_kw)


def cluttered_scene(n_targets=5, diameter=2.0, speed=300.0, luminance=0.0,
                    background_speed=75.0, background_luminance=0.2, clutter_contrast=1.0,
                    n_frames=180, seed=0, **scene_kw):
    """Several randomly moving targets over a dark clutter texture scrolling right."""
    targets = [TargetSpec(diameter=diameter, luminance=luminance, speed=speed, path="random")
               for _ in range(n_targets)]
    return SceneSpec(n_frames=n_frames, background="clutter",
                     background_luminance=background_luminance,
                     background_speed=background_speed, clutter_contrast=clutter_contrast,
                     targets=targets, seed=seed, **scene_kw)


def with_targets(spec, **changes):
    """Copy of ``spec`` with every target updated by ``changes``."""
    return replace(spec, targets=[replace(t, **changes) for t in spec.targets])
