"""Plain-text configuration files.

Run configs and scene specs are ``key = value`` files with ``[section]``
headers, read with :mod:`configparser`. Unknown sections and keys are
errors, so a typo never silently falls back to a default.

A run config looks like::

    [run]
    preset = stns          ; optional, see PRESETS

    [spatial]
    surround_size = 21

    [detector]
    eps = 2
    dth_ratio = 0.5
    dth_margin_deg = 1

    [scene]
    fov = 80

A scene spec has one ``[scene]`` section and one ``[target]`` or
``[target.NAME]`` section per target::

    [scene]
    preset = cluttered     ; or "single"; optional
    n_frames = 120
    seed = 3

    [target.a]
    diameter = 2
    speed = 300
    path = random
"""

import configparser
import re
from dataclasses import dataclass, field, fields, replace

from .io import config_hash
from .model import BRNN
from .synth import SceneSpec, TargetSpec, cluttered_scene

#: Model parameters grouped by pipeline stage.
MODEL_SECTIONS = {
    "frontend": ("n_history", "decay_u", "dog_gain", "dog_sigma1", "dog_sigma2", "dog_size"),
    "temporal": ("decay", "transmission", "tau", "gain", "n_fast", "n_slow", "offset", "dt"),
    "spatial": ("gabor_wavelength", "gabor_sigma", "gabor_size", "surround_wavelength",
                "surround_sigma", "surround_size", "surround_weight"),
    "ganglion": ("w_on", "w_off", "inhibition", "inhibition_threshold"),
    "detector": ("gamma", "eps", "min_samples"),
}
EXTRA_KEYS = {
    "detector": ("dth_ratio", "dth_margin_deg"),
    "scene": ("fov", "frame_rate"),
    "run": ("preset",),
}

#: Named parameter sets. ``stns`` is the natural-scene protocol on frames
#: halved to 320x240; ``filter`` is the slower cascade used to
#: characterise the temporal filter on its own.
PRESETS = {
    "default": {},
    "stns": {"eps": 2.0, "min_samples": 8, "surround_size": 21, "surround_sigma": 1.5,
             "fov": 80.0},
    "filter": {"tau": 8.0},
}

_BRNN_DEFAULTS = BRNN().get_params()


class ConfigError(ValueError):
    """A configuration file is malformed or names an unknown key."""


def _parser():
    # Keys are case-sensitive and inline ";" / "#" comments are allowed.
    p = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    p.optionxform = str
    return p


def _coerce(key, text, default):
    """Parse ``text`` to the type of ``default``."""
    text = text.strip()
    try:
        if isinstance(default, bool):
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if isinstance(default, int):
            return int(text)
        if default is None or isinstance(default, float):
            if text.lower() in ("none", ""):
                return None
            return float(text)
        if isinstance(default, tuple):
            return tuple(float(v) for v in text.split(","))
        return text
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r}") from None


def parse_dth_rule(rule):
    """Parse a match rule such as ``"0.5d+1"`` into ``(ratio, margin_deg)``."""
    m = re.fullmatch(r"\s*([0-9]*\.?[0-9]+)\s*\*?\s*d\s*\+\s*([0-9]*\.?[0-9]+)\s*", rule)
    if not m:
        raise ConfigError(f"match rule must look like '0.5d+1', got {rule!r}")
    return float(m.group(1)), float(m.group(2))


@dataclass
class RunConfig:
    """Everything needed to run the detector on a frame sequence."""

    model_params: dict = field(default_factory=dict)
    dth_ratio: float = 0.5
    dth_margin_deg: float = 1.0
    fov: float = 32.0
    frame_rate: float = 300.0
    preset: str = "default"

    @classmethod
    def from_preset(cls, name="default"):
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        cfg = cls(preset=name)
        for key, value in PRESETS[name].items():
            cfg._set(key, value)
        return cfg

    def _set(self, key, value):
        if key in _BRNN_DEFAULTS:
            self.model_params[key] = value
        else:
            setattr(self, key, value)

    @classmethod
    def from_string(cls, text):
        p = _parser()
        try:
            p.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
        known = set(MODEL_SECTIONS) | set(EXTRA_KEYS)
        for section in p.sections():
            if section not in known:
                raise ConfigError(f"unknown section [{section}]")
            allowed = MODEL_SECTIONS.get(section, ()) + EXTRA_KEYS.get(section, ())
            for key in p[section]:
                if key not in allowed:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
        preset = p.get("run", "preset", fallback="default").strip()
        cfg = cls.from_preset(preset)
        for section in p.sections():
            for key, text in p[section].items():
                if key == "preset":
                    continue
                default = _BRNN_DEFAULTS.get(key, getattr(cfg, key, None))
                cfg._set(key, _coerce(key, text, default))
        cfg.model()  # validate now rather than on first use
        return cfg

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls.from_string(fh.read())

    def model(self):
        """A fitted :class:`BRNN` with these parameters."""
        try:
            return BRNN(**self.model_params).fit()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def params(self):
        """All parameters as one flat dict (model defaults filled in)."""
        out = dict(_BRNN_DEFAULTS)
        out.update(self.model_params)
        out.update(dth_ratio=self.dth_ratio, dth_margin_deg=self.dth_margin_deg,
                   fov=self.fov, frame_rate=self.frame_rate)
        return out

    def hash(self):
        return config_hash(self.params())

    def px_per_deg(self, width):
        return width / self.fov

    def to_string(self):
        """Render every parameter as a config file."""
        params = self.params()
        lines = []
        sections = dict(MODEL_SECTIONS)
        sections["detector"] += EXTRA_KEYS["detector"]
        sections["scene"] = EXTRA_KEYS["scene"]
        for section, keys in sections.items():
            lines.append(f"[{section}]")
            lines += [f"{k} = {params[k]}" for k in keys]
            lines.append("")
        return "\n".join(lines)


# -- scene specs --------------------------------------------------------------

_SCENE_FIELDS = {f.name: f for f in fields(SceneSpec)}
_TARGET_FIELDS = {f.name: f for f in fields(TargetSpec)}
_SCENE_DEFAULTS = SceneSpec()
_TARGET_DEFAULTS = TargetSpec()


def _parse_point(key, text):
    if text.strip().lower() in ("none", ""):
        return None
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"{key}: expected 'x,y', got {text!r}") from None
    return (x, y)


def scene_from_string(text):
    """Build a :class:`SceneSpec` from scene-spec text."""
    p = _parser()
    try:
        p.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    if "scene" not in p:
        raise ConfigError("scene spec needs a [scene] section")
    scene_kw = {}
    preset = "single"
    texture_path = None
    for key, text_value in p["scene"].items():
        if key == "preset":
            preset = text_value.strip()
            if preset not in ("single", "cluttered"):
                raise ConfigError(f"unknown scene preset {preset!r}")
        elif key == "texture":
            texture_path = text_value.strip()
        elif key in _SCENE_FIELDS and key != "targets":
            scene_kw[key] = _coerce(key, text_value, getattr(_SCENE_DEFAULTS, key))
        else:
            raise ConfigError(f"unknown key {key!r} in [scene]")
    targets = []
    for section in p.sections():
        if section == "scene":
            continue
        if section != "target" and not section.startswith("target."):
            raise ConfigError(f"unknown section [{section}]")
        kw = {}
        for key, text_value in p[section].items():
            if key not in _TARGET_FIELDS:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            if key in ("start", "center"):
                kw[key] = _parse_point(key, text_value)
            else:
                kw[key] = _coerce(key, text_value, getattr(_TARGET_DEFAULTS, key))
        try:
            targets.append(TargetSpec(**kw))
        except ValueError as exc:
            raise ConfigError(f"[{section}]: {exc}") from None
    base = cluttered_scene() if preset == "cluttered" else SceneSpec()
    if targets or preset == "single":
        scene_kw["targets"] = targets
    if texture_path is not None:
        from .io import read_frame
        scene_kw["texture"] = read_frame(texture_path)
        scene_kw.setdefault("background", "clutter")
    try:
        return replace(base, **scene_kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def scene_from_file(path):
    with open(path) as fh:
        return scene_from_string(fh.read())


__all__ = ["ConfigError", "MODEL_SECTIONS", "PRESETS", "RunConfig", "parse_dth_rule",
           "scene_from_file", "scene_from_string"]
