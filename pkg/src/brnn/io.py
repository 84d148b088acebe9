"""Frame, detection and report file I/O."""

import csv
import hashlib
import json
import os
from pathlib import Path

import numpy as np
from PIL import Image

from .detector import Detection

FRAME_SUFFIXES = (".pgm", ".png", ".ppm", ".pnm")


class FrameReadError(IOError):
    """A frame file could not be decoded."""

    def __init__(self, path, reason):
        super().__init__(f"cannot read frame {path}: {reason}")
        self.path = path


def parse_size(text):
    """Parse ``"WxH"`` into ``(width, height)``."""
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise ValueError(f"size must look like WIDTHxHEIGHT, got {text!r}") from None
    if w <= 0 or h <= 0:
        raise ValueError(f"size must be positive, got {text!r}")
    return w, h


def frame_paths(directory):
    """Image files in ``directory`` in lexicographic order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"frame directory {directory} does not exist")
    paths = sorted(p for p in directory.iterdir() if p.suffix.lower() in FRAME_SUFFIXES)
    if not paths:
        raise ValueError(f"frame directory {directory} contains no frames")
    return paths


def read_frame(path, resize=None):
    """Read one image as a float64 grey-level array on the 0-255 scale.

    Colour images are reduced by averaging their channels. ``resize`` is
    ``(width, height)``; resampling averages the source area under each
    output pixel.
    """
    try:
        with Image.open(path) as img:
            img.load()
            if resize is not None and img.size != tuple(resize):
                mode = img.mode
                if mode not in ("L", "RGB", "F"):
                    img = img.convert("RGB")
                img = img.resize(tuple(resize), Image.Resampling.BOX)
            arr = np.asarray(img, dtype=np.float64)
    except (OSError, ValueError) as exc:
        raise FrameReadError(path, exc) from exc
    if arr.ndim == 3:
        arr = arr[..., :3].mean(axis=2)
    if arr.max(initial=0) > 255 and arr.dtype != np.uint8:
        # 16-bit greymaps are rescaled onto the 8-bit range.
        arr = arr * (255.0 / 65535.0)
    return arr


def iter_frames(directory, resize=None):
    """Yield frames of a directory in order; all must share one shape."""
    shape = None
    for path in frame_paths(directory):
        frame = read_frame(path, resize)
        if shape is None:
            shape = frame.shape
        elif frame.shape != shape:
            raise ValueError(f"frame {path} has shape {frame.shape}, expected {shape}")
        yield frame


def read_frames(directory, resize=None):
    return np.stack(list(iter_frames(directory, resize)))


def write_frame(path, frame):
    """Write a frame as 8-bit grey, rounding and clipping to 0-255."""
    arr = np.clip(np.rint(frame), 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path)


def write_activation(path, field):
    """Write an activation map min-max scaled to 8-bit grey."""
    field = np.asarray(field, dtype=np.float64)
    lo, hi = field.min(), field.max()
    scaled = np.zeros_like(field) if hi <= lo else (field - lo) / (hi - lo) * 255.0
    write_frame(path, scaled)


# -- detections ---------------------------------------------------------------

DETECTION_FIELDS = ("frame_index", "x", "y", "direction", "energy", "n_points")


def write_detections_csv(path, detections, header_comment=None):
    with open(path, "w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh)
        writer.writerow(DETECTION_FIELDS)
        for d in detections:
            writer.writerow([d.frame_index, repr(d.x), repr(d.y), repr(d.direction),
                             repr(d.energy), d.n_points])


def write_detections_json(path, detections):
    with open(path, "w") as fh:
        json.dump([d.to_dict() for d in detections], fh, indent=1)


def _data_lines(fh):
    return (line for line in fh if line.strip() and not line.startswith("#"))


def read_detections_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(_data_lines(fh))
        missing = set(DETECTION_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        return [Detection(float(r["x"]), float(r["y"]), float(r["direction"]),
                          float(r["energy"]), int(r["n_points"]), int(r["frame_index"]))
                for r in reader]


# -- ground truth -------------------------------------------------------------

TRUTH_FIELDS = ("frame", "target_id", "x", "y", "d_px", "direction_rad")


def write_truth_csv(path, truth):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRUTH_FIELDS)
        for row in truth.rows():
            writer.writerow([row[0], row[1]] + [repr(v) for v in row[2:]])


def read_truth_csv(path):
    """Read a ground-truth table.

    Required columns are ``frame``, ``x``, ``y`` (target centre in pixels)
    and ``d_px`` (target size in pixels: disc diameter for synthetic scenes,
    bounding-box diagonal for annotated footage). ``target_id`` and
    ``direction_rad`` are optional. As an alternative to ``x``/``y``/``d_px``
    a box may be given as ``left``, ``top``, ``width``, ``height``; its centre
    and diagonal are used.

    Returns a dict ``frame -> (centres (n, 2), sizes (n,))``.
    """
    out = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(_data_lines(fh))
        cols = set(reader.fieldnames or ())
        boxes = {"left", "top", "width", "height"} <= cols
        if "frame" not in cols or not ({"x", "y", "d_px"} <= cols or boxes):
            raise ValueError(f"{path}: need frame plus x,y,d_px or left,top,width,height columns")
        for r in reader:
            if boxes and not {"x", "y", "d_px"} <= cols:
                w, h = float(r["width"]), float(r["height"])
                x = float(r["left"]) + w / 2
                y = float(r["top"]) + h / 2
                d = float(np.hypot(w, h))
            else:
                x, y, d = float(r["x"]), float(r["y"]), float(r["d_px"])
            out.setdefault(int(r["frame"]), []).append((x, y, d))
    return {f: (np.array([(x, y) for x, y, _ in rows]), np.array([d for *_, d in rows]))
            for f, rows in out.items()}


# -- curves -------------------------------------------------------------------


def write_table(path, header, rows, config_hash=None):
    """CSV with an optional ``# config=<hash>`` first line."""
    with open(path, "w", newline="") as fh:
        if config_hash:
            fh.write(f"# config={config_hash}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def config_hash(params):
    """Short stable hash of a parameter dict."""
    blob = json.dumps(params, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return Path(path)
