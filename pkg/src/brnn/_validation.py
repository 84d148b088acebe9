"""Input validation helpers shared by the pipeline stages."""

import numbers

import numpy as np


def check_frame(frame, name="frame", shape=None):
    """Return `frame` as a finite 2-D float64 array.

    Parameters
    ----------
    frame : array-like of shape (height, width)
    name : str
        Used in error messages.
    shape : tuple of int, optional
        Required shape, e.g. the shape a stateful stage was initialized with.
    """
    arr = np.asarray(frame, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if shape is not None and arr.shape != tuple(shape):
        raise ValueError(f"{name} has shape {arr.shape}, expected {tuple(shape)}")
    return arr


def check_frames(frames, name="frames"):
    """Return a sequence of frames as a (n_frames, height, width) float64 array."""
    if isinstance(frames, np.ndarray):
        arr = np.asarray(frames, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[np.newaxis]
    else:
        frames = [check_frame(f, name=f"{name}[{i}]") for i, f in enumerate(frames)]
        if not frames:
            raise ValueError(f"{name} is an empty sequence")
        shapes = {f.shape for f in frames}
        if len(shapes) > 1:
            raise ValueError(f"{name} mixes frame shapes {sorted(shapes)}")
        arr = np.stack(frames)
    if arr.ndim != 3 or arr.shape[0] == 0 or arr.shape[1] == 0 or arr.shape[2] == 0:
        raise ValueError(f"{name} must have shape (n_frames, height, width), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_odd_size(size, name="size"):
    if not isinstance(size, numbers.Integral) or size < 1 or size % 2 == 0:
        raise ValueError(f"{name} must be a positive odd integer, got {size!r}")
    return int(size)


def check_positive(value, name):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)
