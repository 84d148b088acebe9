"""Retina-inspired detector for small moving targets in cluttered scenes.

The pipeline runs frame by frame: photoreceptor differencing, ON/OFF
bipolar channels with a difference-of-Gaussians bandpass, fast and slow
leaky-integrator cascades, a quadrature Gabor bank forming motion energy at
eight orientations, a centre-surround gate, and ganglion cells whose
activity is thresholded and clustered into detections.
"""

from .config import RunConfig
from .detector import Detection
from .model import BRNN, FrameActivations, FrameResult
from .synth import SceneSpec, TargetSpec, Scene

__version__ = "0.1.0"

__all__ = ["BRNN", "Detection", "FrameActivations", "FrameResult", "RunConfig", "Scene",
           "SceneSpec", "TargetSpec", "__version__"]
