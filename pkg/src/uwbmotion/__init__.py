"""IR-UWB radar motion classification: synthetic frame sets, RMS-envelope
features, left-to-right GMM-HMM classifier, CLEAN + MD-DTW baselines and a
leave-one-out benchmark."""

from .core import Dataset, FrameSet, StateLabel, ValidationError
from .io import read_dataset, write_dataset

__all__ = ["Dataset", "FrameSet", "StateLabel", "ValidationError", "read_dataset", "write_dataset"]
