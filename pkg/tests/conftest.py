import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from uwbmotion.synth import SimConfig, generate_dataset

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_noiseless():
    """10 short noiseless sets; cheap enough for full LOOCV in unit tests."""
    cfg = SimConfig(T=120, move_window=(36, 84), noise_sigma=0.0, seed=3)
    return generate_dataset(cfg, n_per_state=5, t_jitter=(-20, 20))
