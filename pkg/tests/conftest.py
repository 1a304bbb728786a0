"""Shared fixtures: cameras, seeded generators and clean synthetic pairs."""

import numpy as np
import pytest

from laeo_gaze.geometry import CameraIntrinsics
from laeo_gaze.scene import SynthConfig, synth_dataset, synth_scene


@pytest.fixture
def camera() -> CameraIntrinsics:
    return CameraIntrinsics(focal_px=1000.0, principal_point=(960.0, 540.0), image_size=(1920.0, 1080.0))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def synth_config() -> SynthConfig:
    return SynthConfig()


@pytest.fixture(scope="session")
def clean_pair(synth_config):
    return synth_scene(synth_config, [42, 0], frame_id="fixture-00000")


@pytest.fixture(scope="session")
def clean_pairs(synth_config):
    return synth_dataset(synth_config, 24, 42)
