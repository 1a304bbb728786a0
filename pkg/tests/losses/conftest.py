import numpy as np
import pytest

from laeo_gaze.losses import GazePrediction, PairGeometry, stack_predictions
from laeo_gaze.scene import derived_gaze_label


def truth_predictions(pairs, log_sigma=0.0):
    """Batched predictions equal to the derived labels of every pair."""
    labels = [derived_gaze_label(p) for p in pairs]
    pred_a = stack_predictions([GazePrediction.of(float(a.pitch), float(a.yaw), log_sigma) for a, _ in labels])
    pred_b = stack_predictions([GazePrediction.of(float(b.pitch), float(b.yaw), log_sigma) for _, b in labels])
    return pred_a, pred_b


@pytest.fixture(scope="session")
def geometry(clean_pairs):
    return PairGeometry.from_pairs(clean_pairs)


@pytest.fixture(scope="session")
def truth(clean_pairs):
    return truth_predictions(clean_pairs)
