"""Uncertainty-weighted pseudo-label loss and its naive and confident variants."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..config import GEOMETRY_CONFIG
from ..errors import InvalidInputError
from ..geometry import Vec3
from ..grad import dual as dm
from .batch import PairGeometry, is_single, reduce_pairs, seed_predictions
from .geometric import camera_gaze
from .types import GazePrediction, LossOutput

logger = logging.getLogger(__name__)

PSEUDO_MODES = ("weighted", "naive", "confident")


def pseudo_weights(sigma_a, sigma_b):
    """w_a = σ_b/(σ_a+σ_b), w_b = σ_a/(σ_a+σ_b): the less certain subject counts less."""
    if np.any(np.asarray(sigma_a) <= 0) or np.any(np.asarray(sigma_b) <= 0):
        raise InvalidInputError("pseudo weights need positive sigmas")
    total = sigma_a + sigma_b
    return sigma_b / total, sigma_a / total


@dataclass(frozen=True)
class PseudoTarget:
    """
    Detached pseudo-label state for one batch.

    ``direction`` is the camera-frame pseudo gaze of subject A (B's target is
    its negation). ``reference_a``/``reference_b`` are the detached
    camera-frame predictions, ``a_confident`` marks pairs where A is the
    reference in confident mode and ``valid`` marks pairs that keep a target.
    """
    direction: Vec3
    a_confident: np.ndarray
    valid: np.ndarray
    reference_a: Vec3
    reference_b: Vec3


def pseudo_targets(pair, pred_a: GazePrediction, pred_b: GazePrediction) -> PseudoTarget:
    """Compute pseudo targets from the current (pre-update) predictions."""
    g = PairGeometry.coerce(pair)
    pred_a, pred_b = pred_a.as_arrays(), pred_b.as_arrays()
    gaze_a = camera_gaze(pred_a, g.frame_a)
    gaze_b = camera_gaze(pred_b, g.frame_b)
    sigma_a, sigma_b = np.exp(pred_a.log_sigma), np.exp(pred_b.log_sigma)
    w_a, w_b = pseudo_weights(sigma_a, sigma_b)
    blend = gaze_a * w_a - gaze_b * w_b
    length = np.asarray(blend.norm())
    valid = length >= GEOMETRY_CONFIG["degenerate_rel_tol"]
    direction = blend / np.where(valid, length, 1.0)
    return PseudoTarget(
        direction=direction,
        a_confident=sigma_a <= sigma_b,
        valid=valid,
        reference_a=gaze_a,
        reference_b=gaze_b,
    )


def pseudo_gaze_loss(
    pair,
    pred_a: GazePrediction,
    pred_b: GazePrediction,
    mode: str = "weighted",
    target: Optional[PseudoTarget] = None,
) -> LossOutput:
    """
    Self-training loss pulling both predictions toward a shared pseudo gaze.

    weighted:  g = unit(w_A·ĝ_A − w_B·ĝ_B), held constant; the value is the
               mean of 1 − ĝ_A·g and 1 + ĝ_B·g. Pairs whose blend vanishes
               (opposing predictions of equal weight) are excluded.
    naive:     1 + ĝ_A·ĝ_B, with gradients reaching both predictions.
    confident: the subject with the smaller σ̂ (A on ties) becomes the
               constant target of the other; the confident subject's term is
               zero and the value is the mean of the two terms.

    Args:
        pair: A LaeoPair, a sequence of pairs or a PairGeometry
        pred_a: Subject A prediction (normalized frame)
        pred_b: Subject B prediction (normalized frame)
        mode: One of weighted, naive, confident
        target: Precomputed detached targets; computed from the inputs when omitted
    """
    if mode not in PSEUDO_MODES:
        raise InvalidInputError(f"unknown pseudo mode {mode!r}")
    scalar = is_single(pred_a, pred_b)
    g = PairGeometry.coerce(pair)

    if mode == "naive":
        a, b, keys = seed_predictions(pred_a, pred_b)
        per_pair = 1.0 + camera_gaze(a, g.frame_a).dot(camera_gaze(b, g.frame_b))
        return reduce_pairs(per_pair, np.ones(len(g), dtype=bool), keys, "pseudo", scalar)

    if target is None:
        target = pseudo_targets(g, pred_a, pred_b)
    a, b, keys = seed_predictions(pred_a, pred_b, ("pitch", "yaw", "log_sigma"))
    gaze_a = camera_gaze(a, g.frame_a)
    gaze_b = camera_gaze(b, g.frame_b)

    if mode == "weighted":
        per_pair = ((1.0 - gaze_a.dot(target.direction)) + (1.0 + gaze_b.dot(target.direction))) * 0.5
        out = reduce_pairs(per_pair, target.valid, keys, "pseudo", scalar)
        if out.excluded:
            logger.debug("pseudo excluded %d pairs with opposing equal-weight predictions",
                         out.excluded["pseudo"])
        return out

    # confident: detached reference gaze of the more certain subject
    term_b = 1.0 + gaze_b.dot(target.reference_a)
    term_a = 1.0 + gaze_a.dot(target.reference_b)
    per_pair = dm.where(target.a_confident, term_b, term_a) * 0.5
    return reduce_pairs(per_pair, np.ones(len(g), dtype=bool), keys, "pseudo", scalar)
