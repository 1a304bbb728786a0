"""Laplacian negative log-likelihood on gaze angles, and the mirror-symmetry loss."""

from typing import Optional

import numpy as np

from ..geometry import GazeAngles
from ..grad import dual as dm
from .batch import is_single
from .types import GazePrediction, LossOutput


def aleatoric_value(pitch, yaw, log_sigma, gt: GazeAngles):
    """2·log σ̂ + (|Δθ| + |Δφ|)/σ̂ on floats, arrays or duals."""
    residual = dm.absolute(pitch - gt.pitch) + dm.absolute(yaw - gt.yaw)
    return 2.0 * log_sigma + residual / dm.exp(log_sigma)


def _aleatoric_terms(pred: GazePrediction, gt: GazeAngles):
    """Per-sample values and hand-derived partials, with sign(0) = 0."""
    pitch = np.asarray(dm.value(pred.pitch), dtype=float)
    yaw = np.asarray(dm.value(pred.yaw), dtype=float)
    log_sigma = np.asarray(dm.value(pred.log_sigma), dtype=float)
    d_pitch = pitch - np.asarray(dm.value(gt.pitch), dtype=float)
    d_yaw = yaw - np.asarray(dm.value(gt.yaw), dtype=float)
    inv_sigma = np.exp(-log_sigma)
    scaled = (np.abs(d_pitch) + np.abs(d_yaw)) * inv_sigma
    values = 2.0 * log_sigma + scaled
    grads = {
        "pitch": np.sign(d_pitch) * inv_sigma,
        "yaw": np.sign(d_yaw) * inv_sigma,
        "log_sigma": 2.0 - scaled,
    }
    return values, grads


def aleatoric_loss(pred: GazePrediction, gt: GazeAngles) -> LossOutput:
    """
    Gaze NLL with a single predicted absolute deviation shared by both angles.

    For a batch the value is the mean over samples and every gradient entry
    is the derivative of that mean with respect to the sample's own output.
    """
    values, grads = _aleatoric_terms(pred, gt)
    if np.ndim(values) == 0:
        return LossOutput(
            value=float(values),
            grads={k: float(g) for k, g in grads.items()},
            per_item=np.atleast_1d(values),
        )
    n = values.size
    return LossOutput(
        value=float(values.mean()),
        grads={k: g / n for k, g in grads.items()},
        per_item=values,
    )


def mirrored_target(pred: GazePrediction) -> GazeAngles:
    """Yaw-flipped angles of a prediction, detached."""
    return GazeAngles(
        np.asarray(dm.value(pred.pitch), dtype=float),
        -np.asarray(dm.value(pred.yaw), dtype=float),
    )


def symmetry_loss(
    pred_original: GazePrediction,
    pred_mirrored: GazePrediction,
    target_for_mirrored: Optional[GazeAngles] = None,
    target_for_original: Optional[GazeAngles] = None,
) -> LossOutput:
    """
    Mirror-consistency loss.

    The mirrored prediction is scored against the yaw-flipped original and
    the original against the yaw-flipped mirror; the two half-terms are
    averaged. Targets carry no gradient. Passing them explicitly freezes them,
    which finite-difference checks need.

    Gradient keys are ``original.*`` and ``mirrored.*``.
    """
    if target_for_mirrored is None:
        target_for_mirrored = mirrored_target(pred_original)
    if target_for_original is None:
        target_for_original = mirrored_target(pred_mirrored)

    values_m, grads_m = _aleatoric_terms(pred_mirrored, target_for_mirrored)
    values_o, grads_o = _aleatoric_terms(pred_original, target_for_original)
    values = 0.5 * (values_m + values_o)

    scale = 0.5 / max(np.size(values), 1)
    grads = {f"mirrored.{k}": g * scale for k, g in grads_m.items()}
    grads.update({f"original.{k}": g * scale for k, g in grads_o.items()})
    if is_single(pred_original, pred_mirrored):
        grads = {k: float(g) for k, g in grads.items()}
    return LossOutput(value=float(np.mean(values)), grads=grads, per_item=np.atleast_1d(values))
