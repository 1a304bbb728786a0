"""Geometric LAEO losses: 2D image-line agreement and 3D face-plane hits.

Predictions are in each subject's normalized frame; they are rotated to the
camera frame before any scene geometry is applied.
"""

import logging

import numpy as np

from ..config import GEOMETRY_CONFIG
from ..geometry import Point2D, Vec3, angles_to_vector
from ..geometry.frames import rotate_back
from ..grad import dual as dm
from .batch import PairGeometry, is_single, reduce_pairs, seed_predictions
from .types import GazePrediction, LossOutput

logger = logging.getLogger(__name__)


def camera_gaze(pred: GazePrediction, frame: np.ndarray) -> Vec3:
    """Camera-frame gaze vector of a normalized-frame prediction."""
    return rotate_back(frame, angles_to_vector(pred.angles))


def _log_excluded(out: LossOutput, geometry: PairGeometry, valid, name: str) -> None:
    if out.excluded:
        dropped = [geometry.frame_ids[i] for i in np.flatnonzero(~np.asarray(valid))]
        logger.debug("%s excluded %d pairs: %s", name, len(dropped), ", ".join(dropped))


# =============================================================================
# Geometric 2D
# =============================================================================


def _geom2d_term(eye2d: Point2D, gaze: Vec3, focal, target2d: Point2D):
    """1 − cos between the projected gaze and the image line to the other eye."""
    d = Point2D(focal * gaze.x - eye2d.x * gaze.z, focal * gaze.y - eye2d.y * gaze.z)
    length = d.norm()
    degenerate = np.asarray(dm.value(length)) < GEOMETRY_CONFIG["degenerate_rel_tol"] * focal
    safe = dm.where(degenerate, 1.0, length)
    line = target2d - eye2d
    line = line / line.norm()
    return 1.0 - d.dot(line) / safe, ~degenerate


def geom2d_loss(pair, pred_a: GazePrediction, pred_b: GazePrediction) -> LossOutput:
    """
    Each projected gaze should run along the image line joining the two
    2D cyclopean eyes.

    Pairs where either projected gaze is degenerate (the gaze runs along the
    projection ray) are excluded and counted under ``geom2d``.

    Args:
        pair: A LaeoPair, a sequence of pairs or a PairGeometry
        pred_a: Subject A prediction (normalized frame)
        pred_b: Subject B prediction (normalized frame)
    """
    scalar = is_single(pred_a, pred_b)
    g = PairGeometry.coerce(pair)
    a, b, keys = seed_predictions(pred_a, pred_b)
    term_a, ok_a = _geom2d_term(g.eye2d_a, camera_gaze(a, g.frame_a), g.focal, g.eye2d_b)
    term_b, ok_b = _geom2d_term(g.eye2d_b, camera_gaze(b, g.frame_b), g.focal, g.eye2d_a)
    valid = ok_a & ok_b
    out = reduce_pairs((term_a + term_b) * 0.5, valid, keys, "geom2d", scalar)
    _log_excluded(out, g, valid, "geom2d")
    return out


# =============================================================================
# Geometric 3D
# =============================================================================


def _smooth_norm(v: Vec3, delta):
    """sqrt(|v|² + δ²) − δ: the Euclidean norm, rounded off inside radius δ."""
    return dm.sqrt(v.dot(v) + delta * delta) - delta


def _plane_term(origin: Vec3, gaze: Vec3, target: Vec3, normal: Vec3, delta):
    """
    Distance between the gaze ray's hit on the target face plane and the
    target eye, capped by a ray-distance ceiling.

    The ceiling is ``c|w| + perp`` while the target is ahead of the ray and
    ``c|w| + 2|w| − perp`` once it falls behind, with ``w`` the offset to the
    target and ``c`` the ``ray_ceiling_offset``. The term is the smaller of
    the two, and the ceiling alone for rays that miss the plane or run
    parallel to it. Hit distances grow without bound as the ray turns
    parallel, so the cap keeps the term continuous and below ``(c + 2)|w|``.
    """
    w = target - origin
    denom = normal.dot(gaze)
    num = normal.dot(w)
    denom_v = np.asarray(dm.value(denom))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_v = np.asarray(dm.value(num)) / denom_v
    hits = (np.abs(denom_v) >= GEOMETRY_CONFIG["eps_parallel"]) & (t_v > 0)

    t = num / dm.where(hits, denom, 1.0)
    plane_dist = _smooth_norm(origin + gaze * t - target, delta)

    reach = _smooth_norm(w, delta)
    perp = _smooth_norm(w.cross(gaze), delta)
    ahead = np.asarray(dm.value(w.dot(gaze))) > 0
    ceiling = reach * GEOMETRY_CONFIG["ray_ceiling_offset"] + dm.where(ahead, perp, 2.0 * reach - perp)
    use_plane = hits & (np.asarray(dm.value(plane_dist)) < np.asarray(dm.value(ceiling)))
    return dm.where(use_plane, plane_dist, ceiling)


def geom3d_loss(pair, pred_a: GazePrediction, pred_b: GazePrediction, scale: str = "separation") -> LossOutput:
    """
    Each gaze ray should pass through the other subject's 3D cyclopean eye,
    measured on the other subject's face plane.

    Args:
        pair: A LaeoPair, a sequence of pairs or a PairGeometry
        pred_a: Subject A prediction (normalized frame)
        pred_b: Subject B prediction (normalized frame)
        scale: ``"separation"`` divides distances by the inter-subject
            distance; ``"mm"`` keeps millimeters
    """
    scalar = is_single(pred_a, pred_b)
    g = PairGeometry.coerce(pair)
    a, b, keys = seed_predictions(pred_a, pred_b)
    delta = GEOMETRY_CONFIG["distance_smoothing"] * g.separation
    term_a = _plane_term(g.eye3d_a, camera_gaze(a, g.frame_a), g.eye3d_b, g.heading_b, delta)
    term_b = _plane_term(g.eye3d_b, camera_gaze(b, g.frame_b), g.eye3d_a, g.heading_a, delta)
    per_pair = (term_a + term_b) * 0.5
    if scale == "separation":
        per_pair = per_pair / g.separation
    return reduce_pairs(per_pair, np.ones(len(g), dtype=bool), keys, "geom3d", scalar)


def geom3d_cosine_variant(pair, pred_a: GazePrediction, pred_b: GazePrediction) -> LossOutput:
    """1 − cos between each gaze and the 3D line to the other eye."""
    scalar = is_single(pred_a, pred_b)
    g = PairGeometry.coerce(pair)
    a, b, keys = seed_predictions(pred_a, pred_b)
    line = (g.eye3d_b - g.eye3d_a) / g.separation
    term_a = 1.0 - camera_gaze(a, g.frame_a).dot(line)
    term_b = 1.0 + camera_gaze(b, g.frame_b).dot(line)
    return reduce_pairs((term_a + term_b) * 0.5, np.ones(len(g), dtype=bool), keys, "geom3d", scalar)
