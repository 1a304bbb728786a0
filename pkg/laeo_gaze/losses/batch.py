"""Array views of LAEO pairs and the batches fed to the objective."""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..geometry import GazeAngles, Point2D, Vec3, normalized_frame
from ..grad import dual as dm
from ..scene import LaeoPair
from .types import GazePrediction, LossOutput


@dataclass(frozen=True)
class PairGeometry:
    """Per-pair scene quantities as ``(B,)`` arrays, plus normalized frames."""
    frame_ids: Tuple[str, ...]
    focal: np.ndarray
    eye3d_a: Vec3
    eye3d_b: Vec3
    eye2d_a: Point2D
    eye2d_b: Point2D
    heading_a: Vec3
    heading_b: Vec3
    frame_a: np.ndarray  # (B, 3, 3) camera -> normalized
    frame_b: np.ndarray
    separation: np.ndarray

    @classmethod
    def from_pairs(cls, pairs: Sequence[LaeoPair]) -> "PairGeometry":
        def vec(get):
            return Vec3.from_array(np.array([get(p).to_array() for p in pairs]).reshape(-1, 3))

        def pt(get):
            return Point2D.from_array(np.array([get(p).to_array() for p in pairs]).reshape(-1, 2))

        eye3d_a = vec(lambda p: p.subject_a.cyclopean_3d)
        eye3d_b = vec(lambda p: p.subject_b.cyclopean_3d)
        return cls(
            frame_ids=tuple(p.frame_id for p in pairs),
            focal=np.array([p.camera.focal_px for p in pairs], dtype=float),
            eye3d_a=eye3d_a,
            eye3d_b=eye3d_b,
            eye2d_a=pt(lambda p: p.subject_a.cyclopean_2d),
            eye2d_b=pt(lambda p: p.subject_b.cyclopean_2d),
            heading_a=vec(lambda p: p.subject_a.heading),
            heading_b=vec(lambda p: p.subject_b.heading),
            frame_a=normalized_frame(eye3d_a),
            frame_b=normalized_frame(eye3d_b),
            separation=np.asarray((eye3d_b - eye3d_a).norm(), dtype=float),
        )

    @classmethod
    def coerce(cls, pair) -> "PairGeometry":
        if isinstance(pair, PairGeometry):
            return pair
        if isinstance(pair, LaeoPair):
            return cls.from_pairs([pair])
        return cls.from_pairs(list(pair))

    def __len__(self) -> int:
        return len(self.frame_ids)

    def take(self, index) -> "PairGeometry":
        index = np.atleast_1d(index)
        return PairGeometry(
            frame_ids=tuple(self.frame_ids[i] for i in index),
            focal=self.focal[index],
            eye3d_a=self.eye3d_a.take(index),
            eye3d_b=self.eye3d_b.take(index),
            eye2d_a=self.eye2d_a.take(index),
            eye2d_b=self.eye2d_b.take(index),
            heading_a=self.heading_a.take(index),
            heading_b=self.heading_b.take(index),
            frame_a=self.frame_a[index],
            frame_b=self.frame_b[index],
            separation=self.separation[index],
        )


@dataclass
class LaeoBatch:
    """LAEO pairs with predictions for both subjects.

    ``mirrored_a``/``mirrored_b`` are predictions on the mirrored inputs and
    feed the symmetry loss when present.
    """
    geometry: PairGeometry
    pred_a: GazePrediction
    pred_b: GazePrediction
    mirrored_a: Optional[GazePrediction] = None
    mirrored_b: Optional[GazePrediction] = None

    def __len__(self) -> int:
        return len(self.geometry)


@dataclass
class SupervisedBatch:
    """Labeled samples: predictions against normalized-frame gaze labels."""
    pred: GazePrediction
    target: GazeAngles
    mirrored: Optional[GazePrediction] = None

    def __len__(self) -> int:
        return int(np.size(dm.value(self.pred.pitch)))


def stack_predictions(preds: List[GazePrediction]) -> GazePrediction:
    return GazePrediction.of(
        np.array([float(p.pitch) for p in preds]),
        np.array([float(p.yaw) for p in preds]),
        np.array([float(p.log_sigma) for p in preds]),
    )


# =============================================================================
# Seeding predictions and reducing per-pair losses
# =============================================================================


def seed_predictions(
    pred_a: GazePrediction,
    pred_b: GazePrediction,
    fields: Sequence[str] = ("pitch", "yaw"),
):
    """
    Dual copies of two predictions with one tangent row per (subject, field).

    Returns ``(dual_a, dual_b, keys)``; row ``j`` of every downstream tangent
    is the derivative with respect to ``keys[j]``. Unseeded fields stay plain.
    """
    pred_a, pred_b = pred_a.as_arrays(), pred_b.as_arrays()
    keys, values = [], []
    for tag, pred in (("a", pred_a), ("b", pred_b)):
        for name in fields:
            keys.append(f"{tag}.{name}")
            values.append(getattr(pred, name))
    seeded = dict(zip(keys, dm.seed_parameters(values)))

    def rebuild(tag, pred):
        get = lambda name: seeded.get(f"{tag}.{name}", getattr(pred, name))
        return GazePrediction.of(get("pitch"), get("yaw"), get("log_sigma"))

    return rebuild("a", pred_a), rebuild("b", pred_b), keys


def reduce_pairs(per_pair, valid, keys: Sequence[str], name: str, scalar: bool = False):
    """
    Mean of a per-pair dual loss over the valid pairs.

    Excluded pairs contribute nothing to the value or the gradients and are
    counted under ``name`` in ``excluded``.
    """
    values = np.atleast_1d(np.asarray(dm.value(per_pair), dtype=float))
    valid = np.broadcast_to(np.asarray(valid, dtype=bool), values.shape)
    tangent = np.broadcast_to(dm.derivative(per_pair), (len(keys),) + values.shape)
    n_valid = int(valid.sum())
    denom = max(n_valid, 1)

    values = np.where(valid, values, 0.0)
    grads = {key: np.where(valid, tangent[j], 0.0) / denom for j, key in enumerate(keys)}
    if scalar and values.size == 1:
        grads = {key: float(g[0]) for key, g in grads.items()}
    excluded = values.size - n_valid
    return LossOutput(
        value=float(values.sum() / denom),
        grads=grads,
        per_item=values,
        excluded={name: excluded} if excluded else {},
    )


def is_single(*preds: GazePrediction) -> bool:
    """True when every field of the predictions is a plain scalar."""
    return all(np.ndim(dm.value(getattr(p, f))) == 0 for p in preds for f in ("pitch", "yaw", "log_sigma"))
