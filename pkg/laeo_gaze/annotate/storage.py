"""JSON-lines storage for multi-view detector frames.

One frame per line:

    {"frame_id": ..., "eyes_3d": [[x, y, z], ...],
     "face_boxes": [[[x0, y0, x1, y1], ...per subject], ...per view],
     "body_boxes": [...same shape...],
     "views": [{"view_id": ..., "rotation": [[...], [...], [...]],
                "gaze": [[gx, gy, gz], ...], "frontalness_deg": [...]}],
     "true_pairs": [[0, 1]]}

Rotations map view camera coordinates to the shared world frame; a missing
rotation means the view's camera is the world frame.
"""

import json
import logging
import os
from pathlib import Path
from typing import Iterable, List

import numpy as np
from pydantic import ValidationError

from ..errors import InvalidInputError, RecordError
from ..geometry import Box2D, Vec3
from ..scene.schema import MultiviewRecord
from .detector import ViewEstimate
from .multiview import MultiviewFrame

logger = logging.getLogger(__name__)

# Stored gaze vectors may carry rounding from other tools
_UNIT_TOL = 1e-6


def _vec(v: Vec3) -> list:
    return [float(c) for c in v.to_array()]


def frame_to_dict(frame: MultiviewFrame) -> dict:
    first = frame.views[0]
    record = {
        "frame_id": frame.frame_id,
        "eyes_3d": [_vec(e) for e in first.eyes_world],
        "views": [
            {
                "view_id": view.view_id,
                "rotation": [[float(c) for c in row] for row in np.asarray(view.rotation)],
                "gaze": [_vec(g) for g in view.gaze],
                "frontalness_deg": [float(a) for a in view.frontalness_deg],
            }
            for view in frame.views
        ],
        "true_pairs": [list(p) for p in frame.true_pairs],
    }
    if all(v.face_boxes is not None and v.body_boxes is not None for v in frame.views):
        record["face_boxes"] = [[b.to_list() for b in v.face_boxes] for v in frame.views]
        record["body_boxes"] = [[b.to_list() for b in v.body_boxes] for v in frame.views]
    return record


def frame_from_dict(data: dict) -> MultiviewFrame:
    """Validate a decoded record and build the frame (raises InvalidInputError)."""
    try:
        rec = MultiviewRecord.model_validate(data)
    except ValidationError as e:
        err = e.errors()[0]
        where = ".".join(str(p) for p in err["loc"])
        raise InvalidInputError(f"{where}: {err['msg']}") from e
    if not rec.views:
        raise InvalidInputError("views: a frame needs at least one view")
    eyes = tuple(Vec3(*e) for e in rec.eyes_3d)
    views = []
    for k, v in enumerate(rec.views):
        norms = np.linalg.norm(np.asarray(v.gaze, dtype=float), axis=1)
        if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
            raise InvalidInputError(f"view {v.view_id}: gaze vectors must be unit length")
        gaze = tuple(Vec3(*g) for g in v.gaze)
        rotation = np.eye(3) if v.rotation is None else np.asarray(v.rotation, dtype=float)
        if rotation.shape != (3, 3):
            raise InvalidInputError(f"view {v.view_id}: rotation must be 3x3")
        views.append(ViewEstimate(
            view_id=v.view_id,
            gaze=gaze,
            eyes_world=eyes,
            frontalness_deg=tuple(v.frontalness_deg),
            rotation=rotation,
            face_boxes=tuple(Box2D.from_list(b) for b in rec.face_boxes[k]) if rec.face_boxes else None,
            body_boxes=tuple(Box2D.from_list(b) for b in rec.body_boxes[k]) if rec.body_boxes else None,
        ))
    return MultiviewFrame(frame_id=rec.frame_id, views=views, true_pairs=[tuple(p) for p in rec.true_pairs])


def write_frames(path: str, frames: Iterable[MultiviewFrame]) -> int:
    """Write frames as sorted-key JSON lines. Returns the number written."""
    Path(os.path.dirname(path) or ".").mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w") as f:
        for frame in frames:
            f.write(json.dumps(frame_to_dict(frame), sort_keys=True) + "\n")
            count += 1
    return count


def ingest_frames(path: str) -> List[MultiviewFrame]:
    """
    Load and validate multi-view frames.

    Raises:
        FileNotFoundError: If ``path`` does not exist
        RecordError: For the first invalid line
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"frames file not found: {path}")
    frames: List[MultiviewFrame] = []
    seen = set()
    with open(path, "r") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                frame = frame_from_dict(json.loads(line))
            except json.JSONDecodeError as e:
                raise RecordError(line_number, f"invalid JSON ({e.msg})") from e
            except InvalidInputError as e:
                raise RecordError(line_number, str(e)) from e
            if frame.frame_id in seen:
                raise RecordError(line_number, f"duplicate frame_id {frame.frame_id!r}")
            seen.add(frame.frame_id)
            frames.append(frame)
    if not frames:
        logger.warning("frames file %s is empty", path)
    return frames
