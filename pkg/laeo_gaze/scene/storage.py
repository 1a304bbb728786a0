"""JSON-lines storage for scene datasets.

One scene per line:

    {"frame_id": ..., "coords": "centered",
     "camera": {"focal_px": ..., "pp": [x, y], "image_size": [w, h]},
     "subjects": [{"eyes_2d": [[lx, ly], [rx, ry]], "depth_mm": ...,
                   "cyclopean_3d": [x, y, z], "heading": [x, y, z],
                   "head_box": [x0, y0, x1, y1], "body_box": [...],
                   "gt_gaze": [pitch, yaw]}, {...}]}

``"coords": "pixel"`` records are converted to principal-point-centered
coordinates on ingestion.
"""

import json
import logging
import os
from pathlib import Path
from typing import Iterable, List

import numpy as np
from pydantic import ValidationError

from ..errors import InvalidInputError, RecordError
from ..geometry import Box2D, CameraIntrinsics, GazeAngles, Point2D, Vec3
from .models import LaeoPair, SceneDataset, SubjectObservation
from .schema import SceneRecord, SubjectRecord

logger = logging.getLogger(__name__)

# Relative tolerance for a stored cyclopean_3d against its back-projection
_BACKPROJECT_RTOL = 1e-9


def _subject_to_dict(s: SubjectObservation) -> dict:
    record = {
        "eyes_2d": [[float(s.left_eye_2d.x), float(s.left_eye_2d.y)],
                    [float(s.right_eye_2d.x), float(s.right_eye_2d.y)]],
        "depth_mm": float(s.depth_mm),
        "cyclopean_3d": [float(c) for c in s.cyclopean_3d.to_array()],
        "heading": [float(c) for c in s.heading.to_array()],
        "head_box": [float(c) for c in s.head_box.to_list()],
        "body_box": [float(c) for c in s.body_box.to_list()],
    }
    if s.gt_gaze is not None:
        record["gt_gaze"] = list(s.gt_gaze.to_tuple())
    return record


def pair_to_dict(pair: LaeoPair) -> dict:
    cam = pair.camera
    return {
        "frame_id": pair.frame_id,
        "coords": "centered",
        "camera": {
            "focal_px": float(cam.focal_px),
            "pp": [float(c) for c in cam.principal_point],
            "image_size": [float(c) for c in cam.image_size],
        },
        "subjects": [_subject_to_dict(s) for s in pair.subjects],
    }


def _subject_from_record(rec: SubjectRecord, camera: CameraIntrinsics, offset) -> SubjectObservation:
    dx, dy = offset
    (lx, ly), (rx, ry) = rec.eyes_2d
    subject = SubjectObservation.from_eyes(
        left_eye_2d=Point2D(lx - dx, ly - dy),
        right_eye_2d=Point2D(rx - dx, ry - dy),
        depth_mm=rec.depth_mm,
        camera=camera,
        heading=Vec3(*rec.heading),
        head_box=Box2D.from_list(rec.head_box).shifted(-dx, -dy),
        body_box=Box2D.from_list(rec.body_box).shifted(-dx, -dy),
        gt_gaze=GazeAngles(*rec.gt_gaze) if rec.gt_gaze is not None else None,
    )
    if rec.cyclopean_3d is not None:
        stored = np.asarray(rec.cyclopean_3d)
        expected = subject.cyclopean_3d.to_array()
        if not np.allclose(stored, expected, rtol=_BACKPROJECT_RTOL, atol=1e-9):
            raise InvalidInputError(
                "cyclopean_3d is not the back-projection of the eye midpoint at depth_mm"
            )
    return subject


def pair_from_dict(data: dict) -> LaeoPair:
    """Validate a decoded record and build the pair (raises InvalidInputError)."""
    try:
        rec = SceneRecord.model_validate(data)
    except ValidationError as e:
        err = e.errors()[0]
        where = ".".join(str(p) for p in err["loc"])
        raise InvalidInputError(f"{where}: {err['msg']}") from e
    camera = CameraIntrinsics(
        focal_px=rec.camera.focal_px,
        principal_point=tuple(rec.camera.pp),
        image_size=tuple(rec.camera.image_size),
    )
    offset = tuple(rec.camera.pp) if rec.coords == "pixel" else (0.0, 0.0)
    subjects = [_subject_from_record(s, camera, offset) for s in rec.subjects]
    return LaeoPair(subject_a=subjects[0], subject_b=subjects[1], camera=camera, frame_id=rec.frame_id)


def write_scenes(path: str, pairs: Iterable[LaeoPair]) -> int:
    """Write pairs as sorted-key JSON lines. Returns the number written."""
    Path(os.path.dirname(path) or ".").mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w") as f:
        for pair in pairs:
            f.write(json.dumps(pair_to_dict(pair), sort_keys=True) + "\n")
            count += 1
    return count


def ingest_scenes(path: str) -> SceneDataset:
    """
    Load and validate a scene dataset.

    Raises:
        FileNotFoundError: If ``path`` does not exist
        RecordError: For the first invalid line, naming the line and what failed
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"dataset not found: {path}")
    pairs: List[LaeoPair] = []
    seen = set()
    with open(path, "r") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                pair = pair_from_dict(json.loads(line))
            except json.JSONDecodeError as e:
                raise RecordError(line_number, f"invalid JSON ({e.msg})") from e
            except InvalidInputError as e:
                raise RecordError(line_number, str(e)) from e
            if pair.frame_id in seen:
                raise RecordError(line_number, f"duplicate frame_id {pair.frame_id!r}")
            seen.add(pair.frame_id)
            pairs.append(pair)
    if not pairs:
        logger.warning("dataset %s is empty", path)
    return SceneDataset(pairs=pairs)
