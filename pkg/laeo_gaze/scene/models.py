"""Subjects, LAEO pairs and datasets."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..errors import DegenerateError, InvalidInputError
from ..geometry import (
    Box2D,
    CameraIntrinsics,
    GazeAngles,
    Point2D,
    Vec3,
    backproject,
    cyclopean_eye_2d,
)
from .schema import NoiseModel

_MIDPOINT_ATOL_PX = 1e-6
_HEADING_TOL = 1e-6


@dataclass(frozen=True)
class SubjectObservation:
    """
    One subject seen by the camera.

    ``cyclopean_2d`` is always the eye midpoint and ``cyclopean_3d`` its
    back-projection at ``depth_mm``; build instances with ``from_eyes`` so the
    two stay consistent.
    """
    left_eye_2d: Point2D
    right_eye_2d: Point2D
    cyclopean_2d: Point2D
    depth_mm: float
    cyclopean_3d: Vec3
    heading: Vec3
    head_box: Box2D
    body_box: Box2D
    gt_gaze: Optional[GazeAngles] = None  # camera frame

    def __post_init__(self):
        if not np.isfinite(self.depth_mm) or self.depth_mm <= 0:
            raise InvalidInputError(f"depth_mm must be positive and finite, got {self.depth_mm}")
        midpoint = cyclopean_eye_2d(self.left_eye_2d, self.right_eye_2d).to_array()
        if not np.allclose(self.cyclopean_2d.to_array(), midpoint, rtol=0.0, atol=_MIDPOINT_ATOL_PX):
            raise InvalidInputError("cyclopean_2d must be the midpoint of the two eyes")
        heading_norm = float(np.linalg.norm(self.heading.to_array()))
        if abs(heading_norm - 1.0) > _HEADING_TOL:
            raise InvalidInputError(f"heading must be unit length, got |heading| = {heading_norm:.6g}")


    @classmethod
    def from_eyes(
        cls,
        left_eye_2d: Point2D,
        right_eye_2d: Point2D,
        depth_mm: float,
        camera: CameraIntrinsics,
        heading: Vec3,
        head_box: Box2D,
        body_box: Box2D,
        gt_gaze: Optional[GazeAngles] = None,
    ) -> "SubjectObservation":
        cyc2d = cyclopean_eye_2d(left_eye_2d, right_eye_2d)
        return cls(
            left_eye_2d=left_eye_2d,
            right_eye_2d=right_eye_2d,
            cyclopean_2d=cyc2d,
            depth_mm=float(depth_mm),
            cyclopean_3d=backproject(cyc2d, float(depth_mm), camera),
            heading=heading,
            head_box=head_box,
            body_box=body_box,
            gt_gaze=gt_gaze,
        )


@dataclass(frozen=True)
class LaeoPair:
    """Two subjects looking at each other in one camera frame."""
    subject_a: SubjectObservation
    subject_b: SubjectObservation
    camera: CameraIntrinsics
    frame_id: str

    def __post_init__(self):
        if self.subject_a.depth_mm <= 0 or self.subject_b.depth_mm <= 0:
            raise InvalidInputError(f"frame {self.frame_id}: depths must be positive")
        if self.separation_mm == 0.0:
            raise DegenerateError(f"frame {self.frame_id}: subjects share one 3D eye position")

    @property
    def subjects(self):
        return (self.subject_a, self.subject_b)

    @property
    def separation_mm(self) -> float:
        return float((self.subject_b.cyclopean_3d - self.subject_a.cyclopean_3d).norm())


@dataclass
class LabeledSample:
    """A supervised sample: features plus its gaze label in the normalized frame."""
    sample_id: str
    features: np.ndarray
    gaze: GazeAngles
    mirror_source: Optional[np.ndarray] = None  # second cue draw for the mirrored input


@dataclass
class SceneDataset:
    pairs: List[LaeoPair] = field(default_factory=list)
    labeled: List[LabeledSample] = field(default_factory=list)
    provenance: Optional[NoiseModel] = None

    def __post_init__(self):
        ids = [p.frame_id for p in self.pairs] + [s.sample_id for s in self.labeled]
        if len(ids) != len(set(ids)):
            seen, dupes = set(), []
            for i in ids:
                if i in seen:
                    dupes.append(i)
                seen.add(i)
            raise InvalidInputError(f"duplicate identifiers in dataset: {sorted(set(dupes))}")

    def __len__(self) -> int:
        return len(self.pairs)
