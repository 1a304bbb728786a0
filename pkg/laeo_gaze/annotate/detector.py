"""Multi-view LAEO labeling rule.

A pair of subjects is labeled LAEO when their gaze estimates pass three angle
tests in enough views: the two gazes oppose each other, and each gaze points
along the eye line toward the other subject. A frame keeps its label only if
exactly one pair is detected.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import DETECT_CONFIG
from ..errors import DegenerateError, InvalidInputError
from ..geometry import Box2D, Vec3, angular_error_deg
from ..geometry.frames import rotate
from .occlusion import KEEP, occlusion_filter

logger = logging.getLogger(__name__)

LAEO = "laeo"
DISCARDED = "discarded"


@dataclass(frozen=True)
class ViewEstimate:
    """
    Gaze estimates for every subject of a frame as seen from one view.

    ``gaze`` is in this view's camera frame and ``rotation`` maps camera to
    world coordinates; ``eyes_world`` are the 3D cyclopean eyes in the shared
    world frame. ``frontalness_deg`` is, per subject, the angle between the
    face heading and the direction from the face to this camera.
    """
    view_id: str
    gaze: Tuple[Vec3, ...]
    eyes_world: Tuple[Vec3, ...]
    frontalness_deg: Tuple[float, ...]
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    face_boxes: Optional[Tuple[Box2D, ...]] = None
    body_boxes: Optional[Tuple[Box2D, ...]] = None

    @property
    def n_subjects(self) -> int:
        return len(self.gaze)

    def world_gaze(self, k: int) -> Vec3:
        return rotate(self.rotation, self.gaze[k])

    def eligible(
        self,
        k: int,
        max_frontalness_deg: float = DETECT_CONFIG["max_frontalness_deg"],
        iou_threshold: float = DETECT_CONFIG["iou_threshold"],
    ) -> bool:
        """Frontal enough and not occluded by another subject's body."""
        if self.frontalness_deg[k] > max_frontalness_deg:
            return False
        if self.face_boxes is None or self.body_boxes is None:
            return True
        others = [b for j, b in enumerate(self.body_boxes) if j != k]
        return occlusion_filter(self.face_boxes[k], others, iou_threshold) == KEEP


def laeo_test(
    gaze_a: Vec3,
    gaze_b: Vec3,
    eye_a: Vec3,
    eye_b: Vec3,
    threshold_deg: float = DETECT_CONFIG["threshold_deg"],
) -> bool:
    """All three of: ∠(g_a, −g_b), ∠(g_a, e_b − e_a) and ∠(g_b, e_a − e_b) below threshold."""
    line = eye_b - eye_a
    if float(line.norm()) == 0.0:
        raise DegenerateError("LAEO test needs two distinct eye positions")
    return bool(
        angular_error_deg(gaze_a, -gaze_b) < threshold_deg
        and angular_error_deg(gaze_a, line) < threshold_deg
        and angular_error_deg(gaze_b, -line) < threshold_deg
    )


@dataclass
class PairVote:
    """Tally for one subject pair across the views where both are eligible."""
    subjects: Tuple[int, int]
    passing_views: int
    eligible_views: int
    is_laeo: bool


@dataclass
class FrameDecision:
    frame_id: str
    status: str
    pair: Optional[Tuple[int, int]]
    votes: List[PairVote] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "frame_id": self.frame_id,
            "status": self.status,
            "subject_a": self.pair[0] if self.pair else "",
            "subject_b": self.pair[1] if self.pair else "",
            "detected_pairs": sum(v.is_laeo for v in self.votes),
            "max_passing_views": max((v.passing_views for v in self.votes), default=0),
        }


def detect_laeo_pair(
    views: Sequence[ViewEstimate],
    min_views: int = DETECT_CONFIG["min_views"],
    threshold_deg: float = DETECT_CONFIG["threshold_deg"],
    frame_id: str = "",
    max_frontalness_deg: float = DETECT_CONFIG["max_frontalness_deg"],
    iou_threshold: float = DETECT_CONFIG["iou_threshold"],
) -> FrameDecision:
    """
    Vote every subject pair over the views and decide the frame.

    A pair is LAEO when ``laeo_test`` passes in at least ``min_views`` views
    in which both subjects are eligible. A frame with no LAEO pair or with
    more than one is discarded.
    """
    if not views:
        raise InvalidInputError(f"frame {frame_id}: no views to decide from")
    n = views[0].n_subjects
    if any(v.n_subjects != n for v in views):
        raise InvalidInputError(f"frame {frame_id}: views disagree on the number of subjects")

    votes = []
    for i, j in itertools.combinations(range(n), 2):
        passing = eligible = 0
        for view in views:
            if not (view.eligible(i, max_frontalness_deg, iou_threshold)
                    and view.eligible(j, max_frontalness_deg, iou_threshold)):
                continue
            eligible += 1
            if laeo_test(view.world_gaze(i), view.world_gaze(j),
                         view.eyes_world[i], view.eyes_world[j], threshold_deg):
                passing += 1
        votes.append(PairVote((i, j), passing, eligible, passing >= min_views))

    detected = [v.subjects for v in votes if v.is_laeo]
    if len(detected) == 1:
        return FrameDecision(frame_id, LAEO, detected[0], votes)
    logger.debug("frame %s discarded with %d detected pairs", frame_id, len(detected))
    return FrameDecision(frame_id, DISCARDED, None, votes)
