"""Gaze labels derived from LAEO geometry, and how reliable they are."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import NOISE_CONFIG
from ..errors import DegenerateError, InvalidInputError
from ..geometry import (
    GazeAngles,
    Vec3,
    angles_to_vector,
    angular_error_deg,
    camera_to_normalized,
    vector_to_angles,
)
from .models import LaeoPair
from .noise import corrupt, noise_rng
from .schema import NoiseModel, SynthConfig
from .synth import synth_scene

logger = logging.getLogger(__name__)


def derived_gaze_vectors(pair: LaeoPair) -> Tuple[Vec3, Vec3]:
    """Camera-frame unit vectors along the line joining the two 3D eyes."""
    line = pair.subject_b.cyclopean_3d - pair.subject_a.cyclopean_3d
    length = line.norm()
    if length == 0.0:
        raise DegenerateError(f"frame {pair.frame_id}: coincident 3D eyes")
    v_a = line / length
    return v_a, -v_a


def derived_gaze_label(pair: LaeoPair) -> Tuple[GazeAngles, GazeAngles]:
    """
    Per-subject gaze labels implied by the LAEO condition.

    Each label is expressed in that subject's normalized frame.
    """
    v_a, v_b = derived_gaze_vectors(pair)
    return (
        camera_to_normalized(vector_to_angles(v_a), pair.subject_a.cyclopean_3d),
        camera_to_normalized(vector_to_angles(v_b), pair.subject_b.cyclopean_3d),
    )


def offset_target_gaze(pair: LaeoPair, offset_mm: float, rng: np.random.Generator) -> Tuple[Vec3, Vec3]:
    """
    True gaze when each subject fixates a point ``offset_mm`` away from the
    other's cyclopean eye, in a random direction across the line of sight.
    """
    eyes = (pair.subject_a.cyclopean_3d, pair.subject_b.cyclopean_3d)
    out = []
    for k in (0, 1):
        origin, target = eyes[k], eyes[1 - k]
        line = (target - origin).normalized()
        r = Vec3.from_array(rng.normal(size=3))
        across = (r - line * r.dot(line)).normalized()
        out.append((target + across * offset_mm - origin).normalized())
    return out[0], out[1]


def eye_center_assumption_error(target_offset_mm: float, separation_mm: float) -> float:
    """Worst-case error (degrees) from assuming gaze targets the cyclopean eye center."""
    if separation_mm <= 0:
        raise InvalidInputError(f"separation must be positive, got {separation_mm}")
    return float(np.degrees(np.arctan(target_offset_mm / separation_mm)))


@dataclass
class StudyRow:
    rung: str
    mean_err_deg: float
    std_err_deg: float
    mean_rel_dz: float

    def to_dict(self) -> dict:
        return {
            "rung": self.rung,
            "mean_err_deg": self.mean_err_deg,
            "std_err_deg": self.std_err_deg,
            "mean_rel_dz": self.mean_rel_dz,
        }


def label_error_study(
    config: SynthConfig,
    noise_ladder: Sequence[NoiseModel],
    n_scenes: int = NOISE_CONFIG["study_scenes"],
    seed: int = NOISE_CONFIG["study_seed"],
    pairs: Optional[List[LaeoPair]] = None,
) -> List[StudyRow]:
    """
    Mean angular error of geometry-derived labels under each noise rung.

    The reference is the ground-truth gaze, or an offset-target gaze when a
    rung sets ``target_offset_mm``. Every rung sees the same scenes.

    Args:
        config: Scene distribution
        noise_ladder: Rungs to evaluate, in report order
        n_scenes: Scenes per rung
        seed: Scene seed
        pairs: Evaluate these pairs instead of synthesizing new ones
    """
    if not noise_ladder:
        raise InvalidInputError("label study needs at least one noise rung")
    if pairs is None:
        pairs = [synth_scene(config, [seed, i], frame_id=f"scene-{i:05d}") for i in range(n_scenes)]

    rows = []
    for rung in noise_ladder:
        errors, rel_dz = [], []
        for pair in pairs:
            if rung.target_offset_mm > 0:
                reference = offset_target_gaze(pair, rung.target_offset_mm, noise_rng(rung, pair.frame_id + "/target"))
            elif any(s.gt_gaze is None for s in pair.subjects):
                raise InvalidInputError(f"frame {pair.frame_id} has no ground-truth gaze")
            else:
                reference = tuple(angles_to_vector(s.gt_gaze) for s in pair.subjects)
            noisy = corrupt(pair, rung)
            labels = derived_gaze_vectors(noisy)
            for k in (0, 1):
                errors.append(float(angular_error_deg(labels[k], reference[k])))
                clean_z = pair.subjects[k].depth_mm
                rel_dz.append(abs(noisy.subjects[k].depth_mm - clean_z) / clean_z)
        row = StudyRow(
            rung=rung.name,
            mean_err_deg=float(np.mean(errors)),
            std_err_deg=float(np.std(errors)),
            mean_rel_dz=float(np.mean(rel_dz)),
        )
        logger.info("label study rung %s: %.3f deg", row.rung, row.mean_err_deg)
        rows.append(row)
    return rows


def subject_label_rows(pairs: Sequence[LaeoPair]) -> List[dict]:
    """
    One row per subject: the derived label, the ground-truth label when
    present and the angle between them. Angles are in the normalized frame.
    """
    rows = []
    for pair in pairs:
        derived = derived_gaze_label(pair)
        vectors = derived_gaze_vectors(pair)
        for k, tag in ((0, "a"), (1, "b")):
            subject = pair.subjects[k]
            row = {
                "frame_id": pair.frame_id,
                "subject": tag,
                "derived_pitch": float(derived[k].pitch),
                "derived_yaw": float(derived[k].yaw),
                "gt_pitch": None,
                "gt_yaw": None,
                "error_deg": None,
            }
            if subject.gt_gaze is not None:
                gt = camera_to_normalized(subject.gt_gaze, subject.cyclopean_3d)
                row["gt_pitch"] = float(gt.pitch)
                row["gt_yaw"] = float(gt.yaw)
                row["error_deg"] = float(angular_error_deg(vectors[k], angles_to_vector(subject.gt_gaze)))
            rows.append(row)
    return rows
