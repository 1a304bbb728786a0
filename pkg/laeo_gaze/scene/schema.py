"""Pydantic models for scene configuration, noise models and dataset records."""

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from ..config import NOISE_CONFIG, SYNTH_CONFIG


class SynthConfig(BaseModel):
    """Placement distribution for synthetic two-person scenes."""
    image_size: Tuple[float, float] = SYNTH_CONFIG["image_size"]
    focal_range_px: Tuple[float, float] = SYNTH_CONFIG["focal_range_px"]
    principal_offset_px: Tuple[float, float] = SYNTH_CONFIG["principal_offset_px"]
    depth_range_mm: Tuple[float, float] = SYNTH_CONFIG["depth_range_mm"]
    separation_range_mm: Tuple[float, float] = SYNTH_CONFIG["separation_range_mm"]
    max_vertical_fraction: float = Field(default=SYNTH_CONFIG["max_vertical_fraction"], ge=0, le=1)
    heading_jitter_deg: float = Field(default=SYNTH_CONFIG["heading_jitter_deg"], ge=0, lt=90)
    interocular_mm: float = Field(default=SYNTH_CONFIG["interocular_mm"], gt=0)
    head_size_mm: float = Field(default=SYNTH_CONFIG["head_size_mm"], gt=0)
    body_size_mm: Tuple[float, float] = SYNTH_CONFIG["body_size_mm"]
    image_margin_px: float = Field(default=SYNTH_CONFIG["image_margin_px"], ge=0)
    min_eye_separation_px: float = Field(default=SYNTH_CONFIG["min_eye_separation_px"], ge=0)
    max_retries: int = Field(default=SYNTH_CONFIG["max_retries"], ge=1)

    @model_validator(mode="after")
    def _check_ranges(self):
        for name in ("focal_range_px", "depth_range_mm", "separation_range_mm"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise ValueError(f"{name} must satisfy 0 < low <= high, got {(lo, hi)}")
        if min(self.image_size) <= 0:
            raise ValueError("image_size must be positive")
        return self


class NoiseModel(BaseModel):
    """Geometry approximations applied by ``corrupt``."""
    name: str = "noise"
    focal_mode: Literal["exact", "max-image-dim"] = "exact"
    eye2d_sigma_px: float = Field(default=0.0, ge=0)
    depth_rel_sigma: float = Field(default=0.0, ge=0)
    target_offset_mm: float = Field(default=0.0, ge=0)
    seed: int = NOISE_CONFIG["study_seed"]

    @property
    def is_identity(self) -> bool:
        return (
            self.focal_mode == "exact"
            and self.eye2d_sigma_px == 0
            and self.depth_rel_sigma == 0
            and self.target_offset_mm == 0
        )


def default_label_ladder(seed: int = NOISE_CONFIG["study_seed"]) -> List[NoiseModel]:
    """Approximations replaced by exact values one at a time."""
    eye = NOISE_CONFIG["eye2d_sigma_px"]
    depth = NOISE_CONFIG["depth_rel_sigma"]
    return [
        NoiseModel(name="approx_focal", focal_mode="max-image-dim",
                   eye2d_sigma_px=eye, depth_rel_sigma=depth, seed=seed),
        NoiseModel(name="exact_focal", eye2d_sigma_px=eye, depth_rel_sigma=depth, seed=seed),
        NoiseModel(name="exact_eyes", depth_rel_sigma=depth, seed=seed),
        NoiseModel(name="all_exact", seed=seed),
    ]


# =============================================================================
# JSON-lines records
# =============================================================================

Pair2 = Tuple[float, float]


class CameraRecord(BaseModel):
    focal_px: float = Field(gt=0)
    pp: Pair2
    image_size: Pair2

    @model_validator(mode="after")
    def _check_size(self):
        if min(self.image_size) <= 0:
            raise ValueError("image_size must be positive")
        return self


class SubjectRecord(BaseModel):
    """One subject; ``cyclopean_3d`` is optional and checked when present."""
    eyes_2d: Tuple[Pair2, Pair2]
    depth_mm: float = Field(gt=0)
    heading: Tuple[float, float, float]
    head_box: Tuple[float, float, float, float]
    body_box: Tuple[float, float, float, float]
    cyclopean_3d: Optional[Tuple[float, float, float]] = None
    gt_gaze: Optional[Pair2] = None


class SceneRecord(BaseModel):
    frame_id: str = Field(min_length=1)
    coords: Literal["centered", "pixel"] = "centered"
    camera: CameraRecord
    subjects: Tuple[SubjectRecord, SubjectRecord]


class ViewRecord(BaseModel):
    """Per-view gaze estimates for the subjects of a multi-view frame."""
    view_id: str
    rotation: Optional[Tuple[Tuple[float, float, float], ...]] = None
    gaze: List[Tuple[float, float, float]]
    frontalness_deg: List[float]


class MultiviewRecord(BaseModel):
    """A detector input frame: subjects in a shared world frame plus their views."""
    frame_id: str = Field(min_length=1)
    eyes_3d: List[Tuple[float, float, float]]
    face_boxes: List[List[Tuple[float, float, float, float]]] = Field(default_factory=list)
    body_boxes: List[List[Tuple[float, float, float, float]]] = Field(default_factory=list)
    views: List[ViewRecord]
    true_pairs: List[Tuple[int, int]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_shapes(self):
        n = len(self.eyes_3d)
        if n < 2:
            raise ValueError("a frame needs at least two subjects")
        for view in self.views:
            if len(view.gaze) != n or len(view.frontalness_deg) != n:
                raise ValueError(f"view {view.view_id} does not cover all {n} subjects")
        for boxes in (self.face_boxes, self.body_boxes):
            if boxes and (len(boxes) != len(self.views) or any(len(b) != n for b in boxes)):
                raise ValueError("box lists must be per view and per subject")
        return self
