"""Configuration for laeo-gaze."""

import json
import os
from typing import Any, Dict, Type, TypeVar

from dotenv import dotenv_values
from pydantic import BaseModel, ValidationError

from .errors import InvalidInputError

M = TypeVar("M", bound=BaseModel)

# =============================================================================
# OUTPUT LOCATIONS
# =============================================================================

# Default output directory when a command is run without --out
DEFAULT_OUT_DIR = "runs"


def output_path(out_dir: str, *paths: str) -> str:
    """Get a path inside a command's output directory."""
    return os.path.join(out_dir, *paths)


# Master seed used whenever a command is run without --seed
DEFAULT_SEED = 42

# =============================================================================
# GEOMETRY: Numerical tolerances for the camera model
# =============================================================================

GEOMETRY_CONFIG = {
    "eps_parallel": 1e-8,          # |dir . normal| below this is a parallel ray
    "degenerate_rel_tol": 1e-9,    # image gaze direction shorter than tol * f is degenerate
    "distance_smoothing": 1e-6,    # geom3d distance smoothing, in units of separation
    "ray_ceiling_offset": 0.5,     # geom3d ceiling above the ray distance, in units of |w|
    "unit_tol": 1e-9,              # accepted deviation of |v| from 1
}

# =============================================================================
# SCENE SYNTHESIS: Two-person LAEO scenes with known ground truth
# =============================================================================

SYNTH_CONFIG = {
    "image_size": (1920, 1080),
    "focal_range_px": (1000.0, 1400.0),   # true focal differs from max(image) on purpose
    "principal_offset_px": (0.0, 0.0),    # true principal point relative to image center
    "depth_range_mm": (1500.0, 6000.0),
    "separation_range_mm": (500.0, 4000.0),
    "max_vertical_fraction": 0.3,         # |u_y| bound on the A->B direction
    "heading_jitter_deg": 15.0,
    "interocular_mm": 64.0,
    "head_size_mm": 220.0,
    "body_size_mm": (500.0, 1700.0),
    "image_margin_px": 40.0,
    "min_eye_separation_px": 40.0,
    "max_retries": 1000,
}

# =============================================================================
# NOISE: Geometry approximations and the label-reliability ladder
# =============================================================================

NOISE_CONFIG = {
    "eye2d_sigma_px": 12.0,
    "depth_rel_sigma": 0.05,
    "depth_floor_mm": 1.0,
    "study_scenes": 1000,
    "study_seed": 42,
}

# =============================================================================
# FEATURES: Synthetic stand-in for head crops
# =============================================================================

FEATURE_CONFIG = {
    "cue_sigma_min_deg": 2.0,      # frontal faces
    "cue_sigma_max_deg": 20.0,     # faces turned fully away
}

# =============================================================================
# TRAINING: Objective schedule and optimizer
# =============================================================================

TRAIN_CONFIG = {
    "learning_rate": 1e-4,
    "beta1": 0.9,
    "beta2": 0.999,
    "epsilon": 1e-8,
    "T_alpha": 3000,
    "T_beta": 2400,
    "batch_size": 80,
    "iterations": 3000,            # weak_only budget
    "supervised_iterations": 2000,
    "joint_iterations": 3000,
    "hidden_width": 32,
    "init_std": 0.1,
    "direct_init_deg": (15.0, 45.0),   # direct-mode start, angle off the projection ray
    "log_every": 250,
}

# Desk-scale presets used by `ablate` and `noise-study`; direct mode needs a
# larger step than the network default to travel ~90 degrees in budget.
EXPERIMENT_CONFIG = {
    "n_pairs": 200,
    "predictor": "direct",
    "learning_rate": 5e-3,
    "iterations": 2000,
    "ablation_seeds": 5,
    "noise_seeds": 4,
    "noise_sigmas": (0.0, 0.1, 0.3, 0.5),
    # variant grid: network predictor, pseudo rows start from a supervised fit
    "variant_seeds": 4,
    "variant_learning_rate": 1e-3,
    "variant_iterations": 3000,
    "variant_supervised_iterations": 1000,
    "variant_joint_iterations": 2000,
    "variant_label_fraction": 0.1,
    "variant_cue_sigma_deg": (5.0, 12.0),
}

# =============================================================================
# LAEO DETECTION: Multi-view labeling rule
# =============================================================================

DETECT_CONFIG = {
    "threshold_deg": 20.0,
    "min_views": 4,
    "iou_threshold": 0.01,
    "max_frontalness_deg": 90.0,
    "n_views": 7,
}

# =============================================================================
# GRADIENT CHECKS
# =============================================================================

GRADCHECK_CONFIG = {
    "configs_per_loss": 500,
    "step": 1e-6,
    "tolerance": 1e-6,
    "seed": 42,
}

# =============================================================================
# CONFIG FILES AND VALIDATION
# =============================================================================


def read_config_file(path: str) -> Dict[str, Any]:
    """
    Read override values from a config file.

    ``.json`` files hold one flat object; anything else is read as KEY=VALUE
    lines with ``dotenv_values``, which leaves the process environment alone.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"config file not found: {path}")
    if path.endswith(".json"):
        with open(path, "r") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise InvalidInputError(f"{path}: invalid JSON ({e})") from e
        if not isinstance(data, dict):
            raise InvalidInputError(f"{path}: expected a JSON object")
        return data
    return {k: v for k, v in dotenv_values(path).items() if v is not None}


def validate_model(model_cls: Type[M], values: Dict[str, Any]) -> M:
    """Build a pydantic model, reporting constraint failures as InvalidInputError."""
    try:
        return model_cls.model_validate(values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'value'}: {err['msg']}"
            for err in e.errors()
        )
        raise InvalidInputError(f"invalid {model_cls.__name__}: {problems}") from e
