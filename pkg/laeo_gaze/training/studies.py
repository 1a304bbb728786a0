"""Multi-seed experiments: loss ablations, depth-noise robustness and label budgets."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import EXPERIMENT_CONFIG
from ..errors import InvalidInputError
from ..losses import LossWeights
from ..scene import LabeledSample, SceneDataset, SynthConfig, corrupt_depths, synth_dataset
from .data import build_training_data, labeled_eval_set, make_labeled_samples, synth_split
from .features import FeatureConfig
from .trainer import TrainConfig, run_training

logger = logging.getLogger(__name__)


def experiment_config(**overrides) -> TrainConfig:
    """Desk-scale preset: direct predictor, larger step, shorter budget."""
    values = {
        "predictor": EXPERIMENT_CONFIG["predictor"],
        "learning_rate": EXPERIMENT_CONFIG["learning_rate"],
        "iterations": EXPERIMENT_CONFIG["iterations"],
    }
    values.update(overrides)
    return TrainConfig(**values)


# =============================================================================
# Loss ablations
# =============================================================================

# Symmetry stays on in every row of the default grid
DEFAULT_ABLATION_GRID: Tuple[Tuple[str, str], ...] = (
    ("pseudo", "pseudo,sym"),
    ("geom2d", "geom2d,sym"),
    ("geom2d+pseudo", "geom2d,pseudo,sym"),
    ("geom3d", "geom3d,sym"),
    ("geom3d+geom2d", "geom3d,geom2d,sym"),
    ("geom3d+pseudo", "geom3d,pseudo,sym"),
    ("geom3d+geom2d+pseudo", "geom3d,geom2d,pseudo,sym"),
)


@dataclass(frozen=True)
class AblationConfig:
    """One row of an ablation grid; non-weak schedules need labeled samples."""
    name: str
    weights: LossWeights
    schedule: str = "weak_only"


def default_ablation_grid(**options) -> List[AblationConfig]:
    """The seven loss subsets; ``options`` (pseudo_mode, geom3d_mode) apply to every row."""
    options = {k: v for k, v in options.items() if v is not None}
    return [AblationConfig(name, LossWeights.from_tokens(tokens, **options)) for name, tokens in DEFAULT_ABLATION_GRID]


def variant_ablation_grid() -> List[AblationConfig]:
    """
    Pseudo-label modes and the two geom3d forms.

    The pseudo rows fine-tune a supervised start with pseudo labels as the
    only LAEO loss, so the mode decides what the pairs teach. The geom3d rows
    train weakly with geom3d alone.
    """
    rows = [
        AblationConfig(f"pseudo_{mode}", LossWeights.from_tokens("pseudo,sym", pseudo_mode=mode),
                       "supervised_then_joint")
        for mode in ("weighted", "naive", "confident")
    ]
    rows += [
        AblationConfig(f"geom3d_{mode}", LossWeights.from_tokens("geom3d,sym", geom3d_mode=mode))
        for mode in ("plane", "cosine")
    ]
    return rows


@dataclass
class AblationRow:
    name: str
    losses: str
    pseudo_mode: str
    geom3d_mode: str
    schedule: str
    seed_errors: List[float]
    median_error_deg: float
    median_label_error_deg: float

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "losses": self.losses,
            "pseudo_mode": self.pseudo_mode,
            "geom3d_mode": self.geom3d_mode,
            "schedule": self.schedule,
            "seeds": len(self.seed_errors),
            "median_error_deg": self.median_error_deg,
            "median_label_error_deg": self.median_label_error_deg,
        }


def run_ablation(
    configs: Sequence[AblationConfig],
    seeds: Sequence[int],
    base: Optional[TrainConfig] = None,
    n_pairs: int = EXPERIMENT_CONFIG["n_pairs"],
    scene_seed: int = 42,
    synth: Optional[SynthConfig] = None,
    pairs=None,
    labeled: Optional[Sequence[LabeledSample]] = None,
) -> List[AblationRow]:
    """
    Train each configuration once per seed on one scene set and report the
    median final error over seeds against the true gaze of the pairs.
    """
    if not configs or not seeds:
        raise InvalidInputError("ablation needs at least one configuration and one seed")
    base = base or experiment_config()
    if pairs is None:
        pairs = synth_dataset(synth or SynthConfig(), n_pairs, scene_seed)
    dataset = SceneDataset(pairs=list(pairs), labeled=list(labeled or []))
    rows = []
    for entry in configs:
        errors, label_errors = [], []
        for seed in seeds:
            update = {"weights": entry.weights, "seed": int(seed), "schedule": entry.schedule}
            report = run_training(dataset, base.model_copy(update=update))
            errors.append(report.final_error_deg)
            label_errors.append(report.final_label_error_deg)
        row = AblationRow(
            name=entry.name,
            losses=entry.weights.tokens(),
            pseudo_mode=entry.weights.pseudo_mode,
            geom3d_mode=entry.weights.geom3d_mode,
            schedule=entry.schedule,
            seed_errors=errors,
            median_error_deg=float(np.median(errors)),
            median_label_error_deg=float(np.median(label_errors)),
        )
        logger.info("ablation %s: median error %.3f deg over %d seeds", entry.name, row.median_error_deg, len(seeds))
        rows.append(row)
    return rows


def variant_config(**overrides) -> TrainConfig:
    """Network preset for the variant grid, with a narrower cue-noise range."""
    low, high = EXPERIMENT_CONFIG["variant_cue_sigma_deg"]
    values = {
        "predictor": "mlp",
        "learning_rate": EXPERIMENT_CONFIG["variant_learning_rate"],
        "iterations": EXPERIMENT_CONFIG["variant_iterations"],
        "supervised_iterations": EXPERIMENT_CONFIG["variant_supervised_iterations"],
        "joint_iterations": EXPERIMENT_CONFIG["variant_joint_iterations"],
        "features": FeatureConfig(cue_sigma_min_deg=low, cue_sigma_max_deg=high),
    }
    values.update(overrides)
    return TrainConfig(**values)


def run_variant_study(
    seeds: Sequence[int],
    base: Optional[TrainConfig] = None,
    n_pairs: int = EXPERIMENT_CONFIG["n_pairs"],
    scene_seed: int = 42,
    synth: Optional[SynthConfig] = None,
    pairs=None,
) -> List[AblationRow]:
    """
    The variant grid on the network predictor.

    Labeled scenes number ``variant_label_fraction`` of the pairs and come
    from their own split, so the pseudo rows start from a supervised fit.
    """
    base = base or variant_config()
    if base.predictor != "mlp":
        raise InvalidInputError("the variant study needs the network predictor")
    synth = synth or SynthConfig()
    if pairs is None:
        pairs = synth_dataset(synth, n_pairs, scene_seed)
    n_labeled = max(1, int(round(EXPERIMENT_CONFIG["variant_label_fraction"] * len(pairs))))
    labeled = make_labeled_samples(synth_split(synth, n_labeled, scene_seed, "labeled"), scene_seed, base.features)
    return run_ablation(variant_ablation_grid(), seeds, base=base, pairs=pairs, labeled=labeled)


# =============================================================================
# Depth noise
# =============================================================================


@dataclass
class NoiseStudyRow:
    sigma: float
    arm: str
    seed_errors: List[float]
    median_error_deg: float

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "arm": self.arm,
            "seeds": len(self.seed_errors),
            "median_error_deg": self.median_error_deg,
        }


def depth_noise_study(
    config: Optional[TrainConfig] = None,
    sigmas: Sequence[float] = EXPERIMENT_CONFIG["noise_sigmas"],
    with_l2d: Optional[bool] = None,
    seeds: Sequence[int] = tuple(range(EXPERIMENT_CONFIG["noise_seeds"])),
    n_pairs: int = EXPERIMENT_CONFIG["n_pairs"],
    scene_seed: int = 42,
    synth: Optional[SynthConfig] = None,
) -> List[NoiseStudyRow]:
    """
    Weak training on depth-corrupted scenes, with and without the 2D loss.

    For each σ and seed the scene depths are scaled by (1 + N(0, σ)) with the
    seed's own draw. ``with_l2d`` runs a single arm; None runs both. Errors are
    against the uncorrupted ground truth.
    """
    config = config or experiment_config()
    arms = [True, False] if with_l2d is None else [with_l2d]
    pairs = synth_dataset(synth or SynthConfig(), n_pairs, scene_seed)
    rows = []
    for sigma in sigmas:
        if sigma < 0:
            raise InvalidInputError(f"depth noise sigma must be >= 0, got {sigma}")
        for use_l2d in arms:
            components = set(config.weights.laeo_components)
            components = components | {"geom2d"} if use_l2d else components - {"geom2d"}
            weights = config.weights.model_copy(update={"laeo_components": components})
            errors = []
            for seed in seeds:
                noisy = corrupt_depths(pairs, sigma, seed=int(seed))
                run = config.model_copy(update={"weights": weights, "seed": int(seed), "schedule": "weak_only"})
                errors.append(run_training(SceneDataset(pairs=noisy), run).final_error_deg)
            arm = "with_l2d" if use_l2d else "without_l2d"
            row = NoiseStudyRow(sigma=float(sigma), arm=arm, seed_errors=errors, median_error_deg=float(np.median(errors)))
            logger.info("noise study sigma %.2f %s: median error %.3f deg", sigma, arm, row.median_error_deg)
            rows.append(row)
    return rows


# =============================================================================
# Label budget
# =============================================================================


@dataclass
class ScheduleComparison:
    schedule: str
    heldout_errors: List[float] = field(default_factory=list)

    @property
    def median_error_deg(self) -> float:
        return float(np.median(self.heldout_errors))

    def to_dict(self) -> dict:
        return {"schedule": self.schedule, "seeds": len(self.heldout_errors), "median_heldout_error_deg": self.median_error_deg}


def compare_schedules(
    config: Optional[TrainConfig] = None,
    n_pairs: int = EXPERIMENT_CONFIG["n_pairs"],
    label_fraction: float = 0.1,
    n_heldout: int = 100,
    seeds: Sequence[int] = (0,),
    scene_seed: int = 42,
    synth: Optional[SynthConfig] = None,
) -> Dict[str, ScheduleComparison]:
    """
    Held-out error of supervised_only against supervised_then_joint when
    labels exist for ``label_fraction`` as many scenes as there are LAEO pairs.
    """
    config = config or TrainConfig(predictor="mlp", learning_rate=1e-3)
    if config.predictor != "mlp":
        raise InvalidInputError("schedule comparison needs the network predictor")
    synth = synth or SynthConfig()
    n_labeled = max(1, int(round(label_fraction * n_pairs)))
    pairs = synth_dataset(synth, n_pairs, scene_seed)
    labeled_scenes = synth_split(synth, n_labeled, scene_seed, "labeled")
    heldout_scenes = synth_split(synth, n_heldout, scene_seed, "heldout")
    results = {s: ScheduleComparison(s) for s in ("supervised_only", "supervised_then_joint")}
    for seed in seeds:
        labeled = make_labeled_samples(labeled_scenes, int(seed), config.features)
        heldout = labeled_eval_set(make_labeled_samples(heldout_scenes, int(seed) + 1, config.features))
        data = build_training_data(SceneDataset(pairs=pairs, labeled=labeled), int(seed), config.features)
        for schedule, result in results.items():
            run = config.model_copy(update={"schedule": schedule, "seed": int(seed)})
            result.heldout_errors.append(run_training(data, run, heldout=heldout).heldout_error_deg)
    for result in results.values():
        logger.info("schedule %s: median held-out error %.3f deg", result.schedule, result.median_error_deg)
    return results
