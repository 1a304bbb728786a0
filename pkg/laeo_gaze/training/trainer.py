"""Training loop, schedules and evaluation."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.stats import spearmanr

from ..config import DEFAULT_SEED, TRAIN_CONFIG, read_config_file, validate_model
from ..errors import InvalidInputError
from ..geometry import GazeAngles, angles_to_vector, angular_error_deg
from ..losses import LaeoBatch, LossWeights, SupervisedBatch, total_objective
from ..scene import SceneDataset
from .data import EvalSet, TrainingData, build_training_data, sample_batch
from .features import FeatureConfig
from .model import PredictorParams, backward, forward, forward_with_cache, init_predictor
from .optimizer import Adam

logger = logging.getLogger(__name__)

SCHEDULES = ("weak_only", "supervised_then_joint", "supervised_only")
COMPONENT_COLUMNS = ("aleatoric", "symmetry", "geom3d", "geom2d", "pseudo")


class TrainConfig(BaseModel):
    """Everything a training run depends on besides the data."""
    model_config = ConfigDict(extra="forbid")

    learning_rate: float = Field(default=TRAIN_CONFIG["learning_rate"], gt=0)
    beta1: float = Field(default=TRAIN_CONFIG["beta1"], ge=0, lt=1)
    beta2: float = Field(default=TRAIN_CONFIG["beta2"], ge=0, lt=1)
    epsilon: float = Field(default=TRAIN_CONFIG["epsilon"], gt=0)
    T_alpha: int = Field(default=TRAIN_CONFIG["T_alpha"], gt=0)
    T_beta: int = Field(default=TRAIN_CONFIG["T_beta"], gt=0)
    batch_size: int = Field(default=TRAIN_CONFIG["batch_size"], gt=0)
    iterations: int = Field(default=TRAIN_CONFIG["iterations"], gt=0)
    supervised_iterations: int = Field(default=TRAIN_CONFIG["supervised_iterations"], gt=0)
    joint_iterations: int = Field(default=TRAIN_CONFIG["joint_iterations"], gt=0)
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    schedule: Literal["weak_only", "supervised_then_joint", "supervised_only"] = "weak_only"
    predictor: Literal["direct", "mlp"] = "mlp"
    hidden_width: int = Field(default=TRAIN_CONFIG["hidden_width"], gt=0)
    init_std: float = Field(default=TRAIN_CONFIG["init_std"], gt=0)
    log_every: int = Field(default=TRAIN_CONFIG["log_every"], gt=0)
    n_labeled: int = Field(default=0, ge=0)
    n_heldout: int = Field(default=0, ge=0)
    weights: LossWeights = Field(default_factory=LossWeights)
    features: FeatureConfig = Field(default_factory=FeatureConfig)

    def total_iterations(self) -> int:
        if self.schedule == "weak_only":
            return self.iterations
        if self.schedule == "supervised_only":
            return self.supervised_iterations
        return self.supervised_iterations + self.joint_iterations


_WEIGHT_KEYS = ("pseudo_mode", "geom3d_mode", "geom3d_scale", "alpha", "beta")
_FEATURE_KEYS = ("cue_sigma_min_deg", "cue_sigma_max_deg")


def train_config_from_values(values: Dict[str, Any], base: Optional[TrainConfig] = None) -> TrainConfig:
    """
    Apply flat overrides (config file keys or CLI flags) on top of ``base``.

    ``losses`` is a comma list of geom3d, geom2d, pseudo and sym.
    """
    merged = (base or TrainConfig()).model_dump()
    weights = dict(merged.pop("weights"))
    features = dict(merged.pop("features"))
    losses = None
    for key, value in values.items():
        if key == "losses":
            losses = value
        elif key in _WEIGHT_KEYS:
            weights[key] = value
        elif key in _FEATURE_KEYS:
            features[key] = value
        elif key in TrainConfig.model_fields and key not in ("weights", "features"):
            merged[key] = value
        else:
            raise InvalidInputError(f"unknown config key {key!r}")
    if losses is not None:
        options = {k: weights[k] for k in _WEIGHT_KEYS}
        merged["weights"] = LossWeights.from_tokens(losses, **options)
    else:
        merged["weights"] = validate_model(LossWeights, weights)
    merged["features"] = validate_model(FeatureConfig, features)
    return validate_model(TrainConfig, merged)


def load_train_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None,
                      base: Optional[TrainConfig] = None) -> TrainConfig:
    """TrainConfig from defaults, then a config file, then explicit overrides."""
    values: Dict[str, Any] = {}
    if path is not None:
        values.update(read_config_file(path))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return train_config_from_values(values, base)


# =============================================================================
# One optimizer step
# =============================================================================


@dataclass
class TrainBatch:
    """Indices into the pairs and the labeled samples for one step."""
    pairs: np.ndarray
    labeled: np.ndarray


@dataclass
class StepResult:
    loss: float
    breakdown: Dict[str, float]
    excluded: Dict[str, int]
    grad_norm: float


def select_batch(data: TrainingData, config: TrainConfig, i: int, supervised: bool, laeo: bool) -> TrainBatch:
    """Deterministic batch for iteration ``i``; the two streams use distinct seeds."""
    pairs = sample_batch(data.n_pairs, config.batch_size, config.seed, 2 * i) if laeo else np.zeros(0, dtype=int)
    labeled = (
        sample_batch(data.n_labeled, config.batch_size, config.seed, 2 * i + 1)
        if supervised else np.zeros(0, dtype=int)
    )
    return TrainBatch(pairs=pairs, labeled=labeled)


def train_step(
    params: PredictorParams,
    optimizer: Adam,
    data: TrainingData,
    batch: TrainBatch,
    i: int,
    config: TrainConfig,
    beta_iteration: Optional[int] = None,
) -> StepResult:
    """
    One optimizer step on the total objective.

    Pseudo labels and symmetry targets come from the predictions made here,
    before the update, and are held constant through it.
    """
    mode = params.mode
    weights = config.weights
    caches = {}
    sup_batch, laeo_batch = None, None

    if batch.labeled.size:
        if data.sup_targets is None:
            raise InvalidInputError("supervised step requested without labeled samples")
        inputs, mirror_inputs = data.sup_inputs(mode, batch.labeled)
        pred, caches["sup"] = forward_with_cache(params, inputs)
        mirrored = None
        if weights.symmetry:
            mirrored, caches["sup_m"] = forward_with_cache(params, mirror_inputs, mirrored=True)
        target = GazeAngles(data.sup_targets.pitch[batch.labeled], data.sup_targets.yaw[batch.labeled])
        sup_batch = SupervisedBatch(pred=pred, target=target, mirrored=mirrored)

    if batch.pairs.size:
        in_a, in_b, mir_a, mir_b = data.pair_inputs(mode, batch.pairs)
        pred_a, caches["a"] = forward_with_cache(params, in_a)
        pred_b, caches["b"] = forward_with_cache(params, in_b)
        mirrored_a = mirrored_b = None
        if weights.symmetry:
            mirrored_a, caches["a_m"] = forward_with_cache(params, mir_a, mirrored=True)
            mirrored_b, caches["b_m"] = forward_with_cache(params, mir_b, mirrored=True)
        laeo_batch = LaeoBatch(
            geometry=data.geometry.take(batch.pairs),
            pred_a=pred_a,
            pred_b=pred_b,
            mirrored_a=mirrored_a,
            mirrored_b=mirrored_b,
        )

    out = total_objective(
        i, sup_batch, laeo_batch, weights,
        T_alpha=config.T_alpha, T_beta=config.T_beta, beta_iteration=beta_iteration,
    )

    grads: Dict[str, np.ndarray] = {k: np.zeros_like(a) for k, a in params.arrays.items()}
    for group, cache in caches.items():
        output_grads = {
            name: out.grads[f"{group}.{name}"]
            for name in ("pitch", "yaw", "log_sigma")
            if f"{group}.{name}" in out.grads
        }
        if not output_grads:
            continue
        for k, g in backward(params, cache, output_grads).items():
            grads[k] += g

    grad_norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))
    optimizer.step(params.arrays, grads)
    return StepResult(loss=out.value, breakdown=out.breakdown(), excluded=dict(out.excluded), grad_norm=grad_norm)


# =============================================================================
# Evaluation
# =============================================================================


@dataclass
class EvalResult:
    mean_error_deg: float
    spearman: float
    spearman_defined: bool
    errors: np.ndarray
    sigma: np.ndarray


def rank_correlation(x: np.ndarray, y: np.ndarray) -> Tuple[float, bool]:
    """Spearman's rho with average ranks; (0.0, False) when either side is constant."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.size < 2 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return 0.0, False
    rho = spearmanr(x, y)[0]
    if not np.isfinite(rho):
        return 0.0, False
    return float(np.clip(rho, -1.0, 1.0)), True


def evaluate(params: PredictorParams, eval_set: EvalSet) -> EvalResult:
    """Mean angle between predicted and reference gaze, and Spearman(σ̂, error)."""
    if len(eval_set) == 0:
        raise InvalidInputError("evaluation set is empty")
    pred = forward(params, eval_set.inputs)
    errors = np.atleast_1d(angular_error_deg(angles_to_vector(pred.angles), angles_to_vector(eval_set.targets)))
    sigma = np.exp(np.atleast_1d(pred.log_sigma))
    rho, defined = rank_correlation(sigma, errors)
    return EvalResult(
        mean_error_deg=float(np.mean(errors)),
        spearman=rho,
        spearman_defined=defined,
        errors=errors,
        sigma=sigma,
    )


# =============================================================================
# Runs
# =============================================================================


@dataclass
class IterationRecord:
    iteration: int
    phase: str
    loss: float
    components: Dict[str, float]
    excluded: Dict[str, int]

    def to_dict(self) -> dict:
        row = {"iteration": self.iteration, "phase": self.phase, "loss": self.loss}
        for name in COMPONENT_COLUMNS:
            row[name] = self.components.get(name, "")
        row["excluded"] = sum(self.excluded.values())
        return row


@dataclass
class TrainReport:
    config: TrainConfig
    params: PredictorParams
    history: List[IterationRecord] = field(default_factory=list)
    final_error_deg: Optional[float] = None
    final_label_error_deg: Optional[float] = None
    spearman: float = 0.0
    spearman_defined: bool = False
    heldout_error_deg: Optional[float] = None
    heldout_spearman: Optional[float] = None
    heldout_spearman_defined: Optional[bool] = None
    sigma_mean: Optional[float] = None
    sigma_std: Optional[float] = None
    excluded: Dict[str, int] = field(default_factory=dict)

    def summary(self) -> Dict[str, Any]:
        return {
            "schedule": self.config.schedule,
            "predictor": self.config.predictor,
            "losses": self.config.weights.tokens(),
            "iterations": len(self.history),
            "final_loss": self.history[-1].loss if self.history else None,
            "final_error_deg": self.final_error_deg,
            "final_label_error_deg": self.final_label_error_deg,
            "spearman": self.spearman,
            "spearman_defined": self.spearman_defined,
            "heldout_error_deg": self.heldout_error_deg,
            "heldout_spearman": self.heldout_spearman,
            "heldout_spearman_defined": self.heldout_spearman_defined,
            "sigma_mean": self.sigma_mean,
            "sigma_std": self.sigma_std,
            "excluded": {k: self.excluded[k] for k in sorted(self.excluded)},
        }


def _phases(config: TrainConfig) -> List[Tuple[str, int, bool, bool]]:
    """(name, iterations, supervised, laeo) per phase."""
    if config.schedule == "weak_only":
        return [("weak", config.iterations, False, True)]
    if config.schedule == "supervised_only":
        return [("supervised", config.supervised_iterations, True, False)]
    return [
        ("supervised", config.supervised_iterations, True, False),
        ("joint", config.joint_iterations, True, True),
    ]


def _check_data(data: TrainingData, config: TrainConfig) -> None:
    needs_pairs = config.schedule != "supervised_only"
    needs_labels = config.schedule != "weak_only"
    if needs_pairs and data.n_pairs == 0:
        raise InvalidInputError(f"schedule {config.schedule} needs LAEO pairs")
    if needs_labels and data.n_labeled == 0:
        raise InvalidInputError(f"schedule {config.schedule} needs labeled samples")
    if needs_pairs and not config.weights.laeo_components and not config.weights.symmetry:
        raise InvalidInputError("weak training needs at least one LAEO loss or the symmetry loss")


def run_training(
    dataset: Union[SceneDataset, TrainingData],
    config: TrainConfig,
    heldout: Optional[EvalSet] = None,
) -> TrainReport:
    """
    Run the configured schedule and evaluate the result.

    weak_only trains on LAEO pairs with β fixed; supervised_then_joint first
    fits the labeled samples, then continues on both with β ramping from the
    start of the joint phase; supervised_only stops after the first phase.

    Args:
        dataset: A SceneDataset or prepared TrainingData
        config: Run configuration
        heldout: Labeled samples to report held-out error on (network predictor)
    """
    data = dataset if isinstance(dataset, TrainingData) else build_training_data(dataset, config.seed, config.features)
    _check_data(data, config)
    params = init_predictor(config.predictor, config.seed, n_slots=data.n_slots,
                            hidden_width=config.hidden_width, init_std=config.init_std)
    optimizer = Adam(config.learning_rate, config.beta1, config.beta2, config.epsilon)
    report = TrainReport(config=config, params=params)

    i = 0
    for phase, iterations, supervised, laeo in _phases(config):
        for j in range(iterations):
            batch = select_batch(data, config, i, supervised, laeo)
            beta_iteration = j if (supervised and laeo) else None
            step = train_step(params, optimizer, data, batch, i, config, beta_iteration)
            report.history.append(IterationRecord(i, phase, step.loss, step.breakdown, step.excluded))
            for name, count in step.excluded.items():
                report.excluded[name] = report.excluded.get(name, 0) + count
            if step.excluded:
                logger.info("iteration %d excluded %s", i, step.excluded)
            if i % config.log_every == 0:
                logger.info("iteration %d (%s): loss %.6f", i, phase, step.loss)
            i += 1

    _fill_evaluation(report, data, heldout)
    logger.info("training finished: error %s deg", report.final_error_deg)
    return report


def _fill_evaluation(report: TrainReport, data: TrainingData, heldout: Optional[EvalSet]) -> None:
    params, mode = report.params, report.params.mode
    truth_set = data.pair_eval_set(mode, "truth")
    if truth_set is not None:
        result = evaluate(params, truth_set)
        report.final_error_deg = result.mean_error_deg
        report.spearman, report.spearman_defined = result.spearman, result.spearman_defined
        report.sigma_mean, report.sigma_std = float(result.sigma.mean()), float(result.sigma.std())
    label_set = data.pair_eval_set(mode, "derived")
    if label_set is not None:
        report.final_label_error_deg = evaluate(params, label_set).mean_error_deg
    if heldout is not None and len(heldout):
        if mode != "mlp":
            raise InvalidInputError("held-out evaluation needs the network predictor")
        result = evaluate(params, heldout)
        report.heldout_error_deg = result.mean_error_deg
        report.heldout_spearman = result.spearman
        report.heldout_spearman_defined = result.spearman_defined
