"""Weakly supervised gaze training on LAEO pairs."""

from .features import FeatureConfig, extract_features, mirror_features, pair_features
from .model import (
    PredictorParams,
    backward,
    forward,
    init_predictor,
    load_params,
    save_params,
)
from .optimizer import Adam
from .data import (
    EvalSet,
    TrainingData,
    build_training_data,
    labeled_eval_set,
    make_labeled_samples,
    synth_split,
)
from .trainer import (
    TrainConfig,
    TrainReport,
    evaluate,
    load_train_config,
    rank_correlation,
    run_training,
    select_batch,
    train_step,
)
from .studies import (
    AblationConfig,
    compare_schedules,
    default_ablation_grid,
    depth_noise_study,
    experiment_config,
    run_ablation,
    run_variant_study,
    variant_ablation_grid,
    variant_config,
)

__all__ = [
    'FeatureConfig',
    'extract_features',
    'mirror_features',
    'pair_features',
    'PredictorParams',
    'backward',
    'forward',
    'init_predictor',
    'load_params',
    'save_params',
    'Adam',
    'EvalSet',
    'TrainingData',
    'build_training_data',
    'labeled_eval_set',
    'make_labeled_samples',
    'synth_split',
    'TrainConfig',
    'TrainReport',
    'evaluate',
    'load_train_config',
    'rank_correlation',
    'run_training',
    'select_batch',
    'train_step',
    'AblationConfig',
    'compare_schedules',
    'default_ablation_grid',
    'depth_noise_study',
    'experiment_config',
    'run_ablation',
    'run_variant_study',
    'variant_ablation_grid',
    'variant_config',
]
