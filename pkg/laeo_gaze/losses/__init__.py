"""Training losses: aleatoric, symmetry, geometric LAEO and pseudo-label."""

from .types import GazePrediction, LossOutput, LossWeights, LAEO_COMPONENTS
from .batch import LaeoBatch, PairGeometry, SupervisedBatch, stack_predictions
from .aleatoric import aleatoric_loss, aleatoric_value, symmetry_loss
from .geometric import camera_gaze, geom2d_loss, geom3d_cosine_variant, geom3d_loss
from .pseudo import PSEUDO_MODES, PseudoTarget, pseudo_gaze_loss, pseudo_targets, pseudo_weights
from .objective import (
    ObjectiveTargets,
    detached_targets,
    objective_coefficients,
    ramp,
    total_objective,
)

__all__ = [
    'GazePrediction',
    'LossOutput',
    'LossWeights',
    'LAEO_COMPONENTS',
    'LaeoBatch',
    'PairGeometry',
    'SupervisedBatch',
    'stack_predictions',
    'aleatoric_loss',
    'aleatoric_value',
    'symmetry_loss',
    'camera_gaze',
    'geom2d_loss',
    'geom3d_cosine_variant',
    'geom3d_loss',
    'PSEUDO_MODES',
    'PseudoTarget',
    'pseudo_gaze_loss',
    'pseudo_targets',
    'pseudo_weights',
    'ObjectiveTargets',
    'detached_targets',
    'objective_coefficients',
    'ramp',
    'total_objective',
]
