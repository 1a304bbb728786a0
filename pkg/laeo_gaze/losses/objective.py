"""The combined training objective L = L_G + α(i)·L_sym + β(i)·L_LAEO."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..errors import InvalidInputError, NumericalError
from ..geometry import GazeAngles
from .aleatoric import aleatoric_loss, mirrored_target, symmetry_loss
from .batch import LaeoBatch, SupervisedBatch
from .geometric import geom2d_loss, geom3d_cosine_variant, geom3d_loss
from .pseudo import PseudoTarget, pseudo_gaze_loss, pseudo_targets
from .types import GazePrediction, LossOutput, LossWeights

logger = logging.getLogger(__name__)

DEFAULT_T_ALPHA = 3000
DEFAULT_T_BETA = 2400


def ramp(i: float, T: float) -> float:
    """Linear warm-up min(i/T, 1)."""
    if i < 0:
        raise InvalidInputError(f"ramp iteration must be >= 0, got {i}")
    if T <= 0:
        raise InvalidInputError(f"ramp threshold must be > 0, got {T}")
    return min(i / T, 1.0)


def objective_coefficients(
    i: int,
    weights: LossWeights,
    supervised: bool,
    T_alpha: float = DEFAULT_T_ALPHA,
    T_beta: float = DEFAULT_T_BETA,
    beta_iteration: Optional[int] = None,
) -> Tuple[float, float, float]:
    """
    Coefficients (of L_G, L_sym, L_LAEO) at iteration ``i``.

    Without supervision L_G is absent and β stays at ``weights.beta``.
    With supervision β ramps on ``beta_iteration`` (the iteration count inside
    the joint phase), which defaults to ``i``.
    """
    alpha = weights.alpha * ramp(i, T_alpha)
    if not supervised:
        return 0.0, alpha, weights.beta
    j = i if beta_iteration is None else beta_iteration
    return 1.0, alpha, weights.beta * ramp(j, T_beta)


@dataclass
class ObjectiveTargets:
    """Detached targets of one objective evaluation, held fixed across perturbations."""
    pseudo: Optional[PseudoTarget] = None
    symmetry: Dict[str, Tuple[GazeAngles, GazeAngles]] = field(default_factory=dict)


def _symmetry_groups(supervised_batch, laeo_batch) -> List[Tuple[str, GazePrediction, GazePrediction]]:
    groups = []
    if supervised_batch is not None and supervised_batch.mirrored is not None:
        groups.append(("sup", supervised_batch.pred, supervised_batch.mirrored))
    if laeo_batch is not None:
        if laeo_batch.mirrored_a is not None:
            groups.append(("a", laeo_batch.pred_a, laeo_batch.mirrored_a))
        if laeo_batch.mirrored_b is not None:
            groups.append(("b", laeo_batch.pred_b, laeo_batch.mirrored_b))
    return groups


def detached_targets(
    supervised_batch: Optional[SupervisedBatch],
    laeo_batch: Optional[LaeoBatch],
    weights: LossWeights,
) -> ObjectiveTargets:
    """Targets the objective treats as constants, from the current predictions."""
    targets = ObjectiveTargets()
    if laeo_batch is not None and len(laeo_batch) and "pseudo" in weights.laeo_components:
        targets.pseudo = pseudo_targets(laeo_batch.geometry, laeo_batch.pred_a, laeo_batch.pred_b)
    for tag, original, mirrored in _symmetry_groups(supervised_batch, laeo_batch):
        targets.symmetry[tag] = (mirrored_target(original), mirrored_target(mirrored))
    return targets


def laeo_component(name: str, batch: LaeoBatch, weights: LossWeights,
                   target: Optional[PseudoTarget] = None) -> LossOutput:
    """Evaluate one LAEO component with the configured variant."""
    if name == "geom3d":
        if weights.geom3d_mode == "cosine":
            return geom3d_cosine_variant(batch.geometry, batch.pred_a, batch.pred_b)
        return geom3d_loss(batch.geometry, batch.pred_a, batch.pred_b, scale=weights.geom3d_scale)
    if name == "geom2d":
        return geom2d_loss(batch.geometry, batch.pred_a, batch.pred_b)
    if name == "pseudo":
        return pseudo_gaze_loss(batch.geometry, batch.pred_a, batch.pred_b,
                                mode=weights.pseudo_mode, target=target)
    raise InvalidInputError(f"unknown LAEO component {name!r}")


def _accumulate(grads: Dict[str, np.ndarray], key: str, g, coef: float) -> None:
    g = coef * np.asarray(g, dtype=float)
    grads[key] = grads[key] + g if key in grads else g


def _symmetry_term(supervised_batch, laeo_batch, targets: ObjectiveTargets):
    """Mean symmetry loss over every sample that has a mirrored prediction."""
    groups = _symmetry_groups(supervised_batch, laeo_batch)
    if not groups:
        return None
    outputs = []
    for tag, original, mirrored in groups:
        t_m, t_o = targets.symmetry.get(tag, (None, None))
        outputs.append((tag, symmetry_loss(original, mirrored, t_m, t_o)))
    total = sum(out.per_item.size for _, out in outputs)
    value, grads = 0.0, {}
    for tag, out in outputs:
        share = out.per_item.size / total
        value += share * out.value
        for key, g in out.grads.items():
            role, name = key.split(".")
            _accumulate(grads, f"{tag}.{name}" if role == "original" else f"{tag}_m.{name}", g, share)
    return LossOutput(value=value, grads=grads)


def total_objective(
    i: int,
    supervised_batch: Optional[SupervisedBatch],
    laeo_batch: Optional[LaeoBatch],
    weights: LossWeights,
    T_alpha: float = DEFAULT_T_ALPHA,
    T_beta: float = DEFAULT_T_BETA,
    beta_iteration: Optional[int] = None,
    targets: Optional[ObjectiveTargets] = None,
) -> LossOutput:
    """
    L_G over the supervised samples, plus α(i)·L_sym, plus β(i) times the sum
    of the enabled LAEO components averaged over pairs.

    Gradient keys are namespaced by sample group: ``sup.*`` for supervised
    samples, ``a.*``/``b.*`` for the two LAEO subjects, and ``*_m.*`` for the
    predictions on mirrored inputs. A disabled component adds no keys.

    Raises:
        InvalidInputError: If both batches are empty
        NumericalError: If the value or any gradient is non-finite
    """
    has_sup = supervised_batch is not None and len(supervised_batch) > 0
    has_laeo = laeo_batch is not None and len(laeo_batch) > 0
    if not (has_sup or has_laeo):
        raise InvalidInputError("total objective needs a supervised or a LAEO batch")
    if not has_sup:
        supervised_batch = None
    if not has_laeo:
        laeo_batch = None
    if targets is None:
        targets = detached_targets(supervised_batch, laeo_batch, weights)

    gamma, alpha, beta = objective_coefficients(i, weights, has_sup, T_alpha, T_beta, beta_iteration)
    value, grads = 0.0, {}
    parts: Dict[str, LossOutput] = {}
    excluded: Dict[str, int] = {}

    if has_sup:
        out = aleatoric_loss(supervised_batch.pred, supervised_batch.target)
        parts["aleatoric"] = out
        value += gamma * out.value
        for key, g in out.grads.items():
            _accumulate(grads, f"sup.{key}", g, gamma)

    if weights.symmetry:
        out = _symmetry_term(supervised_batch, laeo_batch, targets)
        if out is not None:
            parts["symmetry"] = out
            value += alpha * out.value
            for key, g in out.grads.items():
                _accumulate(grads, key, g, alpha)

    if has_laeo:
        for name in weights.component_list():
            out = laeo_component(name, laeo_batch, weights, targets.pseudo)
            parts[name] = out
            excluded.update(out.excluded)
            value += beta * out.value
            for key, g in out.grads.items():
                _accumulate(grads, key, g, beta)

    result = LossOutput(value=float(value), grads=grads, excluded=excluded, parts=parts)
    _check_finite(result, laeo_batch)
    return result


def _check_finite(result: LossOutput, laeo_batch: Optional[LaeoBatch]) -> None:
    if np.isfinite(result.value) and all(np.all(np.isfinite(g)) for g in result.grads.values()):
        return
    frame_id = None
    if laeo_batch is not None:
        for name, part in result.parts.items():
            if part.per_item is not None and part.per_item.size == len(laeo_batch):
                bad = np.flatnonzero(~np.isfinite(part.per_item))
                if bad.size:
                    frame_id = laeo_batch.geometry.frame_ids[bad[0]]
                    break
        if frame_id is None:
            for key, g in result.grads.items():
                if key[0] in "ab" and np.size(g) == len(laeo_batch):
                    bad = np.flatnonzero(~np.isfinite(np.atleast_1d(g)))
                    if bad.size:
                        frame_id = laeo_batch.geometry.frame_ids[bad[0]]
                        break
    raise NumericalError("non-finite training objective", frame_id=frame_id)
