"""Finite-difference verification of every loss gradient.

Each check samples random configurations, some near the true labels and some
far enough off to reach the plane term's ceiling and parallel rays. Draws that
land on a kink or a branch switch are resampled. Detached targets are held
fixed at the sampled point while the loss's own gradient is compared with
central differences.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import GEOMETRY_CONFIG, GRADCHECK_CONFIG
from ..errors import InvalidInputError
from ..geometry import GazeAngles
from ..losses import (
    GazePrediction,
    LaeoBatch,
    LossWeights,
    PairGeometry,
    SupervisedBatch,
    aleatoric_loss,
    camera_gaze,
    detached_targets,
    geom2d_loss,
    geom3d_cosine_variant,
    geom3d_loss,
    pseudo_gaze_loss,
    pseudo_targets,
    symmetry_loss,
    total_objective,
)
from ..scene import SynthConfig, derived_gaze_label, synth_scene
from .engine import fd_check

logger = logging.getLogger(__name__)

PAIR_KEYS = ("a.pitch", "a.yaw", "a.log_sigma", "b.pitch", "b.yaw", "b.log_sigma")
SYMMETRY_KEYS = tuple(f"{r}.{n}" for r in ("original", "mirrored") for n in ("pitch", "yaw", "log_sigma"))
OBJECTIVE_KEYS = tuple(
    f"{g}.{n}" for g in ("sup", "sup_m", "a", "a_m", "b", "b_m") for n in ("pitch", "yaw", "log_sigma")
)

# residuals closer than this to a |.| kink are resampled
_KINK_MARGIN = 1e-3
# distance to a branch switch of the plane term, in units of |w| or of cos
_SWITCH_MARGIN = 2e-3
# projected gaze length over focal below this is too close to the geom2d exclusion
_PROJECTION_MARGIN = 0.05
# sin of the angle between a ray and the line to its target; the plane term has a cone there
_CONE_MARGIN = 0.05
_BLEND_MARGIN = 0.1
_SIGMA_MARGIN = 0.05
# near-label draws and wide draws that reach the ceiling and parallel rays
_PERTURB_RAD = (0.3, 1.2)


@dataclass
class GradcheckRow:
    loss: str
    configs: int
    max_rel_err: float
    step: float

    def to_dict(self) -> dict:
        return {"loss": self.loss, "configs": self.configs, "max_rel_err": self.max_rel_err, "step": self.step}


def _vector(grads: Dict[str, float], keys: Sequence[str]) -> np.ndarray:
    return np.array([float(np.sum(grads.get(k, 0.0))) for k in keys])


def _pred(x: np.ndarray, offset: int) -> GazePrediction:
    return GazePrediction.of(float(x[offset]), float(x[offset + 1]), float(x[offset + 2]))


class _Sampler:
    """Shared scene pool and random perturbations around the true labels."""

    def __init__(self, seed: int, pool_size: int = 64):
        self.rng = np.random.default_rng(seed)
        config = SynthConfig()
        self.pairs = [synth_scene(config, [seed, k]) for k in range(pool_size)]
        self.geometry = [PairGeometry.from_pairs([p]) for p in self.pairs]
        self.labels = [derived_gaze_label(p) for p in self.pairs]

    def pair_params(self) -> Tuple[PairGeometry, np.ndarray]:
        k = int(self.rng.integers(len(self.pairs)))
        label_a, label_b = self.labels[k]
        base = np.array([label_a.pitch, label_a.yaw, 0.0, label_b.pitch, label_b.yaw, 0.0])
        noise = self.rng.normal(0.0, self.rng.choice(_PERTURB_RAD), size=6)
        noise[[2, 5]] = self.rng.uniform(-1.0, 1.0, size=2)
        return self.geometry[k], base + noise

    def angles(self, n: int) -> np.ndarray:
        x = self.rng.uniform(-1.0, 1.0, size=(n, 3))
        x[:, 0] *= 0.8
        x[:, 1] *= 2.0
        return x.ravel()


def _plane_ok(g: PairGeometry, x: np.ndarray) -> bool:
    """Both rays are clear of the plane term's cone at the target and of its branch switches."""
    offset = GEOMETRY_CONFIG["ray_ceiling_offset"]
    for own, other, frame, heading, off in (
        (g.eye3d_a, g.eye3d_b, g.frame_a, g.heading_b, 0),
        (g.eye3d_b, g.eye3d_a, g.frame_b, g.heading_a, 3),
    ):
        gaze = camera_gaze(_pred(x, off).as_arrays(), frame).to_array()[0]
        w = (other - own).to_array()[0]
        normal = heading.to_array()[0]
        reach = float(np.linalg.norm(w))
        along = float(w.dot(gaze)) / reach
        perp = float(np.linalg.norm(np.cross(w, gaze)))
        if abs(along) < _SWITCH_MARGIN or perp < _CONE_MARGIN * reach:
            return False
        denom = float(normal.dot(gaze))
        if denom == 0.0 or normal.dot(w) / denom <= 0:
            continue
        plane = float(np.linalg.norm(gaze * (normal.dot(w) / denom) - w))
        ceiling = offset * reach + (perp if along > 0 else 2.0 * reach - perp)
        if abs(plane - ceiling) < _SWITCH_MARGIN * reach:
            return False
    return True


def _geom2d_ok(g: PairGeometry, x: np.ndarray) -> bool:
    """Both projected gazes are long enough to stay clear of the exclusion."""
    focal = float(g.focal[0])
    for eye2d, frame, off in ((g.eye2d_a, g.frame_a, 0), (g.eye2d_b, g.frame_b, 3)):
        gaze = camera_gaze(_pred(x, off).as_arrays(), frame).to_array()[0]
        ex, ey = float(eye2d.x[0]), float(eye2d.y[0])
        length = np.hypot(focal * gaze[0] - ex * gaze[2], focal * gaze[1] - ey * gaze[2])
        if length < _PROJECTION_MARGIN * focal:
            return False
    return True


def _blend_ok(g: PairGeometry, x: np.ndarray, weighted: bool = True) -> bool:
    target = pseudo_targets(g, _pred(x, 0), _pred(x, 3))
    gaze_a, gaze_b = target.reference_a, target.reference_b
    w = np.exp(x[5]) / (np.exp(x[2]) + np.exp(x[5])) if weighted else 0.5
    blend = gaze_a * w - gaze_b * (1.0 - w)
    return float(blend.norm()[0]) > _BLEND_MARGIN


def _pair_case(loss_fn: Callable, condition: Optional[Callable] = None, freeze_pseudo: bool = False):
    def sample(s: _Sampler):
        g, x0 = s.pair_params()
        if condition is not None and not condition(g, x0):
            return None
        target = pseudo_targets(g, _pred(x0, 0), _pred(x0, 3)) if freeze_pseudo else None

        def evaluate(x):
            out = loss_fn(g, _pred(x, 0), _pred(x, 3), target)
            return out.value, _vector(out.grads, PAIR_KEYS)

        return x0, evaluate
    return sample


def _aleatoric_case(s: _Sampler):
    x0 = s.angles(1)
    gt = GazeAngles(*s.angles(1)[:2])
    if min(abs(x0[0] - gt.pitch), abs(x0[1] - gt.yaw)) < _KINK_MARGIN:
        return None

    def evaluate(x):
        out = aleatoric_loss(_pred(x, 0), gt)
        return out.value, _vector(out.grads, ("pitch", "yaw", "log_sigma"))

    return x0, evaluate


def _symmetry_residuals_ok(original: np.ndarray, mirrored: np.ndarray) -> bool:
    residuals = (
        original[0] - mirrored[0],
        mirrored[1] + original[1],
    )
    return min(abs(r) for r in residuals) >= _KINK_MARGIN


def _symmetry_case(s: _Sampler):
    x0 = s.angles(2)
    if not _symmetry_residuals_ok(x0[:3], x0[3:]):
        return None
    t_m = GazeAngles(x0[0], -x0[1])
    t_o = GazeAngles(x0[3], -x0[4])

    def evaluate(x):
        out = symmetry_loss(_pred(x, 0), _pred(x, 3), t_m, t_o)
        return out.value, _vector(out.grads, SYMMETRY_KEYS)

    return x0, evaluate


def _objective_case(s: _Sampler):
    g, pair_x = s.pair_params()
    if not (_plane_ok(g, pair_x) and _geom2d_ok(g, pair_x) and _blend_ok(g, pair_x)):
        return None
    sup = s.angles(2)
    mirrored = pair_x[[0, 1, 2, 3, 4, 5]] * np.array([1, -1, 1, 1, -1, 1]) + s.rng.normal(0, 0.1, 6)
    x0 = np.concatenate([sup, pair_x[:3], mirrored[:3], pair_x[3:], mirrored[3:]])
    sup_target = GazeAngles(*s.angles(1)[:2])
    if min(abs(x0[0] - sup_target.pitch), abs(x0[1] - sup_target.yaw)) < _KINK_MARGIN:
        return None
    for off in (0, 6, 12):
        if not _symmetry_residuals_ok(x0[off:off + 3], x0[off + 3:off + 6]):
            return None
    i = int(s.rng.integers(1500, 9000))
    weights = LossWeights()

    def batches(x):
        sup_batch = SupervisedBatch(
            pred=_pred(x, 0).as_arrays(),
            target=GazeAngles(np.array([sup_target.pitch]), np.array([sup_target.yaw])),
            mirrored=_pred(x, 3).as_arrays(),
        )
        laeo = LaeoBatch(
            geometry=g,
            pred_a=_pred(x, 6).as_arrays(),
            mirrored_a=_pred(x, 9).as_arrays(),
            pred_b=_pred(x, 12).as_arrays(),
            mirrored_b=_pred(x, 15).as_arrays(),
        )
        return sup_batch, laeo

    frozen = detached_targets(*batches(x0), weights)

    def evaluate(x):
        sup_batch, laeo = batches(x)
        out = total_objective(i, sup_batch, laeo, weights, targets=frozen)
        return out.value, _vector(out.grads, OBJECTIVE_KEYS)

    return x0, evaluate


def _with_target(fn):
    return lambda g, a, b, target: fn(g, a, b)


GRADCHECK_CASES = {
    "aleatoric": _aleatoric_case,
    "symmetry": _symmetry_case,
    "geom2d": _pair_case(_with_target(geom2d_loss), condition=_geom2d_ok),
    "geom3d_plane": _pair_case(_with_target(geom3d_loss), condition=_plane_ok),
    "geom3d_cosine": _pair_case(_with_target(geom3d_cosine_variant)),
    "pseudo_weighted": _pair_case(
        lambda g, a, b, t: pseudo_gaze_loss(g, a, b, "weighted", t), condition=_blend_ok, freeze_pseudo=True
    ),
    "pseudo_naive": _pair_case(
        _with_target(lambda g, a, b: pseudo_gaze_loss(g, a, b, "naive")),
        condition=lambda g, x: _blend_ok(g, x, weighted=False),
    ),
    "pseudo_confident": _pair_case(
        lambda g, a, b, t: pseudo_gaze_loss(g, a, b, "confident", t),
        condition=lambda g, x: abs(x[2] - x[5]) > _SIGMA_MARGIN,
        freeze_pseudo=True,
    ),
    "total_objective": _objective_case,
}


def check_loss(
    name: str,
    configs: int = GRADCHECK_CONFIG["configs_per_loss"],
    step: float = GRADCHECK_CONFIG["step"],
    seed: int = GRADCHECK_CONFIG["seed"],
    sampler: Optional[_Sampler] = None,
) -> GradcheckRow:
    """Max relative gradient error of one loss over ``configs`` configurations."""
    if name not in GRADCHECK_CASES:
        raise InvalidInputError(f"unknown loss {name!r}; choose from {sorted(GRADCHECK_CASES)}")
    sampler = sampler or _Sampler(seed)
    case = GRADCHECK_CASES[name]
    worst, done, attempts = 0.0, 0, 0
    while done < configs:
        attempts += 1
        if attempts > 200 * configs:
            raise InvalidInputError(f"could not sample {configs} smooth configurations for {name}")
        sampled = case(sampler)
        if sampled is None:
            continue
        x0, evaluate = sampled
        worst = max(worst, fd_check(evaluate, x0, step))
        done += 1
    logger.info("gradcheck %s: max rel err %.3g over %d configs (%d drawn)", name, worst, done, attempts)
    return GradcheckRow(loss=name, configs=done, max_rel_err=worst, step=step)


def run_gradcheck(
    configs: int = GRADCHECK_CONFIG["configs_per_loss"],
    steps: Sequence[float] = (GRADCHECK_CONFIG["step"],),
    seed: int = GRADCHECK_CONFIG["seed"],
    losses: Optional[Sequence[str]] = None,
) -> List[GradcheckRow]:
    """One row per (loss, step)."""
    sampler = _Sampler(seed)
    rows = []
    for step in steps:
        for name in losses or GRADCHECK_CASES:
            rows.append(check_loss(name, configs, step, seed, sampler))
    return rows
