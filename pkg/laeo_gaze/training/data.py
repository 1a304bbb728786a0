"""Training arrays built from a scene dataset.

Direct-mode slot layout: pair ``i`` owns slots ``2i`` (subject A) and
``2i + 1`` (subject B); labeled sample ``j`` owns slot ``2N + j``.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..geometry import GazeAngles, camera_to_normalized, vector_to_angles
from ..losses import PairGeometry
from ..scene import LabeledSample, LaeoPair, SceneDataset, SynthConfig, derived_gaze_label, synth_scene
from .features import FEATURE_WIDTH, FeatureConfig, extract_features, pair_features, pair_truth

logger = logging.getLogger(__name__)

# Sub-streams of the run seed
_PAIR_FEATURES, _PAIR_MIRROR, _LABELED_FEATURES, _LABELED_MIRROR = 1, 2, 3, 4
_LABELED_SCENES, _HELDOUT_SCENES = 7, 8


def _angles(values: Sequence[GazeAngles]) -> GazeAngles:
    return GazeAngles(
        np.array([float(v.pitch) for v in values]),
        np.array([float(v.yaw) for v in values]),
    )


def _concat(*angles: GazeAngles) -> GazeAngles:
    return GazeAngles(
        np.concatenate([np.atleast_1d(a.pitch) for a in angles]),
        np.concatenate([np.atleast_1d(a.yaw) for a in angles]),
    )


@dataclass
class EvalSet:
    """Inputs with normalized-frame reference gaze, for ``evaluate``."""
    inputs: np.ndarray
    targets: GazeAngles

    def __len__(self) -> int:
        return len(self.inputs)


@dataclass
class TrainingData:
    """
    Everything a run reads per iteration.

    ``mirror_*`` rows are a second, independent cue draw for the same
    subject; the predictor mirrors them itself. ``truth_*`` are ground-truth
    gaze in the normalized frames of the (possibly corrupted) geometry, None
    when the dataset carries no ground truth.
    """
    geometry: Optional[PairGeometry]
    features_a: np.ndarray
    features_b: np.ndarray
    mirror_a: np.ndarray
    mirror_b: np.ndarray
    derived_a: Optional[GazeAngles]
    derived_b: Optional[GazeAngles]
    truth_a: Optional[GazeAngles]
    truth_b: Optional[GazeAngles]
    sup_features: np.ndarray
    sup_mirror: np.ndarray
    sup_targets: Optional[GazeAngles]

    @property
    def n_pairs(self) -> int:
        return len(self.features_a)

    @property
    def n_labeled(self) -> int:
        return len(self.sup_features)

    @property
    def n_slots(self) -> int:
        return 2 * self.n_pairs + self.n_labeled

    def pair_inputs(self, mode: str, index: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(A, B, mirrored A, mirrored B) inputs for the selected pairs."""
        if mode == "direct":
            slots_a, slots_b = 2 * index, 2 * index + 1
            return slots_a, slots_b, slots_a, slots_b
        return self.features_a[index], self.features_b[index], self.mirror_a[index], self.mirror_b[index]

    def sup_inputs(self, mode: str, index: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if mode == "direct":
            slots = 2 * self.n_pairs + index
            return slots, slots
        return self.sup_features[index], self.sup_mirror[index]

    def pair_eval_set(self, mode: str, reference: str = "truth") -> Optional[EvalSet]:
        """All subjects of all pairs, A first then B, against ground truth or derived labels."""
        if self.n_pairs == 0:
            return None
        targets = (self.truth_a, self.truth_b) if reference == "truth" else (self.derived_a, self.derived_b)
        if targets[0] is None:
            return None
        index = np.arange(self.n_pairs)
        a, b, _, _ = self.pair_inputs(mode, index)
        return EvalSet(inputs=np.concatenate([a, b]), targets=_concat(*targets))


def _normalized_truth(pairs: Sequence[LaeoPair]) -> Optional[Tuple[GazeAngles, GazeAngles]]:
    if not pairs or any(s.gt_gaze is None for p in pairs for s in p.subjects):
        return None
    out = []
    for k in (0, 1):
        out.append(_angles([
            camera_to_normalized(p.subjects[k].gt_gaze, p.subjects[k].cyclopean_3d) for p in pairs
        ]))
    return out[0], out[1]


def make_labeled_samples(
    pairs: Sequence[LaeoPair],
    seed: int,
    feature_config: Optional[FeatureConfig] = None,
) -> List[LabeledSample]:
    """
    Two supervised samples per pair, labeled with the ground-truth gaze in
    each subject's normalized frame.
    """
    subjects, cameras, truth, ids, labels = [], [], [], [], []
    for pair in pairs:
        gaze = pair_truth(pair)
        for k, tag in ((0, "a"), (1, "b")):
            subject = pair.subjects[k]
            subjects.append(subject)
            cameras.append(pair.camera)
            truth.append(gaze[k])
            ids.append(f"{pair.frame_id}/{tag}")
            labels.append(camera_to_normalized(vector_to_angles(gaze[k]), subject.cyclopean_3d))
    features = extract_features(subjects, cameras, truth, np.random.default_rng([seed, _LABELED_FEATURES]), feature_config)
    mirror = extract_features(subjects, cameras, truth, np.random.default_rng([seed, _LABELED_MIRROR]), feature_config)
    return [
        LabeledSample(sample_id=i, features=f, gaze=g, mirror_source=m)
        for i, f, g, m in zip(ids, features, labels, mirror)
    ]


def build_training_data(
    dataset: SceneDataset,
    seed: int,
    feature_config: Optional[FeatureConfig] = None,
) -> TrainingData:
    """Features, labels and reference gaze for every pair and labeled sample."""
    pairs = dataset.pairs
    if pairs:
        geometry = PairGeometry.from_pairs(pairs)
        features_a, features_b = pair_features(pairs, np.random.default_rng([seed, _PAIR_FEATURES]), feature_config)
        mirror_a, mirror_b = pair_features(pairs, np.random.default_rng([seed, _PAIR_MIRROR]), feature_config)
        derived = [derived_gaze_label(p) for p in pairs]
        derived_a = _angles([d[0] for d in derived])
        derived_b = _angles([d[1] for d in derived])
        truth = _normalized_truth(pairs)
    else:
        geometry, derived_a, derived_b, truth = None, None, None, None
        features_a = features_b = mirror_a = mirror_b = np.zeros((0, FEATURE_WIDTH))

    labeled = dataset.labeled
    if labeled:
        sup_features = np.array([s.features for s in labeled], dtype=float)
        sup_mirror = np.array(
            [s.mirror_source if s.mirror_source is not None else s.features for s in labeled], dtype=float
        )
        sup_targets = _angles([s.gaze for s in labeled])
    else:
        sup_features = sup_mirror = np.zeros((0, FEATURE_WIDTH))
        sup_targets = None

    logger.debug("training data: %d pairs, %d labeled samples", len(pairs), len(labeled))
    return TrainingData(
        geometry=geometry,
        features_a=features_a,
        features_b=features_b,
        mirror_a=mirror_a,
        mirror_b=mirror_b,
        derived_a=derived_a,
        derived_b=derived_b,
        truth_a=truth[0] if truth else None,
        truth_b=truth[1] if truth else None,
        sup_features=sup_features,
        sup_mirror=sup_mirror,
        sup_targets=sup_targets,
    )


def labeled_eval_set(samples: Sequence[LabeledSample]) -> EvalSet:
    """Held-out labeled samples as an evaluation set (network predictors only)."""
    return EvalSet(
        inputs=np.array([s.features for s in samples], dtype=float).reshape(-1, FEATURE_WIDTH),
        targets=_angles([s.gaze for s in samples]),
    )


def synth_split(config: SynthConfig, n_scenes: int, seed: int, split: str) -> List[LaeoPair]:
    """Extra scenes for the labeled or held-out split, independent of the LAEO pairs."""
    stream, prefix = {"labeled": (_LABELED_SCENES, "labeled"), "heldout": (_HELDOUT_SCENES, "heldout")}[split]
    return [synth_scene(config, [seed, stream, i], frame_id=f"{prefix}-{i:05d}") for i in range(n_scenes)]


def sample_batch(n: int, batch_size: int, seed: int, i: int) -> np.ndarray:
    """Indices of batch ``i``, drawn without replacement from a stream seeded by (seed, i)."""
    if n == 0:
        return np.zeros(0, dtype=int)
    rng = np.random.default_rng([seed, i])
    return np.sort(rng.choice(n, size=min(batch_size, n), replace=False))
