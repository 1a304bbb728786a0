"""Scene data model, synthesis, noise models and label reliability."""

from .schema import NoiseModel, SynthConfig, default_label_ladder
from .models import LabeledSample, LaeoPair, SceneDataset, SubjectObservation
from .synth import synth_dataset, synth_scene
from .noise import corrupt, corrupt_depths
from .labels import (
    StudyRow,
    derived_gaze_label,
    derived_gaze_vectors,
    eye_center_assumption_error,
    label_error_study,
    subject_label_rows,
)
from .storage import ingest_scenes, write_scenes

__all__ = [
    'NoiseModel',
    'SynthConfig',
    'default_label_ladder',
    'LabeledSample',
    'LaeoPair',
    'SceneDataset',
    'SubjectObservation',
    'synth_dataset',
    'synth_scene',
    'corrupt',
    'corrupt_depths',
    'StudyRow',
    'derived_gaze_label',
    'derived_gaze_vectors',
    'eye_center_assumption_error',
    'label_error_study',
    'subject_label_rows',
    'ingest_scenes',
    'write_scenes',
]
