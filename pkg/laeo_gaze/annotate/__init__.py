"""Multi-view LAEO labeling, the occlusion filter and detector benchmarks."""

from .occlusion import DISCARD, KEEP, occlusion_filter
from .detector import (
    DISCARDED,
    LAEO,
    FrameDecision,
    PairVote,
    ViewEstimate,
    detect_laeo_pair,
    laeo_test,
)
from .multiview import BenchmarkResult, MultiviewFrame, detector_benchmark, score_decisions, synth_multiview_frame
from .storage import ingest_frames, write_frames

__all__ = [
    'DISCARD',
    'KEEP',
    'occlusion_filter',
    'DISCARDED',
    'LAEO',
    'FrameDecision',
    'PairVote',
    'ViewEstimate',
    'detect_laeo_pair',
    'laeo_test',
    'BenchmarkResult',
    'MultiviewFrame',
    'detector_benchmark',
    'score_decisions',
    'synth_multiview_frame',
    'ingest_frames',
    'write_frames',
]
