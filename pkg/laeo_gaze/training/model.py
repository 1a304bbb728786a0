"""Gaze predictors: per-sample variables or a small tanh network.

Both map an input to (pitch, yaw, log σ̂) in the subject's normalized frame.
In ``direct`` mode the inputs are integer slots into per-sample variables;
in ``mlp`` mode they are feature rows of width 9.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple

import numpy as np

from .. import __version__
from ..config import TRAIN_CONFIG
from ..errors import InvalidInputError
from ..losses import GazePrediction
from .features import FEATURE_WIDTH, mirror_features

logger = logging.getLogger(__name__)

PredictorMode = Literal["direct", "mlp"]
PREDICTOR_MODES = ("direct", "mlp")
MLP_KEYS = ("W1", "b1", "W2", "b2", "W3", "b3")
DIRECT_KEYS = ("pitch", "yaw", "log_sigma")

_HALF_PI = np.pi / 2.0


@dataclass
class PredictorParams:
    """Trainable arrays keyed by name; their shapes are fixed after init."""
    mode: str
    arrays: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return int(sum(a.size for a in self.arrays.values()))

    def copy(self) -> "PredictorParams":
        return PredictorParams(self.mode, {k: a.copy() for k, a in self.arrays.items()})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "arrays": {k: self.arrays[k].tolist() for k in sorted(self.arrays)},
            "version": __version__,
        }


def _direct_start(n_slots: int, seed: int) -> Dict[str, np.ndarray]:
    # Zero angles gaze back along the projection ray, where the projected gaze
    # has no image direction. Start each slot off the ray instead.
    lo, hi = np.radians(TRAIN_CONFIG["direct_init_deg"])
    rng = np.random.default_rng(seed)
    elevation = rng.uniform(lo, hi, n_slots)
    azimuth = rng.uniform(0.0, 2.0 * np.pi, n_slots)
    return {
        "pitch": np.arcsin(np.sin(elevation) * np.sin(azimuth)),
        "yaw": np.arctan2(np.sin(elevation) * np.cos(azimuth), np.cos(elevation)),
        "log_sigma": np.zeros(n_slots),
    }


def init_predictor(
    mode: str,
    seed: int,
    n_slots: int = 0,
    hidden_width: int = TRAIN_CONFIG["hidden_width"],
    init_std: float = TRAIN_CONFIG["init_std"],
) -> PredictorParams:
    """
    Fresh parameters, deterministic per seed.

    direct: ``n_slots`` gazes tilted off the projection ray by an angle drawn
            from ``TRAIN_CONFIG["direct_init_deg"]`` in a random direction,
            with zero log σ̂ (σ̂ = 1).
    mlp:    weights drawn from N(0, init_std²), zero biases.
    """
    if mode == "direct":
        if n_slots <= 0:
            raise InvalidInputError("direct mode needs at least one sample slot")
        return PredictorParams("direct", _direct_start(n_slots, seed))
    if mode == "mlp":
        if hidden_width <= 0:
            raise InvalidInputError(f"hidden_width must be positive, got {hidden_width}")
        rng = np.random.default_rng(seed)
        shapes = {
            "W1": (FEATURE_WIDTH, hidden_width),
            "W2": (hidden_width, hidden_width),
            "W3": (hidden_width, 3),
        }
        arrays = {}
        for k in ("W1", "W2", "W3"):
            arrays[k] = rng.normal(0.0, init_std, size=shapes[k])
            arrays["b" + k[1]] = np.zeros(shapes[k][1])
        return PredictorParams("mlp", {k: arrays[k] for k in MLP_KEYS})
    raise InvalidInputError(f"unknown predictor mode {mode!r}; choose from {PREDICTOR_MODES}")


@dataclass
class ForwardCache:
    """What ``backward`` needs from a forward pass."""
    mode: str
    mirrored: bool
    inputs: np.ndarray
    hidden: Tuple[np.ndarray, ...] = ()
    raw_pitch: Optional[np.ndarray] = None


def _check_inputs(params: PredictorParams, inputs) -> np.ndarray:
    if params.mode == "direct":
        slots = np.asarray(inputs)
        if slots.dtype.kind not in "iu":
            raise InvalidInputError("direct mode expects integer sample slots")
        n = params.arrays["pitch"].size
        if slots.size and (slots.min() < 0 or slots.max() >= n):
            raise InvalidInputError(f"sample slot out of range [0, {n})")
        return slots
    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    width = params.arrays["W1"].shape[0]
    if x.shape[-1] != width:
        raise InvalidInputError(f"feature width {x.shape[-1]} does not match the predictor's {width}")
    return x


def forward_with_cache(params: PredictorParams, inputs, mirrored: bool = False) -> Tuple[GazePrediction, ForwardCache]:
    x = _check_inputs(params, inputs)
    if params.mode == "direct":
        a = params.arrays
        yaw = a["yaw"][x]
        pred = GazePrediction.of(a["pitch"][x].copy(), -yaw if mirrored else yaw.copy(), a["log_sigma"][x].copy())
        return pred, ForwardCache("direct", mirrored, x)

    a = params.arrays
    if mirrored:
        x = mirror_features(x)
    h1 = np.tanh(x @ a["W1"] + a["b1"])
    h2 = np.tanh(h1 @ a["W2"] + a["b2"])
    out = h2 @ a["W3"] + a["b3"]
    pred = GazePrediction.of(_HALF_PI * np.tanh(out[:, 0]), out[:, 1], out[:, 2])
    return pred, ForwardCache("mlp", mirrored, x, (h1, h2), out[:, 0])


def forward(params: PredictorParams, inputs, mirrored: bool = False) -> GazePrediction:
    """
    Predict gaze for a batch of inputs.

    With ``mirrored`` the prediction is for the horizontally flipped input:
    direct mode returns (θ, −φ, log σ̂) of the same slot, the network is
    evaluated on ``mirror_features(inputs)``.
    """
    return forward_with_cache(params, inputs, mirrored)[0]


def backward(params: PredictorParams, cache: ForwardCache, grads: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
    """
    Chain per-sample output gradients (keys pitch, yaw, log_sigma) into
    parameter gradients, summed over the batch.
    """
    n = cache.inputs.shape[0]
    g_pitch = np.broadcast_to(np.asarray(grads.get("pitch", 0.0), dtype=float), (n,))
    g_yaw = np.broadcast_to(np.asarray(grads.get("yaw", 0.0), dtype=float), (n,))
    g_sigma = np.broadcast_to(np.asarray(grads.get("log_sigma", 0.0), dtype=float), (n,))

    if cache.mode == "direct":
        out = {k: np.zeros_like(params.arrays[k]) for k in DIRECT_KEYS}
        np.add.at(out["pitch"], cache.inputs, g_pitch)
        np.add.at(out["yaw"], cache.inputs, -g_yaw if cache.mirrored else g_yaw)
        np.add.at(out["log_sigma"], cache.inputs, g_sigma)
        return out

    a = params.arrays
    h1, h2 = cache.hidden
    d_out = np.stack(
        [g_pitch * _HALF_PI * (1.0 - np.tanh(cache.raw_pitch) ** 2), g_yaw, g_sigma], axis=1
    )
    d_h2 = (d_out @ a["W3"].T) * (1.0 - h2 ** 2)
    d_h1 = (d_h2 @ a["W2"].T) * (1.0 - h1 ** 2)
    return {
        "W1": cache.inputs.T @ d_h1,
        "b1": d_h1.sum(axis=0),
        "W2": h1.T @ d_h2,
        "b2": d_h2.sum(axis=0),
        "W3": h2.T @ d_out,
        "b3": d_out.sum(axis=0),
    }


def save_params(params: PredictorParams, path: str) -> None:
    """Write parameters as JSON with full float precision."""
    Path(os.path.dirname(path) or ".").mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(params.to_dict(), f, sort_keys=True)


def load_params(path: str) -> PredictorParams:
    if not os.path.exists(path):
        raise FileNotFoundError(f"parameter file not found: {path}")
    with open(path, "r") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidInputError(f"{path}: invalid JSON ({e})") from e
    mode = data.get("mode")
    expected = DIRECT_KEYS if mode == "direct" else MLP_KEYS if mode == "mlp" else None
    if expected is None:
        raise InvalidInputError(f"{path}: unknown predictor mode {mode!r}")
    arrays = data.get("arrays", {})
    missing = sorted(set(expected) - set(arrays))
    if missing:
        raise InvalidInputError(f"{path}: missing parameter arrays {missing}")
    logger.debug("loaded %s predictor from %s", mode, path)
    return PredictorParams(mode, {k: np.asarray(arrays[k], dtype=float) for k in expected})

