"""Prediction, loss-output and loss-weight types."""

from dataclasses import dataclass, field
from typing import Any, Dict, Literal, Optional, Set

import numpy as np
from pydantic import BaseModel, Field, field_serializer, field_validator

from ..config import validate_model
from ..errors import InvalidInputError
from ..geometry import GazeAngles

LAEO_COMPONENTS = ("geom3d", "geom2d", "pseudo")


@dataclass(frozen=True)
class GazePrediction:
    """
    Predicted gaze in the subject's normalized frame plus log σ̂.

    Fields hold floats, ``(B,)`` arrays or dual numbers.
    """
    angles: GazeAngles
    log_sigma: Any

    @property
    def pitch(self):
        return self.angles.pitch

    @property
    def yaw(self):
        return self.angles.yaw

    @classmethod
    def of(cls, pitch, yaw, log_sigma=0.0) -> "GazePrediction":
        return cls(GazeAngles(pitch, yaw), log_sigma)

    def as_arrays(self) -> "GazePrediction":
        return GazePrediction.of(
            np.atleast_1d(np.asarray(self.pitch, dtype=float)),
            np.atleast_1d(np.asarray(self.yaw, dtype=float)),
            np.atleast_1d(np.asarray(self.log_sigma, dtype=float)),
        )

    def take(self, index) -> "GazePrediction":
        return GazePrediction.of(self.pitch[index], self.yaw[index], self.log_sigma[index])


@dataclass
class LossOutput:
    """
    A loss value and its partial derivatives.

    ``grads`` maps a predicted quantity (``"a.pitch"``, ``"b.log_sigma"``, ...)
    to the derivative of ``value`` with respect to it: a float for a single
    pair, a ``(B,)`` array for a batch. ``excluded`` counts pairs dropped per
    component; ``parts`` holds the component outputs of a combined objective.
    """
    value: float
    grads: Dict[str, Any] = field(default_factory=dict)
    per_item: Optional[np.ndarray] = None
    excluded: Dict[str, int] = field(default_factory=dict)
    parts: Dict[str, "LossOutput"] = field(default_factory=dict)

    def breakdown(self) -> Dict[str, float]:
        return {name: part.value for name, part in self.parts.items()}

    def gradient_norm(self) -> float:
        total = 0.0
        for g in self.grads.values():
            total += float(np.sum(np.square(g)))
        return float(np.sqrt(total))


class LossWeights(BaseModel):
    """Which losses are on, how they are weighted and which variants they use."""
    alpha: float = Field(default=1.0, ge=0, le=1)
    beta: float = Field(default=1.0, ge=0, le=1)
    laeo_components: Set[Literal["geom3d", "geom2d", "pseudo"]] = Field(
        default_factory=lambda: set(LAEO_COMPONENTS)
    )
    symmetry: bool = True
    pseudo_mode: Literal["weighted", "naive", "confident"] = "weighted"
    geom3d_mode: Literal["plane", "cosine"] = "plane"
    geom3d_scale: Literal["separation", "mm"] = "separation"

    @field_validator("laeo_components", mode="before")
    @classmethod
    def _split(cls, v):
        if isinstance(v, str):
            return {s.strip() for s in v.split(",") if s.strip()}
        return v

    @field_serializer("laeo_components")
    def _ordered(self, v):
        return [c for c in LAEO_COMPONENTS if c in v]

    def component_list(self):
        """Enabled LAEO components in a fixed order."""
        return [c for c in LAEO_COMPONENTS if c in self.laeo_components]

    @classmethod
    def from_tokens(cls, tokens, **kwargs) -> "LossWeights":
        """Build from a ``--losses`` list such as ``geom3d,geom2d,pseudo,sym``."""
        if isinstance(tokens, str):
            tokens = [tokens]
        names = set()
        for token in tokens:
            names.update(t.strip() for t in token.split(",") if t.strip())
        unknown = names - set(LAEO_COMPONENTS) - {"sym"}
        if unknown:
            raise InvalidInputError(f"unknown loss names: {sorted(unknown)}")
        values = dict(kwargs, laeo_components=names & set(LAEO_COMPONENTS), symmetry="sym" in names)
        return validate_model(cls, values)

    def tokens(self) -> str:
        names = self.component_list() + (["sym"] if self.symmetry else [])
        return ",".join(names)
