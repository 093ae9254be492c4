"""Model configuration: architecture, task, ablation, and fusion knobs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from ..features.schema import (FIXATION_FEATURES, LINGUISTIC_FEATURES,
                               WORD_EYE_FEATURES, WORD_FEATURES)

ARCHITECTURES = (
    "qeye_concat_words",
    "qeye_concat_fixations",
    "qeye_gated_words",
    "qeye_postfusion_fixations",
    "text_only",
    "majority",
    "logreg_global",
    "cnn_fixations",
)
TASKS = ("binary", "multiple_choice")
ABLATIONS = ("full", "no_ling_feat", "no_eyes")

#: Architectures whose gaze unit is one vector per paragraph word.
WORD_BASED = ("qeye_concat_words", "qeye_gated_words")
#: Architectures consuming standardized gaze feature vectors (ablatable).
FUSION_ARCHITECTURES = (
    "qeye_concat_words", "qeye_concat_fixations",
    "qeye_gated_words", "qeye_postfusion_fixations",
)
#: Binary-probability baselines with no multiple-choice head.
BINARY_ONLY = ("logreg_global", "cnn_fixations")


@dataclass(frozen=True)
class ModelConfig:
    """Everything needed to rebuild a model deterministically.

    ``beta`` bounds the gated displacement scale; ``injection_layer`` is the
    encoder block index k before which displacement happens (0 = displace the
    embedding output). ``mag_dropout`` regularizes the displacement vector
    during training only.
    """

    architecture: str
    task: str = "binary"
    ablation: str = "full"
    preset: str = "toy"
    frozen: bool = False
    dropout: float = 0.1
    injection_layer: int = 0
    beta: float = 1.0
    mag_dropout: float = 0.5
    max_gaze_units: int = 512

    def __post_init__(self) -> None:
        if self.architecture not in ARCHITECTURES:
            raise ConfigurationError(
                f"unknown architecture {self.architecture!r}; "
                f"choose from {ARCHITECTURES}"
            )
        if self.task not in TASKS:
            raise ConfigurationError(
                f"unknown task {self.task!r}; choose from {TASKS}"
            )
        if self.ablation not in ABLATIONS:
            raise ConfigurationError(
                f"unknown ablation {self.ablation!r}; choose from {ABLATIONS}"
            )
        if self.ablation != "full" and self.architecture not in FUSION_ARCHITECTURES:
            raise ConfigurationError(
                f"ablation {self.ablation!r} applies only to gaze-fusion "
                f"architectures, not {self.architecture}"
            )
        if self.ablation == "no_eyes" and self.architecture not in WORD_BASED:
            raise ConfigurationError(
                "ablation 'no_eyes' is only valid for word-based "
                f"architectures {WORD_BASED}, not {self.architecture}"
            )
        if self.architecture in BINARY_ONLY and self.task != "binary":
            raise ConfigurationError(
                f"{self.architecture} produces a binary probability; "
                f"task {self.task!r} unsupported"
            )
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigurationError(f"dropout {self.dropout} outside [0, 1)")
        if not 0.0 <= self.mag_dropout < 1.0:
            raise ConfigurationError(
                f"mag_dropout {self.mag_dropout} outside [0, 1)"
            )
        if self.beta < 0:
            raise ConfigurationError(f"beta must be >= 0, got {self.beta}")
        if self.injection_layer < 0:
            raise ConfigurationError(
                f"injection_layer must be >= 0, got {self.injection_layer}"
            )
        if self.max_gaze_units < 1:
            raise ConfigurationError("max_gaze_units must be >= 1")

    @property
    def n_classes(self) -> int:
        return 2 if self.task == "binary" else 4

    @property
    def uses_word_units(self) -> bool:
        return self.architecture in WORD_BASED

    def gaze_feature_mask(self) -> np.ndarray:
        """Multiplicative column mask realizing the ablation.

        Word-based models consume the word feature vector (eye block then
        linguistic block); fixation-based models the fixation vector
        (kinematic block then linguistic block).
        """
        if self.uses_word_units:
            names = WORD_FEATURES
            eye = set(WORD_EYE_FEATURES)
        else:
            names = FIXATION_FEATURES
            eye = set(FIXATION_FEATURES) - set(LINGUISTIC_FEATURES)
        mask = np.ones(len(names), dtype=np.float64)
        if self.ablation == "no_ling_feat":
            for j, name in enumerate(names):
                if name in LINGUISTIC_FEATURES:
                    mask[j] = 0.0
        elif self.ablation == "no_eyes":
            for j, name in enumerate(names):
                if name in eye:
                    mask[j] = 0.0
        return mask
