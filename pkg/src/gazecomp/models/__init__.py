"""Model zoo: shared text encoder, fusion classifiers, and baselines.

``build_model`` is the single construction point: every architecture comes
back as an ``nn.Module`` with ``forward(batch) -> logits``, so training and
evaluation code never branches on the architecture.
"""

from __future__ import annotations

from typing import Optional

import torch
from torch import nn

from ..features.schema import FIXATION_FEATURES, WORD_FEATURES
from .base import (ClassifierHead, class_probabilities, masked_mean,
                   position_label, predict)
from .baselines import (CnnFixationClassifier, LogRegGlobal,
                        MajorityClassifier, TextOnlyClassifier)
from .checkpoint import load_checkpoint, save_checkpoint
from .config import (ABLATIONS, ARCHITECTURES, BINARY_ONLY,
                     FUSION_ARCHITECTURES, TASKS, WORD_BASED, ModelConfig)
from .encoder import (CLS_ID, PAD_ID, SEP_EYE_ID, SEP_ID, EncoderConfig,
                      TextEncoder, TextInput, ToyTokenizer, build_text_input,
                      encoder_config)
from .fusion import (ConcatFusionClassifier, GatedFusionClassifier,
                     PostFusionClassifier)

_NEEDS_ENCODER = (
    "qeye_concat_words", "qeye_concat_fixations", "qeye_gated_words",
    "qeye_postfusion_fixations", "text_only",
)


def build_model(
    config: ModelConfig,
    encoder_cfg: Optional[EncoderConfig] = None,
    seed: Optional[int] = None,
) -> nn.Module:
    """Construct the architecture named by the config.

    ``seed`` fixes the torch RNG before parameter initialization so builds
    are reproducible; the encoder inherits the config's dropout and frozen
    flag unless an explicit encoder config overrides it.
    """
    if seed is not None:
        torch.manual_seed(seed)
    encoder = None
    if config.architecture in _NEEDS_ENCODER:
        cfg = encoder_cfg or encoder_config(
            config.preset, dropout=config.dropout
        )
        encoder = TextEncoder(cfg, frozen=config.frozen)

    arch = config.architecture
    if arch == "qeye_concat_words":
        return ConcatFusionClassifier(config, encoder, len(WORD_FEATURES))
    if arch == "qeye_concat_fixations":
        return ConcatFusionClassifier(config, encoder, len(FIXATION_FEATURES))
    if arch == "qeye_gated_words":
        return GatedFusionClassifier(config, encoder, len(WORD_FEATURES))
    if arch == "qeye_postfusion_fixations":
        return PostFusionClassifier(config, encoder, len(FIXATION_FEATURES))
    if arch == "text_only":
        return TextOnlyClassifier(config, encoder)
    if arch == "majority":
        return MajorityClassifier(config)
    if arch == "logreg_global":
        return LogRegGlobal(config)
    if arch == "cnn_fixations":
        return CnnFixationClassifier(config)
    raise AssertionError(f"unhandled architecture {arch}")  # pragma: no cover


__all__ = [
    "ABLATIONS", "ARCHITECTURES", "BINARY_ONLY", "CLS_ID",
    "ClassifierHead", "CnnFixationClassifier", "ConcatFusionClassifier",
    "EncoderConfig", "FUSION_ARCHITECTURES", "GatedFusionClassifier",
    "LogRegGlobal", "MajorityClassifier", "ModelConfig", "PAD_ID",
    "PostFusionClassifier", "SEP_EYE_ID", "SEP_ID", "TASKS", "TextEncoder",
    "TextInput", "TextOnlyClassifier", "ToyTokenizer", "WORD_BASED",
    "build_model", "build_text_input", "class_probabilities",
    "encoder_config", "load_checkpoint", "masked_mean", "position_label",
    "predict", "save_checkpoint",
]
