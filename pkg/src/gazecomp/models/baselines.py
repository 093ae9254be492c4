"""No-gaze and gaze-only baselines behind the same forward(batch) interface."""

from __future__ import annotations

import torch
from torch import nn

from ..features.schema import GLOBAL_FEATURES
from .base import ClassifierHead, masked_mean
from .config import ModelConfig
from .encoder import TextEncoder


class TextOnlyClassifier(nn.Module):
    """Encodes [CLS; paragraph; SEP; question; (answers); SEP]; no gaze.

    Gaze-blind by construction: two trials over the same item produce
    identical logits whatever their scanpaths.
    """

    def __init__(self, config: ModelConfig, encoder: TextEncoder) -> None:
        super().__init__()
        self.config = config
        self.encoder = encoder
        self.head = ClassifierHead(
            encoder.cfg.d_model, config.n_classes, config.dropout
        )

    def forward(self, batch: dict) -> torch.Tensor:
        _, pooled = self.encoder(batch["text_ids"], batch["text_pad"])
        return self.head(pooled)


class MajorityClassifier(nn.Module):
    """Input-free bias vector; training fits the marginal class log-odds."""

    def __init__(self, config: ModelConfig) -> None:
        super().__init__()
        self.config = config
        self.bias = nn.Parameter(torch.zeros(config.n_classes))

    def forward(self, batch: dict) -> torch.Tensor:
        n = batch["label"].size(0) if "label" in batch \
            else batch["text_ids"].size(0)
        return self.bias.unsqueeze(0).expand(n, -1)


class LogRegGlobal(nn.Module):
    """Logistic regression on the trial-level gaze summary vector.

    L2 strength is supplied through the optimizer's weight decay; the module
    itself is a single linear map to two logits, so zero weights give
    probability 0.5.
    """

    def __init__(self, config: ModelConfig) -> None:
        super().__init__()
        self.config = config
        self.linear = nn.Linear(len(GLOBAL_FEATURES), config.n_classes)

    def forward(self, batch: dict) -> torch.Tensor:
        return self.linear(batch["global_feats"])


class CnnFixationClassifier(nn.Module):
    """Two stride-1 convolutions over the raw (x, y, duration, pupil)
    channels of the whole fixation sequence, masked mean-pooled."""

    def __init__(self, config: ModelConfig, channels: int = 16) -> None:
        super().__init__()
        self.config = config
        self.conv1 = nn.Conv1d(4, channels, kernel_size=3, stride=1, padding=1)
        self.conv2 = nn.Conv1d(channels, channels, kernel_size=3, stride=1,
                               padding=1)
        self.drop = nn.Dropout(config.dropout)
        self.out = nn.Linear(channels, config.n_classes)

    def forward(self, batch: dict) -> torch.Tensor:
        fix_pad = batch["fix_pad"]
        if bool((~fix_pad).sum(dim=1).eq(0).any()):
            raise ValueError(
                "empty fixation sequence: this model requires gaze input"
            )
        keep = (~fix_pad).unsqueeze(1).to(batch["fix_xydp"].dtype)
        x = batch["fix_xydp"].transpose(1, 2) * keep
        x = torch.relu(self.conv1(x)) * keep
        x = torch.relu(self.conv2(x)).transpose(1, 2)
        pooled = masked_mean(x, ~fix_pad)
        return self.out(self.drop(pooled))
