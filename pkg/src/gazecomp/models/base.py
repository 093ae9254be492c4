"""Shared pieces of the forward/predict interface.

Every architecture is an ``nn.Module`` whose ``forward(batch)`` maps a dict
of tensors to ``(B, n_classes)`` logits; the training and evaluation loops
never branch on the architecture.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from ..errors import NumericError


class ClassifierHead(nn.Module):
    """Two-layer perceptron over the pooled vector."""

    def __init__(self, d_model: int, n_classes: int, dropout: float) -> None:
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(d_model, d_model),
            nn.ReLU(),
            nn.Dropout(dropout),
            nn.Linear(d_model, n_classes),
        )

    def forward(self, pooled: torch.Tensor) -> torch.Tensor:
        return self.net(pooled)


def class_probabilities(logits: torch.Tensor) -> np.ndarray:
    """Softmax probabilities, validated finite and normalized."""
    if not torch.isfinite(logits).all():
        raise NumericError("non-finite logits")
    probs = torch.softmax(logits.detach().double(), dim=-1).cpu().numpy()
    return probs


def predict(logits: torch.Tensor) -> np.ndarray:
    """Argmax class indices; ties go to the lowest class index.

    Binary task: 0 = incorrect, 1 = correct. Choice task: 0..3 = answer
    positions 1..4 as presented.
    """
    if not torch.isfinite(logits).all():
        raise NumericError("non-finite logits")
    return np.argmax(logits.detach().cpu().numpy(), axis=-1)


def position_label(index: int) -> str:
    """Answer-position name of a choice-task class index (0 -> 'a1')."""
    if index not in (0, 1, 2, 3):
        raise ValueError(f"choice class index must be 0..3, got {index}")
    return f"a{index + 1}"


def masked_mean(
    states: torch.Tensor, valid: torch.Tensor, dim: int = 1
) -> torch.Tensor:
    """Mean over valid positions only; ``valid`` is a boolean keep-mask."""
    weights = valid.to(states.dtype).unsqueeze(-1)
    total = (states * weights).sum(dim=dim)
    count = weights.sum(dim=dim).clamp_min(1.0)
    return total / count
