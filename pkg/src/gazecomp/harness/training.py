"""Training loop: balanced epochs, warmup/decay schedule, early stopping.

Decoupled weight decay is applied to matrix-shaped parameters only; biases,
gains, and embedding-free vectors are excluded, following the usual
transformer fine-tuning convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import torch
from torch import nn
from torch.nn import functional as F

from ..errors import ConfigurationError, NumericError
from ..models import class_probabilities
from .data import FoldStandardizers, TrialTensors, collate
from .metrics import balanced_accuracy
from .sampling import balanced_sample

LEARNING_RATE_GRID = (1e-5, 3e-5, 1e-4)
CNN_LEARNING_RATE_GRID = (1e-5, 3e-5, 1e-4, 1e-3)
DROPOUT_GRID = (0.1, 0.3, 0.5)

#: Callables invoked with a context dict every time a prediction pass runs.
#: Tests hook in here to assert which trials each phase is allowed to see.
EVAL_OBSERVERS: list = []


@dataclass(frozen=True)
class TrainConfig:
    """One point of the tuning grid plus the fixed optimization protocol."""

    learning_rate: float
    dropout: float
    batch_size: int = 16
    warmup_ratio: float = 0.1
    weight_decay: float = 0.1
    max_epochs: int = 10
    early_stop_patience: int = 3
    seed: int = 0
    allow_off_grid: bool = False

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_epochs < 1:
            raise ConfigurationError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if not 0.0 <= self.warmup_ratio < 1.0:
            raise ConfigurationError(
                f"warmup_ratio must be in [0, 1), got {self.warmup_ratio}"
            )
        if self.weight_decay < 0.0:
            raise ConfigurationError(
                f"weight_decay must be >= 0, got {self.weight_decay}"
            )
        if self.early_stop_patience < 1:
            raise ConfigurationError(
                f"early_stop_patience must be >= 1, got {self.early_stop_patience}"
            )
        if not self.allow_off_grid:
            if self.learning_rate not in CNN_LEARNING_RATE_GRID:
                raise ConfigurationError(
                    f"learning_rate {self.learning_rate} is off the tuning grid "
                    f"{CNN_LEARNING_RATE_GRID}; set allow_off_grid to override"
                )
            if self.dropout not in DROPOUT_GRID:
                raise ConfigurationError(
                    f"dropout {self.dropout} is off the tuning grid "
                    f"{DROPOUT_GRID}; set allow_off_grid to override"
                )


@dataclass
class TrainResult:
    best_state: dict
    best_val_score: float
    best_epoch: int
    history: tuple
    stopped_early: bool


def _label_array(items: Sequence[TrialTensors], task: str) -> np.ndarray:
    if task == "binary":
        return np.array([t.label_binary for t in items], dtype=np.int64)
    return np.array([t.label_choice for t in items], dtype=np.int64)


def task_classes(task: str) -> list[int]:
    return [0, 1] if task == "binary" else [0, 1, 2, 3]


def _batched(items: Sequence, size: int):
    for start in range(0, len(items), size):
        yield items[start:start + size]


@torch.no_grad()
def predict_items(
    model: nn.Module,
    items: Sequence[TrialTensors],
    standardizers: FoldStandardizers,
    task: str,
    batch_size: int = 32,
) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic forward passes; returns (predictions, probabilities)."""
    if not items:
        raise ValueError("no trials to predict")
    was_training = model.training
    model.eval()
    probs = []
    for chunk in _batched(items, batch_size):
        logits = model(collate(chunk, standardizers, task))
        probs.append(class_probabilities(logits))
    if was_training:
        model.train()
    stacked = np.concatenate(probs, axis=0)
    return np.argmax(stacked, axis=-1), stacked


def evaluate(
    model: nn.Module,
    items: Sequence[TrialTensors],
    standardizers: FoldStandardizers,
    task: str,
    batch_size: int = 32,
    phase: str = "eval",
) -> float:
    """Balanced accuracy of the model on the given trials."""
    preds, _ = predict_items(model, items, standardizers, task, batch_size)
    score = balanced_accuracy(preds, _label_array(items, task), task_classes(task))
    for hook in EVAL_OBSERVERS:
        hook({
            "phase": phase,
            "task": task,
            "trial_ids": tuple(t.trial_id for t in items),
            "score": score,
        })
    return score


def _optimizer(model: nn.Module, config: TrainConfig) -> torch.optim.AdamW:
    decay, no_decay = [], []
    for param in model.parameters():
        if not param.requires_grad:
            continue
        (decay if param.ndim >= 2 else no_decay).append(param)
    return torch.optim.AdamW(
        [
            {"params": decay, "weight_decay": config.weight_decay},
            {"params": no_decay, "weight_decay": 0.0},
        ],
        lr=config.learning_rate,
    )


def _schedule(optimizer, total_steps: int, warmup_ratio: float):
    warmup = int(round(warmup_ratio * total_steps))

    def factor(step: int) -> float:
        if warmup and step < warmup:
            return (step + 1) / warmup
        remaining = total_steps - warmup
        if remaining <= 0:
            return 1.0
        return max(0.0, (total_steps - step) / remaining)

    return torch.optim.lr_scheduler.LambdaLR(optimizer, factor)


def train_model(
    model: nn.Module,
    train_items: Sequence[TrialTensors],
    val_items: Sequence[TrialTensors],
    standardizers: FoldStandardizers,
    config: TrainConfig,
    task: str = "binary",
) -> TrainResult:
    """Train with per-epoch class-balanced samples; restore the best epoch.

    Validation balanced accuracy is checked at every epoch end; training
    stops once it fails to improve for ``early_stop_patience`` consecutive
    epochs, and the model is left holding the best epoch's parameters.
    """
    if not train_items:
        raise ValueError("no training trials")
    if not val_items:
        raise ValueError("no validation trials")
    torch.manual_seed(config.seed)
    optimizer = _optimizer(model, config)
    epoch_size = len(balanced_sample(train_items, config.seed, 0))
    steps_per_epoch = math.ceil(epoch_size / config.batch_size)
    scheduler = _schedule(
        optimizer, config.max_epochs * steps_per_epoch, config.warmup_ratio
    )

    best_state: Optional[dict] = None
    best_score = -math.inf
    best_epoch = -1
    bad_epochs = 0
    stopped_early = False
    history = []
    for epoch in range(config.max_epochs):
        sample = balanced_sample(train_items, config.seed, epoch)
        model.train()
        losses = []
        for chunk in _batched(sample, config.batch_size):
            batch = collate(chunk, standardizers, task)
            loss = F.cross_entropy(model(batch), batch["label"])
            if not torch.isfinite(loss):
                raise NumericError(
                    f"non-finite training loss {loss.item()} at epoch {epoch}, "
                    f"step {len(losses)} (lr={scheduler.get_last_lr()[0]:.2e})"
                )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            scheduler.step()
            losses.append(loss.item())
        val_score = evaluate(
            model, val_items, standardizers, task, phase="train/val"
        )
        history.append({
            "epoch": epoch,
            "train_loss": float(np.mean(losses)),
            "val_score": val_score,
        })
        if val_score > best_score:
            best_score = val_score
            best_epoch = epoch
            best_state = {
                k: v.detach().clone() for k, v in model.state_dict().items()
            }
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= config.early_stop_patience:
                stopped_early = True
                break
    assert best_state is not None
    model.load_state_dict(best_state)
    return TrainResult(
        best_state=best_state,
        best_val_score=best_score,
        best_epoch=best_epoch,
        history=tuple(history),
        stopped_early=stopped_early,
    )
