"""Exhaustive hyperparameter search scored on the whole validation set."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from torch import nn

from ..models import ModelConfig, build_model
from .data import FoldStandardizers, TrialTensors
from .training import (CNN_LEARNING_RATE_GRID, DROPOUT_GRID,
                       LEARNING_RATE_GRID, TrainConfig, TrainResult,
                       train_model)

#: Inverse-regularization grid for the global-feature logistic regression,
#: realized as decoupled weight decay 1/C on its single linear layer.
LOGREG_INVERSE_C = (0.1, 5.0, 10.0, 50.0, 100.0)
_LOGREG_LR = 1e-3


def candidate_grid(architecture: str, seed: int = 0) -> tuple[TrainConfig, ...]:
    """The tuning grid appropriate to an architecture."""
    if architecture == "majority":
        return (TrainConfig(learning_rate=1e-4, dropout=0.1, seed=seed),)
    if architecture == "logreg_global":
        return tuple(
            TrainConfig(
                learning_rate=_LOGREG_LR,
                dropout=0.1,
                weight_decay=1.0 / c,
                seed=seed,
            )
            for c in LOGREG_INVERSE_C
        )
    rates = (
        CNN_LEARNING_RATE_GRID
        if architecture == "cnn_fixations"
        else LEARNING_RATE_GRID
    )
    return tuple(
        TrainConfig(learning_rate=lr, dropout=dr, seed=seed)
        for lr in rates
        for dr in DROPOUT_GRID
    )


@dataclass
class SearchOutcome:
    best_config: TrainConfig
    best_model: nn.Module
    best_result: TrainResult
    scores: tuple  # (TrainConfig, val score) per candidate, grid order


def hyperparameter_search(
    model_config: ModelConfig,
    train_items: Sequence[TrialTensors],
    val_items: Sequence[TrialTensors],
    standardizers: FoldStandardizers,
    grid: Optional[Sequence[TrainConfig]] = None,
    seed: int = 0,
) -> SearchOutcome:
    """Train every grid point; keep the best validation balanced accuracy.

    Ties resolve to the lower learning rate, then the lower dropout, then
    the lower weight decay, so the choice never depends on grid order.
    The winning model is returned already trained (best-epoch weights
    restored); callers never retrain.
    """
    candidates = tuple(grid) if grid is not None else candidate_grid(
        model_config.architecture, seed
    )
    if not candidates:
        raise ValueError("empty hyperparameter grid")
    trained = []
    for cand in candidates:
        model = build_model(
            replace(model_config, dropout=cand.dropout), seed=cand.seed
        )
        result = train_model(
            model, train_items, val_items, standardizers, cand,
            task=model_config.task,
        )
        trained.append((cand, model, result))
    best = min(
        trained,
        key=lambda t: (
            -t[2].best_val_score,
            t[0].learning_rate,
            t[0].dropout,
            t[0].weight_decay,
        ),
    )
    return SearchOutcome(
        best_config=best[0],
        best_model=best[1],
        best_result=best[2],
        scores=tuple((c, r.best_val_score) for c, _, r in trained),
    )
