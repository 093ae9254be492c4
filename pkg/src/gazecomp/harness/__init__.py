"""Training, tuning, evaluation, and persistence around the fold cycle."""

from .data import (XYDP_FEATURES, FoldStandardizers, TrialTensors, collate,
                   fit_fold_standardizers, prepare_trials)
from .experiment import PREDICT_OBSERVERS, run_experiment
from .metrics import balanced_accuracy, paired_bootstrap
from .results import (EVAL_REGIMES, PORTION_REGIMES, PredictionRecord,
                      ResultRow, ResultsTable, aggregate_results,
                      read_predictions, write_predictions)
from .sampling import balanced_sample
from .search import (LOGREG_INVERSE_C, SearchOutcome, candidate_grid,
                     hyperparameter_search)
from .training import (CNN_LEARNING_RATE_GRID, DROPOUT_GRID, EVAL_OBSERVERS,
                       LEARNING_RATE_GRID, TrainConfig, TrainResult, evaluate,
                       predict_items, task_classes, train_model)

__all__ = [
    "XYDP_FEATURES", "FoldStandardizers", "TrialTensors", "collate",
    "fit_fold_standardizers", "prepare_trials",
    "PREDICT_OBSERVERS", "run_experiment",
    "balanced_accuracy", "paired_bootstrap",
    "EVAL_REGIMES", "PORTION_REGIMES", "PredictionRecord", "ResultRow",
    "ResultsTable", "aggregate_results", "read_predictions",
    "write_predictions",
    "balanced_sample",
    "LOGREG_INVERSE_C", "SearchOutcome", "candidate_grid",
    "hyperparameter_search",
    "CNN_LEARNING_RATE_GRID", "DROPOUT_GRID", "EVAL_OBSERVERS",
    "LEARNING_RATE_GRID", "TrainConfig", "TrainResult", "evaluate",
    "predict_items", "task_classes", "train_model",
]
