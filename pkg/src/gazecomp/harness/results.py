"""Prediction records, their on-disk form, and pooled scoring tables.

Scores are computed on predictions pooled across folds, never by averaging
per-fold scores; the ``all`` row pools the union of the three test regimes.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence

from .metrics import balanced_accuracy, paired_bootstrap

PORTION_REGIMES = {
    "test_new_participant": "new_participant",
    "test_new_item": "new_item",
    "test_both": "new_both",
}
EVAL_REGIMES = ("new_participant", "new_item", "new_both")


@dataclass(frozen=True)
class PredictionRecord:
    """One model prediction for one held-out trial."""

    model: str
    task: str
    fold: int
    eval_regime: str
    trial_id: str
    gold: int
    pred: int
    probs: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if self.eval_regime not in EVAL_REGIMES:
            raise ValueError(f"unknown evaluation regime {self.eval_regime!r}")
        if self.fold < 0:
            raise ValueError(f"negative fold {self.fold}")
        if len(self.probs) < 2:
            raise ValueError("need at least two class probabilities")
        if min(self.probs) < 0.0 or abs(sum(self.probs) - 1.0) > 1e-6:
            raise ValueError(f"probabilities not a distribution: {self.probs}")
        for name in ("gold", "pred"):
            value = getattr(self, name)
            if not 0 <= value < len(self.probs):
                raise ValueError(
                    f"{name} {value} outside class range 0..{len(self.probs) - 1}"
                )


def write_predictions(records: Sequence[PredictionRecord], path: str | Path) -> None:
    """Newline-delimited records, sorted so reruns are byte-identical."""
    ordered = sorted(records, key=lambda r: (r.fold, r.eval_regime, r.trial_id))
    with open(path, "w", encoding="utf-8") as fh:
        for record in ordered:
            fh.write(json.dumps(asdict(record), sort_keys=True) + "\n")


def read_predictions(path: str | Path) -> list[PredictionRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(PredictionRecord(**json.loads(line)))
    return records


@dataclass(frozen=True)
class ResultRow:
    model: str
    task: str
    eval_regime: str  # new_participant / new_item / new_both / all
    balanced_accuracy: float
    n_trials: int
    p_value_vs_baseline: Optional[float] = None


@dataclass(frozen=True)
class ResultsTable:
    rows: tuple

    def to_csv(self, path: str | Path) -> None:
        lines = ["model,task,eval_regime,balanced_accuracy,n_trials,p_value_vs_baseline"]
        for r in self.rows:
            p = "" if r.p_value_vs_baseline is None else f"{r.p_value_vs_baseline:.6f}"
            lines.append(
                f"{r.model},{r.task},{r.eval_regime},"
                f"{r.balanced_accuracy:.6f},{r.n_trials},{p}"
            )
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _classes(task: str) -> list[int]:
    return [0, 1] if task == "binary" else [0, 1, 2, 3]


def _pooled_row(
    model: str,
    task: str,
    regime: str,
    records: list[PredictionRecord],
    baseline: Optional[dict],
    n_resamples: int,
    seed: int,
) -> ResultRow:
    ordered = sorted(records, key=lambda r: r.trial_id)
    preds = [r.pred for r in ordered]
    golds = [r.gold for r in ordered]
    score = balanced_accuracy(preds, golds, _classes(task))
    p_value = None
    if baseline is not None:
        missing = [r.trial_id for r in ordered if r.trial_id not in baseline]
        if missing:
            raise ValueError(
                f"baseline lacks predictions for {len(missing)} trials, "
                f"e.g. {missing[:3]}"
            )
        preds_b = [baseline[r.trial_id].pred for r in ordered]
        p_value = paired_bootstrap(
            preds, preds_b, golds, _classes(task),
            n_resamples=n_resamples, seed=seed,
        )
    return ResultRow(
        model=model,
        task=task,
        eval_regime=regime,
        balanced_accuracy=score,
        n_trials=len(ordered),
        p_value_vs_baseline=p_value,
    )


def aggregate_results(
    records: Sequence[PredictionRecord],
    expected_folds: Optional[Sequence[int]] = None,
    baseline: Optional[Sequence[PredictionRecord]] = None,
    n_resamples: int = 10_000,
    seed: int = 0,
) -> ResultsTable:
    """Pool predictions across folds into one row per evaluation regime.

    With ``baseline`` given, each row carries a one-sided paired-bootstrap
    p-value of this model improving on the baseline, aligned by trial id.
    """
    if not records:
        raise ValueError("no prediction records")
    if expected_folds is not None:
        have = sorted({r.fold for r in records})
        want = sorted(set(expected_folds))
        if have != want:
            raise ValueError(
                f"fold coverage mismatch: expected {want}, have {have}"
            )
    base_by_id = None
    if baseline is not None:
        base_by_id = {r.trial_id: r for r in baseline}
    groups: dict[tuple, list] = {}
    for r in records:
        groups.setdefault((r.model, r.task), []).append(r)
    rows = []
    for (model, task) in sorted(groups):
        group = groups[(model, task)]
        for regime in EVAL_REGIMES:
            subset = [r for r in group if r.eval_regime == regime]
            if not subset:
                continue
            rows.append(_pooled_row(
                model, task, regime, subset, base_by_id, n_resamples, seed
            ))
        rows.append(_pooled_row(
            model, task, "all", list(group), base_by_id, n_resamples, seed
        ))
    return ResultsTable(rows=tuple(rows))
