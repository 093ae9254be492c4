"""End-to-end fold-cycle driver with idempotent on-disk artifacts.

Per fold: fit standardizers on the training portion only, grid-search on
validation, persist a checkpoint, predict each test portion exactly once,
and persist the prediction records. Completed folds are recognized by their
artifacts, so reruns skip straight to aggregation and the final table is
byte-identical across runs with the same seed.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from ..corpus import Regime, Trial
from ..features import FeatureSet
from ..models import ModelConfig, ToyTokenizer, load_checkpoint, save_checkpoint
from ..splits import SplitPlan, make_full_split
from .data import fit_fold_standardizers, prepare_trials
from .results import (PORTION_REGIMES, PredictionRecord, ResultsTable,
                      aggregate_results, read_predictions, write_predictions)
from .search import hyperparameter_search
from .training import TrainConfig, _label_array, predict_items

#: Callables invoked with {"fold", "portion", "trial_ids"} on every test
#: prediction pass; tests assert each held-out trial is predicted once.
PREDICT_OBSERVERS: list = []

INCOMPLETE_MARKER = "INCOMPLETE"


def _checkpoint_path(out_dir: Path, fold: int) -> Path:
    return out_dir / f"fold{fold:02d}.ckpt"


def _predictions_path(out_dir: Path, fold: int) -> Path:
    return out_dir / f"fold{fold:02d}_predictions.jsonl"


def _run_fold(
    plan: SplitPlan,
    items: dict,
    model_config: ModelConfig,
    out_dir: Path,
    seed: int,
    grid: Optional[Sequence[TrainConfig]],
    schema_hash: str,
) -> None:
    fold = plan.fold_id
    ckpt_path = _checkpoint_path(out_dir, fold)
    pred_path = _predictions_path(out_dir, fold)
    if pred_path.exists() and ckpt_path.exists():
        return

    train_items = [items[i] for i in plan.portion_ids("train")]
    standardizers = fit_fold_standardizers(
        train_items, context={"fold": fold, "portion": "train"}
    )
    train_seed = seed * 1000 + fold
    if ckpt_path.exists():
        model, _, _ = load_checkpoint(ckpt_path, schema_hash=schema_hash)
    else:
        val_items = [items[i] for i in plan.portion_ids("val")]
        outcome = hyperparameter_search(
            model_config, train_items, val_items, standardizers,
            grid=grid, seed=train_seed,
        )
        model = outcome.best_model
        save_checkpoint(
            ckpt_path, model,
            replace(model_config, dropout=outcome.best_config.dropout),
            train_seed, schema_hash=schema_hash,
        )

    records = []
    for portion, regime_name in PORTION_REGIMES.items():
        ids = plan.portion_ids(portion)
        if not ids:
            continue
        portion_items = [items[i] for i in ids]
        preds, probs = predict_items(
            model, portion_items, standardizers, model_config.task
        )
        golds = _label_array(portion_items, model_config.task)
        for hook in PREDICT_OBSERVERS:
            hook({"fold": fold, "portion": portion, "trial_ids": tuple(ids)})
        for item, pred, prob, gold in zip(portion_items, preds, probs, golds):
            records.append(PredictionRecord(
                model=model_config.architecture,
                task=model_config.task,
                fold=fold,
                eval_regime=regime_name,
                trial_id=item.trial_id,
                gold=int(gold),
                pred=int(pred),
                probs=tuple(prob.tolist()),
            ))
    write_predictions(records, pred_path)
    error_note = out_dir / f"fold{fold:02d}.error"
    if error_note.exists():
        error_note.unlink()


def run_experiment(
    trials: Sequence[Trial],
    features: FeatureSet,
    model_config: ModelConfig,
    out_dir: str | Path,
    seed: int = 0,
    n_folds: int = 10,
    regime: Optional[Regime] = None,
    grid: Optional[Sequence[TrainConfig]] = None,
    plans: Optional[Sequence[SplitPlan]] = None,
    tokenizer: Optional[ToyTokenizer] = None,
    max_len: int = 512,
) -> ResultsTable:
    """Train/evaluate one architecture over the whole fold cycle.

    Completed folds (checkpoint + predictions on disk) are never redone.
    On any fold failure the remaining folds still run; the failures are
    written next to the marker file and re-raised at the end.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    marker = out / INCOMPLETE_MARKER
    marker.write_text("run in progress\n", encoding="utf-8")

    if isinstance(regime, str):
        regime = Regime(regime)
    if plans is None:
        plans = make_full_split(trials, n_folds=n_folds, seed=seed, regime=regime)
    needed = set()
    for plan in plans:
        needed.update(plan.assignment)
    items = prepare_trials(
        [t for t in trials if t.trial_id in needed],
        features, model_config.task, tokenizer=tokenizer, max_len=max_len,
    )

    failures = []
    for plan in plans:
        try:
            _run_fold(
                plan, items, model_config, out, seed, grid,
                features.schema_hash,
            )
        except Exception as exc:  # noqa: BLE001 - recorded, then re-raised
            failures.append((plan.fold_id, exc))
            (out / f"fold{plan.fold_id:02d}.error").write_text(
                f"{type(exc).__name__}: {exc}\n", encoding="utf-8"
            )
    if failures:
        summary = "; ".join(f"fold {k}: {e}" for k, e in failures)
        marker.write_text(f"failed folds: {summary}\n", encoding="utf-8")
        raise RuntimeError(f"experiment incomplete - {summary}")

    records = []
    for plan in plans:
        records.extend(read_predictions(_predictions_path(out, plan.fold_id)))
    table = aggregate_results(
        records, expected_folds=[p.fold_id for p in plans]
    )
    table.to_csv(out / "results.csv")
    marker.unlink()
    return table
