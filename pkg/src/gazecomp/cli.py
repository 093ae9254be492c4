"""Command-line interface.

Subcommands:

* ``synth``: generate a synthetic experiment (manifest, geometry, fixation
  report, plus the latent-truth sidecar kept out of model inputs).
* ``extract-features``: run feature extraction over a dataset and save the
  feature store.
* ``make-splits``: build the participant/article-disjoint fold plans and
  serialize them to CSV.
* ``train``: run the full cross-validation experiment for one architecture
  (hyperparameter search per fold, checkpoints, predictions, results table).
* ``evaluate``: re-aggregate persisted predictions into a results table,
  optionally with significance against a baseline run.
* ``significance``: paired bootstrap comparison of two finished runs.

``--seed``, ``--regime``, ``--task`` and ``--config`` are accepted by every
subcommand; commands ignore the ones they have no use for. The config file
is YAML with optional ``model:`` and ``train:`` sections whose keys mirror
ModelConfig and TrainConfig; unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path
from typing import Optional, Sequence

import yaml

from .corpus import Regime, load_dataset, load_manifest
from .errors import ConfigurationError
from .features import extract_features, load_features, save_features
from .harness import (
    TrainConfig,
    aggregate_results,
    balanced_accuracy,
    paired_bootstrap,
    read_predictions,
    run_experiment,
    task_classes,
)
from .harness.experiment import INCOMPLETE_MARKER
from .models import ARCHITECTURES, ModelConfig
from .splits import make_full_split, save_split_plans, load_split_plans
from .synth import SynthSpec, generate_dataset, write_dataset

#: CLI task names to internal task names
TASK_BY_FLAG = {"binary": "binary", "choice": "multiple_choice"}


def _spec_from_mapping(cls, data: dict, what: str):
    field_names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - field_names)
    if unknown:
        raise ConfigurationError(
            f"unknown {what} keys: {', '.join(unknown)} "
            f"(allowed: {', '.join(sorted(field_names))})"
        )
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigurationError(f"bad {what}: {exc}") from exc


def load_config(
    path: str | Path,
) -> tuple[Optional[dict], Optional[TrainConfig]]:
    """Parse the --config YAML into (model kwargs, TrainConfig)."""

    with Path(path).open(encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: config must be a mapping")
    unknown = sorted(set(data) - {"model", "train"})
    if unknown:
        raise ConfigurationError(
            f"{path}: unknown sections {', '.join(unknown)} "
            f"(allowed: model, train)"
        )
    model_kwargs = None
    if "model" in data:
        section = data["model"] or {}
        field_names = {f.name for f in dataclasses.fields(ModelConfig)}
        bad = sorted(set(section) - field_names)
        if bad:
            raise ConfigurationError(
                f"{path}: unknown model keys: {', '.join(bad)}"
            )
        model_kwargs = dict(section)
    train_config = None
    if "train" in data:
        train_config = _spec_from_mapping(
            TrainConfig, data["train"] or {}, "train"
        )
    return model_kwargs, train_config


def _regime(args: argparse.Namespace) -> Optional[Regime]:
    return Regime(args.regime) if args.regime else None


def _load_trials(args: argparse.Namespace):
    return load_dataset(args.manifest, args.geometry, args.fixations)


def cmd_synth(args: argparse.Namespace) -> int:
    overrides = {}
    if args.spec_file:
        with Path(args.spec_file).open(encoding="utf-8") as fh:
            overrides = yaml.safe_load(fh) or {}
        if not isinstance(overrides, dict):
            raise ConfigurationError(
                f"{args.spec_file}: spec file must be a mapping"
            )
    if args.seed is not None:
        overrides["seed"] = args.seed
    spec = _spec_from_mapping(SynthSpec, overrides, "synth spec")
    dataset = generate_dataset(spec)
    paths = write_dataset(dataset, args.out)
    print(f"generated {len(dataset.trials)} trials")
    for key in ("manifest", "geometry", "fixation_report", "latents"):
        print(f"  {key}: {paths[key]}")
    return 0


def cmd_extract_features(args: argparse.Namespace) -> int:
    trials = _load_trials(args)
    regime = _regime(args)
    if regime is not None:
        trials = [t for t in trials if t.regime is regime]
    features = extract_features(trials)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_features(features, out)
    print(
        f"extracted features for {len(trials)} trials "
        f"(schema {features.schema_hash[:12]}) -> {out}"
    )
    return 0


def cmd_make_splits(args: argparse.Namespace) -> int:
    trials = load_manifest(args.manifest)
    plans = make_full_split(
        trials, n_folds=args.folds, seed=args.seed or 0, regime=_regime(args)
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "splits.csv"
    save_split_plans(plans, path)
    print(f"wrote {len(plans)} fold plans -> {path}")
    print(f"  fold 0 portions: {dict(sorted(plans[0].counts().items()))}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    model_kwargs, train_config = (None, None)
    if args.config:
        model_kwargs, train_config = load_config(args.config)
    model_kwargs = dict(model_kwargs or {})
    if args.arch:
        model_kwargs["architecture"] = args.arch
    if "architecture" not in model_kwargs:
        raise ConfigurationError(
            "no architecture given: pass --arch or a config with model.architecture"
        )
    model_kwargs["task"] = TASK_BY_FLAG[args.task]
    model_config = ModelConfig(**model_kwargs)

    trials = _load_trials(args)
    features = (
        load_features(args.features)
        if args.features
        else extract_features(trials)
    )
    plans = None
    if args.splits:
        plans = load_split_plans(args.splits, trials)
    run_experiment(
        trials,
        features,
        model_config,
        args.out,
        seed=args.seed or 0,
        n_folds=args.folds,
        regime=_regime(args),
        grid=[train_config] if train_config else None,
        plans=plans,
    )
    results = Path(args.out) / "results.csv"
    print(results.read_text(encoding="utf-8"), end="")
    return 0


def _discover_fold_predictions(run_dir: Path) -> list[Path]:
    paths = sorted(run_dir.glob("fold*_predictions.jsonl"))
    if not paths:
        raise FileNotFoundError(f"{run_dir}: no fold predictions found")
    return paths


def _pooled_records(run_dir: Path):
    run_dir = Path(run_dir)
    if (run_dir / INCOMPLETE_MARKER).exists():
        raise RuntimeError(
            f"{run_dir}: run is incomplete "
            f"({(run_dir / INCOMPLETE_MARKER).read_text().strip()})"
        )
    records = []
    for path in _discover_fold_predictions(run_dir):
        records.extend(read_predictions(path))
    return records


def cmd_evaluate(args: argparse.Namespace) -> int:
    records = _pooled_records(Path(args.run_dir))
    folds = sorted({r.fold for r in records})
    baseline = None
    if args.baseline_dir:
        baseline = _pooled_records(Path(args.baseline_dir))
    table = aggregate_results(
        records,
        expected_folds=folds,
        baseline=baseline,
        n_resamples=args.n_resamples,
        seed=args.seed or 0,
    )
    out = Path(args.out) if args.out else Path(args.run_dir) / "results.csv"
    table.to_csv(out)
    print(out.read_text(encoding="utf-8"), end="")
    return 0


def cmd_significance(args: argparse.Namespace) -> int:
    recs_a = _pooled_records(Path(args.run_a))
    recs_b = _pooled_records(Path(args.run_b))
    key = lambda r: (r.fold, r.eval_regime, r.trial_id)
    a = {key(r): r for r in recs_a}
    b = {key(r): r for r in recs_b}
    if set(a) != set(b):
        only_a, only_b = len(set(a) - set(b)), len(set(b) - set(a))
        raise RuntimeError(
            f"runs do not cover the same predictions "
            f"({only_a} only in A, {only_b} only in B)"
        )
    tasks = {r.task for r in recs_a} | {r.task for r in recs_b}
    if len(tasks) != 1:
        raise RuntimeError(f"mixed tasks across runs: {sorted(tasks)}")
    task = tasks.pop()
    keys = sorted(a)
    golds = [a[k].gold for k in keys]
    if golds != [b[k].gold for k in keys]:
        raise RuntimeError("gold labels disagree between runs")
    preds_a = [a[k].pred for k in keys]
    preds_b = [b[k].pred for k in keys]
    classes = task_classes(task)
    score_a = balanced_accuracy(preds_a, golds, classes)
    score_b = balanced_accuracy(preds_b, golds, classes)
    p = paired_bootstrap(
        preds_a,
        preds_b,
        golds,
        classes,
        n_resamples=args.n_resamples,
        seed=args.seed or 0,
    )
    print(f"run A: balanced accuracy {score_a:.2f} ({args.run_a})")
    print(f"run B: balanced accuracy {score_b:.2f} ({args.run_b})")
    print(f"one-sided p(A > B) = {p:.6g} over {args.n_resamples} resamples")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument(
        "--regime",
        choices=[r.value for r in Regime],
        default=None,
        help="restrict to one reading regime",
    )
    common.add_argument(
        "--task",
        choices=sorted(TASK_BY_FLAG),
        default="binary",
        help="prediction task",
    )
    common.add_argument(
        "--config", default=None, help="YAML with model:/train: sections"
    )

    parser = argparse.ArgumentParser(
        prog="gazecomp",
        description="Reading-comprehension prediction from eye movements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "synth", parents=[common], help="generate a synthetic dataset"
    )
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument(
        "--spec-file", default=None, help="YAML overriding SynthSpec fields"
    )
    p.set_defaults(func=cmd_synth)

    def add_data_args(p):
        p.add_argument("--manifest", required=True)
        p.add_argument("--geometry", required=True)
        p.add_argument("--fixations", required=True)

    p = sub.add_parser(
        "extract-features", parents=[common], help="extract and save features"
    )
    add_data_args(p)
    p.add_argument("--out", required=True, help="output feature store (.npz)")
    p.set_defaults(func=cmd_extract_features)

    p = sub.add_parser(
        "make-splits", parents=[common], help="build fold split plans"
    )
    p.add_argument("--manifest", required=True)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_make_splits)

    p = sub.add_parser(
        "train", parents=[common], help="run the cross-validation experiment"
    )
    add_data_args(p)
    p.add_argument("--arch", choices=list(ARCHITECTURES), default=None)
    p.add_argument("--features", default=None, help="reuse a saved feature store")
    p.add_argument("--splits", default=None, help="reuse saved split plans")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--out", required=True, help="run directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser(
        "evaluate", parents=[common], help="aggregate a finished run"
    )
    p.add_argument("--run-dir", required=True)
    p.add_argument("--baseline-dir", default=None)
    p.add_argument("--n-resamples", type=int, default=10_000)
    p.add_argument("--out", default=None, help="results CSV path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser(
        "significance", parents=[common], help="compare two finished runs"
    )
    p.add_argument("--run-a", required=True)
    p.add_argument("--run-b", required=True)
    p.add_argument("--n-resamples", type=int, default=10_000)
    p.set_defaults(func=cmd_significance)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, FileNotFoundError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
