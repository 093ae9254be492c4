"""Balanced accuracy and the paired bootstrap significance test."""

from __future__ import annotations

from typing import Sequence

import numpy as np


def balanced_accuracy(
    preds: Sequence[int], golds: Sequence[int], classes: Sequence[int]
) -> float:
    """Mean per-class recall, scaled to [0, 100].

    Classes with no gold instances are excluded from the mean; the class
    list must be explicit so a degenerate predictor cannot shrink it.
    """
    preds = np.asarray(preds)
    golds = np.asarray(golds)
    if preds.shape != golds.shape:
        raise ValueError(
            f"prediction/gold length mismatch: {preds.shape} vs {golds.shape}"
        )
    if preds.size == 0:
        raise ValueError("empty predictions")
    if not classes:
        raise ValueError("empty class list")
    recalls = []
    for c in classes:
        mask = golds == c
        if mask.any():
            recalls.append(float((preds[mask] == c).mean()))
    if not recalls:
        raise ValueError("no gold label belongs to any declared class")
    return 100.0 * float(np.mean(recalls))


def _resampled_scores(
    preds: np.ndarray,
    golds: np.ndarray,
    classes: Sequence[int],
    idx: np.ndarray,
) -> np.ndarray:
    """Balanced accuracy of each bootstrap resample (rows of ``idx``)."""
    g = golds[idx]  # (R, n)
    p = preds[idx]
    recalls = np.full((idx.shape[0], len(classes)), np.nan)
    for j, c in enumerate(classes):
        mask = g == c
        count = mask.sum(axis=1)
        hits = ((p == c) & mask).sum(axis=1)
        present = count > 0
        recalls[present, j] = hits[present] / count[present]
    return 100.0 * np.nanmean(recalls, axis=1)


def paired_bootstrap(
    preds_a: Sequence[int],
    preds_b: Sequence[int],
    golds: Sequence[int],
    classes: Sequence[int],
    n_resamples: int = 10_000,
    seed: int = 0,
    chunk: int = 1_000,
) -> float:
    """One-sided test of a > b: p = share of resamples with BA(a) <= BA(b).

    Trials are resampled with replacement; both systems are scored on the
    same resample (paired). Deterministic given the seed.
    """
    a = np.asarray(preds_a)
    b = np.asarray(preds_b)
    g = np.asarray(golds)
    if not (a.shape == b.shape == g.shape):
        raise ValueError(
            f"aligned vectors required: {a.shape}, {b.shape}, {g.shape}"
        )
    if a.size == 0:
        raise ValueError("empty predictions")
    rng = np.random.default_rng([seed, 0xB007])
    n = a.size
    worse_or_equal = 0
    done = 0
    while done < n_resamples:
        r = min(chunk, n_resamples - done)
        idx = rng.integers(0, n, size=(r, n))
        score_a = _resampled_scores(a, g, classes, idx)
        score_b = _resampled_scores(b, g, classes, idx)
        worse_or_equal += int((score_a <= score_b).sum())
        done += r
    return worse_or_equal / n_resamples
