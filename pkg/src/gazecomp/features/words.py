"""Word-level eye-movement measures.

A single forward pass over the word-assigned fixation sequence maintains
per-word accumulators (dwell, runs, regression paths, first-pass state).
Fixations outside every word box (word_index None) break runs and consume
regression-path time but never contribute to any word's own aggregates.

First-run measures are first-pass quantities: a word first entered only
after some later word was fixated counts as skipped (IA_SKIP 1) and keeps
zero first-run dwell and count.
"""

from __future__ import annotations

import numpy as np

from ..corpus import ParagraphItem, Scanpath
from ..errors import SchemaError
from .schema import LINGUISTIC_FEATURES, WORD_EYE_FEATURES

_COL = {name: j for j, name in enumerate(WORD_EYE_FEATURES)}


def word_eye_features(scanpath: Scanpath, paragraph: ParagraphItem) -> np.ndarray:
    """The 23 eye-movement measures per word (no linguistic block)."""
    n_words = paragraph.n_words
    n_fix = scanpath.n_fixations
    rt = scanpath.trial_dwell_time
    X = np.zeros((n_words, len(WORD_EYE_FEATURES)), dtype=np.float64)

    # Geometry and trial constants need no fixation pass.
    for w, word in enumerate(paragraph.words):
        X[w, _COL["IA_TOP"]] = word.top
        X[w, _COL["IA_LEFT"]] = word.left
        X[w, _COL["normalized_Word_ID"]] = (
            w / (n_words - 1) if n_words > 1 else 0.0
        )
        X[w, _COL["PARAGRAPH_RT"]] = rt
    X[:, _COL["IA_SKIP"]] = 1.0
    X[:, _COL["total_skip"]] = 1.0

    fixated = np.zeros(n_words, dtype=bool)
    progressive = np.zeros(n_words, dtype=bool)
    open_windows: set[int] = set()   # regression paths not yet closed
    distinct_visited: set[int] = set()
    run_word = -2                    # word of the run in progress (-2 = none)
    run_dwell = 0.0
    run_len = 0
    run_is_first_pass = False
    max_word_seen = -1               # highest word fixated so far

    def close_run(next_word) -> None:
        """Book the finished run into its word's run-level measures."""
        nonlocal run_word, run_dwell, run_len, run_is_first_pass
        if run_word < 0:
            return
        w = run_word
        X[w, _COL["IA_LAST_RUN_DWELL_TIME"]] = run_dwell
        if run_is_first_pass and X[w, _COL["IA_FIRST_RUN_DWELL_TIME"]] == 0.0:
            X[w, _COL["IA_FIRST_RUN_DWELL_TIME"]] = run_dwell
            X[w, _COL["IA_FIRST_RUN_FIXATION_COUNT"]] = float(run_len)
        if next_word is not None and next_word < w:
            X[w, _COL["IA_REGRESSION_OUT_FULL_COUNT"]] += 1.0
            # Exit counts toward the short variant only while no word above
            # w has been fixated anywhere in the trial so far.
            if max_word_seen <= w:
                X[w, _COL["IA_REGRESSION_OUT_COUNT"]] += 1.0

    prev_word = None
    for t, f in enumerate(scanpath.fixations):
        v = f.word_index
        if v != run_word:
            close_run(v)
            run_word = -2
        if v is not None:
            # Regression paths of lower words end here, before this
            # fixation's duration is accumulated (exclusive boundary).
            for w in [w for w in open_windows if v > w]:
                open_windows.discard(w)
            if v != prev_word:  # run boundary
                X[v, _COL["IA_RUN_COUNT"]] += 1.0
                if prev_word is not None and prev_word > v:
                    X[v, _COL["IA_REGRESSION_IN_COUNT"]] += 1.0
                run_word = v
                run_dwell = 0.0
                run_len = 0
                run_is_first_pass = False
            if not fixated[v]:
                fixated[v] = True
                X[v, _COL["IA_FIRST_FIXATION_DURATION"]] = f.duration
                X[v, _COL["IA_FIRST_FIXATION_VISITED_IA_COUNT"]] = float(
                    len(distinct_visited)
                )
                progressive[v] = max_word_seen <= v
                if progressive[v]:
                    X[v, _COL["IA_FIRST_FIX_PROGRESSIVE"]] = 1.0
                    X[v, _COL["IA_SKIP"]] = 0.0
                    run_is_first_pass = True
                X[v, _COL["total_skip"]] = 0.0
                open_windows.add(v)
            distinct_visited.add(v)
            X[v, _COL["IA_DWELL_TIME"]] += f.duration
            X[v, _COL["IA_FIXATION_COUNT"]] += 1.0
            X[v, _COL["IA_LAST_FIXATION_DURATION"]] = f.duration
            run_dwell += f.duration
            run_len += 1
            if v > max_word_seen:
                max_word_seen = v
        for w in open_windows:
            X[w, _COL["IA_REGRESSION_PATH_DURATION"]] += f.duration
            if v == w:
                X[w, _COL["IA_SELECTIVE_REGRESSION_PATH_DURATION"]] += f.duration
        prev_word = v
    close_run(None)

    if n_fix > 0:
        X[:, _COL["IA_FIXATION_%"]] = X[:, _COL["IA_FIXATION_COUNT"]] / n_fix
    if rt > 0:
        X[:, _COL["IA_DWELL_TIME_%"]] = X[:, _COL["IA_DWELL_TIME"]] / rt
    return X


def word_level_features(
    scanpath: Scanpath, paragraph: ParagraphItem, ling: np.ndarray
) -> np.ndarray:
    """Eye-movement measures concatenated with the linguistic block.

    ``ling`` is the (n_words, 9) matrix from
    :func:`gazecomp.features.linguistic.linguistic_features`.
    """
    ling = np.asarray(ling, dtype=np.float64)
    if ling.shape != (paragraph.n_words, len(LINGUISTIC_FEATURES)):
        raise SchemaError(
            f"linguistic block shape {ling.shape} does not match "
            f"({paragraph.n_words}, {len(LINGUISTIC_FEATURES)})"
        )
    return np.concatenate([word_eye_features(scanpath, paragraph), ling], axis=1)
