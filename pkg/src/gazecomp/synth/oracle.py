"""Naive reference implementation of the word-level eye-movement measures.

Each measure is re-derived here by a separate, deliberately simple walk over
the fixation list, following the English measure definitions one at a time.
Nothing is shared with the production extractor except the column order, so
agreement between the two is meaningful evidence of correctness. Kept slow
and obvious on purpose; never used in the pipeline itself.
"""

from __future__ import annotations

import numpy as np

from ..corpus import ParagraphItem, Scanpath
from ..features.schema import WORD_EYE_FEATURES


def _fix_words(scanpath: Scanpath) -> list:
    return [f.word_index for f in scanpath.fixations]


def _dwell_time(scanpath: Scanpath, w: int) -> float:
    total = 0.0
    for f in scanpath.fixations:
        if f.word_index == w:
            total = total + f.duration
    return total


def _fixation_count(scanpath: Scanpath, w: int) -> int:
    n = 0
    for f in scanpath.fixations:
        if f.word_index == w:
            n += 1
    return n


def _entries(scanpath: Scanpath, w: int) -> list[int]:
    """Positions where a run of w starts (entered the interest area)."""
    words = _fix_words(scanpath)
    starts = []
    for t, word in enumerate(words):
        if word == w and (t == 0 or words[t - 1] != w):
            starts.append(t)
    return starts


def _runs(scanpath: Scanpath, w: int) -> list[tuple[int, int]]:
    """(start, end) index pairs of maximal consecutive streaks on w; end inclusive."""
    words = _fix_words(scanpath)
    runs = []
    for start in _entries(scanpath, w):
        end = start
        while end + 1 < len(words) and words[end + 1] == w:
            end += 1
        runs.append((start, end))
    return runs


def _regression_in_count(scanpath: Scanpath, w: int) -> int:
    words = _fix_words(scanpath)
    n = 0
    for start in _entries(scanpath, w):
        if start == 0:
            continue
        prev = words[start - 1]
        if prev is not None and prev > w:
            n += 1
    return n


def _exits_to_lower(scanpath: Scanpath, w: int) -> list[int]:
    """Positions of the fixation that left w for a lower-index word."""
    words = _fix_words(scanpath)
    exits = []
    for start, end in _runs(scanpath, w):
        if end + 1 < len(words):
            nxt = words[end + 1]
            if nxt is not None and nxt < w:
                exits.append(end + 1)
    return exits


def _first_fixation_position(scanpath: Scanpath, w: int):
    for t, f in enumerate(scanpath.fixations):
        if f.word_index == w:
            return t
    return None


def _first_fix_progressive(scanpath: Scanpath, w: int) -> int:
    t = _first_fixation_position(scanpath, w)
    if t is None:
        return 0
    for f in scanpath.fixations[:t]:
        if f.word_index is not None and f.word_index > w:
            return 0
    return 1


def _first_fix_visited_ia_count(scanpath: Scanpath, w: int) -> int:
    t = _first_fixation_position(scanpath, w)
    if t is None:
        return 0
    visited = set()
    for f in scanpath.fixations[:t]:
        if f.word_index is not None:
            visited.add(f.word_index)
    return len(visited)


def _skip(scanpath: Scanpath, w: int) -> int:
    # Skipped in first pass: no fixation on w before a higher word is fixated.
    words = _fix_words(scanpath)
    for t, word in enumerate(words):
        if word == w:
            earlier = words[:t]
            if not any(e is not None and e > w for e in earlier):
                return 0
    return 1


def _higher_word_positions(scanpath: Scanpath, w: int) -> list[int]:
    return [
        t for t, f in enumerate(scanpath.fixations)
        if f.word_index is not None and f.word_index > w
    ]


def _regression_path_window(scanpath: Scanpath, w: int):
    """[start, stop) fixation window of the regression path of w, or None."""
    start = _first_fixation_position(scanpath, w)
    if start is None:
        return None
    stop = len(scanpath.fixations)
    for t in _higher_word_positions(scanpath, w):
        if t > start:
            stop = t
            break
    return (start, stop)


def _regression_path_duration(scanpath: Scanpath, w: int) -> float:
    window = _regression_path_window(scanpath, w)
    if window is None:
        return 0.0
    total = 0.0
    for f in scanpath.fixations[window[0]:window[1]]:
        total = total + f.duration
    return total


def _selective_regression_path_duration(scanpath: Scanpath, w: int) -> float:
    window = _regression_path_window(scanpath, w)
    if window is None:
        return 0.0
    total = 0.0
    for f in scanpath.fixations[window[0]:window[1]]:
        if f.word_index == w:
            total = total + f.duration
    return total


def _regression_out_count(scanpath: Scanpath, w: int) -> int:
    # Exits to a lower word landing before the trial's first fixation on any
    # word above w; exits after that point only count in the _FULL variant.
    higher = _higher_word_positions(scanpath, w)
    horizon = higher[0] if higher else len(scanpath.fixations)
    return sum(1 for t in _exits_to_lower(scanpath, w) if t < horizon)


def _last_fixation_duration(scanpath: Scanpath, w: int) -> float:
    duration = 0.0
    for f in scanpath.fixations:
        if f.word_index == w:
            duration = f.duration
    return duration


def _last_run_dwell_time(scanpath: Scanpath, w: int) -> float:
    runs = _runs(scanpath, w)
    if not runs:
        return 0.0
    start, end = runs[-1]
    total = 0.0
    for f in scanpath.fixations[start:end + 1]:
        total = total + f.duration
    return total


def oracle_word_features(
    scanpath: Scanpath, paragraph: ParagraphItem
) -> np.ndarray:
    """The 23 word-level measures, one row per word, naive derivation.

    Column order follows WORD_EYE_FEATURES. Fixations with word_index None
    never contribute to any word's aggregates.
    """
    n_words = paragraph.n_words
    n_fix = scanpath.n_fixations
    rt = scanpath.trial_dwell_time
    out = np.zeros((n_words, len(WORD_EYE_FEATURES)), dtype=np.float64)
    for w, word in enumerate(paragraph.words):
        dwell = _dwell_time(scanpath, w)
        count = _fixation_count(scanpath, w)
        runs = _runs(scanpath, w)
        first_pos = _first_fixation_position(scanpath, w)
        row = {
            "IA_DWELL_TIME": dwell,
            "IA_DWELL_TIME_%": dwell / rt if rt > 0 else 0.0,
            "IA_FIXATION_%": count / n_fix if n_fix > 0 else 0.0,
            "IA_FIXATION_COUNT": float(count),
            "IA_REGRESSION_IN_COUNT": float(_regression_in_count(scanpath, w)),
            "IA_REGRESSION_OUT_FULL_COUNT": float(len(_exits_to_lower(scanpath, w))),
            "IA_RUN_COUNT": float(len(runs)),
            "IA_FIRST_FIX_PROGRESSIVE": float(_first_fix_progressive(scanpath, w)),
            "IA_FIRST_FIXATION_DURATION": (
                scanpath.fixations[first_pos].duration if first_pos is not None else 0.0
            ),
            "IA_FIRST_FIXATION_VISITED_IA_COUNT": float(
                _first_fix_visited_ia_count(scanpath, w)
            ),
            "IA_FIRST_RUN_DWELL_TIME": 0.0,
            "IA_FIRST_RUN_FIXATION_COUNT": 0.0,
            "IA_SKIP": float(_skip(scanpath, w)),
            "IA_TOP": word.top,
            "IA_LEFT": word.left,
            "normalized_Word_ID": w / (n_words - 1) if n_words > 1 else 0.0,
            "IA_REGRESSION_PATH_DURATION": _regression_path_duration(scanpath, w),
            "IA_REGRESSION_OUT_COUNT": float(_regression_out_count(scanpath, w)),
            "IA_SELECTIVE_REGRESSION_PATH_DURATION": (
                _selective_regression_path_duration(scanpath, w)
            ),
            "IA_LAST_FIXATION_DURATION": _last_fixation_duration(scanpath, w),
            "IA_LAST_RUN_DWELL_TIME": _last_run_dwell_time(scanpath, w),
            "PARAGRAPH_RT": rt,
            "total_skip": 1.0 if count == 0 else 0.0,
        }
        # First-run measures are first-pass quantities (gaze-duration style):
        # a word whose first entry came after a later word was fixated is
        # skipped, and its first-run measures stay 0.
        if runs and _skip(scanpath, w) == 0:
            start, end = runs[0]
            first_run_dwell = 0.0
            for f in scanpath.fixations[start:end + 1]:
                first_run_dwell = first_run_dwell + f.duration
            row["IA_FIRST_RUN_DWELL_TIME"] = first_run_dwell
            row["IA_FIRST_RUN_FIXATION_COUNT"] = float(end - start + 1)
        for j, name in enumerate(WORD_EYE_FEATURES):
            out[w, j] = row[name]
    return out
