"""Trial-level gaze summary for the logistic-regression baseline."""

from __future__ import annotations

import numpy as np

from ..corpus import ParagraphItem, Scanpath
from .schema import GLOBAL_FEATURES, WORD_EYE_FEATURES
from .words import word_eye_features

_W = {name: j for j, name in enumerate(WORD_EYE_FEATURES)}


def global_features(scanpath: Scanpath, paragraph: ParagraphItem) -> np.ndarray:
    """Reading speed plus global averages of standard word measures.

    Regression rate is the fraction of between-word saccades landing on a
    lower word index. Mean dwell and mean first-run dwell average over the
    words that carry those measures (fixated words, first-pass-read words).
    """
    if scanpath.n_fixations == 0:
        raise ValueError(
            f"trial {scanpath.trial_id}: no fixations, global gaze features "
            f"undefined"
        )
    W = word_eye_features(scanpath, paragraph)
    rt = scanpath.trial_dwell_time
    durations = np.array([f.duration for f in scanpath.fixations])

    words_fixated = W[:, _W["IA_FIXATION_COUNT"]] > 0
    first_pass_read = W[:, _W["IA_FIRST_RUN_FIXATION_COUNT"]] > 0

    seq = [f.word_index for f in scanpath.fixations if f.word_index is not None]
    moves = [(a, b) for a, b in zip(seq, seq[1:]) if a != b]
    regression_rate = (
        sum(1 for a, b in moves if b < a) / len(moves) if moves else 0.0
    )

    out = np.zeros(len(GLOBAL_FEATURES), dtype=np.float64)
    out[0] = paragraph.n_words / (rt / 60000.0) if rt > 0 else 0.0
    out[1] = float(durations.mean())
    out[2] = (
        float(W[words_fixated, _W["IA_DWELL_TIME"]].mean())
        if words_fixated.any() else 0.0
    )
    out[3] = float(W[:, _W["IA_SKIP"]].mean())
    out[4] = regression_rate
    out[5] = (
        float(W[first_pass_read, _W["IA_FIRST_RUN_DWELL_TIME"]].mean())
        if first_pass_read.any() else 0.0
    )
    out[6] = float(scanpath.n_fixations)
    return out
