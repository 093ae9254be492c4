"""Canonical feature schemas shared by extraction, storage, and models.

Column order here is the contract: persisted matrices, standardizers and
model input layers all index features by these tuples. Binary indicator
columns are exempt from z-scoring and are flagged per schema.
"""

from __future__ import annotations

import hashlib

#: Word-level eye-movement measures, one row per word of the paragraph.
WORD_EYE_FEATURES = (
    "IA_DWELL_TIME",
    "IA_DWELL_TIME_%",
    "IA_FIXATION_%",
    "IA_FIXATION_COUNT",
    "IA_REGRESSION_IN_COUNT",
    "IA_REGRESSION_OUT_FULL_COUNT",
    "IA_RUN_COUNT",
    "IA_FIRST_FIX_PROGRESSIVE",
    "IA_FIRST_FIXATION_DURATION",
    "IA_FIRST_FIXATION_VISITED_IA_COUNT",
    "IA_FIRST_RUN_DWELL_TIME",
    "IA_FIRST_RUN_FIXATION_COUNT",
    "IA_SKIP",
    "IA_TOP",
    "IA_LEFT",
    "normalized_Word_ID",
    "IA_REGRESSION_PATH_DURATION",
    "IA_REGRESSION_OUT_COUNT",
    "IA_SELECTIVE_REGRESSION_PATH_DURATION",
    "IA_LAST_FIXATION_DURATION",
    "IA_LAST_RUN_DWELL_TIME",
    "PARAGRAPH_RT",
    "total_skip",
)

#: Linguistic word properties appended to both word and fixation vectors.
LINGUISTIC_FEATURES = (
    "surprisal",
    "wordfreq_frequency",
    "length",
    "start_of_line",
    "end_of_line",
    "is_content_word",
    "n_lefts",
    "n_rights",
    "distance2head",
)

WORD_FEATURES = WORD_EYE_FEATURES + LINGUISTIC_FEATURES

#: Fixation-level measures; PREVIOUS_*/NEXT_* are 0 at sequence boundaries,
#: with HAS_PREVIOUS / HAS_NEXT presence masks making the encoding lossless.
#: fixated_word_index is -1 for fixations outside every word box.
FIXATION_FEATURES = (
    "CURRENT_FIX_INDEX",
    "CURRENT_FIX_DURATION",
    "CURRENT_FIX_PUPIL",
    "CURRENT_FIX_X",
    "CURRENT_FIX_Y",
    "NEXT_FIX_ANGLE",
    "PREVIOUS_FIX_ANGLE",
    "NEXT_FIX_DISTANCE",
    "PREVIOUS_FIX_DISTANCE",
    "NEXT_SAC_AMPLITUDE",
    "NEXT_SAC_ANGLE",
    "NEXT_SAC_AVG_VELOCITY",
    "NEXT_SAC_DURATION",
    "NEXT_SAC_PEAK_VELOCITY",
    "HAS_PREVIOUS",
    "HAS_NEXT",
    "fixated_word_index",
) + LINGUISTIC_FEATURES

#: Trial-level summary used by the logistic-regression baseline.
GLOBAL_FEATURES = (
    "reading_speed_wpm",
    "mean_fix_duration",
    "mean_dwell_time_fixated",
    "skip_rate",
    "regression_rate",
    "mean_first_run_dwell",
    "fixation_count",
)

_BINARY = frozenset({
    "IA_FIRST_FIX_PROGRESSIVE",
    "IA_SKIP",
    "total_skip",
    "start_of_line",
    "end_of_line",
    "is_content_word",
    "HAS_PREVIOUS",
    "HAS_NEXT",
})


def binary_mask(feature_names: tuple[str, ...]) -> tuple[bool, ...]:
    """True where the column is a binary indicator (kept raw, no z-score)."""
    return tuple(name in _BINARY for name in feature_names)


def schema_hash(*feature_name_tuples: tuple[str, ...]) -> str:
    """Stable digest of the canonical feature ordering.

    Checkpoints embed this and refuse to load against mismatched schemas.
    """
    payload = "\n".join("|".join(names) for names in feature_name_tuples)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def default_schema_hash() -> str:
    return schema_hash(WORD_FEATURES, FIXATION_FEATURES, GLOBAL_FEATURES)
