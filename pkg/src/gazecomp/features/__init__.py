"""Gaze and linguistic feature extraction at three granularities."""

from .fixations import fixation_level_features
from .global_stats import global_features
from .linguistic import (CONTENT_POS, ProviderBundle, default_providers,
                         hash_frequency_log2p, hash_syntax,
                         linguistic_features, surprisal_bits)
from .schema import (FIXATION_FEATURES, GLOBAL_FEATURES, LINGUISTIC_FEATURES,
                     WORD_EYE_FEATURES, WORD_FEATURES, binary_mask,
                     default_schema_hash, schema_hash)
from .standardize import (Standardizer, apply_standardizer, fit_standardizer)
from .store import FeatureSet, extract_features, load_features, save_features
from .words import word_eye_features, word_level_features

__all__ = [
    "CONTENT_POS", "FIXATION_FEATURES", "FeatureSet", "GLOBAL_FEATURES",
    "LINGUISTIC_FEATURES", "ProviderBundle", "Standardizer",
    "WORD_EYE_FEATURES", "WORD_FEATURES", "apply_standardizer", "binary_mask",
    "default_providers", "default_schema_hash", "extract_features",
    "fixation_level_features", "fit_standardizer", "global_features",
    "hash_frequency_log2p", "hash_syntax", "linguistic_features",
    "load_features", "save_features", "schema_hash", "surprisal_bits",
    "word_eye_features", "word_level_features",
]
