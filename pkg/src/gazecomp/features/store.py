"""Feature extraction orchestration and columnar persistence.

Matrices live in an NPZ container with the schema embedded: feature names
per granularity in canonical order plus the joint schema hash. Loaders
refuse containers whose schema does not match the package's canonical
ordering, which is also what checkpoints pin themselves to.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from ..corpus import Trial
from ..errors import SchemaError
from .fixations import fixation_level_features
from .global_stats import global_features
from .linguistic import ProviderBundle, default_providers, linguistic_features
from .schema import (FIXATION_FEATURES, GLOBAL_FEATURES, WORD_FEATURES,
                     default_schema_hash)
from .words import word_level_features


@dataclass
class FeatureSet:
    """Raw (unstandardized) per-trial feature matrices."""

    words: dict[str, np.ndarray] = field(default_factory=dict)
    fixations: dict[str, np.ndarray] = field(default_factory=dict)
    globals: dict[str, np.ndarray] = field(default_factory=dict)
    schema_hash: str = field(default_factory=default_schema_hash)

    @property
    def trial_ids(self) -> list[str]:
        return sorted(self.words.keys())


def extract_features(
    trials: Sequence[Trial],
    providers: Optional[ProviderBundle] = None,
) -> FeatureSet:
    """Compute word/fixation/global matrices for resolved trials."""
    if providers is None:
        providers = default_providers()
    fs = FeatureSet()
    ling_cache: dict[str, np.ndarray] = {}
    for t in trials:
        if t.paragraph is None or t.scanpath is None:
            raise ValueError(
                f"trial {t.trial_id}: paragraph/scanpath not resolved"
            )
        pid = t.paragraph.paragraph_id
        if pid not in ling_cache:
            ling_cache[pid] = linguistic_features(t.paragraph, providers)
        ling = ling_cache[pid]
        fs.words[t.trial_id] = word_level_features(t.scanpath, t.paragraph, ling)
        fs.fixations[t.trial_id] = fixation_level_features(
            t.scanpath, t.paragraph, ling
        )
        fs.globals[t.trial_id] = global_features(t.scanpath, t.paragraph)
    return fs


def save_features(fs: FeatureSet, path: str | Path) -> None:
    """Persist matrices to NPZ with the schema header embedded."""
    arrays: dict[str, np.ndarray] = {
        "__schema_words__": np.array(WORD_FEATURES),
        "__schema_fixations__": np.array(FIXATION_FEATURES),
        "__schema_globals__": np.array(GLOBAL_FEATURES),
        "__schema_hash__": np.array([fs.schema_hash]),
    }
    for tid in fs.trial_ids:
        arrays[f"words/{tid}"] = fs.words[tid]
        arrays[f"fix/{tid}"] = fs.fixations[tid]
        arrays[f"glob/{tid}"] = fs.globals[tid]
    np.savez_compressed(Path(path), **arrays)


def load_features(path: str | Path) -> FeatureSet:
    """Load matrices, verifying the embedded schema against the canon."""
    with np.load(Path(path), allow_pickle=False) as data:
        for key, expected in (
            ("__schema_words__", WORD_FEATURES),
            ("__schema_fixations__", FIXATION_FEATURES),
            ("__schema_globals__", GLOBAL_FEATURES),
        ):
            if key not in data or tuple(data[key]) != expected:
                raise SchemaError(
                    f"{path}: embedded schema {key} does not match the "
                    f"canonical feature ordering"
                )
        fs = FeatureSet(schema_hash=str(data["__schema_hash__"][0]))
        for key in data.files:
            if key.startswith("words/"):
                fs.words[key[6:]] = data[key]
            elif key.startswith("fix/"):
                fs.fixations[key[4:]] = data[key]
            elif key.startswith("glob/"):
                fs.globals[key[5:]] = data[key]
    if fs.schema_hash != default_schema_hash():
        raise SchemaError(f"{path}: schema hash mismatch")
    return fs
