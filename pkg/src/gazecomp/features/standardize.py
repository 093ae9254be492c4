"""Per-feature z-scoring with train-only statistics.

Statistics are fitted on training rows of the current fold and applied
unchanged to validation and test rows. Binary indicator columns pass
through untouched; zero-variance columns get std clamped to 1 so constant
features standardize to zero instead of blowing up.

``FIT_OBSERVERS`` is a test seam: every fit notifies the registered
callbacks with the fit context, letting leakage tests assert that only
training rows ever reach a fit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import SchemaError
from . import schema as _schema

FIT_OBSERVERS: list[Callable[[dict], None]] = []


@dataclass(frozen=True)
class Standardizer:
    feature_names: tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray
    binary: np.ndarray  # bool per column; True = passthrough

    def __post_init__(self) -> None:
        k = len(self.feature_names)
        if not (self.mean.shape == self.std.shape == self.binary.shape == (k,)):
            raise SchemaError(
                f"standardizer arrays do not match {k} feature names"
            )


def fit_standardizer(
    train_features: np.ndarray,
    feature_names: tuple[str, ...],
    binary_mask: Optional[tuple[bool, ...]] = None,
    context: Optional[dict] = None,
) -> Standardizer:
    """Fit per-column mean/std (population) on training rows only."""
    X = np.asarray(train_features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != len(feature_names):
        raise SchemaError(
            f"feature matrix shape {X.shape} does not match "
            f"{len(feature_names)} feature names"
        )
    if X.shape[0] == 0:
        raise ValueError("cannot fit standardizer on zero rows")
    if binary_mask is None:
        binary_mask = _schema.binary_mask(feature_names)
    binary = np.asarray(binary_mask, dtype=bool)

    mean = X.mean(axis=0)
    std = X.std(axis=0)  # population (ddof=0)
    std = np.where(std > 0, std, 1.0)
    mean = np.where(binary, 0.0, mean)
    std = np.where(binary, 1.0, std)

    for observer in FIT_OBSERVERS:
        observer({
            "feature_names": feature_names,
            "n_rows": X.shape[0],
            **(context or {}),
        })
    return Standardizer(
        feature_names=tuple(feature_names), mean=mean, std=std, binary=binary
    )


def apply_standardizer(s: Standardizer, features: np.ndarray) -> np.ndarray:
    """Transform rows with the fitted statistics (never refits)."""
    X = np.asarray(features, dtype=np.float64)
    if X.shape[-1] != len(s.feature_names):
        raise SchemaError(
            f"feature matrix width {X.shape[-1]} does not match standardizer "
            f"({len(s.feature_names)} columns)"
        )
    return (X - s.mean) / s.std
