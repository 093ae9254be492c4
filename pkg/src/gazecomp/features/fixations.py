"""Fixation-level feature sequences.

Saccade kinematics are copied verbatim from the report when present and
derived geometrically otherwise: distances in visual degrees use the
scanpath's px_per_degree, angles use atan2(dy, dx) in degrees with screen y
growing downward, in (-180, 180]. The first fixation has no PREVIOUS_*
values and the last no NEXT_* values; both are encoded as 0 under the
HAS_PREVIOUS / HAS_NEXT presence masks, which also win over any passthrough
values at the boundaries. Saccade duration and velocities default to 0 when
the report omits them (they cannot be derived without event timestamps).
"""

from __future__ import annotations

import math

import numpy as np

from ..corpus import Fixation, ParagraphItem, Scanpath
from ..errors import ConfigurationError, SchemaError
from .schema import FIXATION_FEATURES, LINGUISTIC_FEATURES

_COL = {name: j for j, name in enumerate(FIXATION_FEATURES)}

_DERIVED_GEOMETRIC = ("NEXT_FIX_ANGLE", "NEXT_FIX_DISTANCE",
                      "PREVIOUS_FIX_ANGLE", "PREVIOUS_FIX_DISTANCE",
                      "NEXT_SAC_AMPLITUDE", "NEXT_SAC_ANGLE")


def _angle_deg(dx: float, dy: float) -> float:
    return math.degrees(math.atan2(dy, dx))


def _distance_deg(a: Fixation, b: Fixation, ppd: tuple[float, float]) -> float:
    return math.hypot((b.x - a.x) / ppd[0], (b.y - a.y) / ppd[1])


def fixation_level_features(
    scanpath: Scanpath, paragraph: ParagraphItem, ling: np.ndarray
) -> np.ndarray:
    """One FIXATION_FEATURES row per fixation, word assignment required."""
    ling = np.asarray(ling, dtype=np.float64)
    if ling.shape != (paragraph.n_words, len(LINGUISTIC_FEATURES)):
        raise SchemaError(
            f"linguistic block shape {ling.shape} does not match "
            f"({paragraph.n_words}, {len(LINGUISTIC_FEATURES)})"
        )
    fixes = scanpath.fixations
    n = len(fixes)
    X = np.zeros((n, len(FIXATION_FEATURES)), dtype=np.float64)
    ppd = scanpath.px_per_degree

    def derived(f: Fixation, other: Fixation, col: str) -> float:
        if ppd is None:
            raise ConfigurationError(
                f"cannot derive {col}: scanpath has no px_per_degree"
            )
        if col in ("NEXT_FIX_DISTANCE", "PREVIOUS_FIX_DISTANCE",
                   "NEXT_SAC_AMPLITUDE"):
            return _distance_deg(f, other, ppd) if col != "PREVIOUS_FIX_DISTANCE" \
                else _distance_deg(other, f, ppd)
        dx, dy = (other.x - f.x, other.y - f.y)
        if col == "PREVIOUS_FIX_ANGLE":
            dx, dy = (f.x - other.x, f.y - other.y)
        return _angle_deg(dx, dy)

    for i, f in enumerate(fixes):
        X[i, _COL["CURRENT_FIX_INDEX"]] = i + 1  # 1-based position in trial
        X[i, _COL["CURRENT_FIX_DURATION"]] = f.duration
        X[i, _COL["CURRENT_FIX_PUPIL"]] = f.pupil
        X[i, _COL["CURRENT_FIX_X"]] = f.x
        X[i, _COL["CURRENT_FIX_Y"]] = f.y
        if i > 0:
            X[i, _COL["HAS_PREVIOUS"]] = 1.0
            prev = fixes[i - 1]
            for col in ("PREVIOUS_FIX_ANGLE", "PREVIOUS_FIX_DISTANCE"):
                X[i, _COL[col]] = f.extras[col] if col in f.extras \
                    else derived(f, prev, col)
        if i < n - 1:
            X[i, _COL["HAS_NEXT"]] = 1.0
            nxt = fixes[i + 1]
            for col in ("NEXT_FIX_ANGLE", "NEXT_FIX_DISTANCE",
                        "NEXT_SAC_AMPLITUDE", "NEXT_SAC_ANGLE"):
                X[i, _COL[col]] = f.extras[col] if col in f.extras \
                    else derived(f, nxt, col)
            for col in ("NEXT_SAC_AVG_VELOCITY", "NEXT_SAC_DURATION",
                        "NEXT_SAC_PEAK_VELOCITY"):
                X[i, _COL[col]] = f.extras.get(col, 0.0)
        if f.word_index is not None:
            X[i, _COL["fixated_word_index"]] = float(f.word_index)
            X[i, len(FIXATION_FEATURES) - len(LINGUISTIC_FEATURES):] = \
                ling[f.word_index]
        else:
            X[i, _COL["fixated_word_index"]] = -1.0
    return X
