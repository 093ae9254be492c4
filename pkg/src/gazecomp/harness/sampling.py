"""Per-epoch class-balanced down-sampling of training trials."""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

import numpy as np

from ..corpus import STARC_LABELS
from .data import TrialTensors


def balanced_sample(
    items: Sequence[TrialTensors], seed: int, epoch: int
) -> list[TrialTensors]:
    """Draw the same number of trials from each answer type.

    Every epoch draws min-class-count trials per answer type {A, B, C, D}
    without replacement and reshuffles, reseeded from (seed, epoch).
    Balancing is always over the four answer types, for the binary task too;
    the binary label is derived downstream.
    """
    by_class: dict[str, list[TrialTensors]] = defaultdict(list)
    for item in items:
        by_class[item.starc_label].append(item)
    empty = [c for c in STARC_LABELS if not by_class[c]]
    if empty:
        raise ValueError(
            f"cannot balance: no training trials with answer type "
            f"{', '.join(empty)}"
        )
    k = min(len(v) for v in by_class.values())
    rng = np.random.default_rng([seed, epoch, 0xBA1A])
    drawn: list[TrialTensors] = []
    for label in STARC_LABELS:
        pool = sorted(by_class[label], key=lambda t: t.trial_id)
        idx = rng.choice(len(pool), size=k, replace=False)
        drawn.extend(pool[i] for i in idx)
    order = rng.permutation(len(drawn))
    return [drawn[i] for i in order]
