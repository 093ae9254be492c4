"""Answer sampling given latents and realized span dwell.

P(correct) is logistic in reading skill minus item difficulty, plus the
planted dwell term: ``gamma`` times the trial's normalized span dwell.
Dwell is normalized as a z-score of log1p(span dwell) within regime, so
the regimes' very different absolute dwell levels (hunting doubles span
durations) do not masquerade as comprehension differences. Incorrect
responses distribute over the distractor types with softmax weights
favouring the near-miss: B > C > D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..corpus import Regime
from .spec import SynthSpec

_INCORRECT_LABELS = ("B", "C", "D")


@dataclass(frozen=True)
class ResponseInputs:
    """Latents of one trial entering the response model."""

    skill: float
    difficulty: float
    span_dwell: float
    regime: Regime


@dataclass(frozen=True)
class ResponseDraw:
    """Sampled answer plus the intermediates worth keeping for diagnostics."""

    label: str
    p_correct: float
    dwell_z: float


def confusion_weights(temperature: float) -> np.ndarray:
    """Softmax weights over (B, C, D) for incorrect responses."""

    scores = np.array([1.0, 0.0, -1.0]) / temperature
    w = np.exp(scores - scores.max())
    return w / w.sum()


def normalized_dwell(
    dwells: Sequence[float], regimes: Sequence[Regime]
) -> np.ndarray:
    """Z-score log1p(dwell) within each regime (population statistics)."""

    logs = np.log1p(np.asarray(dwells, dtype=np.float64))
    out = np.zeros_like(logs)
    for regime in Regime:
        mask = np.array([r is regime for r in regimes])
        if not mask.any():
            continue
        sd = logs[mask].std()
        if sd > 0:
            out[mask] = (logs[mask] - logs[mask].mean()) / sd
    return out


def generate_responses(
    rows: Sequence[ResponseInputs], spec: SynthSpec, seed: int
) -> list[ResponseDraw]:
    """Sample one answer-type label per trial, in input order."""

    if not rows:
        return []
    rng = np.random.default_rng([seed, 0xA27])
    dwell_z = normalized_dwell(
        [r.span_dwell for r in rows], [r.regime for r in rows]
    )
    weights = confusion_weights(spec.confusion_temperature)
    u = rng.random(len(rows))
    error_kind = rng.choice(len(_INCORRECT_LABELS), size=len(rows), p=weights)
    draws = []
    for i, row in enumerate(rows):
        logit = row.skill - row.difficulty + spec.correct_offset
        logit += spec.gamma * float(dwell_z[i])
        if row.regime is Regime.HUNTING:
            logit += spec.hunting_offset
        p = 1.0 / (1.0 + math.exp(-logit)) if logit >= 0 else (
            math.exp(logit) / (1.0 + math.exp(logit))
        )
        label = "A" if u[i] < p else _INCORRECT_LABELS[int(error_kind[i])]
        draws.append(
            ResponseDraw(label=label, p_correct=float(p), dwell_z=float(dwell_z[i]))
        )
    return draws
