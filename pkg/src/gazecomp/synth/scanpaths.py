"""Generative model of one trial's fixation sequence.

The walk moves left to right over the word boxes. Each word is skipped
with a probability that is logistic in its length and hashed frequency
(short frequent words are skipped most); fixated words get log-normal
durations driven by length, hashed surprisal, and the participant's speed.
Refixations revisit the current word, regressions jump back to a uniformly
chosen earlier word (sometimes bouncing back to the launch site), and a
small fraction of fixations land above the text, outside every box.

Two effects are layered onto the critical span of the trial's question:

* hunting multiplies span durations by ``hunting_span_boost`` and raises
  the skip rate outside the span;
* the trial's comprehension latent shifts span log-durations by
  ``gamma * dwell_link_scale``, which is the planted gaze-comprehension
  link. ``gamma = 0`` removes it entirely.

Word indices are set at generation time from the word actually targeted;
because landing positions stay well inside the target box, re-assigning
fixations geometrically reproduces the same indices. Each fixation also
carries the full saccade-kinematics block (angles, distances, amplitudes
in visual degrees, plus main-sequence saccade durations and velocities),
matching what a complete fixation report would provide.
"""

from __future__ import annotations

import math

import numpy as np

from ..corpus import Fixation, Regime, ParagraphItem, Scanpath, WordToken
from ..features.linguistic import hash_frequency_log2p
from .corpus_gen import CriticalSpan, pseudo_surprisal
from .spec import SynthSpec


_PX_PER_DEGREE = 50.0


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _skip_probability(
    word: WordToken, in_span: bool, hunting: bool, spec: SynthSpec
) -> float:
    logit = (
        spec.skip_base
        + spec.skip_length_coef * (len(word.surface) - 5.0)
        + spec.skip_frequency_coef * (hash_frequency_log2p(word.surface) + 12.0)
    )
    if hunting and not in_span:
        logit += spec.hunting_skip_shift
    return _sigmoid(logit)


def generate_scanpath(
    trial_id: str,
    paragraph: ParagraphItem,
    span: CriticalSpan,
    regime: Regime,
    comprehension: float,
    speed: float,
    spec: SynthSpec,
    rng: np.random.Generator,
) -> Scanpath:
    """Simulate the fixation sequence for one trial.

    ``comprehension`` is the trial latent (standard normal under the
    default model); ``speed`` is the participant's log-duration offset.
    ``rng`` is consumed in a fixed draw order, so equal inputs give equal
    scanpaths.
    """

    hunting = regime is Regime.HUNTING
    min_top = min(w.top for w in paragraph.words)
    events: list[tuple[int | None, float, float, float]] = []

    def fixate(word: WordToken, short: bool = False) -> None:
        in_span = span.contains(word.index)
        mu = (
            spec.log_duration_base
            + spec.length_coef * (len(word.surface) - 5.0)
            + spec.surprisal_coef * (pseudo_surprisal(word.surface) - 10.0)
            + speed
        )
        if in_span:
            mu += spec.gamma * spec.dwell_link_scale * comprehension
            if hunting:
                mu += math.log(spec.hunting_span_boost)
        if short:
            mu -= 0.3
        duration = math.exp(mu + spec.duration_sigma * rng.normal())
        duration = min(max(duration, 30.0), 2500.0)
        width = word.right - word.left
        height = word.bottom - word.top
        x = word.left + width * rng.uniform(0.15, 0.85)
        y = word.top + height * rng.uniform(0.3, 0.7)
        events.append((word.index, round(x, 1), round(y, 1), round(duration, 1)))

    def stray() -> None:
        x = rng.uniform(80.0, 1050.0)
        y = min_top - 60.0 * rng.uniform(0.5, 1.5)
        mu = spec.log_duration_base - 0.5 + spec.duration_sigma * rng.normal()
        duration = min(max(math.exp(mu), 30.0), 2500.0)
        events.append((None, round(x, 1), round(y, 1), round(duration, 1)))

    for word in paragraph.words:
        if len(events) >= spec.max_fixations:
            break
        if rng.random() < spec.stray_rate:
            stray()
        skip_p = _skip_probability(word, span.contains(word.index), hunting, spec)
        if word.index > 0 and rng.random() < skip_p:
            continue
        fixate(word)
        if rng.random() < spec.refixation_prob:
            fixate(word, short=True)
        if word.index >= 2 and rng.random() < spec.regression_prob:
            target = paragraph.words[int(rng.integers(0, word.index))]
            fixate(target, short=True)
            if rng.random() < spec.regression_return_prob:
                fixate(word, short=True)

    pupil_base = rng.normal(spec.pupil_mean, spec.pupil_sd)
    extras: list[dict[str, float]] = [{} for _ in events]
    for i in range(len(events) - 1):
        _, ax, ay, _ = events[i]
        _, bx, by, _ = events[i + 1]
        dx, dy = bx - ax, by - ay
        dist = math.hypot(dx / _PX_PER_DEGREE, dy / _PX_PER_DEGREE)
        angle = math.degrees(math.atan2(dy, dx))
        sac_duration = spec.saccade_ms + 2.2 * dist
        avg_velocity = dist / sac_duration * 1000.0
        extras[i].update(
            NEXT_FIX_ANGLE=round(angle, 3),
            NEXT_FIX_DISTANCE=round(dist, 3),
            NEXT_SAC_AMPLITUDE=round(dist, 3),
            NEXT_SAC_ANGLE=round(angle, 3),
            NEXT_SAC_DURATION=round(sac_duration, 3),
            NEXT_SAC_AVG_VELOCITY=round(avg_velocity, 3),
            NEXT_SAC_PEAK_VELOCITY=round(1.7 * avg_velocity, 3),
        )
        extras[i + 1].update(
            PREVIOUS_FIX_ANGLE=round(angle, 3),
            PREVIOUS_FIX_DISTANCE=round(dist, 3),
        )
    fixations = tuple(
        Fixation(
            order_index=i,
            x=x,
            y=y,
            duration=duration,
            pupil=round(max(50.0, pupil_base + rng.normal(0.0, 20.0)), 1),
            word_index=word_index,
            extras=extras[i],
        )
        for i, (word_index, x, y, duration) in enumerate(events)
    )
    total = sum(f.duration for f in fixations)
    saccades = sum(f.extras.get("NEXT_SAC_DURATION", 0.0) for f in fixations)
    return Scanpath(
        trial_id=trial_id,
        fixations=fixations,
        trial_dwell_time=round(total + saccades, 1),
        px_per_degree=(_PX_PER_DEGREE, _PX_PER_DEGREE),
    )


def span_dwell_ms(scanpath: Scanpath, span: CriticalSpan) -> float:
    """Total fixation time on the critical span, in milliseconds."""

    return float(
        sum(
            f.duration
            for f in scanpath.fixations
            if f.word_index is not None and span.contains(f.word_index)
        )
    )
