"""Configuration of the synthetic experiment generator.

The generative story, end to end:

* Items: pseudo-word paragraphs with screen geometry; every question marks
  a contiguous critical span whose reading drives comprehension. Item
  difficulty mixes a text-derivable part (off-span surprisal, so a text
  model has something to learn) with noise.
* Participants: a reading-skill latent, a log-speed multiplier, and a
  regime assignment (between participants, as in the source experiments).
* Scanpaths: left-to-right with skips, refixations, regressions, and a few
  out-of-bounds fixations. Hunting doubles dwell inside the span and skips
  more outside it. A per-trial comprehension latent shifts span dwell with
  strength ``gamma``.
* Responses: P(correct) is logistic in skill - difficulty + gamma times the
  realized (normalized) span dwell; errors fall on B > C > D.

``gamma`` is the single knob for the planted gaze-comprehension link:
zero severs it in both the scanpath and the response model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import ConfigurationError


@dataclass(frozen=True)
class SynthSpec:
    # corpus shape
    n_articles: int = 10
    paragraphs_per_article: int = 5
    words_mean: float = 109.0
    words_sd: float = 18.0
    n_participants: int = 60
    hunting_fraction: float = 0.5
    seed: int = 0

    # latent response model
    skill_sd: float = 1.0
    difficulty_sd: float = 1.5
    difficulty_text_rho: float = 0.85
    gamma: float = 2.0
    confusion_temperature: float = 2.0
    correct_offset: float = 2.7
    hunting_offset: float = 0.4

    # scanpath model
    log_duration_base: float = math.log(185.0)
    duration_sigma: float = 0.35
    length_coef: float = 0.03
    surprisal_coef: float = 0.045
    speed_sd: float = 0.18
    skip_base: float = -1.3
    skip_length_coef: float = -0.35
    skip_frequency_coef: float = 0.12
    refixation_prob: float = 0.18
    regression_prob: float = 0.12
    regression_return_prob: float = 0.6
    stray_rate: float = 0.02
    hunting_span_boost: float = 2.0
    hunting_skip_shift: float = 0.9
    dwell_link_scale: float = 0.45
    pupil_mean: float = 900.0
    pupil_sd: float = 120.0
    saccade_ms: float = 25.0
    max_fixations: int = 500

    def __post_init__(self) -> None:
        counts = {
            "n_articles": self.n_articles,
            "paragraphs_per_article": self.paragraphs_per_article,
            "n_participants": self.n_participants,
            "max_fixations": self.max_fixations,
        }
        for name, value in counts.items():
            if value < 1:
                raise ConfigurationError(f"{name} must be >= 1, got {value}")
        positive = {
            "words_mean": self.words_mean,
            "words_sd": self.words_sd,
            "skill_sd": self.skill_sd,
            "difficulty_sd": self.difficulty_sd,
            "duration_sigma": self.duration_sigma,
            "speed_sd": self.speed_sd,
            "confusion_temperature": self.confusion_temperature,
            "pupil_mean": self.pupil_mean,
            "pupil_sd": self.pupil_sd,
            "hunting_span_boost": self.hunting_span_boost,
        }
        for name, value in positive.items():
            if not value > 0:
                raise ConfigurationError(f"{name} must be > 0, got {value}")
        if self.gamma < 0:
            raise ConfigurationError(f"gamma must be >= 0, got {self.gamma}")
        unit = {
            "hunting_fraction": self.hunting_fraction,
            "difficulty_text_rho": self.difficulty_text_rho,
            "refixation_prob": self.refixation_prob,
            "regression_prob": self.regression_prob,
            "regression_return_prob": self.regression_return_prob,
            "stray_rate": self.stray_rate,
        }
        for name, value in unit.items():
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(
                    f"{name} must be in [0, 1], got {value}"
                )
        if self.saccade_ms < 0:
            raise ConfigurationError(
                f"saccade_ms must be >= 0, got {self.saccade_ms}"
            )
