"""Pseudo-text items: vocabulary, paragraph layout, questions, spans.

Surfaces are pronounceable pseudo-words, so every downstream component that
derives values from surfaces (length, hashed frequency and surprisal, the
screen layout) behaves exactly as it would on real text. Draw weights are
Zipf-like and rank is tied to length, so short words repeat often, which
matches both natural text and the hashed frequency provider (shorter means
more frequent there too).

Each paragraph carries three questions. A question points at a contiguous
critical span of the paragraph; correct answers reuse span words, the
near-miss reuses a mix, and the remaining distractors come from off-span
and global material. Item difficulty is anchored to the surprisal of the
OFF-span text: the text-derivable part of difficulty deliberately avoids
the span, so severing the gaze link (gamma = 0) leaves span dwell carrying
no information about correctness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..corpus import ParagraphItem, QuestionItem, WordToken
from ..features.linguistic import hash_frequency_log2p
from .spec import SynthSpec

QUESTIONS_PER_PARAGRAPH = 3

#: identity mapping used by canonical (corpus-level) question items
CANONICAL_MAPPING = {1: "A", 2: "B", 3: "C", 4: "D"}

_CONSONANTS = "bcdfghjklmnprstvz"
_VOWELS = "aeiou"

# screen layout constants (pixels)
_CHAR_W = 14.0
_SPACE_W = 14.0
_BOX_PAD = 12.0
_LEFT_MARGIN = 100.0
_RIGHT_LIMIT = 1080.0
_TOP_MARGIN = 200.0
_LINE_HEIGHT = 60.0
_BOX_HEIGHT = 40.0


@dataclass(frozen=True)
class CriticalSpan:
    """Contiguous word-index range ``[start, end)`` targeted by a question."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end <= self.start:
            raise ValueError(
                f"critical span [{self.start}, {self.end}) is empty or negative"
            )

    def contains(self, word_index: int) -> bool:
        return self.start <= word_index < self.end

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class SynthCorpus:
    """Items of one generated experiment, before any participant data."""

    paragraphs: tuple[ParagraphItem, ...]
    questions: Mapping[str, tuple[QuestionItem, ...]]
    spans: Mapping[str, CriticalSpan]
    difficulties: Mapping[str, float]
    vocabulary: tuple[str, ...]

    def paragraph_by_id(self, paragraph_id: str) -> ParagraphItem:
        for p in self.paragraphs:
            if p.paragraph_id == paragraph_id:
                return p
        raise KeyError(paragraph_id)


def pseudo_surprisal(word: str) -> float:
    """Bits of self-information under the hashed frequency provider."""

    return -hash_frequency_log2p(word)


def _pseudo_word(rng: np.random.Generator, n_chars: int) -> str:
    chars = []
    consonant = rng.random() < 0.7
    while len(chars) < n_chars:
        pool = _CONSONANTS if consonant else _VOWELS
        chars.append(pool[int(rng.integers(0, len(pool)))])
        consonant = not consonant
    return "".join(chars)


def build_vocabulary(
    rng: np.random.Generator, size: int = 900
) -> tuple[tuple[str, ...], np.ndarray]:
    """Ranked pseudo-word vocabulary with Zipf draw weights.

    Word length grows with rank so that frequent draws are short, mirroring
    natural text. Surfaces are unique.
    """

    words: list[str] = []
    seen: set[str] = set()
    for rank in range(size):
        target = 2.0 + 8.0 * rank / size + rng.normal(0.0, 1.0)
        n_chars = int(min(12, max(2, round(target))))
        for _ in range(100):
            w = _pseudo_word(rng, n_chars)
            if w not in seen:
                break
            n_chars = int(min(12, n_chars + 1))
        seen.add(w)
        words.append(w)
    weights = 1.0 / np.arange(1.0, size + 1.0) ** 1.05
    weights /= weights.sum()
    return tuple(words), weights


def layout_words(surfaces: list[str]) -> tuple[WordToken, ...]:
    """Wrap surfaces into lines of non-overlapping, ordered boxes."""

    tokens: list[WordToken] = []
    x = _LEFT_MARGIN
    line = 0
    for i, surface in enumerate(surfaces):
        width = _CHAR_W * len(surface) + _BOX_PAD
        if x + width > _RIGHT_LIMIT and x > _LEFT_MARGIN:
            line += 1
            x = _LEFT_MARGIN
        top = _TOP_MARGIN + line * _LINE_HEIGHT
        tokens.append(
            WordToken(
                index=i,
                surface=surface,
                line_index=line,
                left=x,
                top=top,
                right=x + width,
                bottom=top + _BOX_HEIGHT,
            )
        )
        x += width + _SPACE_W
    return tuple(tokens)


def _draw_span(rng: np.random.Generator, n_words: int) -> CriticalSpan:
    length = int(rng.integers(5, 10))
    length = min(length, n_words)
    centre = rng.normal(0.42 * n_words, 0.07 * n_words)
    start = int(round(centre - length / 2.0))
    start = max(0, min(start, n_words - length))
    return CriticalSpan(start=start, end=start + length)


def _draw_words(
    rng: np.random.Generator,
    vocab: tuple[str, ...],
    weights: np.ndarray,
    n: int,
) -> list[str]:
    idx = rng.choice(len(vocab), size=n, p=weights)
    return [vocab[int(i)] for i in idx]


def _answers(
    rng: np.random.Generator,
    span_words: list[str],
    off_span_words: list[str],
    vocab: tuple[str, ...],
    weights: np.ndarray,
) -> tuple[str, str, str, str]:
    """Answer content keyed by answer type A..D (canonical order)."""

    def sample(pool: list[str], n: int) -> list[str]:
        picks = rng.choice(len(pool), size=n)
        return [pool[int(i)] for i in picks]

    n_a = int(rng.integers(3, 6))
    correct = sample(span_words, n_a)
    near = sample(span_words, 2) + sample(off_span_words, 2)
    other = sample(off_span_words, int(rng.integers(3, 6)))
    unrelated = _draw_words(rng, vocab, weights, int(rng.integers(3, 6)))
    return (
        " ".join(correct),
        " ".join(near),
        " ".join(other),
        " ".join(unrelated),
    )


def generate_corpus(spec: SynthSpec) -> SynthCorpus:
    """Deterministically build all items for ``spec``."""

    rng = np.random.default_rng([spec.seed, 0xC0])
    vocab, weights = build_vocabulary(rng)

    paragraphs: list[ParagraphItem] = []
    questions: dict[str, tuple[QuestionItem, ...]] = {}
    spans: dict[str, CriticalSpan] = {}
    hardness: dict[str, float] = {}

    for a in range(spec.n_articles):
        article_id = f"art{a:02d}"
        for p in range(spec.paragraphs_per_article):
            paragraph_id = f"{article_id}_p{p}"
            n_words = max(12, int(round(rng.normal(spec.words_mean, spec.words_sd))))
            surfaces = _draw_words(rng, vocab, weights, n_words)
            paragraph = ParagraphItem(
                article_id=article_id,
                paragraph_id=paragraph_id,
                words=layout_words(surfaces),
            )
            paragraphs.append(paragraph)

            items = []
            for q in range(QUESTIONS_PER_PARAGRAPH):
                question_id = f"{paragraph_id}_q{q}"
                span = _draw_span(rng, n_words)
                span_words = surfaces[span.start : span.end]
                off_span = [
                    w
                    for i, w in enumerate(surfaces)
                    if not span.contains(i)
                ] or list(surfaces)
                items.append(
                    QuestionItem(
                        question_id=question_id,
                        text=question_id,
                        answers=_answers(rng, span_words, off_span, vocab, weights),
                        starc_of_position=dict(CANONICAL_MAPPING),
                    )
                )
                spans[question_id] = span
                hardness[question_id] = float(
                    np.mean([pseudo_surprisal(w) for w in off_span])
                )
            questions[paragraph_id] = tuple(items)

    # Difficulty: text-anchored part from off-span surprisal (z-scored across
    # the corpus) plus independent noise; total variance difficulty_sd**2.
    ids = sorted(hardness)
    raw = np.array([hardness[q] for q in ids])
    sd = float(raw.std())
    z = (raw - raw.mean()) / sd if sd > 0 else np.zeros_like(raw)
    rho = spec.difficulty_text_rho
    noise = rng.normal(0.0, 1.0, size=len(ids))
    b = spec.difficulty_sd * (rho * z + math.sqrt(1.0 - rho * rho) * noise)
    difficulties = {q: float(v) for q, v in zip(ids, b)}

    return SynthCorpus(
        paragraphs=tuple(paragraphs),
        questions=questions,
        spans=spans,
        difficulties=difficulties,
        vocabulary=vocab,
    )
