"""Shared builders for small synthetic trials used across the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from gazecomp.corpus import (Fixation, ParagraphItem, QuestionItem, Regime,
                             Scanpath, Trial, WordToken)

WORD_W = 60.0
WORD_H = 40.0
LINE_Y0 = 100.0
X0 = 80.0


def make_paragraph(
    n_words: int = 8,
    words_per_line: int = 5,
    paragraph_id: str = "p0",
    article_id: str = "a0",
    surfaces=None,
) -> ParagraphItem:
    """Words laid out left to right, wrapping every words_per_line."""
    words = []
    for i in range(n_words):
        line, col = divmod(i, words_per_line)
        left = X0 + col * WORD_W
        top = LINE_Y0 + line * WORD_H
        surface = surfaces[i] if surfaces else f"word{i}"
        words.append(WordToken(
            index=i, surface=surface, line_index=line,
            left=left, top=top, right=left + WORD_W, bottom=top + WORD_H,
        ))
    return ParagraphItem(
        article_id=article_id, paragraph_id=paragraph_id, words=tuple(words)
    )


def word_center(paragraph: ParagraphItem, w: int) -> tuple[float, float]:
    box = paragraph.words[w]
    return ((box.left + box.right) / 2, (box.top + box.bottom) / 2)


def make_scanpath(
    paragraph: ParagraphItem,
    word_sequence,
    durations=None,
    trial_id: str = "t0",
    trial_dwell_time=None,
    px_per_degree=(50.0, 50.0),
) -> Scanpath:
    """Fixations at word-box centers; None in the sequence = out-of-box.

    Word assignment is pre-resolved (word_index set directly), matching the
    extractor's precondition.
    """
    if durations is None:
        durations = [100.0 + 10.0 * i for i in range(len(word_sequence))]
    fixations = []
    for i, (w, d) in enumerate(zip(word_sequence, durations)):
        if w is None:
            x, y = 5.0, 5.0  # far outside every box
            widx = None
        else:
            x, y = word_center(paragraph, w)
            widx = w
        fixations.append(Fixation(
            order_index=i, x=x, y=y, duration=float(d), pupil=1000.0,
            word_index=widx,
        ))
    if trial_dwell_time is None:
        trial_dwell_time = float(sum(durations)) + 20.0 * max(len(durations) - 1, 0)
    return Scanpath(
        trial_id=trial_id, fixations=tuple(fixations),
        trial_dwell_time=trial_dwell_time, px_per_degree=px_per_degree,
    )


def make_question(question_id: str = "q0", mapping=None) -> QuestionItem:
    mapping = mapping or {1: "A", 2: "B", 3: "C", 4: "D"}
    return QuestionItem(
        question_id=question_id, text=question_id,
        answers=("ans one", "ans two", "ans three", "ans four"),
        starc_of_position=mapping,
    )


def make_trial(
    trial_id: str = "t0",
    participant_id: str = "s0",
    paragraph: ParagraphItem | None = None,
    scanpath: Scanpath | None = None,
    regime: Regime = Regime.GATHERING,
    chosen_position: int = 1,
    mapping=None,
    question_id: str = "q0",
) -> Trial:
    paragraph = paragraph or make_paragraph()
    if scanpath is None:
        scanpath = make_scanpath(
            paragraph, list(range(paragraph.n_words)), trial_id=trial_id
        )
    return Trial(
        trial_id=trial_id,
        participant_id=participant_id,
        article_id=paragraph.article_id,
        paragraph_id=paragraph.paragraph_id,
        regime=regime,
        question=make_question(question_id, mapping),
        chosen_position=chosen_position,
        paragraph=paragraph,
        scanpath=scanpath,
    )


def random_scanpath(
    rng: np.random.Generator,
    paragraph: ParagraphItem,
    max_fixations: int = 30,
    allow_empty: bool = True,
    out_of_box_rate: float = 0.1,
) -> Scanpath:
    """Adversarial random scanpath for equivalence fuzzing."""
    n = int(rng.integers(0 if allow_empty else 1, max_fixations + 1))
    seq, durations = [], []
    for _ in range(n):
        if rng.random() < out_of_box_rate:
            seq.append(None)
        else:
            seq.append(int(rng.integers(0, paragraph.n_words)))
        durations.append(float(rng.integers(20, 600)))
    return make_scanpath(paragraph, seq, durations)


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
