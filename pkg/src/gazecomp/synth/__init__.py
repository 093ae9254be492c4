"""Synthetic corpus, scanpath and response generation with a plantable
gaze-comprehension link, plus the naive feature oracle used for testing."""

from .corpus_gen import (
    CANONICAL_MAPPING,
    QUESTIONS_PER_PARAGRAPH,
    CriticalSpan,
    SynthCorpus,
    build_vocabulary,
    generate_corpus,
    layout_words,
    pseudo_surprisal,
)
from .dataset import (
    ParticipantLatents,
    SynthDataset,
    TrialLatents,
    generate_dataset,
    generate_participants,
    load_latents,
    write_dataset,
)
from .oracle import oracle_word_features
from .responses import (
    ResponseDraw,
    ResponseInputs,
    confusion_weights,
    generate_responses,
    normalized_dwell,
)
from .scanpaths import generate_scanpath, span_dwell_ms
from .spec import SynthSpec

__all__ = [
    "CANONICAL_MAPPING",
    "QUESTIONS_PER_PARAGRAPH",
    "CriticalSpan",
    "ParticipantLatents",
    "ResponseDraw",
    "ResponseInputs",
    "SynthCorpus",
    "SynthDataset",
    "SynthSpec",
    "TrialLatents",
    "build_vocabulary",
    "confusion_weights",
    "generate_corpus",
    "generate_dataset",
    "generate_participants",
    "generate_responses",
    "generate_scanpath",
    "layout_words",
    "load_latents",
    "normalized_dwell",
    "oracle_word_features",
    "pseudo_surprisal",
    "span_dwell_ms",
    "write_dataset",
]
