"""Linguistic word properties and the provider plug-in seams.

Three in-process provider interfaces feed the 9-column linguistic block:

* next-word log-probability (contextual): ``fn(tokens) -> list of log2 p``
* unigram frequency: ``fn(word) -> log2 p``
* syntax: ``fn(tokens) -> list of (POS tag, head index)``

Real corpora would plug in a language model, a frequency lexicon and a
dependency parser here. The default providers are deterministic hashes of
the word spelling, which makes pseudo-word corpora self-annotating: the
generator and the extractor recompute identical values from the surface
forms alone.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ..corpus import ParagraphItem
from ..errors import ConfigurationError, ProviderError
from .schema import LINGUISTIC_FEATURES

#: POS tags counting as content words.
CONTENT_POS = frozenset({"PROPN", "NOUN", "VERB", "ADV", "ADJ"})

_CONTENT_TAGS = ("NOUN", "VERB", "ADJ", "ADV", "PROPN")
_FUNCTION_TAGS = ("DET", "ADP", "PRON", "AUX", "CCONJ", "PART")

NextWordLogProbProvider = Callable[[Sequence[str]], Sequence[float]]
FrequencyProvider = Callable[[str], float]
SyntaxProvider = Callable[[Sequence[str]], Sequence[tuple[str, int]]]


def _hash_unit(key: str, salt: str) -> float:
    """Deterministic uniform draw in [0, 1) from a string."""
    h = zlib.crc32(f"{salt}:{key}".encode("utf-8"))
    return (h & 0xFFFFFFFF) / 2**32


def hash_frequency_log2p(word: str) -> float:
    """Unigram log2 probability from the spelling hash.

    Longer words skew rarer, mimicking natural lexicons; output stays in
    roughly [-20, -4] bits.
    """
    u = _hash_unit(word.lower(), "freq")
    bits = 4.0 + 0.8 * min(len(word), 12) + 7.0 * u
    return -min(bits, 20.0)


def hash_syntax(tokens: Sequence[str]) -> list[tuple[str, int]]:
    """Deterministic pseudo-parse: POS tags and dependency heads.

    Sentences are cut every 8..15 words (hash of the sentence-initial word);
    the first word of a sentence is its root (head = own index), later words
    attach to a hash-chosen earlier word in the same sentence.
    """
    annotations: list[tuple[str, int]] = []
    sent_start = 0
    sent_len = 0
    for i, token in enumerate(tokens):
        if sent_len == 0:
            sent_start = i
            sent_len = 8 + int(_hash_unit(token.lower(), "sent") * 8)
        u_pos = _hash_unit(token.lower(), "pos")
        if u_pos < 0.55:
            tag = _CONTENT_TAGS[int(u_pos / 0.55 * len(_CONTENT_TAGS))]
        else:
            u = (u_pos - 0.55) / 0.45
            tag = _FUNCTION_TAGS[int(u * len(_FUNCTION_TAGS))]
        if i == sent_start:
            head = i
        else:
            reach = min(i - sent_start, 5)
            back = 1 + int(_hash_unit(f"{token.lower()}:{i - sent_start}", "head") * reach)
            head = i - back
        annotations.append((tag, head))
        sent_len -= 1
    return annotations


@dataclass(frozen=True)
class ProviderBundle:
    """The configured annotation providers.

    ``next_word_logprob`` may be None only when ``fallback_surprisal`` is
    set, in which case surprisal := wordfreq_frequency (context-free). The
    fallback is an explicit opt-in, never a silent default.
    """

    frequency: FrequencyProvider
    syntax: SyntaxProvider
    next_word_logprob: Optional[NextWordLogProbProvider] = None
    fallback_surprisal: bool = False


def default_providers() -> ProviderBundle:
    """Hash-backed providers with the sanctioned surprisal fallback."""
    return ProviderBundle(
        frequency=hash_frequency_log2p,
        syntax=hash_syntax,
        next_word_logprob=None,
        fallback_surprisal=True,
    )


def _call(provider_name: str, fn, *args):
    try:
        return fn(*args)
    except Exception as exc:
        raise ProviderError(f"provider {provider_name!r} failed: {exc}") from exc


def linguistic_features(
    paragraph: ParagraphItem, providers: ProviderBundle
) -> np.ndarray:
    """The 9 linguistic properties per word, LINGUISTIC_FEATURES order."""
    tokens = [w.surface for w in paragraph.words]
    n = len(tokens)

    freqs = np.empty(n, dtype=np.float64)
    for i, token in enumerate(tokens):
        log2p = _call("frequency", providers.frequency, token)
        if not (np.isfinite(log2p) and log2p <= 0):
            raise ProviderError(
                f"provider 'frequency' returned invalid log2 p {log2p} "
                f"for {token!r}"
            )
        freqs[i] = -log2p

    if providers.next_word_logprob is not None:
        logps = _call("next_word_logprob", providers.next_word_logprob, tokens)
        if len(logps) != n:
            raise ProviderError(
                f"provider 'next_word_logprob' returned {len(logps)} values "
                f"for {n} words"
            )
        surprisal = np.array([-float(v) for v in logps], dtype=np.float64)
        if np.any(~np.isfinite(surprisal)) or np.any(surprisal < 0):
            raise ProviderError("provider 'next_word_logprob' returned log2 p > 0 or non-finite")
    elif providers.fallback_surprisal:
        surprisal = freqs.copy()
    else:
        raise ConfigurationError(
            "no next_word_logprob provider configured and fallback_surprisal "
            "not enabled"
        )

    parse = _call("syntax", providers.syntax, tokens)
    if len(parse) != n:
        raise ProviderError(
            f"provider 'syntax' returned {len(parse)} annotations for {n} words"
        )
    heads = np.empty(n, dtype=np.int64)
    is_content = np.zeros(n, dtype=np.float64)
    for i, (tag, head) in enumerate(parse):
        if not (0 <= head < n):
            raise ProviderError(
                f"provider 'syntax' returned head {head} out of range for "
                f"word {i}"
            )
        heads[i] = head
        is_content[i] = float(tag in CONTENT_POS)

    n_lefts = np.zeros(n, dtype=np.float64)
    n_rights = np.zeros(n, dtype=np.float64)
    for i in range(n):
        h = heads[i]
        if h != i:
            if i < h:
                n_lefts[h] += 1.0
            else:
                n_rights[h] += 1.0
    distance2head = np.abs(np.arange(n) - heads).astype(np.float64)

    out = np.zeros((n, len(LINGUISTIC_FEATURES)), dtype=np.float64)
    out[:, 0] = surprisal
    out[:, 1] = freqs
    out[:, 2] = [len(t) for t in tokens]
    for i, w in enumerate(paragraph.words):
        first_of_line = i == 0 or paragraph.words[i - 1].line_index != w.line_index
        last_of_line = (
            i == n - 1 or paragraph.words[i + 1].line_index != w.line_index
        )
        out[i, 3] = float(first_of_line)
        out[i, 4] = float(last_of_line)
    out[:, 5] = is_content
    out[:, 6] = n_lefts
    out[:, 7] = n_rights
    out[:, 8] = distance2head
    return out


def surprisal_bits(p: float) -> float:
    """Convenience: -log2 p, the bits scale used throughout."""
    if not 0 < p <= 1:
        raise ValueError(f"probability out of (0, 1]: {p}")
    return -math.log2(p)
