"""Transformer text encoder with a size-preset, swappable-backbone interface.

The encoder is a randomly initialized bidirectional transformer whose shape
presets mirror common pretrained checkpoints (``base-like``, ``large-like``)
plus a ``toy`` preset small enough for finite-difference gradient checks.
Pretrained weights are an optional plug-in through ``load_state_dict``; none
of the pipeline assumes them.

Token ids come from :class:`ToyTokenizer`, a hash-bucket subword scheme that
needs no external vocabulary: every word splits into fixed-width character
pieces and each piece hashes into the id space. Identical strings always
produce identical ids, across processes and platforms.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import torch
from torch import nn

from ..errors import ConfigurationError, SegmentOverflowError

PAD_ID = 0
CLS_ID = 1
SEP_ID = 2
SEP_EYE_ID = 3
N_SPECIAL = 4


class ToyTokenizer:
    """Deterministic hash-bucket subword tokenizer.

    Words split into pieces of at most ``piece_len`` characters; each piece
    maps to ``crc32(piece) % (vocab_size - N_SPECIAL) + N_SPECIAL``. Ids 0-3
    are reserved for PAD/CLS/SEP/SEP_EYE.
    """

    def __init__(self, vocab_size: int = 512, piece_len: int = 4) -> None:
        if vocab_size <= N_SPECIAL:
            raise ConfigurationError(
                f"vocab_size must exceed {N_SPECIAL}, got {vocab_size}"
            )
        if piece_len < 1:
            raise ConfigurationError(f"piece_len must be >= 1, got {piece_len}")
        self.vocab_size = vocab_size
        self.piece_len = piece_len

    def word_ids(self, word: str) -> list[int]:
        """Subword ids of one word; at least one piece per non-empty word."""
        word = word.strip()
        if not word:
            return []
        pieces = [
            word[i:i + self.piece_len]
            for i in range(0, len(word), self.piece_len)
        ]
        space = self.vocab_size - N_SPECIAL
        return [
            zlib.crc32(p.encode("utf-8")) % space + N_SPECIAL for p in pieces
        ]

    def tokenize(self, text: str) -> list[int]:
        ids: list[int] = []
        for word in text.split():
            ids.extend(self.word_ids(word))
        return ids


@dataclass(frozen=True)
class EncoderConfig:
    preset: str
    d_model: int
    n_layers: int
    n_heads: int
    ffn_dim: int
    vocab_size: int
    max_len: int
    dropout: float = 0.1

    def __post_init__(self) -> None:
        if self.d_model % self.n_heads != 0:
            raise ConfigurationError(
                f"d_model {self.d_model} not divisible by n_heads {self.n_heads}"
            )
        if min(self.d_model, self.n_layers, self.n_heads, self.ffn_dim,
               self.max_len) < 1:
            raise ConfigurationError("encoder dimensions must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigurationError(f"dropout {self.dropout} outside [0, 1)")


_PRESETS = {
    "toy": EncoderConfig("toy", d_model=32, n_layers=2, n_heads=2,
                         ffn_dim=64, vocab_size=512, max_len=512),
    "base-like": EncoderConfig("base-like", d_model=768, n_layers=12,
                               n_heads=12, ffn_dim=3072, vocab_size=50265,
                               max_len=512),
    "large-like": EncoderConfig("large-like", d_model=1024, n_layers=24,
                                n_heads=16, ffn_dim=4096, vocab_size=50265,
                                max_len=512),
}


def encoder_config(preset: str, **overrides) -> EncoderConfig:
    if preset not in _PRESETS:
        raise ConfigurationError(
            f"unknown encoder preset {preset!r}; choose from {sorted(_PRESETS)}"
        )
    cfg = _PRESETS[preset]
    return replace(cfg, **overrides) if overrides else cfg


@dataclass(frozen=True)
class TextInput:
    """Tokenized [CLS; paragraph; SEP; question; (answers); SEP] sequence.

    ``word_spans[i]`` is the half-open token range of paragraph word i, used
    to duplicate word-level gaze features per subword and to tie gaze token
    positions to first-subword indices.
    """

    ids: tuple[int, ...]
    paragraph_span: tuple[int, int]
    question_span: tuple[int, int]
    word_spans: tuple[tuple[int, int], ...]

    @property
    def length(self) -> int:
        return len(self.ids)


def build_text_input(
    tokenizer: ToyTokenizer,
    paragraph_words: Sequence[str],
    question: str,
    answers: Optional[Sequence[str]],
    max_len: int,
) -> TextInput:
    """Assemble the encoder input; answers segment present iff given.

    Overflow raises :class:`SegmentOverflowError` naming the first segment
    that crosses the budget; the paragraph is never silently truncated.
    """
    ids: list[int] = [CLS_ID]
    word_spans: list[tuple[int, int]] = []
    for word in paragraph_words:
        pieces = tokenizer.word_ids(word)
        word_spans.append((len(ids), len(ids) + len(pieces)))
        ids.extend(pieces)
    para_span = (1, len(ids))
    ids.append(SEP_ID)
    segment_ends = [("paragraph", len(ids))]

    q_start = len(ids)
    ids.extend(tokenizer.tokenize(question))
    question_span = (q_start, len(ids))
    ids.append(SEP_ID)
    segment_ends.append(("question", len(ids)))

    if answers is not None:
        for j, answer in enumerate(answers):
            ids.extend(tokenizer.tokenize(answer))
            ids.append(SEP_ID)
            segment_ends.append((f"answer {j + 1}", len(ids)))

    if len(ids) > max_len:
        for name, end in segment_ends:
            if end > max_len:
                raise SegmentOverflowError(
                    f"{name} segment ends at token {end}, over the "
                    f"{max_len}-token budget (total {len(ids)})"
                )
    return TextInput(
        ids=tuple(ids),
        paragraph_span=para_span,
        question_span=question_span,
        word_spans=tuple(word_spans),
    )


class EncoderLayer(nn.Module):
    """Post-LN transformer block: self-attention then feed-forward."""

    def __init__(self, cfg: EncoderConfig) -> None:
        super().__init__()
        self.attn = nn.MultiheadAttention(
            cfg.d_model, cfg.n_heads, dropout=cfg.dropout, batch_first=True
        )
        self.norm1 = nn.LayerNorm(cfg.d_model)
        self.norm2 = nn.LayerNorm(cfg.d_model)
        self.ffn = nn.Sequential(
            nn.Linear(cfg.d_model, cfg.ffn_dim),
            nn.GELU(),
            nn.Linear(cfg.ffn_dim, cfg.d_model),
        )
        self.drop = nn.Dropout(cfg.dropout)

    def forward(
        self, x: torch.Tensor, pad_mask: Optional[torch.Tensor] = None
    ) -> torch.Tensor:
        attended, _ = self.attn(
            x, x, x, key_padding_mask=pad_mask, need_weights=False
        )
        x = self.norm1(x + self.drop(attended))
        x = self.norm2(x + self.drop(self.ffn(x)))
        return x


class TextEncoder(nn.Module):
    """Token + learned-position embeddings feeding post-LN blocks.

    ``embed`` and ``run_layers`` are exposed separately so fusion models can
    inject state between blocks (``run_layers(x, k, L)``) or prepend
    non-text tokens that carry their own positional terms.
    """

    def __init__(self, cfg: EncoderConfig, frozen: bool = False) -> None:
        super().__init__()
        self.cfg = cfg
        self.tok_emb = nn.Embedding(cfg.vocab_size, cfg.d_model,
                                    padding_idx=PAD_ID)
        self.pos_emb = nn.Embedding(cfg.max_len, cfg.d_model)
        self.emb_norm = nn.LayerNorm(cfg.d_model)
        self.emb_drop = nn.Dropout(cfg.dropout)
        self.layers = nn.ModuleList(
            EncoderLayer(cfg) for _ in range(cfg.n_layers)
        )
        self._frozen = bool(frozen)
        if self._frozen:
            self.requires_grad_(False)

    @property
    def frozen(self) -> bool:
        return self._frozen

    @property
    def n_layers(self) -> int:
        return self.cfg.n_layers

    def position_embedding(self, idx: torch.Tensor) -> torch.Tensor:
        """Positional vectors for arbitrary indices (gaze tokens tie here)."""
        return self.pos_emb(idx)

    def embed(self, ids: torch.Tensor) -> torch.Tensor:
        if ids.size(1) > self.cfg.max_len:
            raise SegmentOverflowError(
                f"sequence length {ids.size(1)} exceeds encoder max_len "
                f"{self.cfg.max_len}"
            )
        pos = torch.arange(ids.size(1), device=ids.device)
        x = self.tok_emb(ids) + self.pos_emb(pos)[None, :, :]
        return self.emb_drop(self.emb_norm(x))

    def run_layers(
        self,
        x: torch.Tensor,
        start: int,
        end: Optional[int] = None,
        pad_mask: Optional[torch.Tensor] = None,
    ) -> torch.Tensor:
        end = self.cfg.n_layers if end is None else end
        if not 0 <= start <= end <= self.cfg.n_layers:
            raise ConfigurationError(
                f"layer range [{start}, {end}) outside "
                f"0..{self.cfg.n_layers}"
            )
        for layer in self.layers[start:end]:
            x = layer(x, pad_mask)
        return x

    def forward(
        self, ids: torch.Tensor, pad_mask: Optional[torch.Tensor] = None
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """(per-token states, pooled classification-token state)."""
        x = self.run_layers(self.embed(ids), 0, None, pad_mask)
        return x, x[:, 0]
