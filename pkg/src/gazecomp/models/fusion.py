"""Gaze-text fusion classifiers.

Three fusion styles over a shared text encoder:

* concat: gaze feature vectors projected into the token embedding space and
  prepended to the text sequence, separated by a learned boundary token;
* gated: word-level gaze features displace paragraph token states inside the
  encoder stack through a norm-bounded multimodal gate;
* postfusion: fixation features convolved, cross-attended against the
  encoded paragraph, then queried by the encoded question.

Batch tensors follow one convention: ``*_pad`` masks are boolean with True
at padding positions (the attention key-padding convention).
"""

from __future__ import annotations

import torch
from torch import nn

from ..errors import ConfigurationError, SegmentOverflowError
from .base import ClassifierHead, masked_mean
from .config import ModelConfig
from .encoder import TextEncoder


class _FusionBase(nn.Module):
    """Common plumbing: config echo, ablation mask buffer, classifier head."""

    def __init__(
        self, config: ModelConfig, encoder: TextEncoder, gaze_dim: int
    ) -> None:
        super().__init__()
        self.config = config
        self.encoder = encoder
        self.gaze_dim = gaze_dim
        mask = torch.from_numpy(config.gaze_feature_mask()).to(torch.float32)
        if mask.numel() != gaze_dim:
            raise ConfigurationError(
                f"{config.architecture}: ablation mask width {mask.numel()} "
                f"!= gaze feature width {gaze_dim}"
            )
        self.register_buffer("feature_mask", mask)
        self.head = ClassifierHead(
            encoder.cfg.d_model, config.n_classes, config.dropout
        )

    def _masked(self, gaze: torch.Tensor) -> torch.Tensor:
        if gaze.size(-1) != self.gaze_dim:
            raise ConfigurationError(
                f"{self.config.architecture}: expected gaze width "
                f"{self.gaze_dim}, got {gaze.size(-1)}"
            )
        return gaze * self.feature_mask.to(gaze.dtype)


class ConcatFusionClassifier(_FusionBase):
    """Gaze tokens concatenated before the text: [gaze; SEP_E; CLS; p; ...].

    Each gaze unit becomes ``FC(E_i) + Emb_pos(pos_i) + Emb_eye`` where
    ``pos_i`` ties word units to their word's first subword position in the
    text segment and fixation units to the fixation order index. Position is
    attached to the unit's content, so permuting units with their positions
    leaves attention, and hence the pooled state, unchanged.
    """

    def __init__(
        self, config: ModelConfig, encoder: TextEncoder, gaze_dim: int
    ) -> None:
        super().__init__(config, encoder, gaze_dim)
        d = encoder.cfg.d_model
        self.gaze_proj = nn.Linear(gaze_dim, d)
        self.emb_eye = nn.Parameter(torch.randn(d) * 0.02)
        self.sep_eye = nn.Parameter(torch.randn(d) * 0.02)
        # Word-unit models read per-word rows; fixation-unit models read
        # per-fixation rows. The batch carries both.
        if config.uses_word_units:
            self._keys = ("word_units", "word_units_pad", "word_units_pos")
        else:
            self._keys = ("fix_units", "fix_pad", "fix_pos")

    def forward(self, batch: dict) -> torch.Tensor:
        units_key, pad_key, pos_key = self._keys
        gaze = self._masked(batch[units_key])
        gaze_pad = batch[pad_key]
        gaze_pos = batch[pos_key]
        text_ids = batch["text_ids"]
        text_pad = batch["text_pad"]
        n_units = gaze.size(1)
        if n_units > self.config.max_gaze_units:
            raise SegmentOverflowError(
                f"gaze segment has {n_units} units, over the reserved "
                f"budget {self.config.max_gaze_units}"
            )
        gaze_tokens = (
            self.gaze_proj(gaze)
            + self.encoder.position_embedding(gaze_pos)
            + self.emb_eye
        )
        text_tokens = self.encoder.embed(text_ids)
        sep = self.sep_eye.to(gaze_tokens.dtype).expand(
            gaze.size(0), 1, -1
        )
        seq = torch.cat([gaze_tokens, sep, text_tokens], dim=1)
        pad = torch.cat(
            [
                gaze_pad,
                torch.zeros_like(gaze_pad[:, :1]),
                text_pad,
            ],
            dim=1,
        )
        states = self.encoder.run_layers(seq, 0, None, pad)
        pooled = states[:, n_units + 1]  # classification token of the text
        return self.head(pooled)


class GatedFusionClassifier(_FusionBase):
    """Norm-bounded gated displacement of paragraph tokens at one layer.

    At injection layer k, for each paragraph token i with state Z_i and
    per-subword gaze features E_i::

        g_i = ReLU(W_g [Z_i; E_i] + b_g)
        H_i = g_i * (W_e E_i) + b_H
        alpha_i = min(beta * ||Z_i|| / ||H_i||, 1)   (0 when ||H_i|| = 0)
        Z_i <- Z_i + alpha_i * H_i

    Question and answer tokens are never displaced. ``last_alpha`` keeps the
    most recent per-token scales (zero outside the paragraph) for
    diagnostics and invariant checks.
    """

    def __init__(
        self, config: ModelConfig, encoder: TextEncoder, gaze_dim: int
    ) -> None:
        super().__init__(config, encoder, gaze_dim)
        d = encoder.cfg.d_model
        if not 0 <= config.injection_layer < encoder.n_layers:
            raise ConfigurationError(
                f"injection_layer {config.injection_layer} outside "
                f"0..{encoder.n_layers - 1}"
            )
        self.w_gate = nn.Linear(d + gaze_dim, d)
        self.w_eye = nn.Linear(gaze_dim, d, bias=False)
        self.b_h = nn.Parameter(torch.zeros(d))
        self.mag_drop = nn.Dropout(config.mag_dropout)
        self.last_alpha: torch.Tensor | None = None

    def _displace(
        self,
        states: torch.Tensor,
        token_gaze: torch.Tensor,
        token_mask: torch.Tensor,
    ) -> torch.Tensor:
        gate = torch.relu(
            self.w_gate(torch.cat([states, token_gaze], dim=-1))
        )
        disp = gate * self.w_eye(token_gaze) + self.b_h
        disp = self.mag_drop(disp)
        z_norm = states.norm(dim=-1)
        h_norm = disp.norm(dim=-1)
        safe = torch.where(h_norm > 0, h_norm, torch.ones_like(h_norm))
        alpha = torch.where(
            h_norm > 0,
            torch.clamp(self.config.beta * z_norm / safe, max=1.0),
            torch.zeros_like(h_norm),
        )
        alpha = alpha * token_mask.to(alpha.dtype)
        self.last_alpha = alpha.detach()
        return states + alpha.unsqueeze(-1) * disp

    def forward(self, batch: dict) -> torch.Tensor:
        token_gaze = self._masked(batch["token_gaze"])
        token_mask = batch["token_gaze_mask"]
        k = self.config.injection_layer
        x = self.encoder.embed(batch["text_ids"])
        pad = batch["text_pad"]
        x = self.encoder.run_layers(x, 0, k, pad)
        x = self._displace(x, token_gaze, token_mask)
        x = self.encoder.run_layers(x, k, None, pad)
        return self.head(x[:, 0])

    def displacement_free_logits(self, batch: dict) -> torch.Tensor:
        """Same encoder and head with the displacement block skipped.

        Diagnostic path for verifying that beta = 0 silences the gate.
        """
        x = self.encoder.embed(batch["text_ids"])
        x = self.encoder.run_layers(x, 0, None, batch["text_pad"])
        return self.head(x[:, 0])


class PostFusionClassifier(_FusionBase):
    """Late fusion: convolved fixations query the paragraph, then the
    question queries the fused reading representation."""

    def __init__(
        self, config: ModelConfig, encoder: TextEncoder, gaze_dim: int
    ) -> None:
        super().__init__(config, encoder, gaze_dim)
        cfg = encoder.cfg
        d = cfg.d_model
        self.conv1 = nn.Conv1d(gaze_dim, d, kernel_size=3, stride=1, padding=1)
        self.conv2 = nn.Conv1d(d, d, kernel_size=3, stride=1, padding=1)
        self.gaze_text_attn = nn.MultiheadAttention(
            d, cfg.n_heads, dropout=config.dropout, batch_first=True
        )
        self.fuse = nn.Linear(2 * d, d)
        self.question_attn = nn.MultiheadAttention(
            d, cfg.n_heads, dropout=config.dropout, batch_first=True
        )

    def gaze_encoding(
        self, fix_feats: torch.Tensor, fix_pad: torch.Tensor
    ) -> torch.Tensor:
        """Length-preserving convolutional encoding of the scanpath.

        Padded frames are zeroed before each convolution so the valid
        region's receptive fields see the same zeros whether the padding is
        explicit batch padding or the convolution's own implicit padding.
        """
        keep = (~fix_pad).unsqueeze(1).to(fix_feats.dtype)
        feats = self._masked(fix_feats)
        x = feats.transpose(1, 2) * keep
        x = torch.relu(self.conv1(x)) * keep
        x = self.conv2(x)
        return x.transpose(1, 2)

    def forward(self, batch: dict) -> torch.Tensor:
        fix_pad = batch["fix_pad"]
        if bool((~fix_pad).sum(dim=1).eq(0).any()):
            raise ValueError(
                "empty fixation sequence: this model requires gaze input"
            )
        para_states, _ = self.encoder(batch["para_ids"], batch["para_pad"])
        q_states, _ = self.encoder(batch["q_ids"], batch["q_pad"])
        z_e = self.gaze_encoding(batch["fix_units"], fix_pad)
        read, _ = self.gaze_text_attn(
            z_e, para_states, para_states,
            key_padding_mask=batch["para_pad"], need_weights=False,
        )
        fused = self.fuse(torch.cat([z_e, read], dim=-1))
        answered, _ = self.question_attn(
            q_states, fused, fused,
            key_padding_mask=fix_pad, need_weights=False,
        )
        pooled = masked_mean(answered, ~batch["q_pad"])
        return self.head(pooled)
