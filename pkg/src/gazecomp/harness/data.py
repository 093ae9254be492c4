"""Trial tensorization and batching.

``prepare_trials`` tokenizes and featurizes every trial once;
``fit_fold_standardizers`` fits z-scoring statistics on a fold's training
trials only; ``collate`` assembles fixed-key batches serving every
architecture, so the train/eval loops stay architecture-blind.

Batch keys (``*_pad`` masks are True at padding):

== ==================  =======================================================
text_ids/text_pad      [CLS; paragraph; SEP; question; (answers); SEP]
para_ids/para_pad      [CLS; paragraph; SEP]
q_ids/q_pad            [CLS; question; (answers); SEP]
word_units/_pad/_pos   per-word gaze features; pos = first-subword index
token_gaze/_mask       word features duplicated per paragraph subword token
fix_units/fix_pad/_pos per-fixation gaze features; pos = fixation order
fix_xydp               raw (x, y, duration, pupil) channels
global_feats           trial-level summary vector
label                  binary correctness or 0-based answer position
== ==================  =======================================================
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
import torch

from ..corpus import Trial
from ..errors import ConfigurationError
from ..features import (FIXATION_FEATURES, GLOBAL_FEATURES, WORD_FEATURES,
                        FeatureSet, Standardizer, apply_standardizer,
                        binary_mask, fit_standardizer)
from ..models import CLS_ID, PAD_ID, SEP_ID, ToyTokenizer, build_text_input

XYDP_FEATURES = ("CURRENT_FIX_X", "CURRENT_FIX_Y", "CURRENT_FIX_DURATION",
                 "CURRENT_FIX_PUPIL")
_XYDP_COLS = tuple(FIXATION_FEATURES.index(name) for name in XYDP_FEATURES)


@dataclass(frozen=True)
class TrialTensors:
    """Everything one trial contributes to a batch, pre-standardization."""

    trial_id: str
    participant_id: str
    article_id: str
    regime: str
    starc_label: str
    label_binary: int
    label_choice: int
    text_ids: tuple[int, ...]
    para_ids: tuple[int, ...]
    q_ids: tuple[int, ...]
    word_spans: tuple[tuple[int, int], ...]
    word_feats: np.ndarray
    fix_feats: np.ndarray
    fix_xydp: np.ndarray
    global_feats: np.ndarray


@dataclass(frozen=True)
class FoldStandardizers:
    words: Standardizer
    fixations: Standardizer
    globals: Standardizer
    xydp: Standardizer


def prepare_trials(
    trials: Sequence[Trial],
    features: FeatureSet,
    task: str,
    tokenizer: Optional[ToyTokenizer] = None,
    max_len: int = 512,
) -> dict[str, TrialTensors]:
    """Tokenize once per trial and bind the extracted feature matrices."""
    tokenizer = tokenizer or ToyTokenizer()
    out: dict[str, TrialTensors] = {}
    for trial in trials:
        if trial.paragraph is None or trial.scanpath is None:
            raise ConfigurationError(
                f"trial {trial.trial_id}: paragraph/scanpath not attached"
            )
        surfaces = [w.surface for w in trial.paragraph.words]
        answers = trial.question.answers if task == "multiple_choice" else None
        text = build_text_input(
            tokenizer, surfaces, trial.question.text, answers, max_len
        )
        para_ids = [CLS_ID]
        for w in surfaces:
            para_ids.extend(tokenizer.word_ids(w))
        para_ids.append(SEP_ID)
        q_ids = [CLS_ID] + tokenizer.tokenize(trial.question.text)
        if answers is not None:
            for answer in answers:
                q_ids.append(SEP_ID)
                q_ids.extend(tokenizer.tokenize(answer))
        q_ids.append(SEP_ID)

        xydp = np.stack(
            [
                [f.x, f.y, f.duration, f.pupil]
                for f in trial.scanpath.fixations
            ],
            axis=0,
        ).astype(np.float64) if trial.scanpath.fixations else \
            np.zeros((0, 4), dtype=np.float64)

        out[trial.trial_id] = TrialTensors(
            trial_id=trial.trial_id,
            participant_id=trial.participant_id,
            article_id=trial.article_id,
            regime=trial.regime.value,
            starc_label=trial.starc_label,
            label_binary=trial.binary_label,
            label_choice=trial.chosen_position - 1,
            text_ids=text.ids,
            para_ids=tuple(para_ids),
            q_ids=tuple(q_ids),
            word_spans=text.word_spans,
            word_feats=features.words[trial.trial_id],
            fix_feats=features.fixations[trial.trial_id],
            fix_xydp=xydp,
            global_feats=features.globals[trial.trial_id],
        )
    return out


def fit_fold_standardizers(
    train: Sequence[TrialTensors], context: Optional[dict] = None
) -> FoldStandardizers:
    """Fit all four standardizers on training trials only."""
    def ctx(kind: str) -> dict:
        base = {"kind": kind}
        if context:
            base.update(context)
        return base

    word_rows = np.concatenate([t.word_feats for t in train], axis=0)
    fix_rows = [t.fix_feats for t in train if t.fix_feats.shape[0]]
    fix_rows = np.concatenate(fix_rows, axis=0) if fix_rows else \
        np.zeros((0, len(FIXATION_FEATURES)))
    xydp_rows = [t.fix_xydp for t in train if t.fix_xydp.shape[0]]
    xydp_rows = np.concatenate(xydp_rows, axis=0) if xydp_rows else \
        np.zeros((0, 4))
    glob_rows = np.stack([t.global_feats for t in train], axis=0)
    return FoldStandardizers(
        words=fit_standardizer(
            word_rows, WORD_FEATURES,
            binary_mask=np.array(binary_mask(WORD_FEATURES)),
            context=ctx("words"),
        ),
        fixations=fit_standardizer(
            fix_rows, FIXATION_FEATURES,
            binary_mask=np.array(binary_mask(FIXATION_FEATURES)),
            context=ctx("fixations"),
        ),
        globals=fit_standardizer(
            glob_rows, GLOBAL_FEATURES, context=ctx("globals")
        ),
        xydp=fit_standardizer(xydp_rows, XYDP_FEATURES, context=ctx("xydp")),
    )


def _pad_ids(rows: list[tuple[int, ...]]) -> tuple[torch.Tensor, torch.Tensor]:
    width = max(len(r) for r in rows)
    ids = torch.full((len(rows), width), PAD_ID, dtype=torch.long)
    pad = torch.ones((len(rows), width), dtype=torch.bool)
    for i, r in enumerate(rows):
        ids[i, :len(r)] = torch.tensor(r, dtype=torch.long)
        pad[i, :len(r)] = False
    return ids, pad


def _pad_float(rows: list[np.ndarray], width: int) -> tuple[torch.Tensor, torch.Tensor]:
    length = max((r.shape[0] for r in rows), default=0)
    length = max(length, 1)  # keep a defined tensor shape for empty batches
    feats = torch.zeros((len(rows), length, width), dtype=torch.float32)
    pad = torch.ones((len(rows), length), dtype=torch.bool)
    for i, r in enumerate(rows):
        n = r.shape[0]
        if n:
            feats[i, :n] = torch.from_numpy(np.ascontiguousarray(r)).float()
            pad[i, :n] = False
    return feats, pad


def collate(
    items: Sequence[TrialTensors],
    standardizers: FoldStandardizers,
    task: str,
) -> dict[str, torch.Tensor]:
    """Assemble one batch dict covering every architecture's inputs."""
    if not items:
        raise ValueError("empty batch")
    text_ids, text_pad = _pad_ids([t.text_ids for t in items])
    para_ids, para_pad = _pad_ids([t.para_ids for t in items])
    q_ids, q_pad = _pad_ids([t.q_ids for t in items])

    word_std = [
        apply_standardizer(standardizers.words, t.word_feats) for t in items
    ]
    word_units, word_units_pad = _pad_float(word_std, len(WORD_FEATURES))
    word_units_pos = torch.zeros_like(word_units_pad, dtype=torch.long)
    token_gaze = torch.zeros(
        (len(items), text_ids.size(1), len(WORD_FEATURES)),
        dtype=torch.float32,
    )
    token_gaze_mask = torch.zeros(
        (len(items), text_ids.size(1)), dtype=torch.bool
    )
    for i, t in enumerate(items):
        for w, (start, end) in enumerate(t.word_spans):
            word_units_pos[i, w] = start
            token_gaze[i, start:end] = torch.from_numpy(
                word_std[i][w]
            ).float()
            token_gaze_mask[i, start:end] = True

    fix_std = [
        apply_standardizer(standardizers.fixations, t.fix_feats)
        if t.fix_feats.shape[0] else t.fix_feats
        for t in items
    ]
    fix_units, fix_pad = _pad_float(fix_std, len(FIXATION_FEATURES))
    fix_pos = torch.arange(fix_units.size(1)).unsqueeze(0).repeat(
        len(items), 1
    )
    xydp_std = [
        apply_standardizer(standardizers.xydp, t.fix_xydp)
        if t.fix_xydp.shape[0] else t.fix_xydp
        for t in items
    ]
    fix_xydp, _ = _pad_float(xydp_std, 4)

    glob = apply_standardizer(
        standardizers.globals, np.stack([t.global_feats for t in items])
    )
    labels = [
        t.label_binary if task == "binary" else t.label_choice for t in items
    ]
    return {
        "text_ids": text_ids, "text_pad": text_pad,
        "para_ids": para_ids, "para_pad": para_pad,
        "q_ids": q_ids, "q_pad": q_pad,
        "word_units": word_units, "word_units_pad": word_units_pad,
        "word_units_pos": word_units_pos,
        "token_gaze": token_gaze, "token_gaze_mask": token_gaze_mask,
        "fix_units": fix_units, "fix_pad": fix_pad, "fix_pos": fix_pos,
        "fix_xydp": fix_xydp,
        "global_feats": torch.from_numpy(glob).float(),
        "label": torch.tensor(labels, dtype=torch.long),
    }
