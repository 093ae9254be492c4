"""Full synthetic experiments: assembly, latent truth, and disk layout.

``generate_dataset`` is a pure function of (spec, spec.seed): items come
from :mod:`.corpus_gen`, participants get skill / speed / regime latents,
every participant reads every paragraph once with a question rotated so
each paragraph's three questions are all used, and answers are sampled by
:mod:`.responses` from the realized span dwell. The per-trial answer
presentation order is a fresh permutation, and ``chosen_position`` is the
presented position of the sampled answer type.

``write_dataset`` emits the three loader formats (manifest CSV, geometry
CSV, fixation-report TSV) plus ``latents.json``, the ground-truth sidecar.
The sidecar is for evaluation and debugging only; nothing in it may feed
a model.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from ..corpus import (
    PASSTHROUGH_FIXATION_COLUMNS,
    REQUIRED_FIXATION_COLUMNS,
    STARC_LABELS,
    QuestionItem,
    Regime,
    Trial,
    save_geometry,
    save_manifest,
)
from .corpus_gen import QUESTIONS_PER_PARAGRAPH, SynthCorpus, generate_corpus
from .responses import ResponseInputs, generate_responses
from .scanpaths import generate_scanpath, span_dwell_ms
from .spec import SynthSpec


@dataclass(frozen=True)
class ParticipantLatents:
    participant_id: str
    skill: float
    speed: float
    regime: Regime


@dataclass(frozen=True)
class TrialLatents:
    """Ground truth of one trial, kept out of every model input."""

    trial_id: str
    question_id: str
    comprehension: float
    span_dwell: float
    dwell_z: float
    p_correct: float
    label: str
    span_start: int
    span_end: int


@dataclass(frozen=True)
class SynthDataset:
    spec: SynthSpec
    corpus: SynthCorpus
    trials: tuple[Trial, ...]
    participants: Mapping[str, ParticipantLatents]
    trial_latents: Mapping[str, TrialLatents]


def generate_participants(spec: SynthSpec) -> dict[str, ParticipantLatents]:
    rng = np.random.default_rng([spec.seed, 0xBEE])
    n = spec.n_participants
    skills = rng.normal(0.0, spec.skill_sd, n)
    speeds = rng.normal(0.0, spec.speed_sd, n)
    order = rng.permutation(n)
    n_hunting = int(round(spec.hunting_fraction * n))
    hunting = set(order[:n_hunting].tolist())
    out = {}
    for i in range(n):
        pid = f"s{i:02d}"
        out[pid] = ParticipantLatents(
            participant_id=pid,
            skill=float(skills[i]),
            speed=float(speeds[i]),
            regime=Regime.HUNTING if i in hunting else Regime.GATHERING,
        )
    return out


def generate_dataset(spec: SynthSpec) -> SynthDataset:
    """Simulate the whole experiment for ``spec``, deterministically."""

    corpus = generate_corpus(spec)
    participants = generate_participants(spec)

    drafts = []
    trial_index = 0
    for s_i, pid in enumerate(sorted(participants)):
        person = participants[pid]
        for p_i, paragraph in enumerate(corpus.paragraphs):
            q_i = (s_i + p_i) % QUESTIONS_PER_PARAGRAPH
            item = corpus.questions[paragraph.paragraph_id][q_i]
            span = corpus.spans[item.question_id]
            trial_id = f"{pid}_{paragraph.paragraph_id}_q{q_i}"
            rng = np.random.default_rng([spec.seed, 0x5CA9, trial_index])
            positions = rng.permutation(4)
            mapping = {
                pos + 1: STARC_LABELS[int(lab)]
                for pos, lab in enumerate(positions)
            }
            comprehension = float(rng.normal())
            scanpath = generate_scanpath(
                trial_id=trial_id,
                paragraph=paragraph,
                span=span,
                regime=person.regime,
                comprehension=comprehension,
                speed=person.speed,
                spec=spec,
                rng=rng,
            )
            drafts.append(
                {
                    "trial_id": trial_id,
                    "person": person,
                    "paragraph": paragraph,
                    "item": item,
                    "span": span,
                    "mapping": mapping,
                    "comprehension": comprehension,
                    "scanpath": scanpath,
                    "span_dwell": span_dwell_ms(scanpath, span),
                }
            )
            trial_index += 1

    responses = generate_responses(
        [
            ResponseInputs(
                skill=d["person"].skill,
                difficulty=corpus.difficulties[d["item"].question_id],
                span_dwell=d["span_dwell"],
                regime=d["person"].regime,
            )
            for d in drafts
        ],
        spec,
        spec.seed,
    )

    trials = []
    latents = {}
    for d, draw in zip(drafts, responses):
        item: QuestionItem = d["item"]
        mapping = d["mapping"]
        position_of = {label: pos for pos, label in mapping.items()}
        content = dict(zip(STARC_LABELS, item.answers))
        question = QuestionItem(
            question_id=item.question_id,
            text=item.text,
            answers=tuple(content[mapping[k]] for k in (1, 2, 3, 4)),
            starc_of_position=mapping,
        )
        trials.append(
            Trial(
                trial_id=d["trial_id"],
                participant_id=d["person"].participant_id,
                article_id=d["paragraph"].article_id,
                paragraph_id=d["paragraph"].paragraph_id,
                regime=d["person"].regime,
                question=question,
                chosen_position=position_of[draw.label],
                paragraph=d["paragraph"],
                scanpath=d["scanpath"],
            )
        )
        latents[d["trial_id"]] = TrialLatents(
            trial_id=d["trial_id"],
            question_id=item.question_id,
            comprehension=d["comprehension"],
            span_dwell=d["span_dwell"],
            dwell_z=draw.dwell_z,
            p_correct=draw.p_correct,
            label=draw.label,
            span_start=d["span"].start,
            span_end=d["span"].end,
        )

    return SynthDataset(
        spec=spec,
        corpus=corpus,
        trials=tuple(trials),
        participants=participants,
        trial_latents=latents,
    )


def write_dataset(dataset: SynthDataset, out_dir: str | Path) -> dict[str, Path]:
    """Emit manifest.csv, geometry.csv, fixations.tsv and latents.json."""

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.csv"
    geometry_path = out / "geometry.csv"
    fixation_path = out / "fixations.tsv"
    latents_path = out / "latents.json"

    save_manifest(dataset.trials, manifest_path)
    save_geometry(
        {p.paragraph_id: p.words for p in dataset.corpus.paragraphs},
        geometry_path,
    )

    with fixation_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter="\t")
        writer.writerow(
            REQUIRED_FIXATION_COLUMNS
            + ("TRIAL_DWELL_TIME",)
            + PASSTHROUGH_FIXATION_COLUMNS
        )
        for trial in dataset.trials:
            assert trial.scanpath is not None
            for f in trial.scanpath.fixations:
                writer.writerow(
                    [
                        trial.trial_id,
                        f.order_index + 1,
                        f.x,
                        f.y,
                        f.duration,
                        f.pupil,
                        trial.scanpath.trial_dwell_time,
                    ]
                    + [
                        f.extras.get(col, "")
                        for col in PASSTHROUGH_FIXATION_COLUMNS
                    ]
                )

    payload = {
        "spec": asdict(dataset.spec),
        "participants": {
            pid: {
                "skill": p.skill,
                "speed": p.speed,
                "regime": p.regime.value,
            }
            for pid, p in sorted(dataset.participants.items())
        },
        "trials": {
            tid: {
                "question_id": t.question_id,
                "comprehension": t.comprehension,
                "span_dwell": t.span_dwell,
                "dwell_z": t.dwell_z,
                "p_correct": t.p_correct,
                "label": t.label,
                "span": [t.span_start, t.span_end],
            }
            for tid, t in sorted(dataset.trial_latents.items())
        },
    }
    with latents_path.open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")

    return {
        "manifest": manifest_path,
        "geometry": geometry_path,
        "fixation_report": fixation_path,
        "latents": latents_path,
    }


def load_latents(path: str | Path) -> dict:
    """Read back the ground-truth sidecar written by :func:`write_dataset`."""

    with Path(path).open(encoding="utf-8") as fh:
        return json.load(fh)
