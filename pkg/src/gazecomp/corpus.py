"""Data model and ingestion for eye-tracking reading-comprehension trials.

A trial is one participant reading one paragraph under a reading regime
(information gathering vs. hunting), answering one 4-way multiple-choice
question. The on-disk corpus is three flat files: a trial manifest (CSV),
per-paragraph word geometry (CSV), and a fixation report (TSV). Loaders
validate aggressively and fail with the offending row; downstream feature
code may then assume the invariants hold.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Mapping, Optional, Sequence


class Regime(str, Enum):
    GATHERING = "gathering"
    HUNTING = "hunting"


#: Answer-type labels: A = correct, B = miscomprehension-consistent distractor,
#: C = plausible distractor grounded elsewhere in the text, D = unsupported.
STARC_LABELS = ("A", "B", "C", "D")

MANIFEST_COLUMNS = (
    "trial_id", "participant_id", "article_id", "paragraph_id", "question_id",
    "regime", "a1", "a2", "a3", "a4", "starc1", "starc2", "starc3", "starc4",
    "chosen_position",
)

GEOMETRY_COLUMNS = (
    "paragraph_id", "word_index", "surface", "line_index",
    "left", "top", "right", "bottom",
)

REQUIRED_FIXATION_COLUMNS = (
    "TRIAL_ID", "CURRENT_FIX_INDEX", "CURRENT_FIX_X", "CURRENT_FIX_Y",
    "CURRENT_FIX_DURATION", "CURRENT_FIX_PUPIL",
)

#: Kinematic columns copied verbatim onto fixations when the report has them.
PASSTHROUGH_FIXATION_COLUMNS = (
    "NEXT_FIX_ANGLE", "NEXT_FIX_DISTANCE", "PREVIOUS_FIX_ANGLE",
    "PREVIOUS_FIX_DISTANCE", "NEXT_SAC_AMPLITUDE", "NEXT_SAC_ANGLE",
    "NEXT_SAC_AVG_VELOCITY", "NEXT_SAC_DURATION", "NEXT_SAC_PEAK_VELOCITY",
)


class ManifestError(ValueError):
    """Malformed trial manifest; message names the offending row."""


class GeometryError(ValueError):
    """Malformed or inconsistent paragraph geometry."""


class FixationReportError(ValueError):
    """Malformed fixation report (schema, ordering, or value errors)."""


@dataclass(frozen=True)
class WordToken:
    """One word of a paragraph with its on-screen interest-area box.

    Boxes are half-open, ``[left, right) x [top, bottom)``: a fixation landing
    exactly on a shared right/bottom edge belongs to the next region.
    """

    index: int
    surface: str
    line_index: int
    left: float
    top: float
    right: float
    bottom: float

    def __post_init__(self) -> None:
        if not self.surface:
            raise GeometryError(f"word {self.index}: empty surface")
        if not (self.right > self.left and self.bottom > self.top):
            raise GeometryError(
                f"word {self.index} ({self.surface!r}): degenerate box "
                f"[{self.left},{self.right})x[{self.top},{self.bottom})"
            )

    def contains(self, x: float, y: float) -> bool:
        return self.left <= x < self.right and self.top <= y < self.bottom


@dataclass(frozen=True)
class ParagraphItem:
    """A paragraph laid out on screen as a sequence of word boxes."""

    article_id: str
    paragraph_id: str
    words: tuple[WordToken, ...]

    def __post_init__(self) -> None:
        if not self.words:
            raise GeometryError(f"paragraph {self.paragraph_id}: no words")
        for i, w in enumerate(self.words):
            if w.index != i:
                raise GeometryError(
                    f"paragraph {self.paragraph_id}: word indices not "
                    f"contiguous from 0 (saw {w.index} at position {i})"
                )
        lines = [w.line_index for w in self.words]
        if any(b < a for a, b in zip(lines, lines[1:])):
            raise GeometryError(
                f"paragraph {self.paragraph_id}: line_index decreases"
            )
        for a, b in zip(self.words, self.words[1:]):
            if b.line_index == a.line_index and b.left < a.right:
                raise GeometryError(
                    f"paragraph {self.paragraph_id}: boxes {a.index},{b.index} "
                    f"overlap on line {a.line_index}"
                )

    @property
    def full_text(self) -> str:
        return " ".join(w.surface for w in self.words)

    @property
    def n_words(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class QuestionItem:
    """A question with four answers in presented order.

    ``starc_of_position`` maps presented position (1..4) to the answer-type
    label of the answer shown there; the mapping is a bijection drawn per
    trial, so two trials sharing a question_id may carry different mappings.
    """

    question_id: str
    text: str
    answers: tuple[str, str, str, str]
    starc_of_position: Mapping[int, str]

    def __post_init__(self) -> None:
        if sorted(self.starc_of_position.keys()) != [1, 2, 3, 4]:
            raise ManifestError(
                f"question {self.question_id}: positions must be 1..4"
            )
        if sorted(self.starc_of_position.values()) != sorted(STARC_LABELS):
            raise ManifestError(
                f"question {self.question_id}: answer-type mapping must be a "
                f"bijection onto {STARC_LABELS}"
            )


@dataclass(frozen=True)
class Fixation:
    """One fixation. ``word_index`` is None until assigned (or out of box).

    ``extras`` holds kinematic report columns passed through verbatim.
    """

    order_index: int
    x: float
    y: float
    duration: float
    pupil: float
    word_index: Optional[int] = None
    extras: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise FixationReportError(
                f"fixation {self.order_index}: duration must be > 0, "
                f"got {self.duration}"
            )


@dataclass(frozen=True)
class Scanpath:
    """The fixation sequence of one trial.

    ``trial_dwell_time`` is the paragraph reading time (ms). It is not
    required to equal the sum of fixation durations (saccades intervene) but
    must cover the longest single fixation. ``px_per_degree`` converts pixel
    offsets to visual degrees when kinematics must be derived geometrically.
    """

    trial_id: str
    fixations: tuple[Fixation, ...]
    trial_dwell_time: float
    px_per_degree: Optional[tuple[float, float]] = (50.0, 50.0)

    def __post_init__(self) -> None:
        for i, f in enumerate(self.fixations):
            if f.order_index != i:
                raise FixationReportError(
                    f"trial {self.trial_id}: fixation order not contiguous "
                    f"from 0 (saw {f.order_index} at position {i})"
                )
        if self.fixations:
            longest = max(f.duration for f in self.fixations)
            if self.trial_dwell_time < longest:
                raise FixationReportError(
                    f"trial {self.trial_id}: trial_dwell_time "
                    f"{self.trial_dwell_time} < longest fixation {longest}"
                )
        if self.px_per_degree is not None and not (
            self.px_per_degree[0] > 0 and self.px_per_degree[1] > 0
        ):
            raise FixationReportError(
                f"trial {self.trial_id}: px_per_degree must be positive"
            )

    @property
    def n_fixations(self) -> int:
        return len(self.fixations)


@dataclass(frozen=True)
class Trial:
    """One (participant, paragraph, question) reading trial.

    ``paragraph`` and ``scanpath`` are None straight out of the manifest and
    are attached by :func:`resolve_trials`.
    """

    trial_id: str
    participant_id: str
    article_id: str
    paragraph_id: str
    regime: Regime
    question: QuestionItem
    chosen_position: int
    paragraph: Optional[ParagraphItem] = None
    scanpath: Optional[Scanpath] = None

    def __post_init__(self) -> None:
        if self.chosen_position not in (1, 2, 3, 4):
            raise ManifestError(
                f"trial {self.trial_id}: chosen_position must be in 1..4"
            )
        if self.paragraph is not None and (
            self.paragraph.paragraph_id != self.paragraph_id
            or self.paragraph.article_id != self.article_id
        ):
            raise ManifestError(
                f"trial {self.trial_id}: attached paragraph "
                f"{self.paragraph.paragraph_id} does not match manifest ids"
            )
        if self.scanpath is not None and self.scanpath.trial_id != self.trial_id:
            raise ManifestError(
                f"trial {self.trial_id}: attached scanpath belongs to "
                f"{self.scanpath.trial_id}"
            )

    @property
    def starc_label(self) -> str:
        """Answer-type label of the chosen answer."""
        return self.question.starc_of_position[self.chosen_position]

    @property
    def binary_label(self) -> int:
        """1 iff the correct answer was chosen."""
        return int(self.starc_label == "A")


def load_manifest(path: str | Path) -> list[Trial]:
    """Load a trial manifest CSV. Paragraphs and scanpaths stay unresolved."""
    path = Path(path)
    trials: list[Trial] = []
    seen: set[str] = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != MANIFEST_COLUMNS:
            raise ManifestError(
                f"{path}: bad header {reader.fieldnames}, "
                f"expected {list(MANIFEST_COLUMNS)}"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                regime = Regime(row["regime"])
            except ValueError:
                raise ManifestError(
                    f"{path}:{lineno}: unknown regime {row['regime']!r}"
                ) from None
            try:
                chosen = int(row["chosen_position"])
            except ValueError:
                raise ManifestError(
                    f"{path}:{lineno}: chosen_position not an integer"
                ) from None
            starc_map = {k: row[f"starc{k}"] for k in (1, 2, 3, 4)}
            question = QuestionItem(
                question_id=row["question_id"],
                text=row["question_id"],
                answers=(row["a1"], row["a2"], row["a3"], row["a4"]),
                starc_of_position=starc_map,
            )
            trial = Trial(
                trial_id=row["trial_id"],
                participant_id=row["participant_id"],
                article_id=row["article_id"],
                paragraph_id=row["paragraph_id"],
                regime=regime,
                question=question,
                chosen_position=chosen,
            )
            if trial.trial_id in seen:
                raise ManifestError(
                    f"{path}:{lineno}: duplicate trial_id {trial.trial_id!r}"
                )
            seen.add(trial.trial_id)
            trials.append(trial)
    if not trials:
        raise ManifestError(f"{path}: no trials")
    return trials


def save_manifest(trials: Sequence[Trial], path: str | Path) -> None:
    """Write trials back to manifest CSV (round-trips with load_manifest)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_COLUMNS)
        for t in trials:
            writer.writerow([
                t.trial_id, t.participant_id, t.article_id, t.paragraph_id,
                t.question.question_id, t.regime.value,
                *t.question.answers,
                *(t.question.starc_of_position[k] for k in (1, 2, 3, 4)),
                t.chosen_position,
            ])


def load_geometry(path: str | Path) -> dict[str, tuple[WordToken, ...]]:
    """Load word boxes per paragraph from a geometry CSV."""
    path = Path(path)
    rows_by_pid: dict[str, list[WordToken]] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != GEOMETRY_COLUMNS:
            raise GeometryError(
                f"{path}: bad header {reader.fieldnames}, "
                f"expected {list(GEOMETRY_COLUMNS)}"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                word = WordToken(
                    index=int(row["word_index"]),
                    surface=row["surface"],
                    line_index=int(row["line_index"]),
                    left=float(row["left"]),
                    top=float(row["top"]),
                    right=float(row["right"]),
                    bottom=float(row["bottom"]),
                )
            except (ValueError, GeometryError) as exc:
                raise GeometryError(f"{path}:{lineno}: {exc}") from None
            rows_by_pid.setdefault(row["paragraph_id"], []).append(word)
    return {pid: tuple(words) for pid, words in rows_by_pid.items()}


def save_geometry(
    paragraphs: Mapping[str, Sequence[WordToken]], path: str | Path
) -> None:
    """Write paragraph word boxes to a geometry CSV."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(GEOMETRY_COLUMNS)
        for pid in paragraphs:
            for w in paragraphs[pid]:
                writer.writerow([
                    pid, w.index, w.surface, w.line_index,
                    w.left, w.top, w.right, w.bottom,
                ])


def parse_fixation_report(
    path: str | Path,
    px_per_degree: tuple[float, float] = (50.0, 50.0),
) -> dict[str, Scanpath]:
    """Parse a fixation report TSV into one Scanpath per trial.

    Fixations must appear in strictly increasing CURRENT_FIX_INDEX order
    within a trial. TRIAL_DWELL_TIME is honored when the report carries it;
    otherwise dwell time falls back to the sum of fixation durations plus
    whatever next-saccade durations are present.
    """
    path = Path(path)
    per_trial: dict[str, list[Fixation]] = {}
    dwell: dict[str, float] = {}
    last_index: dict[str, int] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh, delimiter="\t")
        names = reader.fieldnames or []
        missing = [c for c in REQUIRED_FIXATION_COLUMNS if c not in names]
        if missing:
            raise FixationReportError(f"{path}: missing columns {missing}")
        has_dwell_col = "TRIAL_DWELL_TIME" in names
        passthrough = [c for c in PASSTHROUGH_FIXATION_COLUMNS if c in names]
        for lineno, row in enumerate(reader, start=2):
            tid = row["TRIAL_ID"]
            try:
                fix_index = int(float(row["CURRENT_FIX_INDEX"]))
                x = float(row["CURRENT_FIX_X"])
                y = float(row["CURRENT_FIX_Y"])
                duration = float(row["CURRENT_FIX_DURATION"])
                pupil = float(row["CURRENT_FIX_PUPIL"])
            except ValueError as exc:
                raise FixationReportError(f"{path}:{lineno}: {exc}") from None
            if tid in last_index and fix_index <= last_index[tid]:
                raise FixationReportError(
                    f"{path}:{lineno}: trial {tid}: CURRENT_FIX_INDEX "
                    f"{fix_index} not increasing (previous {last_index[tid]})"
                )
            last_index[tid] = fix_index
            extras = {}
            for c in passthrough:
                raw = row[c]
                if raw not in ("", ".", "NA"):
                    extras[c] = float(raw)
            fixes = per_trial.setdefault(tid, [])
            try:
                fixes.append(Fixation(
                    order_index=len(fixes), x=x, y=y,
                    duration=duration, pupil=pupil, extras=extras,
                ))
            except FixationReportError as exc:
                raise FixationReportError(f"{path}:{lineno}: {exc}") from None
            if has_dwell_col and row["TRIAL_DWELL_TIME"] not in ("", ".", "NA"):
                rt = float(row["TRIAL_DWELL_TIME"])
                if tid in dwell and dwell[tid] != rt:
                    raise FixationReportError(
                        f"{path}:{lineno}: trial {tid}: inconsistent "
                        f"TRIAL_DWELL_TIME ({dwell[tid]} vs {rt})"
                    )
                dwell[tid] = rt
    scanpaths = {}
    for tid, fixes in per_trial.items():
        if tid in dwell:
            rt = dwell[tid]
        else:
            rt = sum(f.duration for f in fixes)
            rt += sum(f.extras.get("NEXT_SAC_DURATION", 0.0) for f in fixes)
        scanpaths[tid] = Scanpath(
            trial_id=tid, fixations=tuple(fixes),
            trial_dwell_time=rt, px_per_degree=px_per_degree,
        )
    return scanpaths


def assign_fixations_to_words(
    scanpath: Scanpath, paragraph: ParagraphItem
) -> Scanpath:
    """Return a copy of the scanpath with word_index set by box containment.

    Boxes are half-open, so a fixation on a shared edge lands in the
    later-index word; fixations outside every box get word_index None.
    Fixation count, order, coordinates and durations are never altered, and
    re-running the assignment is a no-op.
    """
    assigned = []
    for f in scanpath.fixations:
        word_index = None
        for w in paragraph.words:
            if w.contains(f.x, f.y):
                word_index = w.index
                break
        assigned.append(replace(f, word_index=word_index))
    return replace(scanpath, fixations=tuple(assigned))


def resolve_trials(
    trials: Sequence[Trial],
    geometry: Mapping[str, Sequence[WordToken]],
    scanpaths: Mapping[str, Scanpath],
    assign_words: bool = True,
) -> list[Trial]:
    """Attach paragraphs and scanpaths to manifest trials.

    Every trial must find its paragraph geometry and its scanpath; word
    assignment runs unless the caller already did it.
    """
    paragraph_cache: dict[tuple[str, str], ParagraphItem] = {}
    resolved = []
    for t in trials:
        if t.paragraph_id not in geometry:
            raise GeometryError(
                f"trial {t.trial_id}: no geometry for paragraph "
                f"{t.paragraph_id!r}"
            )
        key = (t.article_id, t.paragraph_id)
        if key not in paragraph_cache:
            paragraph_cache[key] = ParagraphItem(
                article_id=t.article_id,
                paragraph_id=t.paragraph_id,
                words=tuple(geometry[t.paragraph_id]),
            )
        paragraph = paragraph_cache[key]
        if t.trial_id not in scanpaths:
            raise FixationReportError(
                f"trial {t.trial_id}: no scanpath in fixation report"
            )
        sp = scanpaths[t.trial_id]
        if assign_words:
            sp = assign_fixations_to_words(sp, paragraph)
        resolved.append(replace(t, paragraph=paragraph, scanpath=sp))
    return resolved


def load_dataset(
    manifest_path: str | Path,
    geometry_path: str | Path,
    fixation_report_path: str | Path,
    px_per_degree: tuple[float, float] = (50.0, 50.0),
) -> list[Trial]:
    """One-call corpus load: manifest + geometry + fixation report."""
    trials = load_manifest(manifest_path)
    geometry = load_geometry(geometry_path)
    scanpaths = parse_fixation_report(fixation_report_path, px_per_degree)
    return resolve_trials(trials, geometry, scanpaths)
