"""Cross-validation split protocol over participant x article batches.

Trials live on a participant-by-paragraph grid inside a batch (a fixed set
of articles read by a fixed set of participants under one regime). Each
fold holds out one article chunk and one participant chunk, yielding three
evaluation regimes:

* new participant: held participant, seen article
* new item: seen participant, held article
* new both: held participant, held article

Validation is carved from the retained grid at the trial level, stratified
by the answer-type label of the chosen answer; train is the remainder.
Articles are atomic with respect to test: every trial of a held-out article
is in a test portion. Across the fold cycle, every article and every
participant is held out exactly once.
"""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .corpus import Regime, Trial
from .errors import ConfigurationError, SplitError

PORTIONS = ("train", "val", "test_new_participant", "test_new_item", "test_both")
TEST_PORTIONS = ("test_new_participant", "test_new_item", "test_both")

#: Target portion fractions of a batch (train/val carve from the retained grid).
TARGET_VAL_FRACTION = 0.17


@dataclass(frozen=True)
class BatchSpec:
    """One batch: the participants and articles whose grid the fold cuts."""

    batch_id: str
    participants: tuple[str, ...]
    articles: tuple[str, ...]
    trial_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.participants or not self.articles:
            raise SplitError(f"batch {self.batch_id}: empty axis")


@dataclass(frozen=True)
class SplitPlan:
    """Assignment of every batch trial to a portion, for one fold."""

    fold_id: int
    regime: Optional[Regime]
    assignment: Mapping[str, str]  # trial_id -> portion
    held_participants: tuple[str, ...]
    held_articles: tuple[str, ...]

    def portion_ids(self, portion: str) -> list[str]:
        return sorted(t for t, p in self.assignment.items() if p == portion)

    def counts(self) -> Counter:
        return Counter(self.assignment.values())


@dataclass
class SplitReport:
    """verify_split output: fatal violations and advisory warnings."""

    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    portion_fractions: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations


def derive_batches(trials: Sequence[Trial]) -> list[BatchSpec]:
    """Group trials into batches via participant-article co-occurrence.

    Batches are the connected components of the bipartite participant/article
    graph: participants reading the same article pool form one batch.
    """
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for t in trials:
        p, a = f"p:{t.participant_id}", f"a:{t.article_id}"
        parent.setdefault(p, p)
        parent.setdefault(a, a)
        union(p, a)

    groups: dict[str, dict[str, set]] = defaultdict(
        lambda: {"participants": set(), "articles": set(), "trials": set()}
    )
    for t in trials:
        root = find(f"p:{t.participant_id}")
        g = groups[root]
        g["participants"].add(t.participant_id)
        g["articles"].add(t.article_id)
        g["trials"].add(t.trial_id)
    batches = []
    for i, root in enumerate(sorted(groups)):
        g = groups[root]
        batches.append(BatchSpec(
            batch_id=f"batch{i}",
            participants=tuple(sorted(g["participants"])),
            articles=tuple(sorted(g["articles"])),
            trial_ids=tuple(sorted(g["trials"])),
        ))
    return batches


def _chunks(items: Sequence[str], n_folds: int) -> list[list[str]]:
    """Split into n_folds contiguous chunks, remainder spread over the first."""
    base, extra = divmod(len(items), n_folds)
    out, pos = [], 0
    for k in range(n_folds):
        size = base + (1 if k < extra else 0)
        out.append(list(items[pos:pos + size]))
        pos += size
    return out


def make_folds(
    trials: Sequence[Trial],
    batch: BatchSpec,
    n_folds: int = 10,
    seed: int = 0,
    regime: Optional[Regime] = None,
) -> list[SplitPlan]:
    """Build the full fold cycle for one batch.

    Articles rotate in sorted order (fold k holds chunk k); participants are
    shuffled once by seed and then chunked, so the pairing of participant
    chunks with article chunks is seed-dependent but each axis is held out
    exactly once. Gathering and Hunting never share a plan: pass the regime
    to make plans over that regime's trials only (article chunking is
    regime-independent, keeping item hold-outs aligned across regimes).
    """
    if n_folds < 2:
        raise ConfigurationError(f"n_folds must be >= 2, got {n_folds}")
    if n_folds > len(batch.articles) or n_folds > len(batch.participants):
        raise ConfigurationError(
            f"n_folds {n_folds} exceeds batch axes "
            f"({len(batch.participants)} participants x "
            f"{len(batch.articles)} articles)"
        )
    by_id = {t.trial_id: t for t in trials}
    pool = [
        by_id[tid] for tid in batch.trial_ids
        if regime is None or by_id[tid].regime == regime
    ]
    if not pool:
        raise SplitError(
            f"batch {batch.batch_id}: no trials for regime {regime}"
        )

    article_chunks = _chunks(sorted(batch.articles), n_folds)
    rng = np.random.default_rng([seed, 0xA11CE])
    participants = list(batch.participants)
    rng.shuffle(participants)
    participant_chunks = _chunks(participants, n_folds)

    plans = []
    for k in range(n_folds):
        held_a = set(article_chunks[k])
        held_p = set(participant_chunks[k])
        assignment: dict[str, str] = {}
        retained: list[Trial] = []
        for t in pool:
            pa, pp = t.article_id in held_a, t.participant_id in held_p
            if pa and pp:
                assignment[t.trial_id] = "test_both"
            elif pa:
                assignment[t.trial_id] = "test_new_item"
            elif pp:
                assignment[t.trial_id] = "test_new_participant"
            else:
                retained.append(t)
        n_val = int(round(TARGET_VAL_FRACTION * len(pool)))
        val_ids = _stratified_draw(
            retained, n_val, np.random.default_rng([seed, k, 0x5A17])
        )
        for t in retained:
            assignment[t.trial_id] = "val" if t.trial_id in val_ids else "train"
        plans.append(SplitPlan(
            fold_id=k,
            regime=regime,
            assignment=assignment,
            held_participants=tuple(sorted(held_p)),
            held_articles=tuple(sorted(held_a)),
        ))
    return plans


def _stratified_draw(
    retained: Sequence[Trial], n_val: int, rng: np.random.Generator
) -> set[str]:
    """Draw ~n_val trials stratified by answer-type label of the chosen answer."""
    if n_val >= len(retained):
        raise SplitError(
            f"validation target {n_val} >= retained grid {len(retained)}"
        )
    by_class: dict[str, list[str]] = defaultdict(list)
    for t in retained:
        by_class[t.starc_label].append(t.trial_id)
    total = len(retained)
    # Largest-remainder allocation keeps the class histogram of the carve
    # close to the retained grid's.
    quotas, remainders = {}, {}
    for label, ids in sorted(by_class.items()):
        exact = n_val * len(ids) / total
        quotas[label] = int(exact)
        remainders[label] = exact - int(exact)
    short = n_val - sum(quotas.values())
    for label in sorted(remainders, key=lambda L: (-remainders[L], L))[:short]:
        quotas[label] += 1
    picked: set[str] = set()
    for label, ids in sorted(by_class.items()):
        take = min(quotas[label], len(ids))
        chosen = rng.choice(np.array(sorted(ids)), size=take, replace=False)
        picked.update(str(c) for c in chosen)
    return picked


def make_full_split(
    trials: Sequence[Trial],
    n_folds: int = 10,
    seed: int = 0,
    regime: Optional[Regime] = None,
) -> list[SplitPlan]:
    """Fold plans over all batches, unioned per fold index.

    With a regime given, batches are derived from that regime's trials only,
    so participant chunks are regime-local while article chunks (sorted,
    deterministic) stay aligned across regimes.
    """
    if regime is not None:
        trials = [t for t in trials if t.regime == regime]
        if not trials:
            raise SplitError(f"no trials for regime {regime}")
    batches = derive_batches(trials)
    per_batch = [make_folds(trials, b, n_folds, seed, regime) for b in batches]
    merged = []
    for k in range(n_folds):
        assignment: dict[str, str] = {}
        held_p: list[str] = []
        held_a: list[str] = []
        for plans in per_batch:
            assignment.update(plans[k].assignment)
            held_p.extend(plans[k].held_participants)
            held_a.extend(plans[k].held_articles)
        merged.append(SplitPlan(
            fold_id=k,
            regime=regime,
            assignment=assignment,
            held_participants=tuple(sorted(held_p)),
            held_articles=tuple(sorted(held_a)),
        ))
    return merged


def verify_split(
    plan: SplitPlan, trials: Sequence[Trial], tolerance_pp: float = 2.0
) -> SplitReport:
    """Check partition, hold-out consistency, and portion proportions.

    Structural violations (unknown trials, leaked hold-outs, broken article
    atomicity) are fatal; distribution skews are warnings. Target fractions:
    64/17/9/9/1 train/val/new-participant/new-item/both within
    ``tolerance_pp`` percentage points.
    """
    report = SplitReport()
    by_id = {t.trial_id: t for t in trials}
    pool = [t for t in trials if t.trial_id in plan.assignment
            and (plan.regime is None or t.regime == plan.regime)]
    if set(plan.assignment) - {t.trial_id for t in pool}:
        missing = sorted(set(plan.assignment) - {t.trial_id for t in pool})
        report.violations.append(
            f"plan assigns unknown or out-of-regime trials: {missing[:5]}..."
            if len(missing) > 5 else
            f"plan assigns unknown or out-of-regime trials: {missing}"
        )
        return report
    for t in pool:
        portion = plan.assignment[t.trial_id]
        if portion not in PORTIONS:
            report.violations.append(
                f"trial {t.trial_id}: unknown portion {portion!r}"
            )
            continue
        held_p = t.participant_id in plan.held_participants
        held_a = t.article_id in plan.held_articles
        expected = (
            "test_both" if held_p and held_a
            else "test_new_item" if held_a
            else "test_new_participant" if held_p
            else None
        )
        if expected is not None and portion != expected:
            report.violations.append(
                f"trial {t.trial_id}: hold-out status implies {expected}, "
                f"assigned {portion}"
            )
        if expected is None and portion not in ("train", "val"):
            report.violations.append(
                f"trial {t.trial_id}: retained trial assigned {portion}"
            )

    n = len(pool)
    targets = {
        "train": 100.0 - TARGET_VAL_FRACTION * 100 - 19.0,
        "val": TARGET_VAL_FRACTION * 100,
        "test_new_participant": 9.0,
        "test_new_item": 9.0,
        "test_both": 1.0,
    }
    counts = Counter(plan.assignment[t.trial_id] for t in pool)
    for portion, target in targets.items():
        frac = 100.0 * counts.get(portion, 0) / n if n else 0.0
        report.portion_fractions[portion] = frac
        if abs(frac - target) > tolerance_pp:
            report.warnings.append(
                f"portion {portion}: {frac:.1f}% vs target {target:.1f}% "
                f"(> {tolerance_pp}pp off)"
            )

    def histogram(portion: str) -> dict[str, float]:
        ids = [t for t in pool if plan.assignment[t.trial_id] == portion]
        if not ids:
            return {}
        c = Counter(t.starc_label for t in ids)
        return {k: 100.0 * v / len(ids) for k, v in c.items()}

    train_h, val_h = histogram("train"), histogram("val")
    for label in sorted(set(train_h) | set(val_h)):
        gap = abs(train_h.get(label, 0.0) - val_h.get(label, 0.0))
        if gap > 10.0:
            report.warnings.append(
                f"answer type {label}: train/val histogram gap {gap:.1f}pp"
            )
    return report


def save_split_plans(plans: Sequence[SplitPlan], path: str | Path) -> None:
    """Persist fold plans as CSV (fold_id, trial_id, portion)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fold_id", "trial_id", "portion"])
        for plan in plans:
            for tid in sorted(plan.assignment):
                writer.writerow([plan.fold_id, tid, plan.assignment[tid]])


def load_split_plans(
    path: str | Path, trials: Optional[Sequence[Trial]] = None
) -> list[SplitPlan]:
    """Load fold plans; hold-out sets are reconstructed from trials if given."""
    rows: dict[int, dict[str, str]] = defaultdict(dict)
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != ("fold_id", "trial_id", "portion"):
            raise SplitError(f"{path}: bad header {reader.fieldnames}")
        for row in reader:
            rows[int(row["fold_id"])][row["trial_id"]] = row["portion"]
    by_id = {t.trial_id: t for t in trials} if trials else {}
    plans = []
    for fold_id in sorted(rows):
        assignment = rows[fold_id]
        held_p: set[str] = set()
        held_a: set[str] = set()
        for tid, portion in assignment.items():
            t = by_id.get(tid)
            if t is None:
                continue
            if portion in ("test_new_participant", "test_both"):
                held_p.add(t.participant_id)
            if portion in ("test_new_item", "test_both"):
                held_a.add(t.article_id)
        plans.append(SplitPlan(
            fold_id=fold_id, regime=None, assignment=assignment,
            held_participants=tuple(sorted(held_p)),
            held_articles=tuple(sorted(held_a)),
        ))
    return plans
