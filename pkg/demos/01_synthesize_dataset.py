"""Generate a small synthetic eye-tracking study and look at its artifacts.

The generator builds a full reading-comprehension experiment: a corpus of
paragraphs with three questions each, a panel of participants split between
ordinary reading (gathering) and question-first reading (hunting), one
scanpath per trial, and a response model whose correctness is causally
linked to how long the reader dwelt on the question's critical span.
Everything a model may legitimately see goes into three flat files; the
latent truth (comprehension draws, span positions, per-trial probabilities)
is written to a separate sidecar that stays out of the modeling path.
"""

import tempfile
from pathlib import Path

from gazecomp.corpus import load_dataset
from gazecomp.synth import SynthSpec, generate_dataset, load_latents, write_dataset

spec = SynthSpec(
    n_articles=3,
    paragraphs_per_article=2,
    n_participants=8,
    words_mean=40.0,
    words_sd=6.0,
    seed=11,
)
dataset = generate_dataset(spec)
print(f"trials generated: {len(dataset.trials)}")
print(f"participants:     {len(dataset.participants)}")
print(f"paragraphs:       {len(dataset.corpus.paragraphs)}")

# Each participant is assigned one regime for the whole session.
for p in dataset.participants[:4]:
    print(f"  {p.participant_id}: regime={p.regime.value} "
          f"skill={p.skill:+.2f} speed={p.speed:+.2f}")

out = Path(tempfile.mkdtemp()) / "study"
paths = write_dataset(dataset, out)
for name, path in paths.items():
    print(f"{name:>15}: {path}")

# The manifest carries one row per trial; the fixation report is a flat
# TSV in the style of an eyetracker's fixation-level export.
print("\nmanifest head:")
for line in paths["manifest"].read_text().splitlines()[:4]:
    print(" ", line[:110])
print("\nfixation report head:")
for line in paths["fixation_report"].read_text().splitlines()[:4]:
    print(" ", line[:110])

# Round trip: the loader reassembles trials, reassigning each fixation to
# a word box geometrically.
trials = load_dataset(paths["manifest"], paths["geometry"],
                      paths["fixation_report"])
t = trials[0]
print(f"\nfirst trial: {t.trial_id}")
print(f"  {t.paragraph.n_words} words, {len(t.scanpath.fixations)} fixations,"
      f" answered position {t.chosen_position}"
      f" ({t.question.starc_of_position[t.chosen_position]})")

# The latent sidecar records the planted truth for auditing.
latents = load_latents(paths["latents"])
row = latents["trials"][t.trial_id]
print(f"  latent: span=[{row['span_start']},{row['span_end']}) "
      f"p_correct={row['p_correct']:.3f} label={row['label']}")
