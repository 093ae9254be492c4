"""gazecomp: single-trial reading comprehension prediction from eye movements.

A pipeline from raw fixation reports over paragraph reading to per-trial
comprehension predictions: corpus ingestion, gaze/linguistic feature
extraction, participant- and item-disjoint split protocol, gaze-text fusion
models with baselines, a training/evaluation harness, and a synthetic data
generator with a plantable gaze-comprehension link for end-to-end checks.
"""

from . import corpus, features, harness, models, splits, synth

__version__ = "0.1.0"

__all__ = ["corpus", "features", "harness", "models", "splits", "synth"]
