"""Walk through word-level feature extraction on a hand-built scanpath.

A reader moves 0 -> 1 -> 2 -> 1 -> 3: forward reading with one regression
back to word 1. The extractor turns that into per-word interest-area
measures (dwell, runs, regressions, skips) plus a linguistic block
(length, pseudo frequency, pseudo surprisal).
"""

import numpy as np

from gazecomp.corpus import Fixation, ParagraphItem, Scanpath, WordToken
from gazecomp.features import (WORD_EYE_FEATURES, default_providers,
                               linguistic_features, word_level_features)

surfaces = ["the", "weather", "station", "recorded", "rain"]
words = []
for i, s in enumerate(surfaces):
    left = 100.0 + 80.0 * i
    words.append(WordToken(index=i, surface=s, line_index=0,
                           left=left, top=200.0,
                           right=left + 80.0, bottom=240.0))
para = ParagraphItem(article_id="a0", paragraph_id="p0", words=tuple(words))

sequence = [0, 1, 2, 1, 3]
durations = [180.0, 220.0, 260.0, 150.0, 200.0]
fixations = tuple(
    Fixation(order_index=i, x=words[w].left + 20.0, y=220.0,
             duration=d, pupil=900.0, word_index=w)
    for i, (w, d) in enumerate(zip(sequence, durations))
)
scanpath = Scanpath(trial_id="demo", fixations=fixations,
                    trial_dwell_time=sum(durations) + 4 * 25.0,
                    px_per_degree=(50.0, 50.0))

ling = linguistic_features(para, default_providers())
X = word_level_features(scanpath, para, ling)
print(f"feature matrix: {X.shape[0]} words x {X.shape[1]} features\n")

col = {name: j for j, name in enumerate(WORD_EYE_FEATURES)}
show = ["IA_DWELL_TIME", "IA_FIXATION_COUNT", "IA_RUN_COUNT",
        "IA_REGRESSION_IN_COUNT", "IA_REGRESSION_OUT_COUNT", "IA_SKIP",
        "total_skip"]
header = f"{'word':>10} " + " ".join(f"{n[3:] or n:>18}" for n in show)
print(header)
for i, s in enumerate(surfaces):
    row = " ".join(f"{X[i, col[n]]:>18.1f}" for n in show)
    print(f"{s:>10} {row}")

# Word 1 was re-entered from the right: a regression in, two separate runs.
assert X[1, col["IA_RUN_COUNT"]] == 2.0
assert X[1, col["IA_REGRESSION_IN_COUNT"]] == 1.0
# Word 4 was never fixated at all.
assert X[4, col["total_skip"]] == 1.0

# The linguistic block sits after the eye block, one row per word.
print("\nlinguistic block (length, log freq, surprisal ...):")
print(np.round(ling[:2], 3))
