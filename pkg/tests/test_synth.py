"""Tests for the synthetic corpus, scanpath, and response generators."""

import dataclasses
import math

import numpy as np
import pytest
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import balanced_accuracy_score

from gazecomp.corpus import Regime, assign_fixations_to_words, load_dataset
from gazecomp.errors import ConfigurationError
from gazecomp.synth import (
    CriticalSpan,
    SynthSpec,
    confusion_weights,
    generate_corpus,
    generate_dataset,
    generate_responses,
    generate_scanpath,
    load_latents,
    pseudo_surprisal,
    span_dwell_ms,
    write_dataset,
    ResponseInputs,
)

SMALL = SynthSpec(n_articles=3, paragraphs_per_article=2, n_participants=8)


@pytest.fixture(scope="module")
def default_ds():
    return generate_dataset(SynthSpec())


@pytest.fixture(scope="module")
def zero_gamma_ds():
    return generate_dataset(SynthSpec(gamma=0.0))


@pytest.fixture(scope="module")
def small_ds():
    return generate_dataset(SMALL)


def binary_labels(ds):
    return np.array([t.binary_label for t in ds.trials])


def span_dwells(ds):
    return np.array([ds.trial_latents[t.trial_id].span_dwell for t in ds.trials])


class TestSynthSpec:
    def test_defaults_valid(self):
        SynthSpec()

    @pytest.mark.parametrize(
        "field, value",
        [
            ("n_articles", 0),
            ("paragraphs_per_article", 0),
            ("n_participants", 0),
            ("max_fixations", 0),
            ("words_mean", 0.0),
            ("skill_sd", 0.0),
            ("difficulty_sd", -1.0),
            ("duration_sigma", 0.0),
            ("gamma", -0.1),
            ("hunting_fraction", 1.5),
            ("difficulty_text_rho", -0.2),
            ("stray_rate", 2.0),
            ("regression_prob", -0.01),
            ("saccade_ms", -1.0),
            ("hunting_span_boost", 0.0),
        ],
    )
    def test_invalid_field_rejected(self, field, value):
        with pytest.raises(ConfigurationError, match=field):
            dataclasses.replace(SynthSpec(), **{field: value})


class TestCriticalSpan:
    def test_bounds(self):
        span = CriticalSpan(start=3, end=8)
        assert span.length == 5
        assert span.contains(3) and span.contains(7)
        assert not span.contains(2) and not span.contains(8)

    @pytest.mark.parametrize("start, end", [(-1, 4), (4, 4), (5, 2)])
    def test_degenerate_rejected(self, start, end):
        with pytest.raises(ValueError):
            CriticalSpan(start=start, end=end)


class TestGenerateCorpus:
    def test_two_articles_three_paragraphs(self):
        corpus = generate_corpus(
            SynthSpec(n_articles=2, paragraphs_per_article=3)
        )
        assert len(corpus.paragraphs) == 6
        assert sum(len(qs) for qs in corpus.questions.values()) == 18

    def test_same_seed_identical(self):
        a = generate_corpus(SMALL)
        b = generate_corpus(SMALL)
        assert a.paragraphs == b.paragraphs
        assert a.questions == b.questions
        assert a.spans == b.spans
        assert a.difficulties == b.difficulties

    def test_different_seed_differs(self):
        a = generate_corpus(SMALL)
        b = generate_corpus(dataclasses.replace(SMALL, seed=1))
        assert a.paragraphs != b.paragraphs

    def test_boxes_ordered_and_disjoint_within_line(self):
        corpus = generate_corpus(SMALL)
        for paragraph in corpus.paragraphs:
            for a, b in zip(paragraph.words, paragraph.words[1:]):
                if a.line_index == b.line_index:
                    assert b.left >= a.right
                else:
                    assert b.line_index == a.line_index + 1

    def test_spans_inside_paragraphs(self):
        corpus = generate_corpus(SMALL)
        for pid, items in corpus.questions.items():
            n = corpus.paragraph_by_id(pid).n_words
            for item in items:
                span = corpus.spans[item.question_id]
                assert 0 <= span.start < span.end <= n
                assert 1 <= span.length <= 9

    def test_word_lengths_realistic(self):
        corpus = generate_corpus(SMALL)
        lengths = [
            len(w.surface) for p in corpus.paragraphs for w in p.words
        ]
        assert 3.0 <= np.mean(lengths) <= 9.0
        assert min(lengths) >= 2 and max(lengths) <= 12

    def test_question_ids_unique_with_identity_mapping(self):
        corpus = generate_corpus(SMALL)
        ids = [q.question_id for qs in corpus.questions.values() for q in qs]
        assert len(ids) == len(set(ids))
        for qs in corpus.questions.values():
            for q in qs:
                assert q.starc_of_position == {1: "A", 2: "B", 3: "C", 4: "D"}
                assert q.text == q.question_id

    def test_difficulty_tracks_off_span_surprisal(self):
        corpus = generate_corpus(SynthSpec(n_articles=6, paragraphs_per_article=4))
        hardness, diff = [], []
        for pid, items in corpus.questions.items():
            words = corpus.paragraph_by_id(pid).words
            for item in items:
                span = corpus.spans[item.question_id]
                off = [
                    pseudo_surprisal(w.surface)
                    for w in words
                    if not span.contains(w.index)
                ]
                hardness.append(np.mean(off))
                diff.append(corpus.difficulties[item.question_id])
        r = np.corrcoef(hardness, diff)[0, 1]
        assert r > 0.25
        assert 0.6 <= np.std(diff) <= 1.4


@pytest.fixture(scope="module")
def setting():
    corpus = generate_corpus(SMALL)
    paragraph = corpus.paragraphs[0]
    item = corpus.questions[paragraph.paragraph_id][0]
    return corpus, paragraph, corpus.spans[item.question_id]


class TestGenerateScanpath:
    def run(self, setting, spec, seed=0, regime=Regime.GATHERING, z=0.0):
        _, paragraph, span = setting
        return generate_scanpath(
            trial_id="t0",
            paragraph=paragraph,
            span=span,
            regime=regime,
            comprehension=z,
            speed=0.0,
            spec=spec,
            rng=np.random.default_rng(seed),
        )

    def test_deterministic_given_rng_seed(self, setting):
        a = self.run(setting, SMALL, seed=5)
        b = self.run(setting, SMALL, seed=5)
        assert a == b
        assert a != self.run(setting, SMALL, seed=6)

    def test_skip_logit_minus_inf_fixates_every_word(self, setting):
        spec = dataclasses.replace(SMALL, skip_base=-math.inf, stray_rate=0.0)
        path = self.run(setting, spec)
        fixated = {f.word_index for f in path.fixations}
        assert fixated == set(range(setting[1].n_words))

    def test_first_pass_moves_left_to_right(self, setting):
        spec = dataclasses.replace(
            SMALL, stray_rate=0.0, regression_prob=0.0, refixation_prob=0.0
        )
        path = self.run(setting, spec)
        indices = [f.word_index for f in path.fixations]
        assert indices[0] == 0
        assert all(b > a for a, b in zip(indices, indices[1:]))

    def test_fixations_land_inside_their_word(self, setting):
        _, paragraph, _ = setting
        for seed in range(5):
            path = self.run(setting, SMALL, seed=seed)
            reassigned = assign_fixations_to_words(path, paragraph)
            assert [f.word_index for f in reassigned.fixations] == [
                f.word_index for f in path.fixations
            ]

    def test_strays_fall_outside_every_box(self, setting):
        _, paragraph, _ = setting
        spec = dataclasses.replace(SMALL, stray_rate=0.5)
        path = self.run(setting, spec)
        strays = [f for f in path.fixations if f.word_index is None]
        assert strays
        top = min(w.top for w in paragraph.words)
        for f in strays:
            assert f.y < top

    def test_durations_positive_and_dwell_covers_them(self, setting):
        path = self.run(setting, SMALL)
        assert all(f.duration > 0 for f in path.fixations)
        assert path.trial_dwell_time >= max(f.duration for f in path.fixations)
        assert path.trial_dwell_time >= sum(f.duration for f in path.fixations)

    def test_kinematics_emitted_consistently(self, setting):
        path = self.run(setting, SMALL)
        fixes = path.fixations
        assert "NEXT_FIX_ANGLE" not in fixes[-1].extras
        assert "PREVIOUS_FIX_ANGLE" not in fixes[0].extras
        ppd = path.px_per_degree
        for a, b in zip(fixes, fixes[1:]):
            dist = math.hypot((b.x - a.x) / ppd[0], (b.y - a.y) / ppd[1])
            assert a.extras["NEXT_FIX_DISTANCE"] == pytest.approx(dist, abs=1e-3)
            assert a.extras["NEXT_SAC_AMPLITUDE"] == a.extras["NEXT_FIX_DISTANCE"]
            assert b.extras["PREVIOUS_FIX_DISTANCE"] == a.extras["NEXT_FIX_DISTANCE"]
            assert a.extras["NEXT_SAC_DURATION"] > 0
            assert (
                a.extras["NEXT_SAC_PEAK_VELOCITY"]
                > a.extras["NEXT_SAC_AVG_VELOCITY"]
            )
        total = sum(f.duration for f in fixes) + sum(
            f.extras.get("NEXT_SAC_DURATION", 0.0) for f in fixes
        )
        assert path.trial_dwell_time == pytest.approx(total, abs=0.1)

    def test_fixation_cap(self, setting):
        spec = dataclasses.replace(SMALL, max_fixations=15)
        path = self.run(setting, spec)
        # the cap is checked per word; one word can add at most a handful
        # of fixations (refixation + regression + bounce) past it
        assert path.n_fixations <= 15 + 3

    def test_comprehension_latent_raises_span_dwell(self, setting):
        _, _, span = setting
        lo = [
            span_dwell_ms(self.run(setting, SMALL, seed=s, z=-2.0), span)
            for s in range(30)
        ]
        hi = [
            span_dwell_ms(self.run(setting, SMALL, seed=s, z=2.0), span)
            for s in range(30)
        ]
        assert np.mean(hi) > 1.5 * np.mean(lo)

    def test_hunting_skips_more_outside_span(self, setting):
        _, paragraph, span = setting
        def off_span_count(regime):
            total = 0
            for s in range(30):
                path = self.run(setting, SMALL, seed=s, regime=regime)
                total += sum(
                    1
                    for f in path.fixations
                    if f.word_index is not None
                    and not span.contains(f.word_index)
                )
            return total

        assert off_span_count(Regime.HUNTING) < 0.8 * off_span_count(
            Regime.GATHERING
        )


class TestHuntingDwellRatio:
    def test_span_dwell_ratio_near_two(self, zero_gamma_ds, default_ds):
        for ds in (zero_gamma_ds, default_ds):
            dwell = span_dwells(ds)
            hunting = np.array(
                [t.regime is Regime.HUNTING for t in ds.trials]
            )
            assert hunting.sum() >= 1000 and (~hunting).sum() >= 1000
            ratio = dwell[hunting].mean() / dwell[~hunting].mean()
            assert 1.8 <= ratio <= 2.2


class TestSeveredLink:
    """gamma = 0 must leave span dwell uninformative about the label."""

    @pytest.mark.parametrize("hunting_fraction", [0.0, 1.0])
    def test_single_regime_raw_dwell_independent(self, hunting_fraction):
        # many participants: with few, the sample correlation between the
        # skill and speed draws leaks a spurious dwell-label correlation
        spec = SynthSpec(
            n_articles=10,
            paragraphs_per_article=5,
            words_mean=60.0,
            words_sd=8.0,
            n_participants=120,
            gamma=0.0,
            hunting_fraction=hunting_fraction,
        )
        ds = generate_dataset(spec)
        labels = binary_labels(ds)
        dwell = span_dwells(ds)
        assert len(labels) >= 2000
        assert abs(np.corrcoef(dwell, labels)[0, 1]) < 0.05

    def test_mixed_regimes_normalized_dwell_independent(self, zero_gamma_ds):
        labels = binary_labels(zero_gamma_ds)
        dz = np.array(
            [
                zero_gamma_ds.trial_latents[t.trial_id].dwell_z
                for t in zero_gamma_ds.trials
            ]
        )
        assert len(labels) >= 2000
        assert abs(np.corrcoef(dz, labels)[0, 1]) < 0.05


class TestGenerateResponses:
    def test_infinite_skill_always_correct(self):
        rows = [
            ResponseInputs(
                skill=math.inf,
                difficulty=0.0,
                span_dwell=d,
                regime=Regime.GATHERING,
            )
            for d in np.linspace(100.0, 5000.0, 64)
        ]
        draws = generate_responses(rows, SynthSpec(), seed=7)
        assert all(d.label == "A" for d in draws)
        assert all(d.p_correct == 1.0 for d in draws)

    def test_hopeless_skill_spreads_errors_b_over_c_over_d(self):
        rows = [
            ResponseInputs(
                skill=-30.0,
                difficulty=30.0,
                span_dwell=500.0,
                regime=Regime.GATHERING,
            )
        ] * 3000
        draws = generate_responses(rows, SynthSpec(gamma=0.0), seed=3)
        counts = {k: 0 for k in "ABCD"}
        for d in draws:
            counts[d.label] += 1
        assert counts["A"] == 0
        assert counts["B"] > counts["C"] > counts["D"] > 0

    def test_confusion_weights_decrease_and_normalize(self):
        w = confusion_weights(2.0)
        assert w[0] > w[1] > w[2] > 0
        assert w.sum() == pytest.approx(1.0)
        flat = confusion_weights(1e9)
        assert np.allclose(flat, 1.0 / 3.0, atol=1e-6)

    def test_same_seed_same_draws(self):
        rows = [
            ResponseInputs(
                skill=0.0,
                difficulty=0.0,
                span_dwell=float(d),
                regime=Regime.HUNTING if d % 2 else Regime.GATHERING,
            )
            for d in range(200)
        ]
        a = generate_responses(rows, SynthSpec(), seed=11)
        b = generate_responses(rows, SynthSpec(), seed=11)
        assert a == b
        assert a != generate_responses(rows, SynthSpec(), seed=12)

    def test_empty_rows(self):
        assert generate_responses([], SynthSpec(), seed=0) == []


class TestCalibration:
    def test_marginal_correct_rate_in_bracket(self, default_ds):
        rate = binary_labels(default_ds).mean()
        assert 0.78 <= rate <= 0.90

    def test_hunting_regime_more_accurate(self, default_ds):
        labels = binary_labels(default_ds)
        hunting = np.array(
            [t.regime is Regime.HUNTING for t in default_ds.trials]
        )
        assert labels[hunting].mean() > labels[~hunting].mean() + 0.02

    def test_large_gamma_point_biserial(self):
        ds = generate_dataset(
            SynthSpec(gamma=4.0, n_articles=5, n_participants=40)
        )
        r = np.corrcoef(span_dwells(ds), binary_labels(ds))[0, 1]
        assert r > 0.3

    def test_dwell_probe_reaches_sixty_on_held_out_participants(
        self, default_ds
    ):
        labels = binary_labels(default_ds)
        dwell = np.log1p(span_dwells(default_ds)).reshape(-1, 1)
        pids = np.array([t.participant_id for t in default_ds.trials])
        held_out = np.isin(pids, sorted(set(pids))[:12])
        probe = LogisticRegression().fit(dwell[~held_out], labels[~held_out])
        score = balanced_accuracy_score(
            labels[held_out], probe.predict(dwell[held_out])
        )
        assert score * 100.0 >= 60.0


class TestGenerateDataset:
    def test_trial_grid(self, small_ds):
        n_paragraphs = SMALL.n_articles * SMALL.paragraphs_per_article
        assert len(small_ds.trials) == SMALL.n_participants * n_paragraphs
        seen = {
            (t.participant_id, t.paragraph_id) for t in small_ds.trials
        }
        assert len(seen) == len(small_ds.trials)

    def test_every_question_used(self, small_ds):
        used = {t.question.question_id for t in small_ds.trials}
        every = {
            q.question_id
            for qs in small_ds.corpus.questions.values()
            for q in qs
        }
        assert used == every

    def test_regime_assignment_between_participants(self, small_ds):
        per_participant = {}
        for t in small_ds.trials:
            per_participant.setdefault(t.participant_id, set()).add(t.regime)
        assert all(len(v) == 1 for v in per_participant.values())
        hunting = sum(
            1
            for p in small_ds.participants.values()
            if p.regime is Regime.HUNTING
        )
        assert hunting == round(SMALL.hunting_fraction * SMALL.n_participants)

    def test_presented_answers_permute_canonical_content(self, small_ds):
        for t in small_ds.trials:
            pid = t.paragraph_id
            canonical = next(
                q
                for q in small_ds.corpus.questions[pid]
                if q.question_id == t.question.question_id
            )
            assert sorted(t.question.answers) == sorted(canonical.answers)
            # chosen_position points at the sampled answer type
            lat = small_ds.trial_latents[t.trial_id]
            assert t.question.starc_of_position[t.chosen_position] == lat.label

    def test_mappings_vary_across_trials(self, small_ds):
        mappings = {
            tuple(sorted(t.question.starc_of_position.items()))
            for t in small_ds.trials
        }
        assert len(mappings) > 1

    def test_latents_align_with_trials(self, small_ds):
        assert set(small_ds.trial_latents) == {
            t.trial_id for t in small_ds.trials
        }
        for t in small_ds.trials:
            lat = small_ds.trial_latents[t.trial_id]
            span = small_ds.corpus.spans[lat.question_id]
            assert (lat.span_start, lat.span_end) == (span.start, span.end)
            assert lat.span_dwell == span_dwell_ms(t.scanpath, span)
            assert 0.0 <= lat.p_correct <= 1.0

    def test_pure_function_of_spec(self, small_ds):
        again = generate_dataset(SMALL)
        assert again.trials == small_ds.trials
        assert again.participants == small_ds.participants
        assert again.trial_latents == small_ds.trial_latents

    def test_fixation_counts_capped(self, small_ds):
        for t in small_ds.trials:
            assert t.scanpath.n_fixations <= SMALL.max_fixations + 3


class TestWriteDataset:
    def test_round_trip_through_loaders(self, small_ds, tmp_path):
        paths = write_dataset(small_ds, tmp_path)
        loaded = load_dataset(
            paths["manifest"], paths["geometry"], paths["fixation_report"]
        )
        by_id = {t.trial_id: t for t in loaded}
        assert set(by_id) == {t.trial_id for t in small_ds.trials}
        for t in small_ds.trials:
            got = by_id[t.trial_id]
            assert got.question == t.question
            assert got.chosen_position == t.chosen_position
            assert got.regime == t.regime
            assert got.paragraph == t.paragraph
            assert got.scanpath == t.scanpath

    def test_latent_sidecar_round_trip(self, small_ds, tmp_path):
        paths = write_dataset(small_ds, tmp_path)
        payload = load_latents(paths["latents"])
        assert payload["spec"]["gamma"] == SMALL.gamma
        assert set(payload["trials"]) == {t.trial_id for t in small_ds.trials}
        for t in small_ds.trials:
            entry = payload["trials"][t.trial_id]
            assert entry["label"] == t.starc_label
            assert entry["span"] == [
                small_ds.trial_latents[t.trial_id].span_start,
                small_ds.trial_latents[t.trial_id].span_end,
            ]
        assert set(payload["participants"]) == set(small_ds.participants)

    def test_emission_is_byte_deterministic(self, small_ds, tmp_path):
        a = write_dataset(small_ds, tmp_path / "a")
        b = write_dataset(generate_dataset(SMALL), tmp_path / "b")
        for key in a:
            assert a[key].read_bytes() == b[key].read_bytes()
