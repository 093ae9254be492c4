"""Fixation-level features: derived geometry, passthrough, boundary masks."""

import numpy as np
import pytest

from gazecomp.corpus import Fixation, Scanpath
from gazecomp.errors import ConfigurationError
from gazecomp.features import (FIXATION_FEATURES, default_providers,
                               fixation_level_features, linguistic_features)

from conftest import make_paragraph

C = {name: j for j, name in enumerate(FIXATION_FEATURES)}


def path_from_points(points, ppd=(50.0, 50.0), extras=None):
    fixes = tuple(
        Fixation(order_index=i, x=float(x), y=float(y), duration=100.0,
                 pupil=800.0, word_index=None,
                 extras=(extras or {}).get(i, {}))
        for i, (x, y) in enumerate(points)
    )
    return Scanpath(trial_id="t", fixations=fixes,
                    trial_dwell_time=200.0 * len(points), px_per_degree=ppd)


@pytest.fixture
def para_and_ling():
    para = make_paragraph(6)
    return para, linguistic_features(para, default_providers())


class TestDerivedGeometry:
    def test_horizontal_step_distance_and_angle(self, para_and_ling):
        para, ling = para_and_ling
        sp = path_from_points([(0, 0), (100, 0)], ppd=(50.0, 50.0))
        X = fixation_level_features(sp, para, ling)
        assert X[0, C["NEXT_FIX_DISTANCE"]] == pytest.approx(2.0)
        assert X[0, C["NEXT_FIX_ANGLE"]] == pytest.approx(0.0)
        assert X[1, C["PREVIOUS_FIX_DISTANCE"]] == pytest.approx(2.0)
        assert X[1, C["PREVIOUS_FIX_ANGLE"]] == pytest.approx(0.0)

    def test_vertical_step_down_is_90_degrees(self, para_and_ling):
        # Screen y grows downward; atan2(dy, dx) convention.
        para, ling = para_and_ling
        sp = path_from_points([(0, 0), (0, 100)])
        X = fixation_level_features(sp, para, ling)
        assert X[0, C["NEXT_FIX_ANGLE"]] == pytest.approx(90.0)

    def test_leftward_step_is_180_not_minus_180(self, para_and_ling):
        para, ling = para_and_ling
        sp = path_from_points([(100, 0), (0, 0)])
        X = fixation_level_features(sp, para, ling)
        assert X[0, C["NEXT_FIX_ANGLE"]] == pytest.approx(180.0)
        assert -180.0 < X[0, C["NEXT_FIX_ANGLE"]] <= 180.0

    def test_anisotropic_px_per_degree(self, para_and_ling):
        para, ling = para_and_ling
        sp = path_from_points([(0, 0), (100, 60)], ppd=(50.0, 30.0))
        X = fixation_level_features(sp, para, ling)
        assert X[0, C["NEXT_FIX_DISTANCE"]] == pytest.approx(np.hypot(2.0, 2.0))

    def test_derived_amplitude_defaults_to_fix_distance(self, para_and_ling):
        para, ling = para_and_ling
        sp = path_from_points([(0, 0), (100, 0)])
        X = fixation_level_features(sp, para, ling)
        assert X[0, C["NEXT_SAC_AMPLITUDE"]] == X[0, C["NEXT_FIX_DISTANCE"]]
        assert X[0, C["NEXT_SAC_DURATION"]] == 0.0

    def test_missing_px_per_degree_is_configuration_error(self, para_and_ling):
        para, ling = para_and_ling
        fixes = tuple(
            Fixation(order_index=i, x=float(i), y=0.0, duration=100.0,
                     pupil=1.0) for i in range(2)
        )
        sp = Scanpath(trial_id="t", fixations=fixes, trial_dwell_time=400.0,
                      px_per_degree=None)
        with pytest.raises(ConfigurationError, match="px_per_degree"):
            fixation_level_features(sp, para, ling)


class TestPassthrough:
    def test_report_kinematics_win_over_derivation(self, para_and_ling):
        para, ling = para_and_ling
        sp = path_from_points(
            [(0, 0), (100, 0)],
            extras={0: {"NEXT_SAC_AMPLITUDE": 3.3, "NEXT_SAC_DURATION": 41.0,
                        "NEXT_SAC_PEAK_VELOCITY": 310.0,
                        "NEXT_SAC_AVG_VELOCITY": 120.0,
                        "NEXT_FIX_ANGLE": -12.5}},
        )
        X = fixation_level_features(sp, para, ling)
        assert X[0, C["NEXT_SAC_AMPLITUDE"]] == 3.3
        assert X[0, C["NEXT_SAC_DURATION"]] == 41.0
        assert X[0, C["NEXT_SAC_PEAK_VELOCITY"]] == 310.0
        assert X[0, C["NEXT_SAC_AVG_VELOCITY"]] == 120.0
        assert X[0, C["NEXT_FIX_ANGLE"]] == -12.5
        # Distance had no passthrough: still derived.
        assert X[0, C["NEXT_FIX_DISTANCE"]] == pytest.approx(2.0)


class TestBoundaryMasks:
    def test_single_fixation_all_masked(self, para_and_ling):
        para, ling = para_and_ling
        sp = path_from_points([(50, 50)])
        X = fixation_level_features(sp, para, ling)
        assert X[0, C["HAS_PREVIOUS"]] == 0.0
        assert X[0, C["HAS_NEXT"]] == 0.0
        for name in FIXATION_FEATURES:
            if name.startswith(("NEXT_", "PREVIOUS_")):
                assert X[0, C[name]] == 0.0

    def test_masks_at_sequence_ends(self, para_and_ling):
        para, ling = para_and_ling
        sp = path_from_points([(0, 0), (50, 0), (100, 0)])
        X = fixation_level_features(sp, para, ling)
        np.testing.assert_array_equal(X[:, C["HAS_PREVIOUS"]], [0, 1, 1])
        np.testing.assert_array_equal(X[:, C["HAS_NEXT"]], [1, 1, 0])
        assert X[2, C["NEXT_FIX_DISTANCE"]] == 0.0
        assert X[0, C["PREVIOUS_FIX_DISTANCE"]] == 0.0


class TestWordLink:
    def test_fixated_word_features_copied(self):
        para = make_paragraph(6)
        ling = linguistic_features(para, default_providers())
        x, y = (para.words[2].left + 1, para.words[2].top + 1)
        fixes = (
            Fixation(order_index=0, x=x, y=y, duration=100.0, pupil=1.0,
                     word_index=2),
            Fixation(order_index=1, x=5.0, y=5.0, duration=90.0, pupil=1.0,
                     word_index=None),
        )
        sp = Scanpath(trial_id="t", fixations=fixes, trial_dwell_time=400.0)
        X = fixation_level_features(sp, para, ling)
        assert X[0, C["fixated_word_index"]] == 2.0
        np.testing.assert_array_equal(X[0, -ling.shape[1]:], ling[2])
        assert X[1, C["fixated_word_index"]] == -1.0
        assert (X[1, -ling.shape[1]:] == 0).all()

    def test_index_and_raw_columns(self):
        para = make_paragraph(4)
        ling = linguistic_features(para, default_providers())
        fixes = (
            Fixation(order_index=0, x=1.0, y=2.0, duration=111.0, pupil=777.0),
        )
        sp = Scanpath(trial_id="t", fixations=fixes, trial_dwell_time=111.0)
        X = fixation_level_features(sp, para, ling)
        assert X[0, C["CURRENT_FIX_INDEX"]] == 1.0
        assert X[0, C["CURRENT_FIX_DURATION"]] == 111.0
        assert X[0, C["CURRENT_FIX_PUPIL"]] == 777.0
        assert X[0, C["CURRENT_FIX_X"]] == 1.0
        assert X[0, C["CURRENT_FIX_Y"]] == 2.0
