import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from skycell import (
    ConfigurationError,
    SelectionInput,
    metric_m1,
    metric_m2,
    metric_rsrp,
    select_cell,
)

rsrp_vectors = st.lists(
    st.floats(min_value=-120.0, max_value=-40.0), min_size=3, max_size=3
).map(np.array)


def test_rsrp_metric_is_identity():
    v = np.array([-70.0, -80.0, -75.0])
    assert np.argmax(metric_rsrp(v)) == 0
    assert np.array_equal(metric_rsrp(v), v)
    assert np.argmax(metric_rsrp(v + 7.5)) == 0
    assert np.argmax(metric_rsrp(np.array([-60.0]))) == 0


def test_m1_hand_example():
    z = metric_m1(np.array([1, 2, 3]), np.array([-80.0, -90.0, -85.0]), 0.5)
    assert_allclose(z, [-0.5, -0.75, -0.25], atol=1e-12)
    assert np.argmax(z) == 2


def test_m1_alpha_extremes():
    rng = np.random.default_rng(0)
    for _ in range(200):
        es = rng.integers(1, 9, size=3)
        rsrp = rng.uniform(-100, -50, size=3)
        z0 = metric_m1(es, rsrp, 0.0)
        assert np.argmax(z0) == np.argmax(rsrp)
        z1 = metric_m1(es, rsrp, 1.0)
        assert np.argmax(z1) == np.argmax(es)


def test_m1_degenerate_terms_are_zero():
    z = metric_m1(np.array([2, 2, 2]), np.array([-70.0, -80.0, -90.0]), 1.0)
    assert_allclose(z, 0.0)
    z = metric_m1(np.array([1, 2, 3]), np.array([-70.0, -70.0, -70.0]), 0.0)
    assert_allclose(z, 0.0)


def test_m1_fixed_bounds():
    es = np.array([1, 3])
    rsrp = np.array([-60.0, -75.0])
    z = metric_m1(es, rsrp, 0.5, rsrp_bounds=(-90.0, -50.0))
    expected = 0.5 * np.array([-1.0, 0.0]) + 0.5 * (rsrp + 50.0) / 40.0
    assert_allclose(z, expected, atol=1e-12)


def test_m1_alpha_out_of_range():
    with pytest.raises(ConfigurationError):
        metric_m1(np.array([1, 2]), np.array([-60.0, -70.0]), 1.5)


def test_m1_batch_rows_normalized_independently():
    es = np.array([1, 2])
    rsrp = np.array([[-60.0, -80.0], [-90.0, -70.0]])
    z = metric_m1(es, rsrp, 0.0)
    assert np.argmax(z[0]) == 0
    assert np.argmax(z[1]) == 1


def test_m2_hand_example():
    z = metric_m2(np.array([1, 2]), 10 * np.log10(np.array([1000.0, 100.0])), 1.0)
    assert_allclose(z, [math.log2(1001), 2 * math.log2(101)], rtol=1e-12)
    assert np.argmax(z) == 1


def test_m2_zero_score_never_wins():
    z = metric_m2(np.array([0, 1]), np.array([-50.0, -90.0]), 1.0)
    assert z[0] == 0.0 and z[1] > 0.0
    assert np.argmax(z) == 1


def test_m2_equal_scores_follow_rsrp():
    rng = np.random.default_rng(1)
    for _ in range(100):
        rsrp = rng.uniform(-100, -50, size=3)
        z = metric_m2(np.array([3, 3, 3]), rsrp, 1e-9)
        assert np.argmax(z) == np.argmax(rsrp)


def test_m2_scaling_flips_argmax_with_unequal_scores():
    # common SNR scaling re-weights the log terms, so the winner can change
    es = np.array([1, 2])
    snr_db = 10 * np.log10(np.array([8.0, 1.0]))
    low = metric_m2(es, snr_db, 1.0)
    high = metric_m2(es, snr_db + 20.0, 1.0)
    assert np.argmax(low) == 0 and np.argmax(high) == 1


def test_m2_rejects_bad_noise():
    with pytest.raises(ValueError):
        metric_m2(np.array([1]), np.array([-60.0]), 0.0)


# -- select_cell --------------------------------------------------------------


def _inp(rsrp, es=(1, 2, 3), alpha=0.5, noise=1.0):
    return SelectionInput(
        rsrp_dbm=np.asarray(rsrp, dtype=float),
        scores=np.asarray(es),
        alpha=alpha,
        noise_mw=noise,
    )


def test_select_tie_break_lowest_index():
    out = select_cell("rsrp", _inp([[-70.0, -70.0, -80.0]]))
    assert out.chosen.tolist() == [0]


def test_select_records_metric_values():
    out = select_cell("m1", _inp([[-80.0, -90.0, -85.0]], es=(1, 2, 3)))
    assert out.metric == "m1"
    assert out.metric_values.shape == (1, 3)
    assert out.chosen.tolist() == [2]


def test_select_unknown_metric():
    with pytest.raises(ConfigurationError):
        select_cell("best", _inp([[-70.0, -75.0, -80.0]]))


def test_select_deterministic():
    inp = _inp([[-70.0, -72.0, -69.0], [-81.0, -79.5, -90.0]])
    a = select_cell("m2", inp)
    b = select_cell("m2", inp)
    assert np.array_equal(a.chosen, b.chosen)
    assert np.array_equal(a.metric_values, b.metric_values)


@settings(max_examples=60, deadline=None)
@given(rsrp=rsrp_vectors)
def test_rsrp_argmax_invariant_under_monotone_transform(rsrp):
    base = np.argmax(metric_rsrp(rsrp))
    transformed = 3.0 * rsrp + 11.0  # strictly increasing
    assert np.argmax(metric_rsrp(transformed)) == base


@settings(max_examples=60, deadline=None)
@given(rsrp=rsrp_vectors, seed=st.integers(min_value=0, max_value=100))
def test_single_candidate_selected_by_all_metrics(rsrp, seed):
    inp = _inp([[float(rsrp[0])]], es=(2,))
    for metric in ("rsrp", "m1", "m2"):
        assert select_cell(metric, inp).chosen.tolist() == [0]
