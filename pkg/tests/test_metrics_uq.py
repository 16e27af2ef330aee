import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bopim.errors import DimensionMismatch, InvalidConfig
from bopim.metrics_uq import (
    VALIDATION_HEADER,
    interval_coverage,
    mape,
    mape_se,
    point_predictions,
    posterior_box_stats,
    topk_inclusion_proportions,
    validate_surrogate,
)
from bopim.diffusion import substream
from bopim.optimizer import BopimConfig, run_bopim, sample_seed_uniform
from bopim.shrinkage_gibbs import Dataset, GibbsConfig, PosteriorDraws, fit
from conftest import random_temporal_graph

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_mape_examples():
    assert mape([1, 2, 3], [1, 2, 3]) == 0
    assert mape([1, 2], [2, 4]) == 1.5


def test_mape_length_mismatch():
    with pytest.raises(DimensionMismatch):
        mape([1, 2], [1])
    with pytest.raises(DimensionMismatch):
        mape([], [])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=30), finite)
def test_mape_symmetric_and_shift_invariant(pairs, c):
    a, b = map(np.array, zip(*pairs))
    assert mape(a, b) == pytest.approx(mape(b, a))
    assert mape(a + c, b + c) == pytest.approx(mape(a, b), rel=1e-9, abs=1e-6)
    assert mape(a, a) == 0


def test_mape_se():
    assert mape_se([1.0], [3.0]) == 0.0
    err = np.array([1.0, 2.0, 4.0])
    assert mape_se(err, np.zeros(3)) == pytest.approx(err.std(ddof=1) / np.sqrt(3))


def point_mass(beta, sigma2=0.0, n_draws=200, y_mean=0.0):
    beta = np.asarray(beta, dtype=float)
    return PosteriorDraws(np.tile(beta, (n_draws, 1)), np.full(n_draws, sigma2), "hs", y_mean)


def test_coverage_all_inside():
    rng = np.random.default_rng(0)
    draws = PosteriorDraws(rng.normal(size=(500, 2)), np.ones(500), "hs")
    X = np.array([[1, 0], [0, 1], [1, 1]])
    rep = interval_coverage(draws, X, np.zeros(3), rng=rng)
    assert rep.coverage == 1.0
    assert rep.mean_width > 0


def test_coverage_point_mass_no_noise():
    draws = point_mass([1.0, 2.0])
    rep = interval_coverage(draws, np.eye(2), [5.0, 5.0], include_noise=False)
    assert rep.coverage == 0.0 and rep.mean_width == 0.0
    # containment is strict: a value on the degenerate interval is outside
    assert interval_coverage(draws, np.eye(2), [1.0, 2.0], include_noise=False).coverage == 0.0


def test_coverage_dimension_checks():
    draws = point_mass([1.0, 2.0])
    with pytest.raises(DimensionMismatch):
        interval_coverage(draws, np.ones((2, 3)), [1.0, 1.0])
    with pytest.raises(DimensionMismatch):
        interval_coverage(draws, np.eye(2), [1.0])


@settings(max_examples=50, deadline=None)
@given(
    arrays(np.float64, 10, elements=st.floats(-5, 5)),
    st.floats(0.01, 3),
    st.floats(1.0, 10.0),
    st.integers(0, 2**31),
)
def test_more_noise_never_lowers_coverage(y, s, factor, seed):
    X = np.ones((10, 1))
    narrow = interval_coverage(point_mass([0.0], s), X, y, rng=np.random.default_rng(seed))
    wide = interval_coverage(point_mass([0.0], s * factor**2), X, y, rng=np.random.default_rng(seed))
    assert 0 <= narrow.coverage <= wide.coverage <= 1
    assert 0 <= narrow.mean_width <= wide.mean_width + 1e-12


def test_coverage_on_known_linear_truth():
    rng = np.random.default_rng(1)
    n, N = 5, 80
    beta = np.array([1.0, -2.0, 0.5, 3.0, 0.0])
    X = rng.normal(size=(N, n))
    y = X @ beta + rng.normal(size=N)
    data = Dataset.from_responses(X, y)
    draws = fit(data, GibbsConfig(n_iter=4000, n_burn=1000, seed=1, freeze_scales=True))
    X_test = rng.normal(size=(200, n))
    offset = data.y_mean - (X @ beta).mean()
    y_test = X_test @ beta + offset + rng.normal(size=200)
    rep = interval_coverage(draws, X_test, y_test, rng=rng)
    assert 0.90 <= rep.coverage <= 0.99


def test_point_predictions_use_median_beta():
    draws = PosteriorDraws(np.array([[0.0, 1.0], [2.0, 1.0], [10.0, 1.0]]), np.ones(3), "hs", 4.0)
    assert point_predictions(draws, [[1, 0], [1, 1]]).tolist() == [6.0, 7.0]


def test_topk_dominant_node():
    rng = np.random.default_rng(2)
    beta = rng.normal(size=(300, 6))
    beta[:, 1] += 100
    props = topk_inclusion_proportions(PosteriorDraws(beta, np.ones(300), "hs"), 2)
    assert props[1] == 1.0
    assert props.sum() == 2


def test_topk_single_draw_is_binary():
    props = topk_inclusion_proportions(PosteriorDraws(np.array([[0.3, 0.9, 0.1, 0.9]]), np.ones(1), "hs"), 2)
    assert props.tolist() == [0.0, 1.0, 0.0, 1.0]


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 40), st.integers(1, 8), st.data())
def test_topk_sums_to_k(n_draws, n, data):
    k = data.draw(st.integers(1, n))
    B = data.draw(arrays(np.float64, (n_draws, n), elements=st.floats(-3, 3).map(lambda v: round(v, 1))))
    props = topk_inclusion_proportions(PosteriorDraws(B, np.ones(n_draws), "hs"), k)
    assert np.all((props >= 0) & (props <= 1))
    assert np.isclose(props.sum(), k, rtol=0, atol=1e-12)
    assert int(round(props.sum() * n_draws)) == k * n_draws


def test_topk_invalid():
    d = PosteriorDraws(np.zeros((3, 2)), np.ones(3), "hs")
    with pytest.raises(InvalidConfig):
        topk_inclusion_proportions(d, 3)


def test_box_stats_constant():
    box = posterior_box_stats(PosteriorDraws(np.full((7, 2), 4.0), np.ones(7), "hs"))
    for row in box.as_rows():
        assert row == (4.0,) * 5


def test_box_stats_linear_rule():
    box = posterior_box_stats(PosteriorDraws(np.array([[1.0], [2.0], [3.0], [4.0], [5.0]]), np.ones(5), "hs"))
    assert (box.min[0], box.q1[0], box.median[0], box.q3[0], box.max[0]) == (1.0, 2.0, 3.0, 4.0, 5.0)


def _sorted_quantile(col, q):
    s = sorted(col)
    h = (len(s) - 1) * q
    lo = int(np.floor(h))
    hi = min(lo + 1, len(s) - 1)
    return s[lo] + (h - lo) * (s[hi] - s[lo])


def test_box_stats_sort_oracle():
    rng = np.random.default_rng(3)
    for _ in range(10):
        B = rng.normal(size=(int(rng.integers(1, 60)), 5))
        box = posterior_box_stats(PosteriorDraws(B, np.ones(len(B)), "hs"))
        for j in range(5):
            col = B[:, j].tolist()
            expected = [_sorted_quantile(col, q) for q in (0, 0.25, 0.5, 0.75, 1)]
            assert np.allclose([box.min[j], box.q1[j], box.median[j], box.q3[j], box.max[j]], expected)


def test_validation_header():
    assert VALIDATION_HEADER == ("dataset", "sampling", "prior", "mape", "mape_se", "coverage", "width")


def test_validate_lambda_zero():
    G = random_temporal_graph(np.random.default_rng(4), 12, 3, 0.2)
    cfg = BopimConfig(k=2, lam=0.0, N0=6, B=1, n_sims=20, gibbs=GibbsConfig(n_iter=300, n_burn=100))
    res = run_bopim(G, cfg)
    rep = validate_surrogate(G, cfg, n_test=15, sampling="random", seed=3, result=res)
    rng = np.random.default_rng(substream(3, 10))
    X = np.array([sample_seed_uniform(G.n, 2, rng) for _ in range(15)])
    assert rep.mape == pytest.approx(np.mean(np.abs(point_predictions(res.draws, X) - 2)))
    assert rep.n_test == 15 and rep.sampling == "random" and rep.prior == "hs"
    assert 0 <= rep.coverage <= 1 and rep.width >= 0


def test_validate_rejects_bad_sampling():
    G = random_temporal_graph(np.random.default_rng(4), 12, 3, 0.2)
    with pytest.raises(InvalidConfig):
        validate_surrogate(G, BopimConfig(k=2, lam=0.1), sampling="both")
