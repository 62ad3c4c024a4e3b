from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moctk.changepoint import (
    ChangePoint,
    CountSeries,
    GammaParams,
    RunLengthPosterior,
    declare_changepoints,
    poisson_gamma_predictive,
    run_bocpd,
)
from moctk.core import DataError
from moctk.synth import planted_series
from oracles import run_length_by_enumeration, run_length_by_segments


def test_predictive_zero_count():
    assert poisson_gamma_predictive(GammaParams(1, 1), 0) == pytest.approx(0.5, abs=1e-15)


def test_predictive_geometric_case():
    assert poisson_gamma_predictive(GammaParams(1, 1), 1) == pytest.approx(0.25, abs=1e-15)


def test_predictive_normalizes():
    total = sum(poisson_gamma_predictive(GammaParams(2, 0.5), x) for x in range(1001))
    assert total == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("alpha,beta", [(1, 1), (2, 0.5), (0.3, 2.0), (5, 0.2)])
def test_predictive_tail_mass(alpha, beta):
    cutoff = int(10 * (alpha / beta + 10))
    head = sum(poisson_gamma_predictive(GammaParams(alpha, beta), x) for x in range(cutoff + 1))
    assert 1 - head < 1e-9


def test_invalid_gamma_params():
    with pytest.raises(DataError):
        GammaParams(0, 1)


def test_constant_series_map_run_length():
    post = run_bocpd([3] * 60, GammaParams(), 0.01)
    assert post.map_run_lengths()[-1] == 59
    oracle = run_length_by_segments([3] * 60, 1, 1, 0.01)
    assert int(np.argmax(oracle)) == 59
    np.testing.assert_allclose(post.vector(59), oracle, atol=1e-9)


def test_single_observation_point_mass():
    post = run_bocpd([4])
    np.testing.assert_array_equal(post.vector(0), [1.0])


def test_five_step_matches_enumeration():
    rng = np.random.default_rng(0)
    for _ in range(20):
        xs = [int(x) for x in rng.poisson(rng.uniform(0.5, 6), 5)]
        alpha, beta, h = rng.uniform(0.5, 3), rng.uniform(0.2, 2), rng.uniform(0.01, 0.5)
        post = run_bocpd(xs, GammaParams(alpha, beta), h)
        np.testing.assert_allclose(post.vector(4), run_length_by_enumeration(xs, alpha, beta, h), atol=1e-9)


def test_every_step_matches_segment_oracle():
    xs = [int(x) for x in planted_series(15, 15, 1, 6, seed=4)]
    post = run_bocpd(xs, GammaParams(1, 1), 0.05)
    for t in (0, 3, 14, 15, 16, 20, 29):
        np.testing.assert_allclose(post.vector(t), run_length_by_segments(xs[: t + 1], 1, 1, 0.05), atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 30), min_size=1, max_size=80), st.floats(0.001, 0.5))
def test_posteriors_are_distributions(xs, hazard):
    post = run_bocpd(xs, GammaParams(1, 1), hazard)
    for t, v in enumerate(post):
        assert len(v) == t + 1
        assert (v >= 0).all()
        assert abs(v.sum() - 1) < 1e-9


def test_deterministic():
    xs = planted_series(20, 20, 2, 7, seed=1)
    a, b = run_bocpd(xs), run_bocpd(xs)
    assert all(np.array_equal(a.vector(t), b.vector(t)) for t in range(len(xs)))


def test_rejects_bad_inputs():
    with pytest.raises(DataError):
        run_bocpd([])
    with pytest.raises(DataError):
        run_bocpd([1, 2], hazard=1.0)
    with pytest.raises(DataError):
        CountSeries("u", date(2021, 1, 1), (1, -1))


def test_map_resets_after_planted_change():
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        xs = np.concatenate([rng.poisson(1, 30), rng.poisson(8, 30)])
        m = run_bocpd(xs).map_run_lengths()
        hits += any(m[t] < 3 for t in range(30, 33))
    assert hits >= 90


def test_growing_point_mass_declares_nothing():
    steps = []
    for t in range(20):
        steps.append((np.array([t]), np.array([1.0])))
    assert declare_changepoints(RunLengthPosterior(steps)) == []


def _posterior_with_resets(n, resets):
    steps, r = [], 0
    for t in range(n):
        r = 0 if t in resets else (r + 1 if t else 0)
        steps.append((np.array([r]), np.array([1.0])))
    return RunLengthPosterior(steps, date(2021, 1, 1))


def test_gap_rule_suppresses_close_declarations():
    # the second reset keeps r_t small through day 17, so the gap must span it
    cps = declare_changepoints(_posterior_with_resets(40, {10, 15}), min_gap_days=8)
    assert [c.index for c in cps] == [10]
    cps = declare_changepoints(_posterior_with_resets(40, {10, 15}), min_gap_days=5)
    assert [c.index for c in cps] == [10, 15]


def test_declarations_sorted_with_dates():
    cps = declare_changepoints(_posterior_with_resets(60, {10, 30}))
    assert cps == sorted(cps, key=lambda c: c.date)
    assert cps[0].date == date(2021, 1, 11)
    assert isinstance(cps[0], ChangePoint) and cps[0].posterior_mass == 1.0


def test_single_declaration_near_planted_change():
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        xs = np.concatenate([rng.poisson(1, 30), rng.poisson(8, 30)])
        cps = declare_changepoints(run_bocpd(xs))
        hits += len(cps) == 1 and abs(cps[0].index - 30) <= 2
    assert hits >= 90
