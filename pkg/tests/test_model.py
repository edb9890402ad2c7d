import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cojump.errors import DomainError, ParameterError
from cojump.harness import get_scenario
from cojump.model import (
    JumpDriverSpec,
    JumpEvent,
    ModelParams,
    jump_correlation,
    simulate_jumps,
    simulate_path,
    squared_jump_correlation,
)

SIGMA = math.sqrt(8e-5)


def test_zero_intensity_driver_has_no_jumps(rng):
    params = ModelParams(SIGMA, SIGMA, driver1=JumpDriverSpec(alpha=0.01, kappa=0.0))
    assert simulate_jumps(params, 1.0, rng) == []


@pytest.mark.parametrize("l, h", [(0.0, 1.0), (-0.1, 1.0), (0.5, 0.5), (0.7, 0.2)])
def test_invalid_driver_bounds(l, h):
    with pytest.raises(ParameterError):
        JumpDriverSpec(alpha=0.01, kappa=1.0, l=l, h=h)


def test_negative_intensity_rejected():
    with pytest.raises(ParameterError):
        JumpDriverSpec(alpha=0.01, kappa=-1.0)


def test_case_I_j_jump_count_and_marks(rng):
    params = get_scenario("I-j").params
    counts, marks = [], []
    for _ in range(100_000):
        ev = simulate_jumps(params, 1.0, rng)
        counts.append(len(ev))
        marks.extend(e.mark for e in ev)
        assert all(e.driver == 3 for e in ev)
    assert abs(np.mean(counts) - 1.0) < 0.02
    m = np.abs(marks)
    assert m.min() >= 0.05 and m.max() <= 0.7484


def test_mark_magnitude_mean(rng):
    params = ModelParams(SIGMA, SIGMA, driver1=JumpDriverSpec(alpha=0.01, kappa=100_000, l=0.05, h=0.1238))
    marks = np.array([e.mark for e in simulate_jumps(params, 1.0, rng)])
    assert abs(np.abs(marks).mean() - (0.05 + 0.1238) / 2) < 0.001
    # signs are a fair coin
    assert abs(np.mean(marks > 0) - 0.5) < 0.01


def test_jumps_sorted_and_in_horizon(rng):
    ev = simulate_jumps(get_scenario("III-m").params, 2.0, rng)
    times = [e.time for e in ev]
    assert times == sorted(times)
    assert all(0 < t <= 2.0 for t in times)


def test_constant_without_diffusion_or_jumps(rng):
    params = ModelParams(0.0, 0.0, x0=(2.0, 3.0))
    path = simulate_path(params, 1.0, np.linspace(0, 1, 11), [], rng)
    assert np.all(path.values == np.array([2.0, 3.0]))


def test_single_common_jump_closed_form(rng):
    params = ModelParams(0.0, 0.0, driver3=JumpDriverSpec(alpha=0.01, kappa=1.0, l=0.05, h=0.7))
    path = simulate_path(params, 1.0, [0.0, 1.0], [JumpEvent(0.5, 3, 0.5)], rng)
    np.testing.assert_allclose(path.at([1.0])[0], [1.005, 1.005], rtol=1e-15)
    for l in (0, 1):
        t, d = path.jumps[l][0]
        assert t == 0.5
        assert d == pytest.approx(0.005, rel=1e-14)
    np.testing.assert_array_equal(path.left_limits, [[1.0, 1.0]])


@given(st.lists(st.tuples(st.floats(0.01, 0.99), st.sampled_from([1, 2, 3]), st.floats(0.05, 0.9)), max_size=12))
@settings(max_examples=50, deadline=None)
def test_exact_product_of_jump_factors(events):
    spec = JumpDriverSpec(alpha=0.3, kappa=1.0, l=0.05, h=0.95)
    params = ModelParams(0.0, 0.0, driver1=spec, driver2=spec, driver3=spec)
    jumps = sorted((JumpEvent(t, d, x) for t, d, x in events), key=lambda e: e.time)
    path = simulate_path(params, 1.0, [0.0, 1.0], jumps, np.random.default_rng(0))
    expect = np.ones(2)
    for e in jumps:
        if e.driver in (1, 3):
            expect[0] *= 1 + 0.3 * e.mark
        if e.driver in (2, 3):
            expect[1] *= 1 + 0.3 * e.mark
    np.testing.assert_allclose(path.at([1.0])[0], expect, rtol=1e-13)


def test_jump_size_equals_left_limit_times_factor(rng):
    params = get_scenario("II-m").params
    jumps = simulate_jumps(params, 1.0, rng)
    path = simulate_path(params, 1.0, np.linspace(0, 1, 50), jumps, rng)
    pos = np.searchsorted(path.event_times, path.jump_event_times)
    for k, e in enumerate(jumps):
        alpha = params.drivers[e.driver - 1].alpha
        comps = {1: [0], 2: [1], 3: [0, 1]}[e.driver]
        for c in comps:
            expected = path.left_limits[k, c] * alpha * e.mark
            sizes = dict(map(tuple, path.jumps[c]))
            assert sizes[path.jump_event_times[k]] == pytest.approx(expected, rel=1e-15)
            assert path.values[pos[k], c] - path.left_limits[k, c] == pytest.approx(expected, rel=1e-9)
    assert np.all(np.diff(path.event_times) > 0)
    assert np.all(path.values > 0)


def test_log_variance_and_martingale():
    # unit gaps of one long path are iid copies of log(X_1 / x0)
    N = 100_000
    params = ModelParams(SIGMA, SIGMA, rho=0.3)
    path = simulate_path(params, float(N), np.arange(N + 1.0), [], np.random.default_rng(7))
    ratio = path.values[1:] / path.values[:-1]
    for c in (0, 1):
        var = np.var(np.log(ratio[:, c]))
        assert abs(var / 8e-5 - 1) < 0.03
        mean, se = ratio[:, c].mean(), ratio[:, c].std() / math.sqrt(N)
        assert abs(mean - 1.0) < 3 * se
    corr = np.corrcoef(np.log(ratio).T)[0, 1]
    assert abs(corr - 0.3) < 0.01


def test_same_seed_bitwise_identical():
    params = get_scenario("III-m").params
    times = np.linspace(0, 1, 300)

    def run():
        rng = np.random.default_rng(99)
        return simulate_path(params, 1.0, times, simulate_jumps(params, 1.0, rng), rng)

    a, b = run(), run()
    assert a.values.tobytes() == b.values.tobytes()
    assert a.event_times.tobytes() == b.event_times.tobytes()


def test_jump_at_observation_time_moves_inside_interval(rng):
    params = ModelParams(0.0, 0.0, driver1=JumpDriverSpec(alpha=0.1, kappa=1.0, l=0.1, h=0.5))
    path = simulate_path(params, 1.0, [0.0, 0.5, 1.0], [JumpEvent(0.5, 1, 0.2)], rng)
    t = path.jumps[0][0, 0]
    assert t < 0.5 and t == np.nextafter(0.5, 0)
    # the jump is seen by the interval (0, 0.5]
    np.testing.assert_allclose(path.at([0.5])[0], [1.02, 1.0])


def test_eval_time_outside_horizon(rng):
    params = ModelParams(SIGMA, SIGMA)
    with pytest.raises(DomainError):
        simulate_path(params, 1.0, [0.0, 1.5], [], rng)
    with pytest.raises(DomainError):
        simulate_path(params, 1.0, [-0.1, 0.5], [], rng)


def test_correlation_disjoint_is_zero():
    assert squared_jump_correlation([(0.3, 0.4)], [(0.7, 0.2)]) == 0.0


def test_correlation_proportional_is_one():
    j1 = [(0.1, 0.3), (0.6, -0.2)]
    j2 = [(0.1, 0.6), (0.6, -0.4)]
    assert squared_jump_correlation(j1, j2) == pytest.approx(1.0)


def test_correlation_hand_example():
    value = squared_jump_correlation([(0.2, 1.0), (0.5, 2.0)], [(0.5, 1.0), (0.9, 3.0)])
    assert value == pytest.approx(4 / math.sqrt(17 * 82), rel=1e-14)
    assert value == pytest.approx(0.10713, abs=1e-5)


def test_correlation_undefined_without_jumps():
    assert squared_jump_correlation([], [(0.5, 1.0)]) is None
    assert squared_jump_correlation([(0.5, 1.0)], []) is None


@given(st.floats(1e-3, 1e3))
@settings(max_examples=30)
def test_correlation_invariant_under_scaling(c):
    j1 = np.array([(0.1, 0.3), (0.4, 0.1), (0.6, -0.2)])
    j2 = np.array([(0.1, 0.5), (0.6, -0.4), (0.8, 0.7)])
    scaled = j2.copy()
    scaled[:, 1] *= c
    assert squared_jump_correlation(j1, scaled) == pytest.approx(squared_jump_correlation(j1, j2), rel=1e-12)


def test_path_correlation_in_unit_interval(rng):
    params = get_scenario("II-m").params
    jumps = simulate_jumps(params, 1.0, rng)
    path = simulate_path(params, 1.0, [0.0, 1.0], jumps, rng)
    phi = jump_correlation(path)
    assert phi is not None and 0.0 <= phi <= 1.0
