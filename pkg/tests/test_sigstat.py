import functools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nosignal.qcore import ValidationError
from nosignal.rng import position, uniforms
from nosignal.sigstat import (
    SignalBudget,
    decision_errors,
    error_curves,
    required_samples,
    simulate,
    tails,
)


@functools.lru_cache(maxsize=None)
def naive_pmf(n, p):
    return [math.comb(n, k) * p**k * (1 - p) ** (n - k) for k in range(n + 1)]


def naive_errors(p0, p1, n, k):
    """Term-by-term oracle for both rules."""
    f0, f1 = naive_pmf(n, p0), naive_pmf(n, p1)
    if p1 > p0:
        return math.fsum(f0[k:]), math.fsum(f1[:k])
    return math.fsum(f0[: k + 1]), math.fsum(f1[k + 1 :])


def test_seven_particles_any_miss_rule():
    rep = decision_errors(SignalBudget(1.0, 0.5, 7, 6))
    assert rep.type1 == 0
    assert rep.type2 == pytest.approx(1 / 128, abs=1e-15)


def test_identical_distributions_are_indistinguishable():
    for n in (1, 5, 40):
        assert decision_errors(SignalBudget(0.3, 0.3, n, 0)).total_min == pytest.approx(1, abs=1e-12)


def test_single_particle():
    rep = decision_errors(SignalBudget(1.0, 0.5, 1, 0))
    assert rep.type2 == 0.5


@pytest.mark.parametrize("p0,p1", [(1.0, 0.5), (0.5, 0.36), (0.2, 0.7), (0.0, 0.1), (0.9, 1.0)])
@pytest.mark.parametrize("n", [1, 2, 17, 200, 1000])
def test_against_naive_oracle(p0, p1, n):
    t1, t2 = error_curves(p0, p1, n)
    ks = range(n + 1) if n <= 200 else range(0, n + 1, 37)
    for k in ks:
        o1, o2 = naive_errors(p0, p1, n, k)
        assert abs(t1[k] - o1) < 1e-12
        assert abs(t2[k] - o2) < 1e-12


def test_tails_no_overflow_at_large_n():
    lo, up = tails(10_000, 0.37)
    assert np.all(np.isfinite(lo)) and np.all(np.isfinite(up))
    assert lo[-1] == pytest.approx(1)
    assert np.max(np.abs(lo + up - 1)) < 1e-10


@pytest.mark.parametrize("p0,p1", [(1.0, 0.5), (0.4, 0.6)])
def test_monotone_in_threshold(p0, p1):
    t1, t2 = error_curves(p0, p1, 30)
    d1, d2 = np.diff(t1), np.diff(t2)
    if p1 > p0:
        assert np.all(d1 <= 1e-15) and np.all(d2 >= -1e-15)
    else:
        assert np.all(d1 >= -1e-15) and np.all(d2 <= 1e-15)


def test_total_min_is_enumerated_minimum():
    for p0, p1, n in [(1.0, 0.5, 9), (0.5, 0.36, 50), (0.3, 0.6, 25)]:
        rep = decision_errors(SignalBudget(p0, p1, n, 0))
        brute = min(sum(naive_errors(p0, p1, n, k)) for k in range(n + 1))
        assert rep.total_min == pytest.approx(brute, abs=1e-12)


def test_required_samples():
    assert required_samples(1.0, 0.5, 1e-3).n == 10
    assert required_samples(1.0, 0.5, 0.5).n == 1
    # frozen from the naive scan (exact rationals: n=273 gives 0.010642, n=274 gives 0.009372)
    assert required_samples(0.5, 0.36, 0.01).n == 274
    imp = required_samples(0.4, 0.4, 0.01)
    assert imp.n is None and "impossible" in imp.reason


def test_required_samples_cap():
    rep = required_samples(0.5, 0.49, 1e-6, n_max=50)
    assert rep.n is None and "not reached" in rep.reason


def test_required_samples_monotone_in_gap():
    gaps = [0.05, 0.1, 0.2, 0.3, 0.5]
    ns = [required_samples(0.5, 0.5 - g, 0.01).n for g in gaps]
    assert all(a >= b for a, b in zip(ns, ns[1:]))
    ns = [required_samples(0.2, 0.2 + g, 0.05).n for g in gaps]
    assert all(a >= b for a, b in zip(ns, ns[1:]))


@pytest.mark.parametrize(
    "args",
    [(1.2, 0.5, 3, 1), (0.5, -0.1, 3, 1), (0.5, 0.4, 0, 0), (0.5, 0.4, 3, 4), (0.5, 0.4, 2.5, 1)],
)
def test_budget_validation(args):
    with pytest.raises(ValidationError):
        SignalBudget(*args)


def test_simulate_clean_channel():
    for seed in (0, 1, 99, 12345):
        rep = simulate(SignalBudget(1.0, 0.5, 20, 19), [0, 1, 0, 1], seed)
        assert rep.decoded == (0, 1, 0, 1)
        assert rep.error_rate == 0


def test_simulate_coin_flip():
    msg = [1, 0] * 5000
    rep = simulate(SignalBudget(0.5, 0.5, 1, 0), msg, 7)
    sigma = math.sqrt(0.25 / len(msg))
    assert abs(rep.error_rate - 0.5) < 3 * sigma


def test_simulate_deterministic():
    b = SignalBudget(0.7, 0.4, 5, 2)
    msg = [1, 0, 1, 1, 0, 0, 1]
    assert simulate(b, msg, 3) == simulate(b, msg, 3)
    assert simulate(b, msg * 30, 3) != simulate(b, msg * 30, 4)


def test_simulate_prefix_reproducible():
    b = SignalBudget(0.7, 0.4, 5, 2)
    msg = [1, 0, 1, 1, 0, 0, 1, 0]
    assert simulate(b, msg, 11).decoded[:4] == simulate(b, msg[:4], 11).decoded


def test_monte_carlo_type2():
    b = SignalBudget(1.0, 0.5, 3, 2)
    analytic = decision_errors(b).type2
    trials = 100_000
    rep = simulate(b, [1] * trials, 2024)
    sigma = math.sqrt(analytic * (1 - analytic) / trials)
    assert abs(rep.type2_rate - analytic) < 3 * sigma


def test_uniform_stream_random_access():
    whole = uniforms(42, 0, 103)
    for start in (0, 1, 3, 4, 5, 50, 99):
        np.testing.assert_array_equal(uniforms(42, start, 103 - start), whole[start:])
    assert np.all((whole >= 0) & (whole < 1))
    assert position(3, 2, 10) == 32


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**63), start=st.integers(0, 10_000), count=st.integers(0, 64))
def test_uniform_chunks_concatenate(seed, start, count):
    a = uniforms(seed, start, count)
    b = np.concatenate([uniforms(seed, start, count // 2), uniforms(seed, start + count // 2, count - count // 2)])
    np.testing.assert_array_equal(a, b)
