import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from jumpactivity.pathseries import (
    SECOND,
    DataError,
    InvalidArgumentError,
    PathSeries,
    TruncationSpec,
    check_rate_condition,
    cutoff_from_spec,
    day_increments,
    increments,
    rate_exponents,
    truncated_power_variation,
)

from helpers import brownian_path

finite = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)


def test_increments_examples():
    path = PathSeries([0.0, 0.1, 0.3], 1.0)
    np.testing.assert_allclose(increments(path, 1), [0.1, 0.2])
    np.testing.assert_allclose(increments(path, 2), [0.3])
    const = PathSeries([1.7] * 4, 1.0)
    for k in (1, 2, 3):
        assert np.all(increments(const, k) == 0)


def test_increments_errors():
    path = PathSeries([0.0, 0.1, 0.3], 1.0)
    with pytest.raises(InvalidArgumentError):
        increments(path, 0)
    with pytest.raises(InvalidArgumentError):
        increments(path, 3)


def test_increments_do_not_cross_days():
    path = PathSeries.from_days([[0.0, 1.0], [5.0, 6.0, 8.0]], 1.0)
    np.testing.assert_array_equal(increments(path, 1), [1.0, 1.0, 2.0])


def test_path_validation():
    with pytest.raises(DataError) as err:
        PathSeries([0.0, 1.0, math.nan, 2.0], 1.0)
    assert err.value.index == 2
    with pytest.raises(InvalidArgumentError):
        PathSeries([0.0, 1.0], 0.0)
    with pytest.raises(InvalidArgumentError):
        PathSeries([0.0, 1.0, 2.0], 1.0, (0, 2, 1))
    with pytest.raises(InvalidArgumentError):
        PathSeries([0.0, 1.0, 2.0], 1.0, (1,))
    path = PathSeries([0.0, 1.0], 1.0)
    with pytest.raises(ValueError):
        path.values[0] = 3.0


def test_power_variation_examples():
    path = PathSeries([0.0, 0.1, 0.6], 1.0)
    assert truncated_power_variation(path, 2, 0.2) == pytest.approx(0.01, rel=1e-12)
    assert truncated_power_variation(path, 2, 0.05) == 0.0


def test_truncation_is_closed():
    path = PathSeries([0.0, 0.5], 1.0)
    assert truncated_power_variation(path, 2, 0.5) == 0.25


def test_power_variation_rejects_bad_args():
    path = PathSeries([0.0, 0.5], 1.0)
    with pytest.raises(InvalidArgumentError):
        truncated_power_variation(path, 2, 0.0)
    with pytest.raises(InvalidArgumentError):
        truncated_power_variation(path, 0, 1.0)


def test_brownian_quarticity():
    # m_4 = 3, so B(4, inf, delta) / (3 sigma^4 T delta) -> 1; relative sd ~ sqrt(96/n)/3
    sigma, n_days = 0.3, 10
    path = brownian_path(sigma=sigma, n_days=n_days, seed=7)
    T = n_days / 252
    ratio = truncated_power_variation(path, 4, math.inf) / (3 * sigma**4 * T * SECOND)
    assert abs(ratio - 1) < 0.03


def test_cutoff_examples():
    u = cutoff_from_spec(TruncationSpec(6, 0.5, 0.25), SECOND)
    assert u == pytest.approx(6 * 0.25 * SECOND**0.5, rel=1e-15)
    assert u == pytest.approx(6.18e-4, rel=1e-3)
    assert cutoff_from_spec(TruncationSpec(1, 0.5, 1), 1.0) == 1.0
    assert TruncationSpec(12).cutoff(SECOND) == 2 * TruncationSpec(6).cutoff(SECOND)


def test_cutoff_per_day_sigma():
    spec = TruncationSpec(4, 0.5, (0.2, 0.4))
    np.testing.assert_allclose(spec.cutoff(1.0), [0.8, 1.6])


@pytest.mark.parametrize("kw", [dict(alpha=0), dict(alpha=1, varpi=0), dict(alpha=1, varpi=0.6), dict(alpha=1, sigma_ref=0)])
def test_truncation_spec_validation(kw):
    with pytest.raises(InvalidArgumentError):
        TruncationSpec(**kw)


def test_rate_exponents():
    rho1, rho2 = rate_exponents(4)
    assert rho1 == 0.25
    assert rho2 == pytest.approx(2 / 17, rel=1e-15)
    r1, r2 = rate_exponents(2 + 1e-9)
    assert 0 < r2 < r1 < 1e-8
    with pytest.raises(InvalidArgumentError):
        rate_exponents(2)


def test_check_rate_condition():
    assert check_rate_condition(0.2, 0.25)
    assert not check_rate_condition(0.5, rate_exponents(4)[1])
    assert check_rate_condition(0.3, 0.5)


@given(st.lists(finite, min_size=3, max_size=60), st.floats(1e-3, 2.0), st.floats(1e-3, 2.0), st.sampled_from([1.0, 2.0, 3.0, 4.5]))
def test_monotone_in_cutoff(vals, u1, u2, p):
    path = PathSeries(vals, 1.0)
    lo, hi = sorted((u1, u2))
    assert truncated_power_variation(path, p, lo) <= truncated_power_variation(path, p, hi)


@given(st.lists(finite, min_size=3, max_size=60), st.sampled_from([2.0, 3.0, 4.0]))
def test_large_cutoff_is_plain_power_sum(vals, p):
    path = PathSeries(vals, 1.0)
    inc = np.abs(np.diff(vals))
    total = truncated_power_variation(path, p, float(inc.max()) + 1.0)
    assert total == pytest.approx(math.fsum(inc**p), rel=1e-12, abs=1e-300)


@given(
    st.lists(finite, min_size=3, max_size=60),
    st.floats(0.01, 100.0),
    st.floats(0.01, 1.0),
    st.sampled_from([2.0, 3.0, 4.0, 8.0]),
)
def test_scaling(vals, lam, u, p):
    inc = np.abs(np.diff(vals))
    # keep every increment clear of the cutoff so rounding cannot flip the indicator
    assume(np.all(np.abs(inc - u) > 1e-9 * u))
    path = PathSeries(vals, 1.0)
    base = truncated_power_variation(path, p, u)
    scaled = truncated_power_variation(path.scaled(lam), p, lam * u)
    assert scaled == pytest.approx(lam**p * base, rel=1e-12, abs=1e-300)


@given(st.lists(st.integers(2, 40), min_size=1, max_size=6), st.integers(1, 5))
def test_stride_counts(lengths, k):
    rng = np.random.default_rng(0)
    path = PathSeries.from_days([rng.standard_normal(m + 1) for m in lengths], 1.0)
    assume(len(path.values) >= k + 1)
    counts = [d.size for d in day_increments(path, k)]
    assert counts == [m // k for m in lengths]


@settings(max_examples=50)
@given(st.lists(st.lists(finite, min_size=2, max_size=20), min_size=2, max_size=6), st.randoms())
def test_day_permutation(days, rnd):
    path = PathSeries.from_days(days, 1.0)
    order = list(range(len(days)))
    rnd.shuffle(order)
    perm = path.permute_days(order)
    for p in (2.0, 3.0, 4.0):
        assert truncated_power_variation(perm, p, 0.5) == truncated_power_variation(path, p, 0.5)
