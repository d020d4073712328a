import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from jumpactivity.normal import normal_cdf, normal_quantile, upper_quantile


@given(st.floats(1e-300, 1 - 1e-16))
def test_quantile_matches_scipy(q):
    assert normal_quantile(q) == pytest.approx(stats.norm.ppf(q), abs=1e-9, rel=1e-12)


def test_upper_quantile_convention():
    assert upper_quantile(0.05) == pytest.approx(1.6448536269514722, abs=1e-12)
    assert upper_quantile(0.10) == pytest.approx(1.2815515655446004, abs=1e-12)
    assert upper_quantile(0.5) == 0.0


def test_quantile_edges():
    assert normal_quantile(0.0) == -np.inf
    assert normal_quantile(1.0) == np.inf
    with pytest.raises(ValueError):
        normal_quantile(1.5)


@given(st.floats(-8, 1))
def test_cdf_inverts_quantile(x):
    # the upper tail loses digits in 1 - cdf, so stay where cdf carries them
    assert normal_quantile(normal_cdf(x)) == pytest.approx(x, abs=1e-8)
