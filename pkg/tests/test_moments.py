import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jumpactivity.moments import (
    MomentTable,
    abs_normal_moment,
    joint_abs_moment,
    joint_abs_moment_even,
    n_constant,
)
from jumpactivity.pathseries import InvalidArgumentError


def double_factorial(n):
    return math.prod(range(n, 0, -2))


@pytest.mark.parametrize("j", range(1, 7))
def test_even_moments_are_double_factorials(j):
    assert abs_normal_moment(2 * j) == double_factorial(2 * j - 1)


def test_moment_examples():
    assert abs_normal_moment(2) == 1.0
    assert abs_normal_moment(4) == 3.0
    assert abs_normal_moment(3) == pytest.approx(2 * math.sqrt(2 / math.pi), rel=1e-15)


@given(st.floats(0.1, 30.0))
def test_gamma_form_matches_integer_recursion(p):
    # the non-integer branch evaluated at nearby integers must agree with the recursion
    q = round(p) or 1
    closed = 2 ** (q / 2) * math.gamma((q + 1) / 2) / math.sqrt(math.pi)
    assert abs_normal_moment(q) == pytest.approx(closed, rel=1e-13)


def test_moment_rejects_nonpositive():
    with pytest.raises(InvalidArgumentError):
        abs_normal_moment(0)


def test_third_moment_monte_carlo():
    rng = np.random.default_rng(2024)
    total, n = 0.0, 0
    for _ in range(10):
        u = rng.standard_normal(1_000_000)
        total += np.sum(np.abs(u) ** 3)
        n += u.size
    est = total / n
    assert abs(est / (2 * math.sqrt(2 / math.pi)) - 1) < 0.005
    assert f"{est:.3g}" == f"{abs_normal_moment(3):.3g}"


def test_joint_moment_examples():
    assert joint_abs_moment_even(4, 2) == 204.0
    assert joint_abs_moment_even(4, 3) == 321.0
    assert joint_abs_moment(4, 2) == pytest.approx(204.0, abs=1e-10)
    assert joint_abs_moment(4, 3) == pytest.approx(321.0, abs=1e-10)


@pytest.mark.parametrize("p", [4, 6, 8])
@pytest.mark.parametrize("k", [2, 3, 4])
def test_quadrature_matches_expansion(p, k):
    exact = joint_abs_moment_even(p, k)
    assert joint_abs_moment(p, k) == pytest.approx(exact, rel=1e-10)


@pytest.mark.parametrize("p", [2.5, 3.0, 4.0, 5.5, 6.0])
@pytest.mark.parametrize("k", [2, 3, 5])
def test_joint_moment_exceeds_product(p, k):
    assert joint_abs_moment(p, k) >= abs_normal_moment(p) ** 2 * (k - 1) ** (p / 2)


def test_joint_moment_monte_carlo():
    rng = np.random.default_rng(99)
    total, n = 0.0, 0
    for _ in range(10):
        u = rng.standard_normal(1_000_000)
        v = rng.standard_normal(1_000_000)
        total += np.sum(u**4 * (u + v) ** 4)
        n += u.size
    assert total / n == pytest.approx(204.0, rel=0.02)


def test_joint_moment_odd_power_monte_carlo():
    rng = np.random.default_rng(5)
    u = rng.standard_normal(4_000_000)
    v = rng.standard_normal(4_000_000)
    est = np.mean(np.abs(u) ** 3 * np.abs(u + math.sqrt(2) * v) ** 3)
    assert est == pytest.approx(joint_abs_moment(3, 3), rel=0.01)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_n_constant_closed_form(k):
    assert n_constant(4, k) == pytest.approx(16 / 35 * k * (2 * k * k - k - 1), rel=1e-12)


def test_n_constant_headline_value():
    assert Fraction(n_constant(4, 2)).limit_denominator(100) == Fraction(32, 7)
    assert n_constant(4, 2) == pytest.approx(480 / 105, rel=1e-13)


@pytest.mark.parametrize("p", [2.5, 3.0, 4.0, 6.0])
@pytest.mark.parametrize("k", [2, 3, 4])
def test_n_constant_positive(p, k):
    assert n_constant(p, k) > 0


def test_moment_table():
    t = MomentTable.compute(4, 2)
    assert (t.m_p, t.m_2p) == (3.0, 105.0)
    assert t.m_kp == pytest.approx(204.0, abs=1e-10)
    assert t.m_2p > t.m_p**2
    assert MomentTable.compute(4, 2) is t


def test_joint_moment_domain():
    with pytest.raises(InvalidArgumentError):
        joint_abs_moment(2.0, 2)
    with pytest.raises(InvalidArgumentError):
        joint_abs_moment(4.0, 1)
