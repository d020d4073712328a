"""Shared path builders and oracles for the test suite."""

import math

import numpy as np
from scipy import integrate, special

from jumpactivity.pathseries import SECOND, PathSeries


def brownian_path(sigma=0.25, n_days=1, steps=23_400, delta=SECOND, seed=0, x0=0.0):
    """Constant-volatility Brownian log-price sampled exactly on the grid."""
    rng = np.random.default_rng(seed)
    days = []
    x = x0
    for _ in range(n_days):
        inc = sigma * np.sqrt(delta) * rng.standard_normal(steps)
        day = x + np.concatenate([[0.0], np.cumsum(inc)])
        days.append(day)
        x = day[-1]
    return PathSeries.from_days(days, delta)


def _truncated_moment(p, u, sd, scale):
    f = lambda x: x**p * special.voigt_profile(x, sd, scale)
    return 2 * integrate.quad(f, 0, u, limit=400, epsabs=0, epsrel=1e-12)[0]


def voigt_s_n_limit(alpha, tail_probability, p=4.0, k=2):
    """Large-sample limit of S_n for Brownian motion plus Cauchy jumps at fixed alpha.

    Works in units of sigma * sqrt(delta); the Cauchy scale follows the
    tail-probability calibration at four standard deviations.
    """
    c = 4.0 / math.tan(math.pi * (1 - tail_probability) / 2)
    coarse = _truncated_moment(p, alpha, math.sqrt(k), k * c)
    fine = _truncated_moment(p, alpha, 1.0, c)
    return coarse / (k * fine)


ACCEPTANCE_LINES = []


def verdict(label, ok, detail):
    """Record and print one acceptance line, then fail the test if the check failed."""
    line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def voigt_s_prime_limit(alpha, tail_probability, p=3.0, p_prime=4.0, gamma=2.0):
    """Large-sample limit of S'_n for Brownian motion plus Cauchy jumps at fixed alpha."""
    c = 4.0 / math.tan(math.pi * (1 - tail_probability) / 2)
    m = lambda q, u: _truncated_moment(q, u, 1.0, c)
    return m(p_prime, gamma * alpha) * m(p, alpha) / (m(p_prime, alpha) * m(p, gamma * alpha))
