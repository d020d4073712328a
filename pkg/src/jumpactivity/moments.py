"""Absolute moments of the standard normal used by the finite-activity CLT."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, hyp1f1, roots_genlaguerre

from .pathseries import InvalidArgumentError

QUAD_TOL = 1e-10


class QuadratureError(ArithmeticError):
    def __init__(self, message: str, achieved: float):
        super().__init__(message)
        self.achieved = achieved


def abs_normal_moment(p: float) -> float:
    """E|U|^p for U ~ N(0, 1).

    Integer orders use the recursion m_p = (p - 1) m_{p-2}, so even orders
    come out as exact double factorials.
    """
    if not p > 0:
        raise InvalidArgumentError(f"p must be positive, got {p}")
    if float(p).is_integer() and p <= 64:
        m = 1.0 if int(p) % 2 == 0 else math.sqrt(2 / math.pi)
        for j in range(int(p), 1, -2):
            m *= j - 1
        return m
    return math.exp(0.5 * p * math.log(2.0) + gammaln((p + 1) / 2) - 0.5 * math.log(math.pi))


def _shifted_abs_moment(mean: np.ndarray, sd: float, p: float) -> np.ndarray:
    # E|mean + sd*V|^p via Kummer's function; smooth and even in mean
    return sd**p * abs_normal_moment(p) * hyp1f1(-p / 2, 0.5, -(mean**2) / (2 * sd**2))


def _joint_quadrature(p: float, k: int, nodes: int) -> float:
    # E|U|^p g(U) = sqrt(2/pi) * int_0^inf u^p g(u) e^{-u^2/2} du; substitute t = u^2/2
    x, w = roots_genlaguerre(nodes, (p - 1) / 2)
    u = np.sqrt(2 * x)
    g = _shifted_abs_moment(u, math.sqrt(k - 1), p)
    return float(2 ** (p / 2) / math.sqrt(math.pi) * np.dot(w, g))


def joint_abs_moment(p: float, k: int, tol: float = QUAD_TOL) -> float:
    """E(|U|^p |U + sqrt(k-1) V|^p) for independent standard normals U, V.

    The inner expectation over V has a closed form in the confluent
    hypergeometric function; the outer one uses generalized Gauss-Laguerre
    rules, doubling the node count until two successive rules agree.
    """
    if not p > 2:
        raise InvalidArgumentError(f"p must exceed 2, got {p}")
    if k < 2 or int(k) != k:
        raise InvalidArgumentError(f"k must be an integer >= 2, got {k}")
    prev = _joint_quadrature(p, k, 16)
    nodes = 32
    while nodes <= 512:
        cur = _joint_quadrature(p, k, nodes)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev, nodes = cur, nodes * 2
    raise QuadratureError(
        f"joint moment quadrature did not converge for p={p}, k={k}", achieved=abs(cur - prev)
    )


def joint_abs_moment_even(p: int, k: int) -> float:
    """Exact E(U^p (U + aV)^p), a^2 = k - 1, for even integer p, by binomial expansion."""
    if p % 2 or p <= 0:
        raise InvalidArgumentError(f"exact expansion needs an even positive integer p, got {p}")
    a2 = k - 1
    total = 0
    for j in range(0, p + 1, 2):
        total += math.comb(p, j) * a2 ** (j // 2) * _double_factorial(2 * p - j - 1) * _double_factorial(j - 1)
    return float(total)


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def n_constant(p: float, k: int) -> float:
    """Asymptotic-variance constant of the two-frequency ratio statistic."""
    m_p = abs_normal_moment(p)
    m_2p = abs_normal_moment(2 * p)
    m_kp = joint_abs_moment(p, k)
    return (
        k ** (p - 2) * (1 + k) * m_2p + k ** (p - 2) * (k - 1) * m_p**2 - 2 * k ** (p / 2 - 1) * m_kp
    ) / m_2p


@dataclass(frozen=True)
class MomentTable:
    p: float
    k: int
    m_p: float
    m_2p: float
    m_kp: float
    n_pk: float

    @classmethod
    def compute(cls, p: float = 4.0, k: int = 2) -> "MomentTable":
        return _moment_table(float(p), int(k))


@lru_cache(maxsize=None)
def _moment_table(p: float, k: int) -> MomentTable:
    return MomentTable(
        p=p,
        k=k,
        m_p=abs_normal_moment(p),
        m_2p=abs_normal_moment(2 * p),
        m_kp=joint_abs_moment(p, k),
        n_pk=n_constant(p, k),
    )
