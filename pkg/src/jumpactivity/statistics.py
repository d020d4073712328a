"""Ratio statistics for testing finite vs infinite jump activity.

All truncated power variations are summed day by day and then across days
before any ratio is formed.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Union

import numpy as np

from .moments import MomentTable
from .normal import normal_cdf, upper_quantile
from .pathseries import (
    InvalidArgumentError,
    PathSeries,
    TruncationSpec,
    check_rate_condition,
    rate_exponents,
    truncated_power_variation,
)

FA = "finite_activity"
IA = "infinite_activity"


class DegenerateSampleError(ArithmeticError):
    """A power variation needed in a denominator is zero."""

    def __init__(self, message: str, factor: str = "", n_truncated: int | None = None):
        super().__init__(message)
        self.factor = factor
        self.n_truncated = n_truncated


@dataclass(frozen=True)
class FiniteActivityTestConfig:
    truncation: TruncationSpec = field(default_factory=lambda: TruncationSpec(8.0))
    p: float = 4.0
    k: int = 2
    level: float = 0.05

    def __post_init__(self):
        if not self.p > 2:
            raise InvalidArgumentError(f"p must exceed 2, got {self.p}")
        # k = 1 is allowed as a diagnostic: the ratio is then identically 1
        if self.k < 1 or int(self.k) != self.k:
            raise InvalidArgumentError(f"k must be a positive integer, got {self.k}")
        if not 0 < self.level < 1:
            raise InvalidArgumentError(f"level must lie in (0, 1), got {self.level}")

    @property
    def null_limit(self) -> float:
        return self.k ** (self.p / 2 - 1)


@dataclass(frozen=True)
class InfiniteActivityTestConfig:
    truncation: TruncationSpec = field(default_factory=lambda: TruncationSpec(8.0))
    p: float = 3.0
    p_prime: float = 4.0
    gamma: float = 2.0
    level: float = 0.05

    def __post_init__(self):
        if not self.p_prime > self.p > 2:
            raise InvalidArgumentError(f"need p_prime > p > 2, got p={self.p}, p_prime={self.p_prime}")
        if not self.gamma > 1:
            raise InvalidArgumentError(f"gamma must exceed 1, got {self.gamma}")
        if not 0 < self.level < 1:
            raise InvalidArgumentError(f"level must lie in (0, 1), got {self.level}")

    @property
    def null_limit(self) -> float:
        return self.gamma ** (self.p_prime - self.p)


TestConfig = Union[FiniteActivityTestConfig, InfiniteActivityTestConfig]


@dataclass
class TestReport:
    """Outcome of one test on one path.

    ``reject`` is ``statistic < critical_value``. A degenerate report carries
    NaNs for whatever could not be formed and never rejects.
    """

    __test__ = False  # not a pytest class

    test: str
    alpha: float
    level: float
    statistic: float
    null_limit: float
    variance: float
    variance_raw: float
    z_score: float
    critical_value: float
    p_value: float
    reject: bool
    degenerate: bool
    reason: str
    noise_limit: float
    n_increments_used: int
    truncation_cutoffs: tuple[float, ...]

    @property
    def decision(self) -> str:
        if self.degenerate:
            return "no decision"
        return "reject" if self.reject else "fail to reject"

    def rejects_at(self, level: float) -> bool:
        """Decision of the same statistic at another nominal level."""
        if self.degenerate:
            return False
        return self.statistic < self.null_limit - upper_quantile(level) * math.sqrt(self.variance)

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["truncation_cutoffs"] = list(self.truncation_cutoffs)
        rec["decision"] = self.decision
        return rec


REPORT_FIELDS = tuple(TestReport.__dataclass_fields__) + ("decision",)


def _cutoffs(path: PathSeries, spec: TruncationSpec) -> np.ndarray:
    u = np.atleast_1d(np.asarray(spec.cutoff(path.delta), dtype=float))
    return u if u.size > 1 else np.full(path.n_days, float(u[0]))


def _count_kept(path: PathSeries, u: np.ndarray, stride: int = 1) -> int:
    return int(sum(np.count_nonzero(a <= ui) for a, ui in zip(path.abs_increments(stride), u)))


def _fa_variations(path: PathSeries, cfg: FiniteActivityTestConfig) -> dict:
    u = _cutoffs(path, cfg.truncation)
    B = {
        "fine": truncated_power_variation(path, cfg.p, u, 1),
        "coarse": truncated_power_variation(path, cfg.p, u, cfg.k),
        "fine_2p": truncated_power_variation(path, 2 * cfg.p, u, 1),
    }
    return {"u": u, "B": B}


def _require_positive(value: float, name: str, path: PathSeries, u: np.ndarray) -> None:
    if not value > 0:
        n = sum(a.size for a in path.abs_increments(1))
        raise DegenerateSampleError(
            f"{name} is zero: every increment was truncated",
            factor=name,
            n_truncated=n - _count_kept(path, u),
        )


def s_n(path: PathSeries, cfg: FiniteActivityTestConfig) -> float:
    """Ratio of the truncated p-variation at k*delta to the one at delta, same cutoff."""
    v = _fa_variations(path, cfg)
    _require_positive(v["B"]["fine"], "B(p,u,delta)", path, v["u"])
    return v["B"]["coarse"] / v["B"]["fine"]


def v_n(path: PathSeries, cfg: FiniteActivityTestConfig, moments: Optional[MomentTable] = None) -> float:
    moments = moments or MomentTable.compute(cfg.p, cfg.k)
    v = _fa_variations(path, cfg)
    _require_positive(v["B"]["fine"], "B(p,u,delta)", path, v["u"])
    return moments.n_pk * v["B"]["fine_2p"] / v["B"]["fine"] ** 2


def rate_warnings(cfg: TestConfig) -> list[str]:
    """Messages for truncation rates outside the range the limit theory covers.

    ``varpi = 1/2`` (the fixed-alpha indexing) sits on the boundary of every
    condition; it is reported like any other violation.
    """
    varpi = cfg.truncation.varpi
    rho1, rho2 = rate_exponents(cfg.p)
    if isinstance(cfg, FiniteActivityTestConfig):
        checks = [(0.5, "probability-limit/CLT under the null"), (rho1, "alternative (S_n -> 1)")]
    else:
        checks = [(rho1, "probability limit under the null"), (rho2, "CLT under the null")]
    return [
        f"varpi={varpi:g} does not satisfy the {what} rate condition (needs varpi < {bound:.4g})"
        for bound, what in checks
        if not check_rate_condition(varpi, bound)
    ]


def _decide(
    test: str, cfg: TestConfig, stat: float, var_raw: float, u: np.ndarray, n_used: int,
    cutoffs: tuple, noise: float, floor: float = 0.0,
) -> TestReport:
    limit = cfg.null_limit
    z_a = upper_quantile(cfg.level)
    var = max(var_raw, floor)
    degenerate = not var_raw > 0 and test == IA
    reason = "non-positive variance estimate" if degenerate else ""
    crit = limit - z_a * math.sqrt(var)
    z = (stat - limit) / math.sqrt(var) if var > 0 else math.nan
    return TestReport(
        test=test,
        alpha=cfg.truncation.alpha,
        level=cfg.level,
        statistic=stat,
        null_limit=limit,
        variance=var,
        variance_raw=var_raw,
        z_score=z,
        critical_value=crit,
        p_value=normal_cdf(z) if var > 0 else math.nan,
        reject=(not degenerate) and stat < crit,
        degenerate=degenerate,
        reason=reason,
        noise_limit=noise,
        n_increments_used=n_used,
        truncation_cutoffs=cutoffs,
    )


def _degenerate_report(test: str, cfg: TestConfig, err: DegenerateSampleError, cutoffs: tuple) -> TestReport:
    reason = str(err)
    if err.n_truncated is not None:
        reason += f" ({err.n_truncated} increments truncated)"
    nan = math.nan
    return TestReport(
        test=test, alpha=cfg.truncation.alpha, level=cfg.level, statistic=nan,
        null_limit=cfg.null_limit, variance=nan, variance_raw=nan, z_score=nan,
        critical_value=nan, p_value=nan, reject=False, degenerate=True, reason=reason,
        noise_limit=noise_limits(cfg), n_increments_used=0, truncation_cutoffs=cutoffs,
    )


def test_finite_activity(
    path: PathSeries, cfg: FiniteActivityTestConfig, moments: Optional[MomentTable] = None
) -> TestReport:
    """Reject finite activity when S_n < k^(p/2-1) - z_a sqrt(V_n).

    Degenerate samples come back as a report with ``degenerate=True``.
    """
    if cfg.k < 2:
        raise InvalidArgumentError("the finite-activity test needs k >= 2")
    moments = moments or MomentTable.compute(cfg.p, cfg.k)
    v = _fa_variations(path, cfg)
    u = v["u"]
    cutoffs = tuple(float(x) for x in np.unique(u)) if np.all(u == u[0]) else tuple(map(float, u))
    B = v["B"]
    try:
        _require_positive(B["fine"], "B(p,u,delta)", path, u)
    except DegenerateSampleError as err:
        return _degenerate_report(FA, cfg, err, cutoffs)
    stat = B["coarse"] / B["fine"]
    var = moments.n_pk * B["fine_2p"] / B["fine"] ** 2
    return _decide(FA, cfg, stat, var, u, _count_kept(path, u), cutoffs, noise_limits(cfg))


test_finite_activity.__test__ = False


def _ia_variations(path: PathSeries, cfg: InfiniteActivityTestConfig) -> dict:
    u = _cutoffs(path, cfg.truncation)
    g = cfg.gamma
    p, q = cfg.p, cfg.p_prime
    B = {}
    for label, cut in (("u", u), ("gu", g * u)):
        for name, power in (("p", p), ("q", q), ("2p", 2 * p), ("2q", 2 * q), ("pq", p + q)):
            B[name, label] = truncated_power_variation(path, power, cut, 1)
    return {"u": u, "B": B}


_IA_NAMES = {
    ("p", "u"): "B(p,u)", ("q", "u"): "B(p',u)",
    ("p", "gu"): "B(p,gamma*u)", ("q", "gu"): "B(p',gamma*u)",
}


def _ia_check(path: PathSeries, B: dict, u: np.ndarray) -> None:
    for key, name in _IA_NAMES.items():
        _require_positive(B[key], name, path, u)


def _s_prime(B: dict) -> float:
    return B["q", "gu"] * B["p", "u"] / (B["q", "u"] * B["p", "gu"])


def _v_prime(B: dict, cfg: InfiniteActivityTestConfig) -> float:
    g, p, q = cfg.gamma, cfg.p, cfg.p_prime
    bracket = (
        B["2p", "u"] / B["p", "u"] ** 2
        + (1 - 2 * g**-p) * B["2p", "gu"] / B["p", "gu"] ** 2
        + B["2q", "u"] / B["q", "u"] ** 2
        + (1 - 2 * g**-q) * B["2q", "gu"] / B["q", "gu"] ** 2
        - 2 * B["pq", "u"] / (B["p", "u"] * B["q", "u"])
        - 2 * (1 - g**-p - g**-q) * B["pq", "gu"] / (B["p", "gu"] * B["q", "gu"])
    )
    return g ** (2 * q - 2 * p) * bracket


def s_n_prime(path: PathSeries, cfg: InfiniteActivityTestConfig) -> float:
    """Two-power, two-cutoff ratio at a single sampling frequency."""
    v = _ia_variations(path, cfg)
    _ia_check(path, v["B"], v["u"])
    return _s_prime(v["B"])


def v_n_prime(path: PathSeries, cfg: InfiniteActivityTestConfig) -> float:
    """Raw variance estimate for ``s_n_prime``; may be negative in small samples."""
    v = _ia_variations(path, cfg)
    _ia_check(path, v["B"], v["u"])
    return _v_prime(v["B"], cfg)


def test_infinite_activity(path: PathSeries, cfg: InfiniteActivityTestConfig, variance_floor: float = 0.0) -> TestReport:
    """Reject infinite activity when S'_n < gamma^(p'-p) - z_a sqrt(V'_n)."""
    v = _ia_variations(path, cfg)
    u, B = v["u"], v["B"]
    both = np.concatenate([u, cfg.gamma * u])
    if np.all(u == u[0]):
        cutoffs = (float(u[0]), float(cfg.gamma * u[0]))
    else:
        cutoffs = tuple(map(float, both))
    try:
        _ia_check(path, B, u)
    except DegenerateSampleError as err:
        return _degenerate_report(IA, cfg, err, cutoffs)
    return _decide(
        IA, cfg, _s_prime(B), _v_prime(B, cfg), u, _count_kept(path, u), cutoffs,
        noise_limits(cfg), floor=variance_floor,
    )


test_infinite_activity.__test__ = False


def noise_limits(cfg: TestConfig) -> float:
    """Probability limit of the statistic when additive noise dominates."""
    if isinstance(cfg, FiniteActivityTestConfig):
        return 1.0 / cfg.k
    return cfg.gamma ** (cfg.p_prime - cfg.p)


def noise_band(report: TestReport, tol: float = 0.15) -> str:
    """Human reading of where a statistic sits relative to its possible limits."""
    if report.degenerate:
        return "degenerate sample: no interpretation"
    s = report.statistic
    if report.test == FA:
        bands = {"noise-dominated": report.noise_limit, "finite activity": report.null_limit, "infinite activity": 1.0}
    else:
        bands = {"infinite activity (or noise)": report.null_limit, "finite activity": 1.0}
    label, target = min(bands.items(), key=lambda kv: abs(s - kv[1]))
    if abs(s - target) > tol * max(target, 1.0):
        return f"S={s:.4g} not near any limit"
    return f"S={s:.4g} near {target:.4g}: {label}"
