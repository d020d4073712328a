"""Discretely sampled paths and truncated power variations.

Time is measured in years. A trading year has 252 days of 23,400 seconds,
so one second is ``SECOND = 1 / (252 * 23400)`` years.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

TRADING_DAYS = 252
SECONDS_PER_DAY = 23_400
SECOND = 1.0 / (TRADING_DAYS * SECONDS_PER_DAY)

Cutoff = Union[float, Sequence[float], np.ndarray]


class InvalidArgumentError(ValueError):
    """A parameter is outside its admissible domain."""


class DataError(ValueError):
    """The observations themselves are unusable."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True, eq=False)
class PathSeries:
    """Regularly spaced observations of one path, segmented into days.

    ``day_boundaries`` holds the start index of every day segment; the first
    entry is always 0. Increments are only formed inside a segment, so the
    jump from one day's close to the next day's open is never used.
    """

    values: np.ndarray
    delta: float
    day_boundaries: tuple[int, ...] = (0,)
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise InvalidArgumentError("values must be one-dimensional")
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise DataError(f"non-finite observation at index {bad[0]}", index=int(bad[0]))
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise InvalidArgumentError(f"delta must be positive, got {self.delta}")
        bounds = tuple(int(b) for b in self.day_boundaries) or (0,)
        if bounds[0] != 0:
            raise InvalidArgumentError("first day boundary must be 0")
        if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
            raise InvalidArgumentError("day boundaries must be strictly increasing")
        if len(values) and bounds[-1] >= len(values):
            raise InvalidArgumentError("day boundary out of range")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "day_boundaries", bounds)

    @classmethod
    def from_days(cls, days: Sequence[Sequence[float]], delta: float) -> "PathSeries":
        days = [np.asarray(d, dtype=np.float64) for d in days]
        if not days or any(len(d) == 0 for d in days):
            raise InvalidArgumentError("every day needs at least one observation")
        starts = np.cumsum([0] + [len(d) for d in days[:-1]])
        return cls(np.concatenate(days), delta, tuple(int(s) for s in starts))

    @property
    def n_days(self) -> int:
        return len(self.day_boundaries)

    def days(self) -> list[np.ndarray]:
        edges = list(self.day_boundaries) + [len(self.values)]
        return [self.values[a:b] for a, b in zip(edges, edges[1:])]

    def day(self, i: int) -> "PathSeries":
        return PathSeries(self.days()[i], self.delta)

    def permute_days(self, order: Sequence[int]) -> "PathSeries":
        days = self.days()
        return PathSeries.from_days([days[i] for i in order], self.delta)

    def scaled(self, factor: float) -> "PathSeries":
        return PathSeries(self.values * factor, self.delta, self.day_boundaries)

    def abs_increments(self, stride: int = 1) -> list[np.ndarray]:
        """Absolute strided increments, one array per day (cached)."""
        key = ("abs", stride)
        if key not in self._cache:
            self._cache[key] = [np.abs(d) for d in day_increments(self, stride)]
        return self._cache[key]


@dataclass(frozen=True)
class TruncationSpec:
    """Cutoff rule ``u = alpha * sigma_ref * delta**varpi``.

    ``alpha`` counts standard deviations of the continuous part when
    ``varpi = 1/2``. ``sigma_ref`` is an annualized volatility, either one
    number or one value per day segment.
    """

    alpha: float
    varpi: float = 0.5
    sigma_ref: Union[float, tuple[float, ...]] = 0.25

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidArgumentError(f"alpha must be positive, got {self.alpha}")
        if not 0 < self.varpi <= 0.5:
            raise InvalidArgumentError(f"varpi must lie in (0, 1/2], got {self.varpi}")
        sig = np.atleast_1d(np.asarray(self.sigma_ref, dtype=float))
        if not np.all(sig > 0):
            raise InvalidArgumentError("sigma_ref must be positive")
        if sig.size > 1:
            object.__setattr__(self, "sigma_ref", tuple(float(s) for s in sig))

    def cutoff(self, delta: float) -> Union[float, np.ndarray]:
        return cutoff_from_spec(self, delta)

    def with_alpha(self, alpha: float) -> "TruncationSpec":
        return TruncationSpec(alpha, self.varpi, self.sigma_ref)


def cutoff_from_spec(spec: TruncationSpec, delta: float) -> Union[float, np.ndarray]:
    if not delta > 0:
        raise InvalidArgumentError(f"delta must be positive, got {delta}")
    scale = spec.alpha * delta**spec.varpi
    if isinstance(spec.sigma_ref, tuple):
        return scale * np.asarray(spec.sigma_ref)
    return scale * spec.sigma_ref


def day_increments(path: PathSeries, stride: int = 1) -> list[np.ndarray]:
    """Strided increments within each day; a day with m fine increments yields m // stride."""
    if stride < 1 or int(stride) != stride:
        raise InvalidArgumentError(f"stride must be a positive integer, got {stride}")
    stride = int(stride)
    if len(path.values) < stride + 1:
        raise InvalidArgumentError(
            f"path has {len(path.values)} observations, need at least {stride + 1}"
        )
    return [np.diff(d[::stride]) for d in path.days()]


def increments(path: PathSeries, stride: int = 1) -> np.ndarray:
    return np.concatenate(day_increments(path, stride))


def _per_day_cutoffs(cutoff: Cutoff, n_days: int) -> np.ndarray:
    u = np.asarray(cutoff, dtype=float)
    if u.ndim == 0:
        u = np.full(n_days, float(u))
    if u.shape != (n_days,):
        raise InvalidArgumentError(f"expected {n_days} per-day cutoffs, got shape {u.shape}")
    if not np.all(u > 0):
        raise InvalidArgumentError("cutoff must be positive")
    return u


def day_power_variations(path: PathSeries, p: float, cutoff: Cutoff, stride: int = 1) -> np.ndarray:
    """Per-day truncated power sums; each day is summed pairwise by numpy."""
    if not p > 0:
        raise InvalidArgumentError(f"power must be positive, got {p}")
    days = path.abs_increments(stride)
    u = _per_day_cutoffs(cutoff, len(days))
    out = np.empty(len(days))
    for i, (a, ui) in enumerate(zip(days, u)):
        kept = a[a <= ui]
        out[i] = np.sum(kept**p)
    return out


def truncated_power_variation(path: PathSeries, p: float, cutoff: Cutoff, stride: int = 1) -> float:
    """Sum of ``|increment|**p`` over increments with ``|increment| <= cutoff``.

    ``cutoff`` may be a scalar or one value per day. Days are combined with
    ``math.fsum``, which makes the total independent of day order.
    """
    return math.fsum(day_power_variations(path, p, cutoff, stride))


def rate_exponents(p: float) -> tuple[float, float]:
    """Upper bounds on the truncation-rate exponent for consistency and for the CLT."""
    if not p > 2:
        raise InvalidArgumentError(f"rate exponents need p > 2, got {p}")
    rho1 = (p - 2) / (2 * p)
    rho2 = min((p - 2) / (4 * p - 4), (2 * p - 4) / (11 * p - 10))
    return rho1, rho2


def check_rate_condition(varpi: float, rho_bound: float) -> bool:
    """Whether ``u ~ delta**varpi`` satisfies ``sup delta**rho / u < inf`` for some rho < rho_bound."""
    return varpi < rho_bound
