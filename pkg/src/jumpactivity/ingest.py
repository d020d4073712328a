"""Tick ingestion, previous-tick resampling and the per-day empirical pipeline.

Input CSV (UTF-8)::

    timestamp_ms,price,flag
    1136295000000,21.05,0

``timestamp_ms`` is milliseconds since the Unix epoch (UTC); ``flag`` is
optional. When present, only rows whose flag is in ``good_flags``
(default ``{"0"}``) are kept.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO, Union

import numpy as np

from .moments import MomentTable
from .pathseries import SECOND, DataError, InvalidArgumentError, PathSeries, TruncationSpec
from .records import fmt
from .statistics import (
    FiniteActivityTestConfig,
    InfiniteActivityTestConfig,
    TestReport,
    test_finite_activity,
    test_infinite_activity,
)

MS_PER_DAY = 86_400_000
NYSE_SESSION = (9.5 * 3600, 16.0 * 3600)  # seconds after midnight
DEFAULT_GOOD_FLAGS = frozenset({"0"})


class TickFormatError(DataError):
    pass


@dataclass(frozen=True)
class TickRecord:
    timestamp: int
    price: float
    quality_flag: str = "0"


@dataclass
class Ticks:
    """Column-oriented tick data sorted by time; indexing yields TickRecord."""

    timestamp_ms: np.ndarray
    price: np.ndarray
    flag: np.ndarray
    dropped: int = 0

    def __len__(self) -> int:
        return len(self.timestamp_ms)

    def __getitem__(self, i: int) -> TickRecord:
        return TickRecord(int(self.timestamp_ms[i]), float(self.price[i]), str(self.flag[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))


def _open(source) -> TextIO:
    if hasattr(source, "read"):
        return source
    return open(source, encoding="utf-8", newline="")


def load_ticks(source: Union[str, Path, TextIO], good_flags: Optional[Iterable[str]] = None) -> Ticks:
    """Parse, drop bad-flag rows and stable-sort by timestamp."""
    good = DEFAULT_GOOD_FLAGS if good_flags is None else frozenset(good_flags)
    fh = _open(source)
    try:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return Ticks(np.empty(0, np.int64), np.empty(0), np.empty(0, dtype=object))
        header = [h.strip().lower() for h in header]
        if header[:2] != ["timestamp_ms", "price"] or header[2:] not in ([], ["flag"]):
            raise TickFormatError(f"line 1: expected header timestamp_ms,price[,flag], got {','.join(header)}", 1)
        has_flag = len(header) == 3
        ts, px, fl = [], [], []
        dropped = 0
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise TickFormatError(f"line {lineno}: expected {len(header)} fields, got {len(row)}", lineno)
            try:
                t = int(row[0])
                p = float(row[1])
            except ValueError as err:
                raise TickFormatError(f"line {lineno}: {err}", lineno) from None
            if not (p > 0 and math.isfinite(p)):
                raise TickFormatError(f"line {lineno}: price must be positive, got {row[1]}", lineno)
            flag = row[2].strip() if has_flag else "0"
            if has_flag and flag not in good:
                dropped += 1
                continue
            ts.append(t)
            px.append(p)
            fl.append(flag)
    finally:
        if fh is not source:
            fh.close()
    t = np.asarray(ts, dtype=np.int64)
    order = np.argsort(t, kind="stable")
    return Ticks(t[order], np.asarray(px, dtype=float)[order], np.asarray(fl, dtype=object)[order], dropped)


@dataclass
class ResampleReport:
    days: list = field(default_factory=list)  # ISO dates kept, in order
    skipped: list = field(default_factory=list)  # (ISO date, reason)


def _iso(day_index: int) -> str:
    return (dt.date(1970, 1, 1) + dt.timedelta(days=int(day_index))).isoformat()


def resample_to_grid(
    ticks: Ticks,
    delta_seconds: float,
    session_bounds: tuple[float, float] = NYSE_SESSION,
    min_ticks: int = 1,
    report: Optional[ResampleReport] = None,
) -> PathSeries:
    """Previous-tick log-prices on ``open, open + delta, ..., close`` for each UTC calendar day.

    A day is skipped (and listed in ``report.skipped``) if it has fewer than
    ``min_ticks`` ticks in the session or no tick at or before the open.
    """
    open_s, close_s = session_bounds
    if not delta_seconds > 0:
        raise InvalidArgumentError("delta_seconds must be positive")
    n = (close_s - open_s) / delta_seconds
    if abs(n - round(n)) > 1e-9 or round(n) < 1:
        raise InvalidArgumentError("delta_seconds must divide the session length")
    n = int(round(n))
    step_ms = delta_seconds * 1000.0
    report = report if report is not None else ResampleReport()
    days = []
    if len(ticks):
        day_id = ticks.timestamp_ms // MS_PER_DAY
        for d in np.unique(day_id):
            sel = day_id == d
            t, p = ticks.timestamp_ms[sel], ticks.price[sel]
            base = int(d) * MS_PER_DAY
            grid = base + np.round(open_s * 1000.0 + step_ms * np.arange(n + 1)).astype(np.int64)
            in_session = np.count_nonzero((t >= grid[0]) & (t <= grid[-1]))
            if in_session < min_ticks:
                report.skipped.append((_iso(d), f"{in_session} ticks in session, need {min_ticks}"))
                continue
            idx = np.searchsorted(t, grid, side="right") - 1
            if idx[0] < 0:
                report.skipped.append((_iso(d), "no tick at or before the open"))
                continue
            days.append(np.log(p[idx]))
            report.days.append(_iso(d))
    if not days:
        raise DataError("no usable trading day in the tick data")
    return PathSeries.from_days(days, delta_seconds * SECOND * (23_400 / (close_s - open_s)))


@dataclass(frozen=True)
class DayVolatility:
    day: int
    sigma_hat: float
    n_used: int
    flagged: bool = False


def estimate_day_volatility(values: np.ndarray, delta: float, day: int = 0) -> DayVolatility:
    """Annualized truncated realized volatility of one day, cutoff ``sqrt(delta)`` in log-return units.

    With 25% annual volatility that cutoff is four standard deviations.
    """
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise InvalidArgumentError("a day needs at least two observations")
    inc = np.diff(values)
    keep = np.abs(inc) <= math.sqrt(delta)
    t_day = inc.size * delta
    sigma = math.sqrt(float(np.sum(inc[keep] ** 2)) / t_day)
    return DayVolatility(day, sigma, int(keep.sum()), flagged=sigma == 0.0)


@dataclass
class PipelineResult:
    alpha: float
    fa: TestReport
    ia: list  # one TestReport per gamma
    gammas: tuple
    days_used: int
    days_excluded: list

    def records(self) -> list[dict]:
        out = [dict(self.fa.to_record(), gamma=math.nan, days_used=self.days_used)]
        for rep, g in zip(self.ia, self.gammas):
            out.append(dict(rep.to_record(), gamma=g, days_used=self.days_used))
        return out


def run_empirical_pipeline(
    path: PathSeries,
    fa_cfg: FiniteActivityTestConfig,
    ia_cfg: InfiniteActivityTestConfig,
    alphas: Sequence[float],
    gammas: Optional[Sequence[float]] = None,
) -> list[PipelineResult]:
    """Per-day volatility pre-estimate, per-day cutoffs ``alpha * sigma_hat * delta**varpi``,
    cross-day sums of every power variation, then both tests for each alpha.
    """
    vols = [estimate_day_volatility(v, path.delta, i) for i, v in enumerate(path.days())]
    keep = [v for v in vols if not v.flagged]
    excluded = [v.day for v in vols if v not in keep]
    if not keep:
        raise DataError("every day is degenerate (zero volatility estimate)")
    all_days = path.days()
    sub = PathSeries.from_days([all_days[v.day] for v in keep], path.delta)
    sigmas = tuple(v.sigma_hat for v in keep)
    sigma_ref = sigmas if len(sigmas) > 1 else sigmas[0]
    gammas = tuple(gammas) if gammas else (ia_cfg.gamma,)
    moments = MomentTable.compute(fa_cfg.p, fa_cfg.k)
    results = []
    for alpha in alphas:
        fa_t = TruncationSpec(alpha, fa_cfg.truncation.varpi, sigma_ref)
        ia_t = TruncationSpec(alpha, ia_cfg.truncation.varpi, sigma_ref)
        fa = test_finite_activity(sub, FiniteActivityTestConfig(fa_t, fa_cfg.p, fa_cfg.k, fa_cfg.level), moments)
        ia = [
            test_infinite_activity(sub, InfiniteActivityTestConfig(ia_t, ia_cfg.p, ia_cfg.p_prime, g, ia_cfg.level))
            for g in gammas
        ]
        results.append(PipelineResult(float(alpha), fa, ia, gammas, len(keep), excluded))
    return results


PIPELINE_FIELDS = (
    "test", "alpha", "gamma", "level", "statistic", "null_limit", "variance", "z_score",
    "critical_value", "p_value", "decision", "noise_limit", "n_increments_used", "days_used",
)


# -- export ---------------------------------------------------------------


def path_to_ticks(
    path: PathSeries, start_date: str = "2006-01-03", session_open: float = NYSE_SESSION[0]
) -> Ticks:
    """One tick per grid point, day ``d`` placed on calendar day ``start_date + d``."""
    delta_ms = path.delta / SECOND * 1000.0
    if abs(delta_ms - round(delta_ms)) > 1e-6:
        raise InvalidArgumentError("export needs a sampling interval that is a whole number of milliseconds")
    base = (dt.date.fromisoformat(start_date) - dt.date(1970, 1, 1)).days
    ts, px = [], []
    for d, vals in enumerate(path.days()):
        t0 = (base + d) * MS_PER_DAY + int(round(session_open * 1000))
        ts.append(t0 + int(round(delta_ms)) * np.arange(vals.size, dtype=np.int64))
        px.append(np.exp(vals))
    price = np.concatenate(px)
    if not np.all(np.isfinite(price)):
        raise DataError("path has log-prices too large to export as prices")
    t = np.concatenate(ts)
    return Ticks(t, price, np.full(t.size, "0", dtype=object))


def write_ticks_csv(ticks: Ticks, dest: Union[str, Path, TextIO]) -> None:
    fh = dest if hasattr(dest, "write") else open(dest, "w", encoding="utf-8", newline="")
    try:
        fh.write("timestamp_ms,price,flag\n")
        for t, p, f in zip(ticks.timestamp_ms.tolist(), ticks.price.tolist(), ticks.flag.tolist()):
            fh.write(f"{t},{fmt(p)},{f}\n")
    finally:
        if fh is not dest:
            fh.close()
