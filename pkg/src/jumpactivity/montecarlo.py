"""Replicated experiments: rejection tables, alpha sweeps, z-score samples.

Scenarios name the data-generating process and the test applied to it:

========  ===========================  ==================
scenario  jump component of the data   statistic
========  ===========================  ==================
fa_null   compound Poisson             S_n  (level)
ia_null   Cauchy / beta-stable         S'_n (level)
ia_alt    Cauchy / beta-stable         S_n  (power)
fa_alt    compound Poisson             S'_n (power)
noise     compound Poisson + noise     S_n or S'_n
========  ===========================  ==================

Replicate ``r`` of every cell uses the random stream keyed by ``(base_seed,
r)``, so cells share common random numbers and results do not depend on
the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .moments import MomentTable
from .pathseries import SECOND, InvalidArgumentError, PathSeries, TruncationSpec
from .records import write_csv
from .simulator import (
    INTENSITY_POISSON_PER_DAY,
    INTENSITY_TAIL_PROBABILITY,
    JumpComponentSpec,
    NoiseSpec,
    SimulationConfig,
    SvParams,
    simulate_path,
)
from .statistics import (
    FiniteActivityTestConfig,
    InfiniteActivityTestConfig,
    test_finite_activity,
    test_infinite_activity,
)

SCENARIOS = {
    "fa_null": ("compound_poisson", "fa"),
    "ia_null": ("stable", "ia"),
    "ia_alt": ("stable", "fa"),
    "fa_alt": ("compound_poisson", "ia"),
    "noise": ("compound_poisson", "fa"),
}
DEFAULT_ALPHAS = (6.0, 7.0, 8.0, 9.0, 10.0, 12.0, 15.0)

REJECT, ACCEPT, DEGENERATE = 1, 0, -1


@dataclass(frozen=True)
class ExperimentGrid:
    scenario: str = "fa_null"
    intensities: tuple = ("medium",)
    alphas: tuple = DEFAULT_ALPHAS
    deltas: tuple = (SECOND,)
    horizon_days: int = 1
    replicates: int = 1000
    levels: tuple = (0.10, 0.05)
    base_seed: int = 0
    statistic: Optional[str] = None
    sv: SvParams = field(default_factory=SvParams)
    beta: float = 1.0
    varpi: float = 0.5
    sigma_ref: Optional[float] = None
    noise_sd_multiple: float = 3.0
    k: int = 2
    p_fa: float = 4.0
    p_ia: float = 3.0
    p_prime: float = 4.0
    gamma: float = 2.0
    workers: int = 1

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise InvalidArgumentError(f"unknown scenario {self.scenario!r}")
        if self.replicates < 1:
            raise InvalidArgumentError("replicates must be at least 1")
        if any(not a > 0 for a in self.alphas):
            raise InvalidArgumentError("alphas must be positive")
        if self.statistic not in (None, "fa", "ia"):
            raise InvalidArgumentError("statistic must be 'fa' or 'ia'")
        for name in ("intensities", "alphas", "deltas", "levels"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        for i in self.intensities:
            if i not in ("none", "low", "medium", "high"):
                raise InvalidArgumentError(f"unknown intensity {i!r}")

    @property
    def test_kind(self) -> str:
        return self.statistic or SCENARIOS[self.scenario][1]

    @property
    def statistic_name(self) -> str:
        return "S_n" if self.test_kind == "fa" else "S_n_prime"

    def simulation_config(self, intensity: str, delta: float) -> SimulationConfig:
        kind = SCENARIOS[self.scenario][0]
        if intensity == "none":
            jumps = JumpComponentSpec()
        elif kind == "stable":
            jumps = JumpComponentSpec.stable(INTENSITY_TAIL_PROBABILITY[intensity], delta, self.beta, self.sv.eta)
        else:
            jumps = JumpComponentSpec.poisson(INTENSITY_POISSON_PER_DAY[intensity])
        noise = NoiseSpec()
        if self.scenario == "noise":
            noise = NoiseSpec("additive", additive_sd=self.noise_sd_multiple * math.sqrt(self.sv.eta * delta))
        return SimulationConfig(
            sv=self.sv, jumps=jumps, noise=noise, delta=delta, horizon=self.horizon_days, seed=self.base_seed
        )

    def test_config(self, alpha: float):
        sigma = math.sqrt(self.sv.eta) if self.sigma_ref is None else self.sigma_ref
        trunc = TruncationSpec(alpha, self.varpi, sigma)
        if self.test_kind == "fa":
            return FiniteActivityTestConfig(trunc, p=self.p_fa, k=self.k, level=self.levels[0])
        return InfiniteActivityTestConfig(trunc, p=self.p_ia, p_prime=self.p_prime, gamma=self.gamma, level=self.levels[0])


def run_test(path: PathSeries, cfg):
    if isinstance(cfg, FiniteActivityTestConfig):
        return test_finite_activity(path, cfg, MomentTable.compute(cfg.p, cfg.k))
    return test_infinite_activity(path, cfg)


def _replicate(grid: ExperimentGrid, intensity: str, delta: float, r: int):
    """Outcome codes (alpha x level), statistics and z-scores (alpha) for one replicate."""
    path = simulate_path(grid.simulation_config(intensity, delta), replicate=r)
    codes = np.empty((len(grid.alphas), len(grid.levels)), dtype=np.int8)
    stat = np.empty(len(grid.alphas))
    z = np.empty(len(grid.alphas))
    for i, alpha in enumerate(grid.alphas):
        rep = run_test(path, grid.test_config(alpha))
        stat[i], z[i] = rep.statistic, rep.z_score
        for j, level in enumerate(grid.levels):
            codes[i, j] = DEGENERATE if rep.degenerate else int(rep.rejects_at(level))
    return codes, stat, z


def _chunk(args):
    grid, intensity, delta, lo, hi = args
    out = [_replicate(grid, intensity, delta, r) for r in range(lo, hi)]
    return (np.stack([o[0] for o in out]), np.stack([o[1] for o in out]), np.stack([o[2] for o in out]))


@dataclass
class CellSamples:
    """Raw per-replicate results of one (intensity, delta) cell."""

    intensity: str
    delta: float
    codes: np.ndarray  # (replicates, alphas, levels)
    statistics: np.ndarray  # (replicates, alphas), NaN when degenerate
    z_scores: np.ndarray


def simulate_cell(grid: ExperimentGrid, intensity: str, delta: float) -> CellSamples:
    n = grid.replicates
    workers = max(1, int(grid.workers))
    size = max(1, math.ceil(n / (workers * 4)))
    jobs = [(grid, intensity, delta, lo, min(lo + size, n)) for lo in range(0, n, size)]
    if workers == 1:
        parts = [_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk, jobs))
    return CellSamples(
        intensity, delta,
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts]),
        np.concatenate([p[2] for p in parts]),
    )


@dataclass
class RejectionTable:
    rows: list

    FIELDS = (
        "scenario", "statistic", "intensity", "level", "alpha", "delta", "delta_seconds",
        "replicates", "rejections", "acceptances", "degenerate", "rate", "std_error", "mean_statistic",
    )

    def cell(self, **key) -> dict:
        hits = [r for r in self.rows if all(_match(r[k], v) for k, v in key.items())]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} rows match {key}")
        return hits[0]

    def to_csv(self, path) -> None:
        write_csv(self.rows, self.FIELDS, path)


def _match(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return math.isclose(float(a), float(b), rel_tol=1e-12)
    return a == b


def run_grid(grid: ExperimentGrid) -> RejectionTable:
    """Empirical rejection rates for every (intensity, delta, alpha, level) cell.

    Degenerate replicates are counted separately and excluded from the rate.
    """
    rows = []
    for intensity in grid.intensities:
        for delta in grid.deltas:
            cell = simulate_cell(grid, intensity, delta)
            rows.extend(_table_rows(grid, cell))
    return RejectionTable(rows)


def _table_rows(grid: ExperimentGrid, cell: CellSamples) -> list:
    rows = []
    for j, level in enumerate(grid.levels):
        for i, alpha in enumerate(grid.alphas):
            c = cell.codes[:, i, j]
            rej, acc, deg = int((c == REJECT).sum()), int((c == ACCEPT).sum()), int((c == DEGENERATE).sum())
            n_eff = rej + acc
            rate = rej / n_eff if n_eff else math.nan
            s = cell.statistics[:, i]
            rows.append({
                "scenario": grid.scenario,
                "statistic": grid.statistic_name,
                "intensity": cell.intensity,
                "level": float(level),
                "alpha": float(alpha),
                "delta": float(cell.delta),
                "delta_seconds": float(cell.delta / SECOND),
                "replicates": grid.replicates,
                "rejections": rej,
                "acceptances": acc,
                "degenerate": deg,
                "rate": rate,
                "std_error": math.sqrt(rate * (1 - rate) / n_eff) if n_eff else math.nan,
                "mean_statistic": float(np.nanmean(s)) if np.isfinite(s).any() else math.nan,
            })
    return rows


def sweep_alpha(grid: ExperimentGrid, intensity: Optional[str] = None, delta: Optional[float] = None) -> list:
    """Mean statistic across replicates for each alpha (one row per alpha)."""
    cell = simulate_cell(grid, intensity or grid.intensities[0], delta or grid.deltas[0])
    rows = []
    for i, alpha in enumerate(grid.alphas):
        s = cell.statistics[:, i]
        ok = np.isfinite(s)
        rows.append({
            "scenario": grid.scenario,
            "statistic": grid.statistic_name,
            "intensity": cell.intensity,
            "alpha": float(alpha),
            "mean": float(s[ok].mean()) if ok.any() else math.nan,
            "sd": float(s[ok].std(ddof=1)) if ok.sum() > 1 else math.nan,
            "n_valid": int(ok.sum()),
            "n_degenerate": int((~ok).sum()),
        })
    return rows


SWEEP_FIELDS = ("scenario", "statistic", "intensity", "alpha", "mean", "sd", "n_valid", "n_degenerate")


@dataclass
class ZSample:
    z: np.ndarray
    n_degenerate: int
    mean: float
    variance: float
    skewness: float
    ks_distance: float

    def summary(self) -> dict:
        return {
            "n": int(self.z.size), "n_degenerate": self.n_degenerate, "mean": self.mean,
            "variance": self.variance, "skewness": self.skewness, "ks_distance": self.ks_distance,
        }


def summarize_z(z: np.ndarray) -> ZSample:
    ok = np.isfinite(z)
    zs = z[ok]
    return ZSample(
        z=zs,
        n_degenerate=int((~ok).sum()),
        mean=float(zs.mean()),
        variance=float(zs.var(ddof=1)),
        skewness=float(stats.skew(zs)),
        ks_distance=float(stats.kstest(zs, "norm").statistic),
    )


def standardized_histogram(grid: ExperimentGrid, alpha: Optional[float] = None, bins: int = 40):
    """Standardized statistics of a null scenario, their moments, KS distance and a histogram."""
    alpha = grid.alphas[0] if alpha is None else alpha
    g = replace(grid, alphas=(alpha,))
    cell = simulate_cell(g, g.intensities[0], g.deltas[0])
    sample = summarize_z(cell.z_scores[:, 0])
    counts, edges = np.histogram(sample.z, bins=bins, range=(-5, 5))
    return sample, list(zip(edges[:-1].tolist(), edges[1:].tolist(), counts.tolist()))


def frequency_sweep(deltas: Sequence[float], grid: ExperimentGrid) -> list:
    """Rejection rates and statistic quartiles per sampling interval, horizon fixed."""
    deltas = sorted(deltas)
    rows = []
    for delta in deltas:
        for intensity in grid.intensities:
            cell = simulate_cell(grid, intensity, delta)
            table_rows = _table_rows(grid, cell)
            for row in table_rows:
                i = grid.alphas.index(row["alpha"])
                s = cell.statistics[:, i]
                s = s[np.isfinite(s)]
                q = np.percentile(s, [25, 50, 75]) if s.size else [math.nan] * 3
                row.update(n_per_day=int(round(1 / (252 * delta))), q25=float(q[0]), median=float(q[1]), q75=float(q[2]))
                rows.append(row)
    return rows


FREQ_FIELDS = RejectionTable.FIELDS + ("n_per_day", "q25", "median", "q75")
