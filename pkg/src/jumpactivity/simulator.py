"""Stochastic-volatility paths with stable or compound-Poisson jumps and noise.

Model, with time in years::

    dX = sqrt(v) dW + theta dY
    dv = chi (eta - v) dt + xi sqrt(v) dB + dJ,    corr(dW, dB) = rho_bar

``J`` is compound Poisson with uniform sizes added to the variance; ``Y`` is
a symmetric beta-stable Levy process or a compound Poisson process with
truncated-normal sizes.

Randomness comes from Philox streams keyed by ``(seed, replicate, day,
stream)``, so a path does not depend on which other paths were drawn or on
how work was split between processes.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields
from functools import lru_cache
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
from numba import njit
from scipy import optimize, stats

from .pathseries import SECOND, TRADING_DAYS, InvalidArgumentError, PathSeries

INTENSITY_TAIL_PROBABILITY = {"low": 0.01, "medium": 0.05, "high": 0.10}
INTENSITY_POISSON_PER_DAY = {"low": 2.0, "medium": 10.0, "high": 50.0}

_DYNAMICS, _NOISE = 0, 1
NOISE_LAWS = ("gaussian", "uniform", "laplace")


@dataclass(frozen=True)
class SvParams:
    eta: float = 0.25**2
    chi: float = 5.0
    xi: float = 0.5
    rho_bar: float = -0.5
    v0: Optional[float] = None
    variance_jump_rate: float = 12.0
    variance_jump_low: float = -0.30
    variance_jump_high: float = 0.30

    def __post_init__(self):
        if not self.eta > 0:
            raise InvalidArgumentError("eta must be positive")
        if self.chi < 0 or self.xi < 0:
            raise InvalidArgumentError("chi and xi must be non-negative")
        if abs(self.rho_bar) > 1:
            raise InvalidArgumentError("rho_bar must lie in [-1, 1]")
        if self.variance_jump_rate < 0:
            raise InvalidArgumentError("variance_jump_rate must be non-negative")
        if self.variance_jump_low > self.variance_jump_high:
            raise InvalidArgumentError("variance_jump_low exceeds variance_jump_high")
        if self.v0 is not None and self.v0 < 0:
            raise InvalidArgumentError("v0 must be non-negative")

    @property
    def initial_variance(self) -> float:
        return self.eta if self.v0 is None else self.v0

    @classmethod
    def constant(cls, eta: float = 0.25**2) -> "SvParams":
        """Constant volatility sqrt(eta): no mean reversion, vol-of-vol or variance jumps."""
        return cls(eta=eta, chi=0.0, xi=0.0, rho_bar=0.0, variance_jump_rate=0.0)


@dataclass(frozen=True)
class JumpComponentSpec:
    kind: Literal["none", "stable", "compound_poisson"] = "none"
    beta: float = 1.0
    theta: float = 0.0
    lam: float = 0.0  # events per trading day
    size_sd: float = 0.10
    size_min: float = 0.05

    def __post_init__(self):
        if self.kind not in ("none", "stable", "compound_poisson"):
            raise InvalidArgumentError(f"unknown jump kind {self.kind!r}")
        if self.kind == "stable" and not 0 < self.beta < 2:
            raise InvalidArgumentError(f"beta must lie in (0, 2), got {self.beta}")
        if self.theta < 0 or self.lam < 0:
            raise InvalidArgumentError("theta and lam must be non-negative")
        if self.size_sd <= 0 or self.size_min < 0:
            raise InvalidArgumentError("invalid jump size law")

    @classmethod
    def stable(cls, tail_probability: float, delta: float, beta: float = 1.0, eta: float = 0.25**2) -> "JumpComponentSpec":
        return cls("stable", beta=beta, theta=calibrate_theta(tail_probability, beta, delta, eta))

    @classmethod
    def poisson(cls, lam_per_day: float) -> "JumpComponentSpec":
        return cls("compound_poisson", lam=lam_per_day)


@dataclass(frozen=True)
class NoiseSpec:
    kind: Literal["none", "additive", "rounding"] = "none"
    additive_sd: float = 0.0
    tick: float = 0.01
    price_scale: float = 30.0
    law: Literal["gaussian", "uniform", "laplace"] = "gaussian"

    def __post_init__(self):
        if self.kind not in ("none", "additive", "rounding"):
            raise InvalidArgumentError(f"unknown noise kind {self.kind!r}")
        if self.additive_sd < 0:
            raise InvalidArgumentError("additive_sd must be non-negative")
        if not (self.tick > 0 and self.price_scale > 0):
            raise InvalidArgumentError("tick and price_scale must be positive")
        if self.law not in NOISE_LAWS:
            raise InvalidArgumentError(f"unknown noise law {self.law!r}")


@dataclass(frozen=True)
class SimulationConfig:
    sv: SvParams = field(default_factory=SvParams)
    jumps: JumpComponentSpec = field(default_factory=JumpComponentSpec)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    delta: float = SECOND
    horizon: int = 1
    seed: int = 0
    x0: float = 1.0

    def __post_init__(self):
        if not self.delta > 0:
            raise InvalidArgumentError("delta must be positive")
        if self.horizon < 1:
            raise InvalidArgumentError("horizon must be at least one day")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError("seed must be a 64-bit unsigned integer")
        self.steps_per_day  # validates delta against the day length

    @property
    def steps_per_day(self) -> int:
        n = (1.0 / TRADING_DAYS) / self.delta
        if abs(n - round(n)) > 1e-6 * n or round(n) < 1:
            raise InvalidArgumentError(f"delta={self.delta} does not divide a trading day")
        return int(round(n))


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def stable_increments(beta: float, scale_time: float, rng: np.random.Generator, size=None) -> np.ndarray:
    """Increments over ``scale_time`` of a symmetric stable process with E exp(iuY_1) = exp(-|u|^beta).

    Chambers-Mallows-Stuck; for beta = 1 this is ``scale_time * tan(pi (U - 1/2))``.
    """
    if not 0 < beta < 2:
        raise InvalidArgumentError(f"beta must lie in (0, 2), got {beta}")
    if not scale_time > 0:
        raise InvalidArgumentError("scale_time must be positive")
    if beta == 1.0:
        return scale_time * np.tan(np.pi * (rng.random(size) - 0.5))
    v = np.pi * (rng.random(size) - 0.5)
    w = rng.standard_exponential(size)
    z = np.sin(beta * v) / np.cos(v) ** (1 / beta) * (np.cos((1 - beta) * v) / w) ** ((1 - beta) / beta)
    return scale_time ** (1 / beta) * z


def stable_increment(beta: float, scale_time: float, rng: np.random.Generator) -> float:
    return float(stable_increments(beta, scale_time, rng))


def truncated_normal_sizes(n: int, rng: np.random.Generator, sd: float = 0.10, min_abs: float = 0.05) -> np.ndarray:
    """N(0, sd^2) draws conditioned on |size| > min_abs, by rejection."""
    out = np.empty(0)
    while out.size < n:
        draw = rng.normal(0.0, sd, max(2 * (n - out.size), 8))
        out = np.concatenate([out, draw[np.abs(draw) > min_abs]])
    return out[:n]


def compound_poisson_increments(
    lam_per_day: float, dt_days: float, rng: np.random.Generator, size: int,
    sd: float = 0.10, min_abs: float = 0.05,
) -> np.ndarray:
    """Sum of Poisson(lam * dt) truncated-normal jumps in each of ``size`` steps."""
    if lam_per_day < 0:
        raise InvalidArgumentError("lambda must be non-negative")
    counts = rng.poisson(lam_per_day * dt_days, size)
    out = np.zeros(size)
    total = int(counts.sum())
    if total:
        sizes = truncated_normal_sizes(total, rng, sd, min_abs)
        np.add.at(out, np.repeat(np.arange(size), counts), sizes)
    return out


def compound_poisson_increment(lam_per_day: float, dt_days: float, rng: np.random.Generator, sd: float = 0.10, min_abs: float = 0.05) -> float:
    return float(compound_poisson_increments(lam_per_day, dt_days, rng, 1, sd, min_abs)[0])


@lru_cache(maxsize=256)
def _stable_abs_quantile(tp: float, beta: float) -> float:
    """q with P(|Z| >= q) = tp for a standard symmetric beta-stable Z."""
    if beta == 1.0:
        return math.tan(math.pi * (1 - tp) / 2)
    law = stats.levy_stable(beta, 0.0)
    f = lambda logq: 2 * law.sf(math.exp(logq)) - tp
    lo, hi = -10.0, 10.0
    while f(hi) > 0:
        hi *= 2
        if hi > 700:
            raise ArithmeticError(f"cannot bracket stable tail quantile for tp={tp}, beta={beta}")
    try:
        return math.exp(optimize.bisect(f, lo, hi, xtol=1e-12, rtol=1e-7))
    except ValueError as err:
        raise ArithmeticError(f"stable tail root-finding failed on [{lo}, {hi}]: {err}") from err


def calibrate_theta(tp: float, beta: float, delta: float, eta: float = 0.25**2) -> float:
    """Jump scale with P(|theta * dY| >= 4 sqrt(eta * delta)) = tp."""
    if not 0 < tp < 1:
        raise InvalidArgumentError(f"tail probability must lie in (0, 1), got {tp}")
    c = 4.0 * math.sqrt(eta) * math.sqrt(delta)
    if beta == 1.0:
        return c / (delta * math.tan(math.pi * (1 - tp) / 2))
    return c / (delta ** (1 / beta) * _stable_abs_quantile(tp, beta))


@njit(cache=True)
def _variance_path(v0, chi, eta, xi, dt, dB, jumps):
    n = dB.shape[0]
    v = np.empty(n + 1)
    v[0] = v0
    for i in range(n):
        vp = max(v[i], 0.0)
        nxt = v[i] + chi * (eta - vp) * dt + xi * math.sqrt(vp) * dB[i] + jumps[i]
        v[i + 1] = max(nxt, 0.0)
    return v


def snap_to_prices(values: np.ndarray) -> np.ndarray:
    """Move each log-price to the log of a representable price.

    After this, ``log(exp(x)) == x`` holds elementwise, so paths survive a
    price CSV round trip bit for bit. Values with ``|x| >= 700`` have no
    finite price and are left alone.
    """
    x = np.array(values, dtype=float)
    ok = np.abs(x) < 700.0  # exp(x) must be a finite, normal price
    for _ in range(4):
        y = np.log(np.exp(x[ok]))
        if np.array_equal(y, x[ok]):
            return x
        x[ok] = y
    # a few values cycle under log(exp(.)); walk outward one ulp at a time
    for i in np.nonzero(ok)[0]:
        if np.log(np.exp(x[i])) == x[i]:
            continue
        lo = hi = x[i]
        for _ in range(256):
            lo, hi = np.nextafter(lo, -np.inf), np.nextafter(hi, np.inf)
            if np.log(np.exp(lo)) == lo:
                x[i] = lo
                break
            if np.log(np.exp(hi)) == hi:
                x[i] = hi
                break
    return x


def brownian_pair(rng: np.random.Generator, n: int, dt: float, rho: float) -> tuple[np.ndarray, np.ndarray]:
    """Increments of two Brownian motions with correlation ``rho``."""
    z = rng.standard_normal((2, n))
    sq = math.sqrt(dt)
    return sq * z[0], sq * (rho * z[0] + math.sqrt(1 - rho**2) * z[1])


def simulate_day(cfg: SimulationConfig, day: int, x_start: float, v_start: float, replicate: int = 0):
    """One trading day: returns (log-price grid incl. open, variance grid)."""
    n, dt = cfg.steps_per_day, cfg.delta
    rng = _rng(cfg.seed, replicate, day, _DYNAMICS)
    sv = cfg.sv
    dW, dB = brownian_pair(rng, n, dt, sv.rho_bar)
    if sv.variance_jump_rate > 0:
        counts = rng.poisson(sv.variance_jump_rate * dt, n)
        vj = np.zeros(n)
        if counts.any():
            sizes = rng.uniform(sv.variance_jump_low, sv.variance_jump_high, int(counts.sum()))
            np.add.at(vj, np.repeat(np.arange(n), counts), sizes)
    else:
        vj = np.zeros(n)
    v = _variance_path(v_start, sv.chi, sv.eta, sv.xi, dt, dB, vj)
    dX = np.sqrt(v[:-1]) * dW
    jumps = cfg.jumps
    if jumps.kind == "stable" and jumps.theta > 0:
        dX += jumps.theta * stable_increments(jumps.beta, dt, rng, n)
    elif jumps.kind == "compound_poisson" and jumps.lam > 0:
        dX += compound_poisson_increments(jumps.lam, dt * TRADING_DAYS, rng, n, jumps.size_sd, jumps.size_min)
    x = np.empty(n + 1)
    x[0] = x_start
    np.cumsum(dX, out=x[1:])
    x[1:] += x_start
    return x, v


def simulate_path(cfg: SimulationConfig, replicate: int = 0) -> PathSeries:
    """Simulate ``cfg.horizon`` days; each day is its own segment of ``steps_per_day + 1`` points."""
    days = []
    x, v = cfg.x0, cfg.sv.initial_variance
    for d in range(cfg.horizon):
        xs, vs = simulate_day(cfg, d, x, v, replicate)
        days.append(xs)
        x, v = xs[-1], vs[-1]
    path = PathSeries.from_days(days, cfg.delta)
    noise = cfg.noise
    if noise.kind == "additive" and noise.additive_sd > 0:
        path = apply_additive_noise(path, noise.additive_sd, _rng(cfg.seed, replicate, 0, _NOISE), noise.law)
    elif noise.kind == "rounding":
        path = apply_rounding(path, noise.tick, noise.price_scale, x_ref=cfg.x0)
    return PathSeries(snap_to_prices(path.values), path.delta, path.day_boundaries)


def apply_additive_noise(path: PathSeries, sd: float, rng: np.random.Generator, law: str = "gaussian") -> PathSeries:
    """Observe X + eps with eps i.i.d., centred, standard deviation ``sd``."""
    if sd < 0:
        raise InvalidArgumentError("noise sd must be non-negative")
    if sd == 0:
        return path
    n = len(path.values)
    if law == "gaussian":
        eps = rng.normal(0.0, sd, n)
    elif law == "uniform":
        eps = rng.uniform(-math.sqrt(3.0) * sd, math.sqrt(3.0) * sd, n)
    elif law == "laplace":
        eps = rng.laplace(0.0, sd / math.sqrt(2.0), n)
    else:
        raise InvalidArgumentError(f"unknown noise law {law!r}")
    return PathSeries(path.values + eps, path.delta, path.day_boundaries)


def apply_rounding(path: PathSeries, tick: float, price_scale: float = 30.0, x_ref: Optional[float] = None) -> PathSeries:
    """Round prices ``price_scale * exp(X - x_ref)`` to the nearest tick and return log-prices.

    Prices never round below one tick. ``x_ref`` defaults to the first observation.
    """
    if not tick > 0:
        raise InvalidArgumentError("tick must be positive")
    x_ref = path.values[0] if x_ref is None else x_ref
    price = price_scale * np.exp(path.values - x_ref)
    rounded = np.maximum(np.round(price / tick), 1.0) * tick
    return PathSeries(x_ref + np.log(rounded / price_scale), path.delta, path.day_boundaries)


# -- plain-text configuration ---------------------------------------------

CONFIG_KEYS = {
    "simulation": "delta_seconds | delta, horizon, seed, x0",
    "sv": "eta, chi, xi, rho_bar, v0, variance_jump_rate, variance_jump_low, variance_jump_high",
    "jumps": "kind, beta, theta, tail_probability, intensity, lam, size_sd, size_min",
    "noise": "kind, law, additive_sd, additive_sd_multiple, tick, price_scale",
}


def _section(parser: configparser.ConfigParser, name: str) -> dict:
    return dict(parser[name]) if parser.has_section(name) else {}


def _typed(cls, raw: dict) -> dict:
    out = {}
    names = {f.name: f for f in fields(cls)}
    for key, text in raw.items():
        if key not in names:
            raise InvalidArgumentError(f"unknown key {key!r} for {cls.__name__}")
        out[key] = text if key in ("kind", "law") else float(text)
    return out


def config_from_mapping(sections: dict) -> SimulationConfig:
    """Build a SimulationConfig from ``{section: {key: str}}`` (see CONFIG_KEYS)."""
    for name in sections:
        if name not in CONFIG_KEYS:
            raise InvalidArgumentError(f"unknown section [{name}]")
    sim = dict(sections.get("simulation", {}))
    delta = SECOND
    if "delta_seconds" in sim:
        delta = float(sim.pop("delta_seconds")) * SECOND
    if "delta" in sim:
        delta = float(sim.pop("delta"))
    horizon = int(sim.pop("horizon", 1))
    seed = int(sim.pop("seed", 0))
    x0 = float(sim.pop("x0", 1.0))
    if sim:
        raise InvalidArgumentError(f"unknown [simulation] keys: {sorted(sim)}")

    sv = SvParams(**_typed(SvParams, sections.get("sv", {})))

    jraw = dict(sections.get("jumps", {}))
    tp = jraw.pop("tail_probability", None)
    intensity = jraw.pop("intensity", None)
    jkw = _typed(JumpComponentSpec, jraw)
    kind = jkw.get("kind", "none")
    if intensity is not None:
        if kind == "stable":
            tp = INTENSITY_TAIL_PROBABILITY[intensity]
        elif kind == "compound_poisson":
            jkw["lam"] = INTENSITY_POISSON_PER_DAY[intensity]
    if tp is not None:
        jkw["theta"] = calibrate_theta(float(tp), jkw.get("beta", 1.0), delta, sv.eta)
    jumps = JumpComponentSpec(**jkw)

    nraw = dict(sections.get("noise", {}))
    mult = nraw.pop("additive_sd_multiple", None)
    nkw = _typed(NoiseSpec, nraw)
    if mult is not None:
        nkw["additive_sd"] = float(mult) * math.sqrt(sv.eta * delta)
    noise = NoiseSpec(**nkw)
    return SimulationConfig(sv=sv, jumps=jumps, noise=noise, delta=delta, horizon=horizon, seed=seed, x0=x0)


def load_simulation_config(source: Union[str, Path]) -> SimulationConfig:
    """Read an INI-style file with sections [simulation], [sv], [jumps], [noise]."""
    parser = configparser.ConfigParser()
    with open(source, encoding="utf-8") as fh:
        parser.read_file(fh)
    return config_from_mapping({name: _section(parser, name) for name in parser.sections()})
