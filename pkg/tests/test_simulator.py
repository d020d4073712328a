import math

import numpy as np
import pytest
from scipy import stats

from jumpactivity.pathseries import SECOND, TRADING_DAYS, InvalidArgumentError, PathSeries, TruncationSpec, truncated_power_variation
from jumpactivity.simulator import (
    JumpComponentSpec,
    NoiseSpec,
    SimulationConfig,
    SvParams,
    _variance_path,
    apply_additive_noise,
    apply_rounding,
    brownian_pair,
    calibrate_theta,
    compound_poisson_increment,
    compound_poisson_increments,
    config_from_mapping,
    load_simulation_config,
    simulate_path,
    snap_to_prices,
    stable_increment,
    stable_increments,
    truncated_normal_sizes,
)
from jumpactivity.statistics import (
    FiniteActivityTestConfig,
    InfiniteActivityTestConfig,
    test_finite_activity,
    test_infinite_activity,
)

ETA = 0.25**2


def test_determinism():
    cfg = SimulationConfig(jumps=JumpComponentSpec.stable(0.05, SECOND), horizon=2, seed=123)
    a, b = simulate_path(cfg), simulate_path(cfg)
    assert a.values.tobytes() == b.values.tobytes()
    assert a.day_boundaries == b.day_boundaries == (0, 23_401)
    c = simulate_path(cfg, replicate=1)
    assert not np.array_equal(a.values, c.values)


def test_zero_theta_matches_no_jumps():
    base = SimulationConfig(seed=4)
    zero = SimulationConfig(jumps=JumpComponentSpec("stable", theta=0.0), seed=4)
    assert np.array_equal(simulate_path(base).values, simulate_path(zero).values)


def test_pure_brownian_variance():
    cfg = SimulationConfig(sv=SvParams.constant(ETA), horizon=5, seed=8)
    path = simulate_path(cfg)
    inc = np.concatenate([np.diff(d) for d in path.days()])
    est = np.var(inc, ddof=0) / SECOND
    se = ETA * math.sqrt(2 / inc.size)
    assert abs(est - ETA) < 3 * se


def test_cauchy_tail_frequency():
    tp = 0.10
    theta = calibrate_theta(tp, 1.0, SECOND, ETA)
    c = 4 * math.sqrt(ETA * SECOND)
    assert theta == pytest.approx(c / (SECOND * math.tan(math.pi * (1 - tp) / 2)), rel=1e-14)
    closed = 1 - 2 / math.pi * math.atan(c / (theta * SECOND))
    assert closed == pytest.approx(tp, rel=1e-12)
    rng = np.random.default_rng(1)
    draws = theta * stable_increments(1.0, SECOND, rng, 1_000_000)
    freq = np.mean(np.abs(draws) >= c)
    assert abs(freq - tp) < 3 * math.sqrt(tp * (1 - tp) / draws.size)


def test_non_cauchy_calibration_forward():
    tp, beta = 0.05, 1.5
    theta = calibrate_theta(tp, beta, SECOND, ETA)
    rng = np.random.default_rng(2)
    draws = theta * stable_increments(beta, SECOND, rng, 400_000)
    freq = np.mean(np.abs(draws) >= 4 * math.sqrt(ETA * SECOND))
    assert abs(freq - tp) < 4 * math.sqrt(tp * (1 - tp) / draws.size)


def test_theta_vanishes_with_tail_probability():
    thetas = [calibrate_theta(tp, 1.0, SECOND) for tp in (1e-2, 1e-4, 1e-6, 1e-8)]
    assert all(a > b for a, b in zip(thetas, thetas[1:]))
    assert thetas[-1] < 1e-6 * thetas[0]
    with pytest.raises(InvalidArgumentError):
        calibrate_theta(0.0, 1.0, SECOND)


def test_cauchy_quartiles():
    rng = np.random.default_rng(3)
    x = stable_increments(1.0, 0.7, rng, 1_000_000)
    assert abs(np.median(x)) < 0.01
    assert abs(np.mean(np.abs(x) <= 0.7) - 0.5) < 0.002


def test_cauchy_ks():
    rng = np.random.default_rng(4)
    x = stable_increments(1.0, 1.0, rng, 100_000)
    assert stats.kstest(x, stats.cauchy.cdf).pvalue > 0.01


@pytest.mark.parametrize("beta", [0.5, 1.0, 1.5])
def test_self_similarity(beta):
    t = 3.0
    a = stable_increments(beta, t, np.random.default_rng(5), 200_000)
    b = t ** (1 / beta) * stable_increments(beta, 1.0, np.random.default_rng(6), 200_000)
    assert stats.ks_2samp(a, b).pvalue > 0.001


def test_stable_law_matches_scipy():
    x = stable_increments(1.5, 1.0, np.random.default_rng(7), 50_000)
    assert stats.kstest(x, stats.levy_stable(1.5, 0.0).cdf).pvalue > 0.001


def test_stable_domain():
    rng = np.random.default_rng(0)
    with pytest.raises(InvalidArgumentError):
        stable_increment(2.0, 1.0, rng)
    with pytest.raises(InvalidArgumentError):
        JumpComponentSpec("stable", beta=2.0)
    assert isinstance(stable_increment(1.2, 1.0, rng), float)


def test_compound_poisson():
    rng = np.random.default_rng(8)
    assert compound_poisson_increment(0.0, 1.0, rng) == 0.0
    days = 400
    steps = 23_400
    out = compound_poisson_increments(10.0, 1 / steps, rng, steps * days)
    per_day = np.count_nonzero(out) / days
    assert abs(per_day - 10.0) < 4 * math.sqrt(10.0 / days)
    sizes = truncated_normal_sizes(100_000, rng)
    assert np.all(np.abs(sizes) > 0.05)
    assert abs(np.mean(sizes)) < 0.002


def test_cir_mean_and_positivity():
    sv = SvParams(variance_jump_rate=0.0)
    dt = 1 / (TRADING_DAYS * 10)
    n = 2_520_000  # 1000 years
    _, dB = brownian_pair(np.random.default_rng(9), n, dt, 0.0)
    v = _variance_path(sv.eta, sv.chi, sv.eta, sv.xi, dt, dB, np.zeros(n))
    assert v.min() >= 0.0
    assert abs(v.mean() / sv.eta - 1) < 0.05


def test_variance_jumps_keep_variance_non_negative():
    sv = SvParams(variance_jump_rate=500.0)
    cfg = SimulationConfig(sv=sv, horizon=3, seed=10)
    path = simulate_path(cfg)
    assert np.all(np.isfinite(path.values))
    n = 100_000
    rng = np.random.default_rng(1)
    _, dB = brownian_pair(rng, n, 1e-4, 0.0)
    jumps = np.where(rng.random(n) < 0.01, rng.uniform(-0.3, 0.3, n), 0.0)
    assert _variance_path(0.0625, 5.0, 0.0625, 0.5, 1e-4, dB, jumps).min() >= 0.0


def test_leverage_correlation():
    n = 200_000
    dW, dB = brownian_pair(np.random.default_rng(11), n, SECOND, -0.5)
    r = np.corrcoef(dW, dB)[0, 1]
    assert abs(r + 0.5) < 3 * (1 - 0.25) / math.sqrt(n)


def test_additive_noise():
    path = PathSeries(np.linspace(0, 1, 10), 1.0)
    assert apply_additive_noise(path, 0.0, np.random.default_rng(0)) is path
    big = PathSeries(np.zeros(200_000), 1.0)
    for law in ("gaussian", "uniform", "laplace"):
        eps = apply_additive_noise(big, 0.3, np.random.default_rng(1), law).values
        assert abs(eps.std() - 0.3) < 0.005
        assert abs(eps.mean()) < 0.005
    with pytest.raises(InvalidArgumentError):
        NoiseSpec("additive", 0.1, law="cauchy")


def test_rounding_wide_tick_gives_constant_path():
    cfg = SimulationConfig(sv=SvParams.constant(), noise=NoiseSpec("rounding", tick=1e6), seed=1)
    path = simulate_path(cfg)
    assert np.all(np.diff(path.values) == 0)
    assert truncated_power_variation(path, 4, 1.0) == 0.0


def test_rounding_below_tick_cutoff_is_degenerate():
    cfg = SimulationConfig(noise=NoiseSpec("rounding", tick=0.01, price_scale=30.0), seed=2)
    path = simulate_path(cfg)
    inc = np.abs(np.diff(path.values))
    smallest = inc[inc > 0].min()
    # the log-tick at a 30 dollar price is about 3.3e-4
    assert smallest > 0.01 / 40
    alpha = 0.5 * smallest / (0.25 * math.sqrt(SECOND))
    for p in (3.0, 4.0, 8.0):
        assert truncated_power_variation(path, p, 0.5 * smallest) == 0.0
    fa = test_finite_activity(path, FiniteActivityTestConfig(TruncationSpec(alpha)))
    ia = test_infinite_activity(path, InfiniteActivityTestConfig(TruncationSpec(alpha)))
    assert fa.degenerate and ia.degenerate
    assert fa.decision == ia.decision == "no decision"


def test_rounding_fine_tick_is_identity():
    path = PathSeries(np.linspace(0.0, 0.01, 50), 1.0)
    out = apply_rounding(path, 1e-12, price_scale=30.0)
    np.testing.assert_allclose(out.values, path.values, atol=1e-12)


def test_snapped_prices_round_trip():
    x = snap_to_prices(np.random.default_rng(3).normal(0, 3, 500_000))
    assert np.array_equal(np.log(np.exp(x)), x)


def test_config_file(tmp_path):
    ini = tmp_path / "sim.ini"
    ini.write_text(
        "[simulation]\ndelta_seconds = 5\nhorizon = 3\nseed = 42\n"
        "[sv]\nxi = 0.4\n"
        "[jumps]\nkind = stable\nintensity = high\n"
        "[noise]\nkind = additive\nadditive_sd_multiple = 2\nlaw = uniform\n"
    )
    cfg = load_simulation_config(ini)
    assert cfg.delta == pytest.approx(5 * SECOND)
    assert (cfg.horizon, cfg.seed, cfg.sv.xi, cfg.steps_per_day) == (3, 42, 0.4, 4680)
    assert cfg.jumps.theta == pytest.approx(calibrate_theta(0.10, 1.0, 5 * SECOND))
    assert cfg.noise.additive_sd == pytest.approx(2 * math.sqrt(ETA * 5 * SECOND))
    assert cfg.noise.law == "uniform"


def test_config_rejects_unknown_keys():
    with pytest.raises(InvalidArgumentError):
        config_from_mapping({"sv": {"kappa": "1"}})
    with pytest.raises(InvalidArgumentError):
        config_from_mapping({"model": {}})


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        SimulationConfig(delta=7 * SECOND)
    with pytest.raises(InvalidArgumentError):
        SvParams(rho_bar=1.5)
    with pytest.raises(InvalidArgumentError):
        SvParams(variance_jump_low=0.3, variance_jump_high=-0.3)
