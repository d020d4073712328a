"""Command-line interface.

Every command accepts ``--config FILE``. The file is INI-style: sections
``[simulation]``, ``[sv]``, ``[jumps]`` and ``[noise]`` describe the model
(see ``simulator.CONFIG_KEYS``), ``[defaults]`` sets flags shared by all
commands and a section named after the command (``[mc]``, ``[test-fa]``,
...) sets that command's flags. Keys are flag names without the leading
dashes. Flags given on the command line override the file.

Artifacts are written to ``--output-dir`` (default ``$JUMPACTIVITY_OUTPUT_DIR``
or ``./results``) as ``<scenario>_<statistic>_<date>.csv`` plus a JSON
twin. Exit codes: 0 decision reached, 2 degenerate sample, 3 input error,
4 numerical error.
"""

from __future__ import annotations

import argparse
import configparser
import datetime as dt
import math
import os
import sys
from dataclasses import asdict
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .ingest import (
    NYSE_SESSION,
    PIPELINE_FIELDS,
    ResampleReport,
    load_ticks,
    path_to_ticks,
    resample_to_grid,
    run_empirical_pipeline,
    write_ticks_csv,
)
from .moments import MomentTable, QuadratureError
from .montecarlo import (
    DEFAULT_ALPHAS,
    FREQ_FIELDS,
    SCENARIOS,
    SWEEP_FIELDS,
    ExperimentGrid,
    frequency_sweep,
    run_grid,
    sweep_alpha,
)
from .pathseries import SECOND, TruncationSpec
from .records import write_csv, write_json
from .simulator import NOISE_LAWS, SvParams, config_from_mapping, simulate_path
from .statistics import (
    FA,
    REPORT_FIELDS,
    DegenerateSampleError,
    FiniteActivityTestConfig,
    InfiniteActivityTestConfig,
    TestReport,
    noise_band,
    rate_warnings,
    test_finite_activity,
    test_infinite_activity,
)

EXIT_OK, EXIT_DEGENERATE, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3, 4
OUTPUT_ENV = "JUMPACTIVITY_OUTPUT_DIR"
MODEL_SECTIONS = ("simulation", "sv", "jumps", "noise")


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; here that code means 'degenerate'."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# -- parser ----------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("common")
    g.add_argument("--config", type=Path, help="INI config file; flags override it")
    g.add_argument("--seed", type=int, default=0, help="base random seed (default 0)")
    g.add_argument("--workers", type=int, default=1, help="worker processes for replicated runs (default 1)")
    g.add_argument(
        "--output-dir", type=Path, default=None,
        help=f"artifact directory (default ${OUTPUT_ENV} or ./results)",
    )
    g.add_argument("--date", default=None, help="date stamp used in file names (default today, YYYY-MM-DD)")
    g.add_argument("--quiet", action="store_true", help="suppress the printed summary")


def _model(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("simulated data (used when no --input is given)")
    g.add_argument("--jumps", choices=("none", "stable", "compound_poisson"), help="jump component (default none)")
    g.add_argument("--intensity", choices=("low", "medium", "high"), help="jump intensity preset")
    g.add_argument("--tail-probability", type=float, help="stable jumps: calibrate scale to this tail probability")
    g.add_argument("--beta", type=float, help="stable index of the jump component (default 1, Cauchy)")
    g.add_argument("--lam", type=float, help="compound Poisson jumps per trading day")
    g.add_argument("--noise", choices=("none", "additive", "rounding"), help="microstructure noise (default none)")
    g.add_argument("--noise-sd-multiple", type=float, help="additive noise sd as a multiple of sqrt(eta*delta)")
    g.add_argument("--noise-law", choices=NOISE_LAWS, help="additive noise distribution (default gaussian)")
    g.add_argument("--tick", type=float, help="rounding tick in price units (default 0.01)")
    g.add_argument("--horizon", type=int, help="trading days to simulate (default 1)")
    g.add_argument("--delta-seconds", type=float, help="sampling interval in seconds (default 1)")
    g.add_argument("--constant-vol", action="store_true", help="constant volatility sqrt(eta) instead of the SV model")
    g.add_argument("--replicate", type=int, default=0, help="replicate index of the random stream (default 0)")


def _input(p: argparse.ArgumentParser, required: bool = False) -> None:
    g = p.add_argument_group("tick input")
    g.add_argument("--input", type=Path, required=required, help="tick CSV with header timestamp_ms,price[,flag]")
    g.add_argument("--session-open", type=float, default=NYSE_SESSION[0], help="session open, seconds after UTC midnight")
    g.add_argument("--session-close", type=float, default=NYSE_SESSION[1], help="session close, seconds after UTC midnight")
    g.add_argument("--min-ticks", type=int, default=1, help="skip days with fewer ticks in the session (default 1)")
    g.add_argument("--good-flags", nargs="+", default=["0"], help="flag values kept (default 0)")


def _truncation(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("truncation")
    g.add_argument("--alpha", type=float, default=8.0, help="truncation index (default 8)")
    g.add_argument("--varpi", type=float, default=0.5, help="cutoff exponent, u = alpha*sigma*delta**varpi (default 0.5)")
    g.add_argument("--sigma-ref", type=float, default=None, help="volatility scale in cutoffs (default sqrt(eta) = 0.25)")
    g.add_argument("--level", type=float, default=0.05, help="test level (default 0.05)")


def _fa_params(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("finite-activity test")
    g.add_argument("--p", dest="p_fa", type=float, default=4.0, help="power p (default 4)")
    g.add_argument("--k", type=int, default=2, help="sampling multiple k (default 2)")


def _ia_params(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("infinite-activity test")
    g.add_argument("--p", dest="p_ia", type=float, default=3.0, help="lower power p (default 3)")
    g.add_argument("--p-prime", type=float, default=4.0, help="upper power p' (default 4)")
    g.add_argument("--gamma", type=float, default=2.0, help="cutoff ratio gamma > 1 (default 2)")


def _grid(p: argparse.ArgumentParser, many_deltas: bool = False) -> None:
    g = p.add_argument_group("experiment grid")
    g.add_argument("--scenario", choices=sorted(SCENARIOS), default="fa_null", help="data-generating scenario")
    g.add_argument("--statistic", choices=("fa", "ia"), default=None, help="override the scenario's statistic")
    g.add_argument("--replicates", type=int, default=1000, help="replicates per cell (default 1000)")
    g.add_argument("--intensities", nargs="+", default=["medium"], choices=("none", "low", "medium", "high"),
                   help="jump intensities (default medium)")
    g.add_argument("--alphas", type=float, nargs="+", default=list(DEFAULT_ALPHAS), help="truncation indices")
    g.add_argument("--levels", type=float, nargs="+", default=[0.10, 0.05], help="nominal levels")
    if many_deltas:
        g.add_argument("--deltas-seconds", type=float, nargs="+", default=[5, 10, 30, 60, 120, 300], help="sampling intervals")
    else:
        g.add_argument("--delta-seconds", type=float, default=1.0, help="sampling interval in seconds (default 1)")
    g.add_argument("--horizon", type=int, default=1, help="trading days per replicate (default 1)")
    g.add_argument("--beta", type=float, default=1.0, help="stable index of the jump component (default 1)")
    g.add_argument("--varpi", type=float, default=0.5, help="cutoff exponent (default 0.5)")
    g.add_argument("--sigma-ref", type=float, default=None, help="volatility scale in cutoffs (default sqrt(eta))")
    g.add_argument("--noise-sd-multiple", type=float, default=3.0, help="noise scenario: sd as a multiple of sqrt(eta*delta)")
    g.add_argument("--constant-vol", action="store_true", help="constant volatility instead of the SV model")
    g.add_argument("--k", type=int, default=2, help="finite-activity sampling multiple (default 2)")
    g.add_argument("--p-fa", type=float, default=4.0, help="finite-activity power (default 4)")
    g.add_argument("--p-ia", type=float, default=3.0, help="infinite-activity lower power (default 3)")
    g.add_argument("--p-prime", type=float, default=4.0, help="infinite-activity upper power (default 4)")
    g.add_argument("--gamma", type=float, default=2.0, help="infinite-activity cutoff ratio (default 2)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jumpactivity", description="Tests for finite and infinite jump activity.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="simulate a path and write it as a tick CSV")
    _common(p)
    _model(p)

    p = sub.add_parser("test-fa", help="finite-activity test on a tick file or a simulated path")
    _common(p)
    _model(p)
    _input(p)
    _truncation(p)
    _fa_params(p)

    p = sub.add_parser("test-ia", help="infinite-activity test on a tick file or a simulated path")
    _common(p)
    _model(p)
    _input(p)
    _truncation(p)
    _ia_params(p)

    p = sub.add_parser("mc", help="Monte Carlo rejection table")
    _common(p)
    _grid(p)

    p = sub.add_parser("sweep-alpha", help="mean statistic as a function of alpha")
    _common(p)
    _grid(p)

    p = sub.add_parser("freq-sweep", help="rejection rates and quartiles across sampling intervals")
    _common(p)
    _grid(p, many_deltas=True)

    p = sub.add_parser("ingest", help="per-day empirical pipeline on a tick file")
    _common(p)
    _input(p, required=True)
    g = p.add_argument_group("pipeline")
    g.add_argument("--delta-seconds", type=float, default=5.0, help="grid interval in seconds (default 5)")
    g.add_argument("--alphas", type=float, nargs="+", default=list(DEFAULT_ALPHAS), help="truncation indices")
    g.add_argument("--gammas", type=float, nargs="+", default=[2.0], help="cutoff ratios for the infinite-activity test")
    g.add_argument("--varpi", type=float, default=0.5, help="cutoff exponent (default 0.5)")
    g.add_argument("--level", type=float, default=0.05, help="test level (default 0.05)")
    g.add_argument("--p-fa", type=float, default=4.0, help="finite-activity power (default 4)")
    g.add_argument("--k", type=int, default=2, help="finite-activity sampling multiple (default 2)")
    g.add_argument("--p-ia", type=float, default=3.0, help="infinite-activity lower power (default 3)")
    g.add_argument("--p-prime", type=float, default=4.0, help="infinite-activity upper power (default 4)")

    p = sub.add_parser("moments", help="print the normal moments behind the variance estimators")
    _common(p)
    p.add_argument("--p", type=float, default=4.0, help="power (default 4)")
    p.add_argument("--k", type=int, default=2, help="sampling multiple (default 2)")
    return parser


# -- config file -------------------------------------------------------------


def _read_config(path: Optional[Path]) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    if path is not None:
        if not path.is_file():
            raise InputError(f"config file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    return cp


def _convert(action: argparse.Action, text: str):
    if isinstance(action, argparse._StoreTrueAction):
        return text.strip().lower() in ("1", "true", "yes", "on")
    conv = action.type or str
    if action.nargs in ("+", "*"):
        return [conv(v) for v in text.replace(",", " ").split()]
    return conv(text)


def _apply_config(parser: argparse.ArgumentParser, argv: list, cp: configparser.ConfigParser) -> argparse.Namespace:
    """Re-parse ``argv`` with defaults taken from the command's config sections."""
    ns = parser.parse_args(argv)
    commands = parser._subparsers._group_actions[0].choices
    sub = commands[ns.command]
    by_key = {}
    for action in sub._actions:
        for opt in action.option_strings:
            by_key[opt.lstrip("-")] = action
            by_key[opt.lstrip("-").replace("-", "_")] = action
    defaults = {}
    for section in ("defaults", ns.command):
        if not cp.has_section(section):
            continue
        for key, text in cp[section].items():
            action = by_key.get(key)
            if action is None or action.dest == "help":
                raise InputError(f"[{section}] {key}: not a flag of '{ns.command}'")
            try:
                defaults[action.dest] = _convert(action, text)
            except ValueError as err:
                raise InputError(f"[{section}] {key}: {err}") from None
    extra = set(cp.sections()) - {"defaults", ns.command} - set(MODEL_SECTIONS) - set(commands)
    if extra:
        raise InputError(f"unknown config sections: {sorted(extra)}")
    if defaults:
        sub.set_defaults(**defaults)
        ns = parser.parse_args(argv)
    return ns


def _model_mapping(ns: argparse.Namespace, cp: configparser.ConfigParser) -> dict:
    sections = {name: dict(cp[name]) for name in MODEL_SECTIONS if cp.has_section(name)}
    over = {
        ("simulation", "seed"): ns.seed,
        ("simulation", "horizon"): ns.horizon,
        ("simulation", "delta_seconds"): ns.delta_seconds,
        ("jumps", "kind"): ns.jumps,
        ("jumps", "intensity"): ns.intensity,
        ("jumps", "tail_probability"): ns.tail_probability,
        ("jumps", "beta"): ns.beta,
        ("jumps", "lam"): ns.lam,
        ("noise", "kind"): ns.noise,
        ("noise", "additive_sd_multiple"): ns.noise_sd_multiple,
        ("noise", "tick"): ns.tick,
        ("noise", "law"): ns.noise_law,
    }
    for (section, key), value in over.items():
        if value is not None:
            sections.setdefault(section, {})[key] = str(value)
    if "delta" in sections.get("simulation", {}) and ns.delta_seconds is not None:
        del sections["simulation"]["delta"]
    if ns.constant_vol:
        eta = float(sections.get("sv", {}).get("eta", SvParams().eta))
        sections["sv"] = {"eta": str(eta), "chi": "0", "xi": "0", "rho_bar": "0", "variance_jump_rate": "0"}
    jumps = sections.get("jumps", {})
    if "intensity" in jumps and jumps["intensity"] not in ("low", "medium", "high"):
        raise InputError(f"unknown intensity {jumps['intensity']!r}")
    return sections


# -- helpers ---------------------------------------------------------------


def _output_dir(ns) -> Path:
    if ns.output_dir is not None:
        return ns.output_dir
    return Path(os.environ.get(OUTPUT_ENV) or "results")


def _date(ns) -> str:
    if ns.date is None:
        return dt.date.today().isoformat()
    try:
        dt.date.fromisoformat(ns.date)
    except ValueError:
        raise InputError(f"--date must be YYYY-MM-DD, got {ns.date!r}") from None
    return ns.date


def _stem(ns, scenario: str, statistic: str) -> Path:
    return _output_dir(ns) / f"{scenario}_{statistic}_{_date(ns)}"


def _say(ns, *lines: str) -> None:
    if not ns.quiet:
        for line in lines:
            print(line)


def _g(x: float) -> str:
    return "nan" if isinstance(x, float) and math.isnan(x) else f"{x:.6g}"


def _load_path(ns, cp) -> tuple:
    """Observed path from ``--input`` or a simulation; returns (path, label, sigma_ref default)."""
    if ns.input is not None:
        rep = ResampleReport()
        ticks = load_ticks(ns.input, ns.good_flags)
        delta_s = 1.0 if ns.delta_seconds is None else ns.delta_seconds
        path = resample_to_grid(ticks, delta_s, (ns.session_open, ns.session_close), ns.min_ticks, rep)
        for day, why in rep.skipped:
            _say(ns, f"skipped {day}: {why}")
        return path, ns.input.stem, 0.25
    cfg = config_from_mapping(_model_mapping(ns, cp))
    return simulate_path(cfg, ns.replicate), "simulated", math.sqrt(cfg.sv.eta)


def _grid_from(ns, deltas) -> ExperimentGrid:
    sv = SvParams.constant() if ns.constant_vol else SvParams()
    return ExperimentGrid(
        scenario=ns.scenario, intensities=tuple(ns.intensities), alphas=tuple(ns.alphas),
        deltas=tuple(d * SECOND for d in deltas), horizon_days=ns.horizon, replicates=ns.replicates,
        levels=tuple(ns.levels), base_seed=ns.seed, statistic=ns.statistic, sv=sv, beta=ns.beta,
        varpi=ns.varpi, sigma_ref=ns.sigma_ref, noise_sd_multiple=ns.noise_sd_multiple, k=ns.k,
        p_fa=ns.p_fa, p_ia=ns.p_ia, p_prime=ns.p_prime, gamma=ns.gamma, workers=ns.workers,
    )


def _grid_meta(grid: ExperimentGrid) -> dict:
    return {
        "scenario": grid.scenario, "statistic": grid.statistic_name, "intensities": list(grid.intensities),
        "alphas": list(grid.alphas), "delta_seconds": [d / SECOND for d in grid.deltas],
        "horizon_days": grid.horizon_days, "replicates": grid.replicates, "levels": list(grid.levels),
        "base_seed": grid.base_seed, "beta": grid.beta, "varpi": grid.varpi, "k": grid.k,
        "p_fa": grid.p_fa, "p_ia": grid.p_ia, "p_prime": grid.p_prime, "gamma": grid.gamma,
    }


def _decision_text(report: TestReport) -> str:
    what = "finite activity" if report.test == FA else "infinite activity"
    return "no decision (degenerate sample)" if report.degenerate else f"{report.decision} {what}"


def _print_report(ns, report: TestReport, name: str, cfg) -> None:
    _say(
        ns,
        f"{report.test.replace('_', '-')} test  alpha={_g(report.alpha)}  level={_g(report.level)}",
        f"  {name:<10} {_g(report.statistic)}   null limit {_g(report.null_limit)}   noise limit {_g(report.noise_limit)}",
        f"  variance   {_g(report.variance)}   z {_g(report.z_score)}   p-value {_g(report.p_value)}",
        f"  reject if  {name} < {_g(report.critical_value)}",
        f"  increments {report.n_increments_used}",
        f"  decision   {_decision_text(report)}",
        f"  reading    {noise_band(report)}",
    )
    if report.degenerate:
        _say(ns, f"  reason     {report.reason}")
    for w in rate_warnings(cfg):
        _say(ns, f"  warning    {w}")


# -- commands --------------------------------------------------------------


def cmd_simulate(ns, cp) -> int:
    cfg = config_from_mapping(_model_mapping(ns, cp))
    path = simulate_path(cfg, ns.replicate)
    stem = _stem(ns, f"sim-{cfg.jumps.kind}", "ticks")
    stem.parent.mkdir(parents=True, exist_ok=True)
    write_ticks_csv(path_to_ticks(path), stem.with_suffix(".csv"))
    write_json({
        "seed": cfg.seed, "replicate": ns.replicate, "delta_seconds": cfg.delta / SECOND,
        "horizon": cfg.horizon, "sv": asdict(cfg.sv), "jumps": asdict(cfg.jumps), "noise": asdict(cfg.noise),
    }, stem.with_suffix(".json"))
    _say(
        ns,
        f"simulated {cfg.horizon} day(s), {cfg.steps_per_day} steps per day, jumps={cfg.jumps.kind}"
        f" theta={_g(cfg.jumps.theta)} lam={_g(cfg.jumps.lam)}, noise={cfg.noise.kind}",
        f"  written    {stem.with_suffix('.csv')}",
    )
    return EXIT_OK


def _run_single_test(ns, cp, kind: str) -> int:
    path, label, sigma_default = _load_path(ns, cp)
    sigma = ns.sigma_ref if ns.sigma_ref is not None else sigma_default
    trunc = TruncationSpec(ns.alpha, ns.varpi, sigma)
    if kind == "fa":
        cfg = FiniteActivityTestConfig(trunc, p=ns.p_fa, k=ns.k, level=ns.level)
        if cfg.k < 2:
            raise InputError("test-fa needs k >= 2")
        report, name = test_finite_activity(path, cfg), "S_n"
    else:
        cfg = InfiniteActivityTestConfig(trunc, p=ns.p_ia, p_prime=ns.p_prime, gamma=ns.gamma, level=ns.level)
        report, name = test_infinite_activity(path, cfg), "S_n_prime"
    stem = _stem(ns, label, name)
    write_csv([report.to_record()], REPORT_FIELDS, stem.with_suffix(".csv"))
    write_json(report.to_record(), stem.with_suffix(".json"))
    _print_report(ns, report, name, cfg)
    _say(ns, f"  written    {stem.with_suffix('.csv')}")
    return EXIT_DEGENERATE if report.degenerate else EXIT_OK


def cmd_test_fa(ns, cp) -> int:
    return _run_single_test(ns, cp, "fa")


def cmd_test_ia(ns, cp) -> int:
    return _run_single_test(ns, cp, "ia")


def _print_rows(ns, rows, cols) -> None:
    _say(ns, "  ".join(f"{c:>12}" for c in cols))
    for r in rows:
        _say(ns, "  ".join(f"{_g(r[c]) if isinstance(r[c], float) else r[c]:>12}" for c in cols))


def cmd_mc(ns, cp) -> int:
    grid = _grid_from(ns, [ns.delta_seconds])
    table = run_grid(grid)
    stem = _stem(ns, grid.scenario, grid.statistic_name)
    table.to_csv(stem.with_suffix(".csv"))
    write_json({"grid": _grid_meta(grid), "rows": table.rows}, stem.with_suffix(".json"))
    _say(ns, f"{grid.scenario}: {grid.statistic_name}, {grid.replicates} replicates per cell")
    _print_rows(ns, table.rows, ("intensity", "level", "alpha", "rate", "std_error", "degenerate", "mean_statistic"))
    _say(ns, f"written {stem.with_suffix('.csv')}")
    return EXIT_OK


def cmd_sweep_alpha(ns, cp) -> int:
    grid = _grid_from(ns, [ns.delta_seconds])
    rows = []
    for intensity in grid.intensities:
        rows.extend(sweep_alpha(grid, intensity))
    stem = _stem(ns, grid.scenario, f"{grid.statistic_name}-alpha-sweep")
    write_csv(rows, SWEEP_FIELDS, stem.with_suffix(".csv"))
    write_json({"grid": _grid_meta(grid), "rows": rows}, stem.with_suffix(".json"))
    _print_rows(ns, rows, ("intensity", "alpha", "mean", "sd", "n_degenerate"))
    _say(ns, f"written {stem.with_suffix('.csv')}")
    return EXIT_OK


def cmd_freq_sweep(ns, cp) -> int:
    grid = _grid_from(ns, ns.deltas_seconds)
    rows = frequency_sweep(grid.deltas, grid)
    stem = _stem(ns, grid.scenario, f"{grid.statistic_name}-freq-sweep")
    write_csv(rows, FREQ_FIELDS, stem.with_suffix(".csv"))
    write_json({"grid": _grid_meta(grid), "rows": rows}, stem.with_suffix(".json"))
    _print_rows(ns, rows, ("delta_seconds", "intensity", "level", "alpha", "rate", "median"))
    _say(ns, f"written {stem.with_suffix('.csv')}")
    return EXIT_OK


def cmd_ingest(ns, cp) -> int:
    rep = ResampleReport()
    ticks = load_ticks(ns.input, ns.good_flags)
    path = resample_to_grid(ticks, ns.delta_seconds, (ns.session_open, ns.session_close), ns.min_ticks, rep)
    fa_cfg = FiniteActivityTestConfig(TruncationSpec(ns.alphas[0], ns.varpi), p=ns.p_fa, k=ns.k, level=ns.level)
    ia_cfg = InfiniteActivityTestConfig(
        TruncationSpec(ns.alphas[0], ns.varpi), p=ns.p_ia, p_prime=ns.p_prime, gamma=ns.gammas[0], level=ns.level
    )
    results = run_empirical_pipeline(path, fa_cfg, ia_cfg, ns.alphas, ns.gammas)
    rows = [r for res in results for r in res.records()]
    stem = _stem(ns, ns.input.stem, "pipeline")
    write_csv(rows, PIPELINE_FIELDS, stem.with_suffix(".csv"))
    excluded = [rep.days[i] for i in results[0].days_excluded]
    write_json({
        "input": str(ns.input), "ticks": len(ticks), "dropped_flags": ticks.dropped,
        "delta_seconds": ns.delta_seconds, "days": rep.days, "skipped": [list(s) for s in rep.skipped],
        "excluded_zero_volatility": excluded, "rows": rows,
    }, stem.with_suffix(".json"))
    _say(
        ns,
        f"{len(ticks)} ticks ({ticks.dropped} dropped by flag), {len(rep.days)} days on a {_g(ns.delta_seconds)}s grid,"
        f" {len(rep.skipped)} skipped, {len(excluded)} excluded",
    )
    _print_rows(ns, rows, ("test", "alpha", "gamma", "statistic", "null_limit", "z_score", "decision"))
    for res in results[:1]:
        _say(ns, f"reading at alpha={_g(res.alpha)}: {noise_band(res.fa)}; {noise_band(res.ia[0])}")
    for w in rate_warnings(ia_cfg):
        _say(ns, f"warning: {w}")
    _say(ns, f"written {stem.with_suffix('.csv')}")
    all_degenerate = all(r.fa.degenerate and all(x.degenerate for x in r.ia) for r in results)
    return EXIT_DEGENERATE if all_degenerate else EXIT_OK


def _frac(x: float) -> str:
    f = Fraction(x).limit_denominator(1000)
    if f.denominator > 1 and abs(float(f) - x) <= 1e-12 * abs(x):
        return f"{f.numerator}/{f.denominator}"
    return _g(x) if abs(x - round(x)) > 1e-9 * max(1.0, abs(x)) else str(int(round(x)))


def cmd_moments(ns, cp) -> int:
    if ns.k < 1:
        raise InputError("k must be a positive integer")
    t = MomentTable.compute(ns.p, ns.k)
    p, k = _frac(ns.p), ns.k
    _say(
        ns,
        f"m_{p}={_frac(t.m_p)}",
        f"m_{_frac(2 * ns.p)}={_frac(t.m_2p)}",
        f"m_{{{k},{p}}}={_frac(t.m_kp)}",
        f"N({p},{k})={_frac(t.n_pk)}",
    )
    stem = _stem(ns, "moments", f"p{p.replace('/', '-')}-k{k}")
    write_json({"p": ns.p, "k": k, "m_p": t.m_p, "m_2p": t.m_2p, "m_kp": t.m_kp, "n_pk": t.n_pk}, stem.with_suffix(".json"))
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "test-fa": cmd_test_fa,
    "test-ia": cmd_test_ia,
    "mc": cmd_mc,
    "sweep-alpha": cmd_sweep_alpha,
    "freq-sweep": cmd_freq_sweep,
    "ingest": cmd_ingest,
    "moments": cmd_moments,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        first = parser.parse_args(argv)
        cp = _read_config(first.config)
        ns = _apply_config(parser, argv, cp)
        return COMMANDS[ns.command](ns, cp)
    except DegenerateSampleError as err:
        print(f"degenerate sample: {err}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (QuadratureError, ArithmeticError) as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError, configparser.Error, KeyError) as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
