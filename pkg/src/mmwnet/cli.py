"""Command-line interface: scenario-driven coverage/rate/ergodic reports,
blocking-probability curves, Monte Carlo runs, parameter sweeps, and the
3x3 antenna-configuration tables. Emits schema-stable CSV (plus a JSON
manifest) and optional rendered figures."""

import csv
import json
import math
import sys
from functools import wraps
from pathlib import Path

import click
import numpy as np

from . import __version__
from .blockage import BlockProbProfile, los_ball
from .coverage import ergodic_spectral_efficiency
from .montecarlo import AssumptionLevel, run_trials
from .scenario import ConfigError, ScenarioConfig, parse_scenario
from .spatial import (coverage_spatial_curve, ergodic_spatial, omega_density,
                      throughput)

_ANTENNA_SET = (1, 4, 16)


def _fail(kind: str, message: str, code: int, **extra):
    record = {"error": {"type": kind, "message": message, **extra}}
    click.echo(json.dumps(record), err=True)
    sys.exit(code)


def _cli_errors(fn):
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            _fail("config", str(exc), 2)
        except (ValueError, ArithmeticError) as exc:
            _fail("invalid", str(exc), 2)
        except OSError as exc:
            _fail("io", str(exc), 1)
    return wrapper


def _load_scenario(config, **overrides):
    scenario = parse_scenario(config.read()) if config else ScenarioConfig()
    updates = {k: v for k, v in overrides.items() if v is not None}
    return scenario.replace(**updates) if updates else scenario


def _write_csv(out, header, rows):
    if out:
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    else:
        w = csv.writer(sys.stdout)
        w.writerow(header)
        w.writerows(rows)


def _write_manifest(out, manifest):
    text = json.dumps(manifest, indent=2, sort_keys=True)
    if out:
        Path(str(out) + ".manifest.json").write_text(text + "\n")
    else:
        click.echo(text, err=True)


def _manifest(scenario, command, results=None, **run_info):
    m = scenario.manifest()
    m["command"] = command
    m["run"] = run_info
    if results is not None:
        m["results"] = results
    return m


def _plot_path(out, plot):
    if not plot:
        return None
    if not out:
        _fail("usage", "--plot requires --out so the figure has a filename", 2)
    return str(Path(out).with_suffix(".png"))


def _effective_level(scenario, level_flag):
    return AssumptionLevel.parse(level_flag if level_flag else scenario.level)


def _analytic_pieces(scenario):
    region = scenario.region()
    link = scenario.link()
    k = scenario.effective_k()
    profile = BlockProbProfile(region, scenario.w_m, k)
    ball = los_ball(profile)
    density = omega_density(scenario.rx_pattern(), link, region, ball)
    return k, link, density, ball


def _resolve_method(scenario, method, level_flag):
    """Analytic implies the LOS-ball model; an explicit conflicting level is
    rejected rather than silently overridden."""
    if method == "analytic":
        if level_flag and AssumptionLevel.parse(level_flag) is not AssumptionLevel.LOS_BALL:
            _fail("usage", f"--method analytic realizes the LOS-ball model; "
                           f"incompatible with --level {level_flag}", 2)
        return AssumptionLevel.LOS_BALL
    return _effective_level(scenario, level_flag)


_config_opt = click.option("--config", type=click.File("r"), default=None,
                           help="Scenario file (sectioned key=value or JSON); "
                                "defaults to the baseline scenario.")
_out_opt = click.option("--out", type=click.Path(dir_okay=False), default=None,
                        help="CSV destination (stdout when omitted; the JSON "
                             "manifest goes to <out>.manifest.json or stderr).")
_plot_opt = click.option("--plot", is_flag=True,
                         help="Also render a PNG figure next to --out.")
_seed_opt = click.option("--seed", type=int, default=None, help="Seed override.")
_trials_opt = click.option("--trials", type=int, default=None,
                           help="Trial-count override.")
_level_opt = click.option("--level", default=None,
                          type=click.Choice(["a1", "a2", "a3", "a4", "fixed"]),
                          help="Assumption level override.")


@click.group()
@click.version_option(__version__)
def main():
    """Finite mmWave device-to-device network coverage analysis."""


@main.command()
@_config_opt
@click.option("--method", type=click.Choice(["analytic", "mc"]), default="analytic")
@_level_opt
@_trials_opt
@_seed_opt
@_out_opt
@_plot_opt
@_cli_errors
def coverage(config, method, level, trials, seed, out, plot):
    """SINR coverage curve (beta_db, coverage)."""
    scenario = _load_scenario(config, trials=trials, seed=seed)
    lv = _resolve_method(scenario, method, level)
    betas_db = scenario.beta_grid_db.values()
    betas = 10.0 ** (betas_db / 10.0)
    if method == "analytic":
        k, link, density, ball = _analytic_pieces(scenario)
        curve = coverage_spatial_curve(betas, k, density, link,
                                       scenario.tx_pattern(),
                                       scenario.rx_pattern(),
                                       scenario.reference())
        values = curve.values
        results = {"r_b_m": ball.radius, "rho": ball.rho}
        run = {"method": "analytic"}
    else:
        res = run_trials(scenario, lv, scenario.trials, scenario.seed,
                         metric="coverage", grid=betas)
        values = res.means
        results = {"max_std_error": float(res.std_errors.max())}
        run = {"method": "mc", "level": lv.value,
               "trials": scenario.trials, "seed": scenario.seed}
    rows = [(f"{db:.6g}", f"{v:.10g}") for db, v in zip(betas_db, values)]
    _write_csv(out, ["beta_db", "coverage"], rows)
    _write_manifest(out, _manifest(scenario, "coverage", results, **run))
    fig = _plot_path(out, plot)
    if fig:
        from .plotting import save_curve_plot
        save_curve_plot(fig, betas_db, [(run["method"], values)],
                        "SINR threshold (dB)", "coverage probability")


@main.command()
@_config_opt
@click.option("--method", type=click.Choice(["analytic", "mc"]), default="analytic")
@_level_opt
@_trials_opt
@_seed_opt
@_out_opt
@_plot_opt
@_cli_errors
def rate(config, method, level, trials, seed, out, plot):
    """Rate-coverage curve (eta_bits, ccdf)."""
    scenario = _load_scenario(config, trials=trials, seed=seed)
    lv = _resolve_method(scenario, method, level)
    etas = scenario.eta_grid.values()
    betas = 2.0 ** etas - 1.0
    if method == "analytic":
        k, link, density, ball = _analytic_pieces(scenario)
        values = coverage_spatial_curve(betas, k, density, link,
                                        scenario.tx_pattern(),
                                        scenario.rx_pattern(),
                                        scenario.reference()).values
        results = {"r_b_m": ball.radius, "rho": ball.rho}
        run = {"method": "analytic"}
    else:
        res = run_trials(scenario, lv, scenario.trials, scenario.seed,
                         metric="rate", grid=etas)
        values = res.means
        results = {"max_std_error": float(res.std_errors.max())}
        run = {"method": "mc", "level": lv.value,
               "trials": scenario.trials, "seed": scenario.seed}
    rows = [(f"{e:.6g}", f"{v:.10g}") for e, v in zip(etas, values)]
    _write_csv(out, ["eta_bits", "ccdf"], rows)
    _write_manifest(out, _manifest(scenario, "rate", results, **run))
    fig = _plot_path(out, plot)
    if fig:
        from .plotting import save_curve_plot
        save_curve_plot(fig, etas, [(run["method"], values)],
                        "spectral efficiency (bits/use)", "CCDF")


@main.command()
@_config_opt
@click.option("--method", type=click.Choice(["analytic", "mc"]), default="analytic")
@_level_opt
@_trials_opt
@_seed_opt
@_out_opt
@_cli_errors
def ergodic(config, method, level, trials, seed, out):
    """Ergodic spectral efficiency (scalar JSON record)."""
    scenario = _load_scenario(config, trials=trials, seed=seed)
    lv = _resolve_method(scenario, method, level)
    bmin = 10.0 ** (scenario.ergodic_beta_min_db / 10.0)
    bmax = 10.0 ** (scenario.ergodic_beta_max_db / 10.0)
    if method == "analytic":
        k, link, density, _ = _analytic_pieces(scenario)
        se = ergodic_spatial(k, density, link, scenario.tx_pattern(),
                             scenario.rx_pattern(), scenario.reference(),
                             beta_min=bmin, beta_max=bmax,
                             n_points=scenario.ergodic_points)
        record = {"metric": "ergodic_se_bits", "value": se,
                  "throughput_bits": throughput(scenario.p_t, se),
                  "method": "analytic"}
    else:
        res = run_trials(scenario, lv, scenario.trials, scenario.seed,
                         metric="ergodic")
        se = float(res.means[0])
        record = {"metric": "ergodic_se_bits", "value": se,
                  "std_error": float(res.std_errors[0]),
                  "throughput_bits": throughput(scenario.p_t, se),
                  "method": "mc", "level": lv.value,
                  "trials": scenario.trials, "seed": scenario.seed}
    text = json.dumps(record, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        click.echo(text)
    _write_manifest(out, _manifest(scenario, "ergodic", record))


@main.command()
@_config_opt
@click.option("--points", type=int, default=200, help="Radial grid size.")
@_out_opt
@_plot_opt
@_cli_errors
def blockprob(config, points, out, plot):
    """Analytic blocking-probability curve (r_m, p_b) plus {R_B, rho}."""
    scenario = _load_scenario(config)
    region = scenario.region()
    profile = BlockProbProfile(region, scenario.w_m, scenario.effective_k())
    ball = los_ball(profile)
    r = np.linspace(region.r_in, region.r_out, points)
    p = profile(r)
    rows = [(f"{ri:.6g}", f"{pi:.10g}") for ri, pi in zip(r, p)]
    _write_csv(out, ["r_m", "p_b"], rows)
    record = {"r_b_m": ball.radius, "rho": ball.rho}
    if not out:
        click.echo(json.dumps(record), err=True)
    _write_manifest(out, _manifest(scenario, "blockprob", record))
    fig = _plot_path(out, plot)
    if fig:
        from .plotting import save_curve_plot
        save_curve_plot(fig, r, [("analytic", p)], "distance (m)",
                        "blocking probability")


@main.command(name="montecarlo")
@_config_opt
@click.option("--metric", type=click.Choice(["coverage", "rate", "ergodic"]),
              default="coverage")
@_level_opt
@_trials_opt
@_seed_opt
@_out_opt
@_plot_opt
@_cli_errors
def montecarlo_cmd(config, metric, level, trials, seed, out, plot):
    """Monte Carlo estimates (threshold, mean, std_error) with a run manifest."""
    scenario = _load_scenario(config, trials=trials, seed=seed)
    lv = _effective_level(scenario, level)
    res = run_trials(scenario, lv, scenario.trials, scenario.seed, metric=metric)
    if metric == "coverage":
        thresholds = scenario.beta_grid_db.values()
    elif metric == "rate":
        thresholds = res.thresholds
    else:
        thresholds = [float("nan")]
    rows = [(f"{t:.6g}", f"{m:.10g}", f"{s:.6g}")
            for t, m, s in zip(thresholds, res.means, res.std_errors)]
    _write_csv(out, ["threshold", "mean", "std_error"], rows)
    _write_manifest(out, _manifest(
        scenario, "montecarlo", {"metric": metric},
        level=lv.value, trials=scenario.trials, seed=scenario.seed))
    fig = _plot_path(out, plot)
    if fig and metric != "ergodic":
        from .plotting import save_curve_plot
        xlabel = "SINR threshold (dB)" if metric == "coverage" else \
            "spectral efficiency (bits/use)"
        save_curve_plot(fig, np.asarray(thresholds, float),
                        [(lv.value, res.means, res.std_errors)],
                        xlabel, metric)


_SWEEPABLE = ("p_t", "w", "lambda", "sigma2_db", "nt", "nr")


def _apply_sweep(scenario, param, value):
    if param == "p_t":
        return scenario.replace(p_t=float(value)), float(value)
    if param == "w":
        return scenario.replace(w_m=float(value)), float(value)
    if param == "sigma2_db":
        return scenario.replace(sigma2_db=float(value)), float(value)
    if param == "nt":
        return scenario.replace(nt=int(round(value))), int(round(value))
    if param == "nr":
        return scenario.replace(nr=int(round(value))), int(round(value))
    # lambda: adjust K at fixed region
    k = max(0, int(round(float(value) * scenario.region().area())))
    return scenario.replace(k=k, grid_n=None, grid_spacing_m=None), float(value)


@main.command()
@_config_opt
@click.option("--param", type=click.Choice(_SWEEPABLE), required=True)
@click.option("--from", "start", type=float, required=True)
@click.option("--to", "stop", type=float, required=True)
@click.option("--steps", type=int, default=6)
@click.option("--beta-db", type=float, default=None,
              help="Also report analytic coverage at this threshold.")
@_out_opt
@_plot_opt
@_cli_errors
def sweep(config, param, start, stop, steps, beta_db, out, plot):
    """Sweep one parameter, emitting long-format CSV of analytic metrics."""
    if steps < 2:
        _fail("usage", "--steps must be >= 2", 2)
    base = _load_scenario(config)
    values = np.linspace(start, stop, steps)
    rows = []
    series = {"ergodic_se_bits": [], "throughput_bits": [], "coverage": []}
    xs = []
    for v in values:
        scenario, shown = _apply_sweep(base, param, v)
        k, link, density, _ = _analytic_pieces(scenario)
        bmin = 10.0 ** (scenario.ergodic_beta_min_db / 10.0)
        bmax = 10.0 ** (scenario.ergodic_beta_max_db / 10.0)
        se = ergodic_spatial(k, density, link, scenario.tx_pattern(),
                             scenario.rx_pattern(), scenario.reference(),
                             beta_min=bmin, beta_max=bmax,
                             n_points=scenario.ergodic_points)
        tput = throughput(scenario.p_t, se)
        xs.append(shown)
        rows.append((param, f"{shown:.6g}", "ergodic_se_bits", f"{se:.10g}"))
        rows.append((param, f"{shown:.6g}", "throughput_bits", f"{tput:.10g}"))
        series["ergodic_se_bits"].append(se)
        series["throughput_bits"].append(tput)
        if beta_db is not None:
            beta = 10.0 ** (beta_db / 10.0)
            cov = coverage_spatial_curve(np.array([beta]), k, density, link,
                                         scenario.tx_pattern(),
                                         scenario.rx_pattern(),
                                         scenario.reference()).values[0]
            rows.append((param, f"{shown:.6g}", "coverage", f"{cov:.10g}"))
            series["coverage"].append(cov)
    _write_csv(out, ["swept_param", "value", "metric", "result"], rows)
    _write_manifest(out, _manifest(base, "sweep", None, param=param,
                                   start=start, stop=stop, steps=steps,
                                   beta_db=beta_db))
    fig = _plot_path(out, plot)
    if fig:
        from .plotting import save_curve_plot
        plotted = [(name, vals) for name, vals in series.items() if vals]
        save_curve_plot(fig, np.asarray(xs, float), plotted, param, "metric value")


@main.command()
@_config_opt
@click.option("--fixed", "mode", flag_value="fixed",
              help="Deterministic lattice geometry (conditional analysis).")
@click.option("--random", "mode", flag_value="random",
              help="Random placements via orbital-model Monte Carlo.")
@_trials_opt
@_seed_opt
@_out_opt
@_plot_opt
@_cli_errors
def table(config, mode, trials, seed, out, plot):
    """Ergodic-spectral-efficiency table over antenna configs {1,4,16}^2."""
    if mode is None:
        _fail("usage", "table requires --fixed or --random", 2)
    scenario = _load_scenario(config, trials=trials, seed=seed)
    if mode == "fixed" and scenario.grid_n is None:
        scenario = scenario.replace(grid_n=7, grid_spacing_m=0.6)
    n_trials = scenario.trials if mode == "random" else 1
    rows = []
    matrix = np.zeros((len(_ANTENNA_SET), len(_ANTENNA_SET)))
    errors = np.zeros_like(matrix)
    for i, nt in enumerate(_ANTENNA_SET):
        for j, nr in enumerate(_ANTENNA_SET):
            sc = scenario.replace(nt=nt, nr=nr)
            level = AssumptionLevel.FIXED_GRID if mode == "fixed" \
                else AssumptionLevel.ORBITAL
            res = run_trials(sc, level, 1 if mode == "fixed" else n_trials,
                             sc.seed, metric="ergodic")
            matrix[i, j] = res.means[0]
            errors[i, j] = res.std_errors[0]
            rows.append((nt, nr, f"{res.means[0]:.10g}",
                         f"{res.std_errors[0]:.6g}"))
    _write_csv(out, ["nt", "nr", "ergodic_se_bits", "std_error"], rows)
    _write_manifest(out, _manifest(
        scenario, "table", {"matrix": matrix.tolist()},
        mode=mode, trials=(n_trials if mode == "random" else 1),
        seed=scenario.seed))
    fig = _plot_path(out, plot)
    if fig:
        from .plotting import save_table_heatmap
        save_table_heatmap(fig, _ANTENNA_SET, _ANTENNA_SET, matrix,
                           title=f"ergodic SE (bits/use), {mode} geometry")


if __name__ == "__main__":
    main()
