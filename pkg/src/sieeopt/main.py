"""
Command-line entry point.

Every command writes its CSV table(s) and a ``manifest.json`` into ``--out``
and prints a one-line summary on stdout. Failures exit nonzero with a single
JSON object on stderr.
"""
import dataclasses
import json
import logging
import os
import sys
from typing import Any, Optional, Sequence

import click
import numpy as np

from sieeopt.config import DEFAULT_SCENARIO_PATH
from sieeopt.controller.channels import gen_channels
from sieeopt.controller.fairness import available_metrics, fairness_sweep
from sieeopt.controller.oracle import sum_rate_max_baseline
from sieeopt.controller.scalar import dinkelbach_min_scalar, transform_min_scalar
from sieeopt.controller.solver import SolverConfig, allocation_summary, solve_siee
from sieeopt.controller.transform import YUpdatePolicy
from sieeopt.dev import timer
from sieeopt.errors import SieeError
from sieeopt.logging_config import setup_logging
from sieeopt.model.io import IOManager
from sieeopt.model.scenario import ScenarioConfig

logger = logging.getLogger(__name__)

DEMO_DOMAIN = (0.1, 100.0)


def _emit_error(kind: str, message: str) -> None:
    click.echo(json.dumps({"error": kind, "message": message}), err=True)


class JsonErrorGroup(click.Group):
    """Click group that reports every failure as one JSON line on stderr."""

    def main(self, *args: Any, **kwargs: Any) -> Any:  # type: ignore[override]
        kwargs["standalone_mode"] = False
        try:
            rv = super().main(*args, **kwargs)
        except click.exceptions.Exit as e:
            sys.exit(e.exit_code)
        except click.Abort:
            _emit_error("Abort", "Aborted")
            sys.exit(1)
        except click.ClickException as e:
            _emit_error(type(e).__name__, e.format_message())
            sys.exit(e.exit_code)
        except (SieeError, OSError) as e:
            logger.debug("Command failed", exc_info=True)
            _emit_error(type(e).__name__, str(e))
            sys.exit(1)
        sys.exit(rv if isinstance(rv, int) else 0)


def _load_scenario(config_path: Optional[str], **overrides: Any) -> ScenarioConfig:
    return IOManager.load_scenario(config_path or DEFAULT_SCENARIO_PATH, overrides)


config_option = click.option(
    "--config", "config_path", type=click.Path(dir_okay=False), default=None,
    help="Scenario TOML file (defaults to the bundled scenario).",
)
seed_option = click.option("--seed", type=click.IntRange(min=0), default=None, help="Random seed.")
out_option = click.option(
    "--out", "out_dir", type=click.Path(file_okay=False), default="results", show_default=True,
    help="Output directory.",
)


@click.group(cls=JsonErrorGroup)
@click.version_option(package_name="sieeopt")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="WARNING",
    show_default=True,
)
@click.option("--log-file", type=click.Path(dir_okay=False), default=None, help="Also log to this file.")
def main(log_level: str, log_file: Optional[str]) -> None:
    """SIEE power-control solvers and experiments."""
    setup_logging(level=getattr(logging, log_level.upper()), log_file=log_file)


@main.command("demo-scalar")
@out_option
@click.option("--tol", type=float, default=1e-9, show_default=True)
@timer
def demo_scalar(out_dir: str, tol: float) -> None:
    """Minimize (x^2 + 100)/x with Dinkelbach and the fraction transform, with and without acceleration."""
    def numerator(x: float) -> float:
        return x**2 + 100.0

    def denominator(x: float) -> float:
        return x

    results = [
        dinkelbach_min_scalar(numerator, denominator, DEMO_DOMAIN, tol=tol),
        transform_min_scalar(numerator, denominator, DEMO_DOMAIN, tol=tol),
        transform_min_scalar(numerator, denominator, DEMO_DOMAIN, tol=tol, accelerate=False),
    ]
    rows = [row for result in results for row in result.trace.rows()]
    IOManager.write_csv(os.path.join(out_dir, "demo_scalar.csv"), ["iter", "method", "x", "ratio"], rows)
    IOManager.write_manifest(out_dir, "demo-scalar", {"domain": list(DEMO_DOMAIN), "tol": tol}, None)
    for result in results:
        click.echo(
            f"{result.trace.method}: x={result.x:.6f} value={result.value:.6f} iterations={result.iterations}"
        )


@main.command("solve")
@config_option
@seed_option
@click.option("--n-bs", type=click.IntRange(min=1), default=None, help="Number of BS/user pairs.")
@click.option(
    "--y-update", type=click.Choice([p.value for p in YUpdatePolicy]), default=YUpdatePolicy.INNER.value,
    show_default=True,
)
@out_option
@timer
def solve(config_path: Optional[str], seed: Optional[int], n_bs: Optional[int], y_update: str, out_dir: str) -> None:
    """Solve one generated instance."""
    scenario = _load_scenario(config_path, seed=seed, n_bs=n_bs)
    params = gen_channels(scenario, np.random.default_rng(scenario.seed))
    cfg = SolverConfig(y_update=YUpdatePolicy(y_update), seed=scenario.seed)
    report = solve_siee(params, cfg)

    IOManager.write_csv(os.path.join(out_dir, "solve.csv"), ["user", "p_w", "iee"], report.to_rows())
    IOManager.write_csv(
        os.path.join(out_dir, "solve_trajectory.csv"),
        ["outer_iter", "objective", "inner_iterations"],
        report.trajectory_rows(),
    )
    IOManager.write_manifest(
        out_dir, "solve", {"scenario": scenario.to_dict(), "solver": cfg.to_dict()}, scenario.seed
    )
    click.echo(
        f"status={report.status.value} siee={report.objective:.6e} outer_iterations={report.outer_iterations}"
    )


@main.command("compare-baseline")
@config_option
@seed_option
@click.option("--n-bs", type=click.IntRange(1, 4), default=None, help="Number of BS/user pairs (<= 4).")
@click.option("--resolution", type=click.IntRange(min=2), default=32, show_default=True)
@click.option("--weak-user/--no-weak-user", default=True, show_default=True, help="Put user 0 on its cell edge.")
@out_option
@timer
def compare_baseline(
    config_path: Optional[str],
    seed: Optional[int],
    n_bs: Optional[int],
    resolution: int,
    weak_user: bool,
    out_dir: str,
) -> None:
    """Compare SIEE minimization with sum-rate maximization."""
    scenario = _load_scenario(config_path, seed=seed, n_bs=n_bs, weak_user=weak_user)
    params = gen_channels(scenario, np.random.default_rng(scenario.seed))
    cfg = SolverConfig(seed=scenario.seed)
    reports = {"siee": solve_siee(params, cfg), "sumrate": sum_rate_max_baseline(params, resolution)}

    rows = []
    for method, report in reports.items():
        summary = allocation_summary(params, report.p_star)
        for row in report.to_rows():
            rows.append({
                "method": method,
                **row,
                "sum_iee": summary.sum_iee,
                "max_min_iee_ratio": summary.max_min_iee_ratio,
            })
        click.echo(f"{method}: sum_iee={summary.sum_iee:.6e} max_min_iee_ratio={summary.max_min_iee_ratio:.4f}")

    IOManager.write_csv(
        os.path.join(out_dir, "compare_baseline.csv"),
        ["method", "user", "p_w", "iee", "sum_iee", "max_min_iee_ratio"],
        rows,
    )
    IOManager.write_manifest(
        out_dir,
        "compare-baseline",
        {"scenario": scenario.to_dict(), "solver": cfg.to_dict(), "resolution": resolution},
        scenario.seed,
    )


@main.command("fairness-mc")
@click.option("--terms", type=click.IntRange(min=2), multiple=True, help="Numbers of terms (repeatable).")
@click.option("--range", "ranges", type=float, multiple=True, help="Uniform upper bounds (repeatable).")
@click.option("--trials", type=click.IntRange(min=1), default=10_000, show_default=True)
@click.option("--candidates", type=click.IntRange(min=1), default=64, show_default=True)
@click.option("--metric", "metrics", type=click.Choice(available_metrics()), multiple=True)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@out_option
@timer
def fairness_mc(
    terms: Sequence[int],
    ranges: Sequence[float],
    trials: int,
    candidates: int,
    metrics: Sequence[str],
    seed: int,
    out_dir: str,
) -> None:
    """Percentage of trials where SIMin is at least as fair as SMax."""
    terms = list(terms) or list(range(2, 21))
    ranges = list(ranges) or [5.0, 10.0, 50.0]
    metrics = list(metrics) or available_metrics()

    rows = []
    for metric in metrics:
        points = fairness_sweep(terms, ranges, metric, n_candidates=candidates, n_trials=trials, seed=seed)
        rows.extend(dataclasses.asdict(point) for point in points)
        for point in points:
            click.echo(
                f"{metric} range={point.range_max:g} n_terms={point.n_terms}: {point.percentage:.2f}%"
            )

    IOManager.write_csv(
        os.path.join(out_dir, "fairness_mc.csv"), ["metric", "range_max", "n_terms", "percentage"], rows
    )
    config = {"terms": terms, "ranges": ranges, "trials": trials, "candidates": candidates, "metrics": metrics}
    IOManager.write_manifest(out_dir, "fairness-mc", config, seed)


@main.command("admm-diag")
@config_option
@seed_option
@click.option("--n-bs", "n_bs_list", type=click.IntRange(min=1), multiple=True, help="Values of I (repeatable).")
@click.option("--instances", type=click.IntRange(min=1), default=10, show_default=True)
@out_option
@timer
def admm_diag(
    config_path: Optional[str],
    seed: Optional[int],
    n_bs_list: Sequence[int],
    instances: int,
    out_dir: str,
) -> None:
    """Newton iterations, residual traces and penalty ratios versus I."""
    scenario = _load_scenario(config_path, seed=seed)
    n_bs_list = list(n_bs_list) or [2, 4, 8]
    cfg = SolverConfig(seed=scenario.seed)

    newton_rows, residual_rows, ratio_rows = [], [], []
    for n_bs in n_bs_list:
        sized = dataclasses.replace(scenario, n_bs=n_bs)
        for k in range(instances):
            params = gen_channels(sized, np.random.default_rng([scenario.seed, n_bs, k]))
            report = solve_siee(params, cfg)
            its = report.newton_iterations or [0]
            newton_rows.append({
                "n_bs": n_bs, "instance": k,
                "mean_iterations": float(np.mean(its)), "max_iterations": int(np.max(its)),
            })
            ratio_rows.append({"n_bs": n_bs, "instance": k, "penalty_ratio": report.penalty_ratio})
            if k == 0:
                residual_rows.extend(
                    {"n_bs": n_bs, "step": step, "residual_w": r} for step, r in enumerate(report.residual_trace)
                )
        ratios = [row["penalty_ratio"] for row in ratio_rows if row["n_bs"] == n_bs]
        click.echo(f"I={n_bs}: median penalty ratio {float(np.nanmedian(ratios)):.1f}")

    IOManager.write_csv(
        os.path.join(out_dir, "newton_iterations.csv"),
        ["n_bs", "instance", "mean_iterations", "max_iterations"],
        newton_rows,
    )
    IOManager.write_csv(os.path.join(out_dir, "residual_trace.csv"), ["n_bs", "step", "residual_w"], residual_rows)
    IOManager.write_csv(os.path.join(out_dir, "penalty_ratio.csv"), ["n_bs", "instance", "penalty_ratio"], ratio_rows)
    IOManager.write_manifest(
        out_dir,
        "admm-diag",
        {"scenario": scenario.to_dict(), "solver": cfg.to_dict(), "n_bs": n_bs_list, "instances": instances},
        scenario.seed,
    )
