#!/usr/bin/env python3
"""
meandim CLI - run configured experiments and write reproducible results
"""

import asyncio
import json
import os
import sys
from typing import List, Optional, Sequence

import click
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from meandim import __version__
from meandim.config import config
from meandim.execution.models import ExperimentConfig, config_schema, load_config
from meandim.execution.output import OutputFormatter
from meandim.execution.runner import ExperimentRunner
from meandim.execution.suite import SUITES, suite_experiments, suite_names
from meandim.tracking.manifest import RunTracker
from meandim.utils import MeandimError, StructuralError, logger, setup_logging

console = Console(stderr=True)

EXIT_UNCONVERGED = 4
EXIT_FAILED_CHECKS = 1


def _apply_budgets(experiment_config: ExperimentConfig):
    """Config-file budgets, then the environment override of the enumeration budget"""
    experiment_config.budgets.apply(config)
    if os.getenv("MEANDIM_BUDGET_POINTS"):
        config.ENUMERATION_BUDGET = int(os.environ["MEANDIM_BUDGET_POINTS"])


def _fail(error: MeandimError) -> int:
    console.print(f"[red]Error:[/red] {error}")
    return error.exit_code


def _execute(command: str, experiment_config: ExperimentConfig, raw: bytes, source: str,
             kinds: Optional[Sequence[str]], jobs: Optional[int], out: Optional[str], strict: bool) -> int:
    """Run the selected experiments and write results, CSV rows and the manifest"""
    experiments = experiment_config.experiments
    if kinds:
        experiments = [e for e in experiments if e.kind in kinds]
    if not experiments:
        return _fail(StructuralError(f"{source} has no experiments of kind {', '.join(kinds)}", module="cli",
                                     stage=command))

    out_dir = out or experiment_config.output.dir
    tracker = RunTracker(command, source, raw, experiment_config.seed)
    formatter = OutputFormatter(console)
    try:
        _apply_budgets(experiment_config)
        runner = ExperimentRunner(experiment_config, jobs)
        results = asyncio.run(runner.run_all(experiments))
    except MeandimError as e:
        tracker.finish(out_dir, [], e.exit_code)
        return _fail(e)

    metadata = {"command": command, "config_sha256": tracker.manifest.config_sha256,
                "seed": experiment_config.seed}
    written = formatter.save_results(results, out_dir, experiment_config.output.formats, metadata)
    for result in results:
        tracker.log_experiment(result.name, result.kind, result.duration, result.passed, result.unconverged)

    code = 0
    if any(r.unconverged for r in results):
        code = EXIT_UNCONVERGED
    elif strict and not all(r.passed for r in results):
        code = EXIT_FAILED_CHECKS
    tracker.finish(out_dir, written, code)

    formatter.display_results(results)
    formatter.display_summary(results, written + ["manifest.json"], out_dir)
    return code


def _run_from_file(ctx, command: str, config_path: str, kinds: Optional[List[str]], jobs, out, strict):
    try:
        experiment_config, raw = load_config(config_path)
    except MeandimError as e:
        ctx.exit(_fail(e))
        return
    ctx.exit(_execute(command, experiment_config, raw, config_path, kinds, jobs, out, strict))


def experiment_options(func):
    """--config, --jobs, --out and --strict, shared by every experiment subcommand"""
    func = click.option('--strict', is_flag=True, help='Exit 1 when an expectation check fails')(func)
    func = click.option('--out', '-o', type=click.Path(file_okay=False), help='Output directory')(func)
    func = click.option('--jobs', '-j', type=click.IntRange(min=1), default=None,
                        help='Experiments run in parallel (default: CPU count)')(func)
    func = click.option('--config', '-c', 'config_path', required=True, type=click.Path(),
                        help='Experiment configuration (JSON)')(func)
    return func


@click.group()
@click.option('--debug', is_flag=True, help='Enable debug logging')
@click.pass_context
def cli(ctx, debug):
    """Mean dimension, Hausdorff content and rate-distortion experiments on quantized shifts"""
    ctx.ensure_object(dict)
    setup_logging("DEBUG" if debug else config.LOG_LEVEL, config.LOG_FILE)
    ctx.obj['debug'] = debug


@cli.command()
@experiment_options
@click.pass_context
def run(ctx, config_path, jobs, out, strict):
    """Run every experiment in the config"""
    _run_from_file(ctx, "run", config_path, None, jobs, out, strict)


@cli.command()
@experiment_options
@click.pass_context
def covering(ctx, config_path, jobs, out, strict):
    """Covering profiles and metric mean dimension slopes"""
    _run_from_file(ctx, "covering", config_path, ["covering-profile"], jobs, out, strict)


@cli.command()
@experiment_options
@click.pass_context
def hausdorff(ctx, config_path, jobs, out, strict):
    """Mean Hausdorff dimension profiles"""
    _run_from_file(ctx, "hausdorff", config_path, ["dim-profile"], jobs, out, strict)


@cli.command()
@experiment_options
@click.pass_context
def ratedist(ctx, config_path, jobs, out, strict):
    """Rate-distortion curves and rdim slopes"""
    _run_from_file(ctx, "ratedist", config_path, ["rd-curve"], jobs, out, strict)


@cli.command()
@experiment_options
@click.pass_context
def frostman(ctx, config_path, jobs, out, strict):
    """Frostman measures from the weighted-content LP"""
    _run_from_file(ctx, "frostman", config_path, ["frostman"], jobs, out, strict)


@cli.command()
@experiment_options
@click.pass_context
def pipeline(ctx, config_path, jobs, out, strict):
    """Frostman, averaging and rate-distortion chain against the scaling-law bound"""
    _run_from_file(ctx, "pipeline", config_path, ["nice-measure"], jobs, out, strict)


@cli.command()
@experiment_options
@click.pass_context
def tiling(ctx, config_path, jobs, out, strict):
    """Dynamical Voronoi tilings, equivariance and boundary density"""
    _run_from_file(ctx, "tiling", config_path, ["tiling"], jobs, out, strict)


@cli.command()
@experiment_options
@click.pass_context
def algebraic(ctx, config_path, jobs, out, strict):
    """Projective dimension against the Haar rate-distortion slope"""
    _run_from_file(ctx, "algebraic", config_path, ["algebraic"], jobs, out, strict)


@cli.command()
@click.argument('name', required=False, type=click.Choice(suite_names()))
@click.option('--config', '-c', 'config_path', type=click.Path(), help='Config with example-suite experiments')
@click.option('--jobs', '-j', type=click.IntRange(min=1), default=None, help='Experiments run in parallel')
@click.option('--out', '-o', type=click.Path(file_okay=False), help='Output directory')
@click.option('--strict', is_flag=True, help='Exit 1 when an expectation check fails')
@click.pass_context
def suite(ctx, name, config_path, jobs, out, strict):
    """Run a pre-registered worked example and compare against its expected value"""
    if config_path:
        _run_from_file(ctx, "suite", config_path, ["example-suite"], jobs, out, strict)
        return
    if name is None:
        ctx.exit(_fail(StructuralError(f"give a suite name ({', '.join(suite_names())}) or --config",
                                       module="cli", stage="suite")))
        return
    console.print(Panel.fit(f"[bold cyan]Example suite: {name}[/bold cyan]\n"
                            f"[dim]{len(SUITES[name])} registered experiments[/dim]", border_style="blue"))
    experiment_config = ExperimentConfig(experiments=suite_experiments(name),
                                         output={"dir": out or f"results/{name}"})
    raw = json.dumps(SUITES[name], sort_keys=True).encode("utf-8")
    ctx.exit(_execute("suite", experiment_config, raw, f"suite:{name}", None, jobs, out, strict))


@cli.command()
@click.option('--config', '-c', 'config_path', required=True, type=click.Path(), help='Config to check')
@click.pass_context
def validate(ctx, config_path):
    """Check a config against the schema without running it"""
    try:
        experiment_config, _ = load_config(config_path)
    except MeandimError as e:
        ctx.exit(_fail(e))
        return
    table = Table(title=f"{config_path}", show_header=True, header_style="bold magenta")
    table.add_column("Experiment", style="bold cyan")
    table.add_column("Kind")
    table.add_column("System", style="dim")
    for exp in experiment_config.experiments:
        system = exp.system.kind if exp.system else exp.suite or "-"
        table.add_row(exp.name, exp.kind, system)
    console.print(table)
    console.print(f"Config is valid: {len(experiment_config.experiments)} experiments", style="green")


@cli.command()
def schema():
    """Print the JSON schema of experiment configs"""
    click.echo(json.dumps(config_schema(), indent=2, sort_keys=True))


@cli.command()
def version():
    """Show version information"""
    console.print(Panel.fit(
        f"[bold cyan]meandim[/bold cyan]\n"
        f"Version: {__version__}\n"
        f"Python: {sys.version.split()[0]}\n"
        f"Enumeration budget: {config.ENUMERATION_BUDGET} (MEANDIM_BUDGET_POINTS)",
        border_style="blue"
    ))


def main():
    """Main entry point for the CLI"""
    try:
        cli()
    except KeyboardInterrupt:
        console.print("\nInterrupted", style="yellow")
        sys.exit(130)
    except MeandimError as e:
        logger.error(str(e))
        sys.exit(e.exit_code)


if __name__ == '__main__':
    main()
