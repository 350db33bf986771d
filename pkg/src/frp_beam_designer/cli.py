"""Command-line interface for FRP beam designer."""

from __future__ import annotations

import logging
import math
import sys
from contextlib import contextmanager
from pathlib import Path

import click

from .aci440_checks import REPORT_FIELDS, check_all
from .beam_model import (
    CATALOG_VARIANTS,
    COST_CASES,
    EXPOSURE_CRACK_LIMITS_MM,
    InvalidInputError,
    Section,
)
from .config import ConfigError, RunConfig, read_config
from .constraint_handling import PENALTY_FORMS, PenaltySchedule, SwarmInitializationError
from .cost_model import design_cost
from .experiments import (
    TABLES,
    comparison_frame,
    report_entries,
    reproduce,
    result_frame,
    run_replications,
    write_report,
)
from .oracle import GridSpec, NoFeasiblePointError, grid_search, write_heatmap_csv
from .pso_core import write_trace_csv

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


@contextmanager
def _exit_codes(verbose: bool):
    """Map library errors onto the CLI's exit-code contract."""
    try:
        yield
    except click.ClickException:
        raise
    except (ConfigError, InvalidInputError) as e:
        click.echo(f"Configuration error: {e}", err=True)
        sys.exit(EXIT_USAGE)
    except SwarmInitializationError as e:
        click.echo(f"Initialization failed after {e.attempts} attempts: {e}", err=True)
        sys.exit(EXIT_FAILED)
    except NoFeasiblePointError as e:
        click.echo(f"No feasible point: {e}", err=True)
        sys.exit(EXIT_FAILED)
    except FileNotFoundError as e:
        click.echo(f"File not found: {e}", err=True)
        sys.exit(EXIT_USAGE)
    except Exception as e:
        click.echo(f"Unexpected error: {e}", err=True)
        if verbose:
            import traceback

            traceback.print_exc()
        sys.exit(EXIT_FAILED)


def _problem_options(command):
    """Options shared by every command that builds a design problem."""
    options = [
        click.option(
            "--case",
            type=click.Choice(COST_CASES),
            default=None,
            help="Cost case (rates and bar prices) [default: from config, else A]",
        ),
        click.option(
            "--variant",
            "catalog_variant",
            type=click.Choice(CATALOG_VARIANTS),
            default=None,
            help="Bar price variant: as printed, or with the Case B #6 price reconciled",
        ),
        click.option(
            "--catalog",
            "catalog_path",
            type=click.Path(exists=True, dir_okay=False, path_type=Path),
            default=None,
            help="Bar catalog CSV to use instead of the built-in table",
        ),
        click.option(
            "--hmax",
            "h_max",
            type=click.FloatRange(min=0, min_open=True),
            default=None,
            help="Maximum section height [m] [default: 2.0]",
        ),
        click.option(
            "--exposure",
            type=click.Choice(sorted(EXPOSURE_CRACK_LIMITS_MM)),
            default=None,
            help="Exposure class setting the crack-width limit (interior 0.7 mm, exterior 0.5 mm)",
        ),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _config_for(ctx: click.Context, **overrides) -> RunConfig:
    config: RunConfig = ctx.obj["config"]
    exposure = overrides.pop("exposure", None)
    if exposure is not None:
        overrides["w_max"] = EXPOSURE_CRACK_LIMITS_MM[exposure]
    return config.with_overrides(**overrides)


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="INI file with [problem], [limits], [swarm], [penalty] and [run] sections",
)
@click.option(
    "--verbose",
    "-v",
    is_flag=True,
    help="Enable verbose output (debug logging, tracebacks)",
)
@click.pass_context
def main(ctx: click.Context, config_path: Path | None, verbose: bool):
    """
    Least-cost flexural design of FRP-reinforced concrete beams.

    \b
    Example:
        frp-beam-designer check --case A --b 0.2124 --h 0.5346 --n 3 --bar '#6'
        frp-beam-designer optimize --case A --optimizer 1 --seeds 5
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    with _exit_codes(verbose):
        ctx.obj["config"] = read_config(config_path) if config_path else RunConfig()


@main.command()
@click.option("--b", "b", type=click.FloatRange(min=0, min_open=True), required=True, help="Width [m]")
@click.option("--h", "h", type=click.FloatRange(min=0, min_open=True), required=True, help="Height [m]")
@click.option("--n", "n", type=click.IntRange(min=2), required=True, help="Number of bars")
@click.option("--bar", type=str, required=True, help="Bar size, e.g. '#6'")
@_problem_options
@click.option(
    "--report",
    "report_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Also write the check report as key = value lines",
)
@click.pass_context
def check(ctx, b, h, n, bar, case, catalog_variant, catalog_path, h_max, exposure, report_path):
    """Run every design check on one section; exits 0 when it is feasible."""
    verbose = ctx.obj["verbose"]
    with _exit_codes(verbose):
        config = _config_for(
            ctx,
            case=case,
            catalog_variant=catalog_variant,
            catalog_path=catalog_path,
            h_max=h_max,
            exposure=exposure,
        )
        problem = config.build_problem()
        section = Section(b, h, n, problem.catalog.by_designation(bar))
        report = check_all(problem, section)
        breakdown = design_cost(problem, section)

        click.echo(f"Section: b={b:.4f} m, h={h:.4f} m, {section.label()} (case {config.case})")
        for name, unit, stage, formula in REPORT_FIELDS:
            value = getattr(report, name)
            shown = "n/a" if math.isnan(value) else f"{value:.6g}"
            click.echo(f"  {stage:<11} {name:<14} {shown:>14} {unit:<5} [{formula}]")
        click.echo("Violations:")
        for name, magnitude in report.violations:
            click.echo(f"  {name:<22} {magnitude:.6g}")
        click.echo(
            f"Cost: concrete {breakdown.concrete:.4f}, shuttering {breakdown.shuttering:.4f}, "
            f"reinforcement {breakdown.reinforcement:.4f}, total {breakdown.total:.4f}"
        )

        if report_path:
            entries = {f"report.{name}": getattr(report, name) for name, *_ in REPORT_FIELDS}
            entries.update({f"violation.{name}": m for name, m in report.violations})
            entries.update({f"cost.{k}": v for k, v in breakdown.as_row().items()})
            entries["feasible"] = str(report.is_feasible()).lower()
            write_report(entries, report_path)

        if report.is_feasible():
            click.echo(click.style("\n✓ Feasible", fg="green", bold=True))
            sys.exit(EXIT_OK)
        click.echo(click.style(f"\n✗ Infeasible: {', '.join(report.failed())}", fg="red", bold=True))
        sys.exit(EXIT_FAILED)


@main.command()
@click.option(
    "--optimizer",
    type=click.Choice(["1", "2"]),
    default=None,
    help="1: feasibility preservation over (b, h); 2: penalization over (b, h, n, bar) [default: 1]",
)
@click.option("--seeds", type=click.IntRange(min=1), default=None, help="Number of seeded runs [default: 5]")
@click.option("--first-seed", type=int, default=0, show_default=True, help="Seed of the first run")
@click.option("--tmax", "t_max", type=click.IntRange(min=1), default=None, help="Maximum steps per run [default: 10000]")
@click.option("--swarm-size", type=click.IntRange(min=2), default=None, help="Particles per swarm [default: 35]")
@click.option(
    "--penalty",
    type=str,
    default=None,
    help="Penalty schedule for optimizer 2: 'linear:1e5:1e10' or 'constant:1e8'",
)
@click.option("--penalty-form", type=click.Choice(PENALTY_FORMS), default=None, help="Penalty on violations")
@click.option("--maximizer/--no-maximizer", default=None, help="Also fly the companion maximizer swarm")
@_problem_options
@click.option(
    "--report",
    "report_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write a key = value report of every run",
)
@click.option(
    "--trace",
    "trace_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the best run's particle trace as CSV",
)
@click.pass_context
def optimize(
    ctx,
    optimizer,
    seeds,
    first_seed,
    t_max,
    swarm_size,
    penalty,
    penalty_form,
    maximizer,
    case,
    catalog_variant,
    catalog_path,
    h_max,
    exposure,
    report_path,
    trace_path,
):
    """Run an optimizer over several seeds and report the best design."""
    verbose = ctx.obj["verbose"]
    schedule = None
    if penalty is not None:
        try:
            schedule = PenaltySchedule.parse(penalty)
        except InvalidInputError as e:
            raise click.BadParameter(str(e), param_hint="--penalty") from e

    with _exit_codes(verbose):
        config = _config_for(
            ctx,
            optimizer=None if optimizer is None else f"optimizer{optimizer}",
            seeds=None if seeds is None else tuple(range(first_seed, first_seed + seeds)),
            t_max=t_max,
            swarm_size=swarm_size,
            penalty=schedule,
            penalty_form=penalty_form,
            maximizer=maximizer,
            record_trace=True if trace_path else None,
            case=case,
            catalog_variant=catalog_variant,
            catalog_path=catalog_path,
            h_max=h_max,
            exposure=exposure,
        )
        spec = config.optimizer_spec()
        if verbose:
            click.echo(f"Optimizer: {spec.variant}, case {config.case}, seeds {list(config.seeds)}")

        summary = run_replications(spec, config.seeds, progress=verbose)
        best = summary.best

        click.echo(result_frame(summary.results).to_string(index=False))
        click.echo(
            f"\nBest: seed {best.seed}, b={best.section.b:.4f} m, h={best.section.h:.4f} m, "
            f"{best.section.label()}, total {best.total:.4f}"
        )
        click.echo(f"Median total: {summary.median_total:.4f}")

        if report_path:
            write_report(report_entries(summary, label=f"case {config.case}"), report_path)
            click.echo(f"Report written to {report_path}")
        if trace_path and best.trace is not None:
            dims = 2 if spec.variant == "optimizer1" else 4
            write_trace_csv(best.trace, dims, trace_path)
            click.echo(f"Trace written to {trace_path}")

        if best.feasible:
            click.echo(click.style(f"\n✓ Feasible design found in {len(summary.results)} runs", fg="green", bold=True))
            sys.exit(EXIT_OK)
        click.echo(click.style("\n✗ No run returned a feasible design", fg="red", bold=True), err=True)
        sys.exit(EXIT_FAILED)


@main.command()
@_problem_options
@click.option("--b-step", type=click.FloatRange(min=0, min_open=True), default=0.001, show_default=True, help="Width step [m]")
@click.option("--h-step", type=click.FloatRange(min=0, min_open=True), default=0.001, show_default=True, help="Height step [m]")
@click.option("--no-breakpoints", is_flag=True, help="Do not add exact bar-fit widths to the grid")
@click.option("--no-refine", is_flag=True, help="Do not refine the winner's height between grid lines")
@click.option(
    "--heatmap",
    "heatmap_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write (b, h, feasible, cost) for every grid point as CSV",
)
@click.pass_context
def oracle(ctx, case, catalog_variant, catalog_path, h_max, exposure, b_step, h_step, no_breakpoints, no_refine, heatmap_path):
    """Exhaustive grid search for the cheapest feasible design."""
    verbose = ctx.obj["verbose"]
    with _exit_codes(verbose):
        config = _config_for(
            ctx,
            case=case,
            catalog_variant=catalog_variant,
            catalog_path=catalog_path,
            h_max=h_max,
            exposure=exposure,
        )
        grid = GridSpec(
            b_step=b_step,
            h_step=h_step,
            include_width_breakpoints=not no_breakpoints,
            refine=not no_refine,
        )
        result = grid_search(config.build_problem(), grid, heatmap=heatmap_path is not None, progress=verbose)
        section = result.section
        click.echo(
            f"Best: b={section.b:.5f} m, h={section.h:.5f} m, {section.label()}, "
            f"total {result.total:.4f} (concrete {result.cost.concrete:.4f}, "
            f"shuttering {result.cost.shuttering:.4f}, reinforcement {result.cost.reinforcement:.4f})"
        )
        click.echo(f"Evaluated {result.evaluated_count} of {result.grid_points} grid points, {result.feasible_count} feasible")
        if heatmap_path:
            write_heatmap_csv(result.heatmap, heatmap_path)
            click.echo(f"Heatmap written to {heatmap_path}")
        click.echo(click.style("\n✓ Grid search complete", fg="green", bold=True))


@main.command("reproduce")
@click.option("--only", type=click.Choice(TABLES), default=None, help="Restrict to one published table")
@click.option(
    "--seeds", type=click.IntRange(min=1), default=None, help="Seeded runs per scenario [default: from config, else 5]"
)
@click.option(
    "--tmax",
    "t_max",
    type=click.IntRange(min=1),
    default=None,
    help="Maximum steps per run [default: from config, else 10000]",
)
@click.option("--oracle", "with_oracle", is_flag=True, help="Also compute the grid-search bound per scenario")
@click.option(
    "--output",
    "output_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the comparison table as CSV",
)
@click.pass_context
def reproduce_command(ctx, only, seeds, t_max, with_oracle, output_path):
    """Re-run the published scenarios and compare against the published totals."""
    verbose = ctx.obj["verbose"]
    with _exit_codes(verbose):
        config = _config_for(ctx, seeds=None if seeds is None else tuple(range(seeds)))
        comparisons = reproduce(
            seeds=config.seeds,
            only=only,
            t_max=t_max,
            config=config,
            with_oracle=with_oracle,
            progress=True,
        )
        frame = comparison_frame(comparisons)
        click.echo(frame.to_string(index=False))
        if output_path:
            output_path.parent.mkdir(parents=True, exist_ok=True)
            frame.to_csv(output_path, index=False)
            click.echo(f"Comparison written to {output_path}")

        missed = [c.design.name for c in comparisons if not c.within_target]
        if not missed:
            click.echo(click.style(f"\n✓ All {len(comparisons)} scenarios within target", fg="green", bold=True))
            sys.exit(EXIT_OK)
        click.echo(click.style(f"\n✗ Missed target: {', '.join(missed)}", fg="red", bold=True), err=True)
        sys.exit(EXIT_FAILED)


if __name__ == "__main__":
    main()
