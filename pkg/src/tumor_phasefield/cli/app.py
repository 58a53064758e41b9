from pathlib import Path

import typer
from rich.table import Table

from tumor_phasefield.cli.utils import (
    configure_logging,
    console,
    handle_result,
    initialize_context,
    load_config_or_exit,
    resolve_manager,
)
from tumor_phasefield.manager import SimulationManager
from tumor_phasefield.schemas.contexts import RunContext
from tumor_phasefield.schemas.records import ContinuationTable, RunManifest
from tumor_phasefield.schemas.sources import InwardVerdict, MeanTrajectory

main_app = typer.Typer(
    help="Finite-difference simulator of a multi-species Cahn-Hilliard-Darcy tumor model.\n\n"
    "Exit codes: 0 success, 2 configuration error, 3 hypothesis violation, 4 numerical failure.",
    no_args_is_help=True,
)


@main_app.callback()
def setup(
    ctx: typer.Context,
    output_dir: Path = typer.Option(
        Path("runs"),
        "--output-dir",
        "-o",
        envvar="TUMOR_PHASEFIELD_OUTPUT_DIR",
        help="Directory under which run directories are created.",
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log at DEBUG level."),
) -> None:
    initialize_context(ctx)
    configure_logging(verbose)
    ctx.obj["simulation_manager"] = SimulationManager(RunContext(base_dir=output_dir))


def _format(value: float | None, spec: str = ".4e") -> str:
    return "-" if value is None else format(value, spec)


def _verdict_table(verdict: InwardVerdict) -> Table:
    table = Table(title="Inward-pointing check")
    table.add_column("Quantity", style="magenta")
    table.add_column("Value", justify="right")
    table.add_row("holds", "[green]yes[/green]" if verdict.holds else "[red]no[/red]")
    table.add_row("worst margin", f"{verdict.worst_margin:.6g}")
    table.add_row("witness", f"({verdict.witness.s:.5f}, {verdict.witness.r:.5f})")
    table.add_row("normal", f"({verdict.witness_normal[0]:.5f}, {verdict.witness_normal[1]:.5f})")
    table.add_row("Sigma", f"({verdict.witness_sigma[0]:.5g}, {verdict.witness_sigma[1]:.5g})")
    table.add_row("samples", str(verdict.n_samples))
    return table


def _manifest_table(manifest: RunManifest) -> Table:
    final = manifest.final
    table = Table(title="Run summary")
    table.add_column("Quantity", style="magenta")
    table.add_column("Value", justify="right")
    table.add_row("steps", str(manifest.n_steps))
    table.add_row("final energy", f"{final.energy:.10g}")
    table.add_row("means", f"({final.mean_p:.8f}, {final.mean_d:.8f})")
    table.add_row("phi_p range", f"[{final.min_p:.5f}, {final.max_p:.5f}]")
    table.add_row("phi_d range", f"[{final.min_d:.5f}, {final.max_d:.5f}]")
    table.add_row("worst signed distance", f"{manifest.worst_signed_distance:.4e}")
    table.add_row("max mean-ODE deviation", f"{manifest.max_mean_ode_deviation:.4e}")
    table.add_row("max mean residual", f"{manifest.max_mean_residual:.4e}")
    table.add_row("max energy residual", f"{manifest.max_energy_residual:.4e}")
    return table


def _trajectory_table(trajectory: MeanTrajectory, rows: int = 10) -> Table:
    table = Table(title=f"Mean ODE ({trajectory.scheme})")
    table.add_column("t", justify="right")
    table.add_column("Y_p", justify="right")
    table.add_column("Y_d", justify="right")
    stride = max(1, len(trajectory.states) // rows)
    shown = trajectory.states[::stride]
    if shown[-1] is not trajectory.final:
        shown.append(trajectory.final)
    for state in shown:
        table.add_row(f"{state.t:.6g}", f"{state.y_p:.8f}", f"{state.y_d:.8f}")
    return table


def _continuation_table(result: ContinuationTable) -> Table:
    table = Table(title="Epsilon continuation")
    columns = (
        "epsilon",
        "distance",
        "ratio",
        "min phi_p",
        "max phi_p",
        "max sum",
        "overshoot",
        "mean |grad F_eps|",
    )
    for name in columns:
        table.add_column(name, justify="right")
    for row in result.rows:
        table.add_row(
            f"{row.epsilon:g}",
            _format(row.distance_to_previous),
            _format(row.ratio, ".4f"),
            f"{row.min_p:.5f}",
            f"{row.max_p:.5f}",
            f"{row.max_sum:.5f}",
            f"{row.overshoot:.3e}",
            f"{row.feps_grad_mean:.4g}",
        )
    return table


@main_app.command(name="simulate")
def command_simulate(
    ctx: typer.Context,
    config_file: Path = typer.Argument(..., help="YAML or JSON configuration file."),
    run_name: str = typer.Option("run", "--name", "-n", help="Run directory name."),
) -> None:
    """Runs a simulation and writes diagnostics, snapshots and a manifest."""
    manager = resolve_manager(ctx)
    config = load_config_or_exit(manager, config_file)
    res = manager.simulate(config, run_name=run_name)
    if res.manifest is not None:
        console.print(_manifest_table(res.manifest))
    handle_result(is_success=res.is_success, message=res.message, exit_code=res.exit_code)


@main_app.command(name="check-region")
def command_check_region(
    ctx: typer.Context,
    config_file: Path = typer.Argument(..., help="YAML or JSON configuration file."),
    samples: int = typer.Option(720, "--samples", help="Number of sampled boundary points."),
) -> None:
    """Checks that the source field points into the admissible region."""
    manager = resolve_manager(ctx)
    config = load_config_or_exit(manager, config_file)
    res = manager.check_region(config, n_boundary_samples=samples)
    if res.verdict is not None:
        console.print(_verdict_table(res.verdict))
    handle_result(is_success=res.is_success, message=res.message, exit_code=res.exit_code)


@main_app.command(name="mean-ode")
def command_mean_ode(
    ctx: typer.Context,
    config_file: Path = typer.Argument(..., help="YAML or JSON configuration file."),
    t_final: float | None = typer.Option(
        None, "--t-final", help="Final time. Defaults to the configuration's."
    ),
    dt: float | None = typer.Option(
        None, "--dt", help="Time step. Defaults to the configuration's."
    ),
    euler: bool = typer.Option(False, "--euler", help="Use forward Euler instead of RK4."),
) -> None:
    """Integrates the ODE of the spatial means from the configured initial data."""
    manager = resolve_manager(ctx)
    config = load_config_or_exit(manager, config_file)
    res = manager.mean_ode(
        config, t_final, dt=dt, scheme="euler" if euler else "rk4"
    )
    if res.trajectory is not None:
        console.print(_trajectory_table(res.trajectory))
    handle_result(is_success=res.is_success, message=res.message, exit_code=res.exit_code)


@main_app.command(name="continuation")
def command_continuation(
    ctx: typer.Context,
    config_file: Path = typer.Argument(..., help="YAML or JSON configuration file."),
    eps: str = typer.Option(
        "0.1,0.05,0.025,0.0125", "--eps", help="Comma-separated, strictly decreasing epsilon values."
    ),
    workers: int | None = typer.Option(None, "--workers", "-w", help="Worker processes."),
) -> None:
    """Solves the scenario for a decreasing sequence of epsilon."""
    manager = resolve_manager(ctx)
    config = load_config_or_exit(manager, config_file)
    try:
        eps_list = [float(item) for item in eps.split(",") if item.strip()]
    except ValueError:
        handle_result(is_success=False, message=f"Cannot parse --eps '{eps}'.", exit_code=2)
        return
    res = manager.continuation(config, eps_list, max_workers=workers)
    if res.table is not None:
        console.print(_continuation_table(res.table))
    handle_result(is_success=res.is_success, message=res.message, exit_code=res.exit_code)


@main_app.command(name="template")
def command_template(
    ctx: typer.Context,
    path: Path = typer.Argument(Path("config.yaml"), help="Destination of the template."),
    force: bool = typer.Option(False, "--force", "-f", help="Overwrite an existing file."),
) -> None:
    """Writes the default configuration with every field documented."""
    manager = resolve_manager(ctx)
    if path.exists() and not force:
        handle_result(
            is_success=False,
            message=f"{path} already exists. Use --force to overwrite it.",
            exit_code=2,
        )
    res = manager.write_config(path)
    handle_result(is_success=res.is_success, message=res.message, exit_code=res.exit_code)


if __name__ == "__main__":
    main_app()
