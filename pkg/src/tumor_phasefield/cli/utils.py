import logging
from pathlib import Path
from typing import Final

import typer
from rich.console import Console
from rich.logging import RichHandler

from tumor_phasefield.errors import EXIT_CONFIG_ERROR, EXIT_SUCCESS
from tumor_phasefield.manager import SimulationManager
from tumor_phasefield.schemas.config import SimConfig

console = Console()

MANAGER_ATTR: Final[str] = "simulation_manager"


def configure_logging(verbose: bool) -> None:
    """Routes library logs through Rich. `verbose` switches INFO to DEBUG."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=True, show_path=verbose)],
        force=True,
    )


def handle_result(
    is_success: bool,
    message: str,
    exit_code: int = EXIT_CONFIG_ERROR,
    terminate_on_error: bool = True,
) -> None:
    """Handles the result message display by the use of `Rich`.

    Args:
        is_success: If the operation completed successfully.
        message: The message to display in console.
        exit_code: The process exit code used on failure. Defaults to 2.
        terminate_on_error: If `True`, the failure operation will be terminated. Defaults to `True`.
    """
    if is_success:
        console.print(f"[green]Success:[/green] {message}")
    else:
        console.print(f"[red]Error:[/red] {message}")
        if terminate_on_error:
            raise typer.Exit(code=exit_code if exit_code != EXIT_SUCCESS else EXIT_CONFIG_ERROR)


def initialize_context(ctx: typer.Context) -> None:
    """Ensures that the Typer context object is initialized."""
    if ctx.obj is None:
        ctx.obj = {}


def resolve_manager(ctx: typer.Context) -> SimulationManager:
    """Resolves the `SimulationManager` instance from the `typer.Context`.

    `ctx.obj` must satisfy one of the following conditions:
    - It is a `SimulationManager` instance.
    - It is a dictionary containing the 'simulation_manager' key mapped to a `SimulationManager` instance.
    - It is an object with a 'simulation_manager' attribute that is a `SimulationManager` instance.

    Raises:
        RuntimeError: If `typer.Context` does not meet any of the conditions above.
    """
    obj = ctx.obj

    if isinstance(obj, SimulationManager):
        return obj

    if isinstance(obj, dict):
        manager = obj.get(MANAGER_ATTR)
        if isinstance(manager, SimulationManager):
            return manager

    manager = getattr(obj, MANAGER_ATTR, None)
    if isinstance(manager, SimulationManager):
        return manager

    raise RuntimeError(
        f"Could not resolve SimulationManager from {type(obj).__name__}. "
        f"Please ensure `ctx.obj` or `ctx.obj.{MANAGER_ATTR}` is a `SimulationManager` instance."
    )


def load_config_or_exit(manager: SimulationManager, path: Path) -> SimConfig:
    """Loads a configuration, terminating with exit code 2 on failure."""
    res = manager.load_config(path)
    if not res.is_success or res.config is None:
        handle_result(is_success=False, message=res.message, exit_code=res.exit_code)
    assert res.config is not None
    return res.config
