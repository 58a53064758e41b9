from pathlib import Path
from typing import Literal

from tumor_phasefield.api import analysis as api_analysis
from tumor_phasefield.api import config as api_config
from tumor_phasefield.api import simulation as api_simulation
from tumor_phasefield.api.common import failure
from tumor_phasefield.schemas import requests as req_schemas
from tumor_phasefield.schemas import responses as res_schemas
from tumor_phasefield.schemas.config import SimConfig
from tumor_phasefield.schemas.contexts import RunContext


class SimulationManager:
    """The main API for configuring and running tumor simulations.

    This class builds requests and delegates the work to the API functions,
    which never raise: failures come back as responses carrying an exit code.
    """

    def __init__(self, ctx: RunContext | None = None) -> None:
        """Initializes the manager with a run context."""
        self.ctx: RunContext = ctx if ctx is not None else RunContext()

    def load_config(self, path: Path) -> res_schemas.ResponseLoadConfig:
        """Loads and validates a YAML or JSON configuration file.

        Args:
            path: Path to the configuration file.

        Returns:
            A `ResponseLoadConfig` instance.
        """
        req = req_schemas.RequestLoadConfig(path=path)
        return api_config.load_config(request=req, context=self.ctx)

    def write_config(
        self, path: Path, config: SimConfig | None = None
    ) -> res_schemas.ResponseWriteConfig:
        """Writes a configuration file. `None` writes the defaults as a commented template."""
        req = req_schemas.RequestWriteConfig(config=config or SimConfig(), path=path)
        return api_config.save_config(request=req, context=self.ctx)

    def simulate(self, config: SimConfig, run_name: str = "run") -> res_schemas.ResponseSimulate:
        """Runs a simulation and writes its diagnostics, snapshots and manifest.

        Args:
            config: The simulation configuration.
            run_name: Name of the run directory under `ctx.base_dir`. Defaults to 'run'.

        Returns:
            A `ResponseSimulate` instance holding the manifest on success.
        """
        try:
            req = req_schemas.RequestSimulate(config=config, run_name=run_name)
        except ValueError as e:
            return failure(res_schemas.ResponseSimulate, e)
        return api_simulation.simulate(request=req, context=self.ctx)

    def check_region(
        self, config: SimConfig, n_boundary_samples: int = 720
    ) -> res_schemas.ResponseCheckRegion:
        """Runs the inward-pointing check of the configured source on the configured region."""
        try:
            req = req_schemas.RequestCheckRegion(
                config=config, n_boundary_samples=n_boundary_samples
            )
        except ValueError as e:
            return failure(res_schemas.ResponseCheckRegion, e)
        return api_analysis.check_region(request=req, context=self.ctx)

    def mean_ode(
        self,
        config: SimConfig,
        t_final: float | None = None,
        *,
        dt: float | None = None,
        scheme: Literal["rk4", "euler"] = "rk4",
        sigma_mean: tuple[float, float] | None = None,
        record_every: int = 1,
    ) -> res_schemas.ResponseMeanOde:
        """Integrates the mean ODE from the means of the configured initial data.

        Args:
            config: The simulation configuration.
            t_final: Final time. `None` uses `config.t_final`.
            dt: Time step. `None` uses `config.dt`.
            scheme: 'rk4' or 'euler'. Defaults to 'rk4'.
            sigma_mean: Constant mean of Sigma. `None` uses the nominal value of the source.
            record_every: Steps between recorded states. Defaults to 1.

        Returns:
            A `ResponseMeanOde` instance holding the trajectory on success.
        """
        try:
            req = req_schemas.RequestMeanOde(
                config=config,
                t_final=t_final,
                dt=dt,
                scheme=scheme,
                sigma_mean=sigma_mean,
                record_every=record_every,
            )
        except ValueError as e:
            return failure(res_schemas.ResponseMeanOde, e)
        return api_analysis.mean_ode(request=req, context=self.ctx)

    def continuation(
        self, config: SimConfig, eps_list: list[float], max_workers: int | None = None
    ) -> res_schemas.ResponseContinuation:
        """Solves the scenario for each epsilon and tabulates consecutive distances."""
        try:
            req = req_schemas.RequestContinuation(
                config=config, eps_list=eps_list, max_workers=max_workers
            )
        except ValueError as e:
            return failure(res_schemas.ResponseContinuation, e)
        return api_simulation.continuation(request=req, context=self.ctx)
