"""Run orchestration: inward check, stepping to t_final and artifact emission."""

import logging
import time

import numpy as np

from tumor_phasefield import __version__
from tumor_phasefield.core.regions import signed_distance
from tumor_phasefield.core.sources import (
    check_inward,
    describe_inward_failure,
    mean_ode_step,
)
from tumor_phasefield.core.stepper import SimState, initialize, stable_dt_bound, step
from tumor_phasefield.errors import HypothesisViolation
from tumor_phasefield.io.handlers import RunDataIO
from tumor_phasefield.schemas.config import SimConfig
from tumor_phasefield.schemas.records import DiagnosticsRecord, RunManifest
from tumor_phasefield.schemas.sources import MeanState

logger = logging.getLogger(__name__)


class MeanTracker:
    """Co-integrates the mean ODE next to the PDE and records the bookkeeping extremes.

    The ODE is advanced with the forward Euler map and the per-step spatial
    mean of Sigma, which is exactly what the scheme does to the means.
    """

    def __init__(self, cfg: SimConfig, initial: DiagnosticsRecord):
        self.cfg = cfg
        self.ode = MeanState(y_p=initial.mean_p, y_d=initial.mean_d, t=initial.t)
        self.worst_signed_distance = float(
            signed_distance(cfg.region, initial.mean_p, initial.mean_d)
        )
        self.max_deviation = 0.0
        self.max_mean_residual = 0.0
        self.max_energy_residual = 0.0

    def update(self, record: DiagnosticsRecord) -> None:
        self.ode = mean_ode_step(
            self.ode,
            self.cfg.source,
            (record.sigma_mean_p, record.sigma_mean_d),
            self.cfg.dt,
            scheme="euler",
        )
        deviation = max(abs(self.ode.y_p - record.mean_p), abs(self.ode.y_d - record.mean_d))
        self.max_deviation = max(self.max_deviation, deviation)
        self.worst_signed_distance = max(
            self.worst_signed_distance,
            float(signed_distance(self.cfg.region, record.mean_p, record.mean_d)),
        )
        self.max_mean_residual = max(
            self.max_mean_residual, record.mean_residual_p, record.mean_residual_d
        )
        self.max_energy_residual = max(self.max_energy_residual, record.energy_residual)


def snapshot_fields(state: SimState) -> dict[str, np.ndarray]:
    return {
        "phi_p": state.phi_p.values,
        "phi_d": state.phi_d.values,
        "mu_p": state.mu_p.values,
        "mu_d": state.mu_d.values,
        "n": state.n.values,
        "q": state.q.values,
    }


def run(cfg: SimConfig, run_io: RunDataIO) -> RunManifest:
    """Runs one simulation and writes its artifacts through `run_io`.

    Diagnostics are written every step, snapshots at step 0, every
    `output_every` steps and at the final step. The manifest is written last.

    Raises:
        HypothesisViolation: If the source model fails the inward check on the region.
        ConfigurationError: If the region or the initial data are invalid.
        NumericalFailure: If a step fails.
    """
    started = time.perf_counter()
    verdict = check_inward(cfg.source, cfg.region)
    if not verdict.holds:
        raise HypothesisViolation(
            f"Refusing to start: {describe_inward_failure(cfg.source, verdict)}."
        )

    bound = stable_dt_bound(cfg)
    if cfg.dt > bound:
        logger.warning(
            "dt = %.3g exceeds the linear stability bound %.3g of the explicit potential term.",
            cfg.dt,
            bound,
        )

    state, record, initial_verdict = initialize(cfg)
    tracker = MeanTracker(cfg, record)
    n_steps = cfg.n_steps
    logger.info(
        "run '%s' started: %dx%d grid, dt=%.3g, %d steps, epsilon=%.4g",
        run_io.run_name,
        cfg.grid.nx,
        cfg.grid.ny,
        cfg.dt,
        n_steps,
        cfg.epsilon,
    )

    run_io.save_config(cfg)
    with run_io.diagnostics_writer() as writer:
        writer.write(record)
        run_io.save_snapshot(snapshot_fields(state), 0)
        for _ in range(n_steps):
            state, record = step(state, cfg)
            writer.write(record)
            tracker.update(record)
            if state.step % cfg.output_every == 0 or state.step == n_steps:
                run_io.save_snapshot(snapshot_fields(state), state.step)

    manifest_file = run_io.ctx.get_manifest_file(run_io.run_name)
    output_files = [*run_io.written, manifest_file.relative_to(run_io.run_dir)]
    manifest = RunManifest(
        config=cfg.model_dump(mode="json"),
        code_version=__version__,
        wall_time_seconds=time.perf_counter() - started,
        n_steps=n_steps,
        output_files=output_files,
        inward_verdict=verdict,
        initial_data=initial_verdict,
        worst_signed_distance=tracker.worst_signed_distance,
        max_mean_ode_deviation=tracker.max_deviation,
        max_mean_residual=tracker.max_mean_residual,
        max_energy_residual=tracker.max_energy_residual,
        final=record,
    )
    run_io.save_manifest(manifest)
    logger.info(
        "run '%s' finished in %.2f s: final energy %.10g, worst signed distance %.3e",
        run_io.run_name,
        manifest.wall_time_seconds,
        record.energy,
        tracker.worst_signed_distance,
    )
    return manifest
