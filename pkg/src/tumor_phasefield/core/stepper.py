"""First-order IMEX time stepping of the regularized tumor system.

Each step solves, in order, the nutrient equation, the Darcy pressure
equation (with the chemical potentials of the previous step), and one
implicit biharmonic system per species:

    (I + dt M_i L^2) phi_i' = phi_i + dt (M_i L psi_i + X_i + S_i),
    mu_i' = -L phi_i' + psi_i,

where L is the Neumann Laplacian, psi_i = grad F_eps + grad F1 evaluated at
the old fields and X_i = -div(T(phi_i) u) is the transport term. A step whose
velocity breaks the transport CFL limit is split into shorter sub-steps.
"""

import logging
from collections.abc import Iterator
from typing import Annotated, Final

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from tumor_phasefield.core.elliptic import (
    NEUMANN,
    cahn_hilliard_operator,
    cg_solve,
    solve_nutrient,
    solve_pressure,
)
from tumor_phasefield.core.grid import (
    ScalarField,
    VectorField,
    div_values,
    face_coefficients,
    face_inner_values,
    grad_faces_values,
    laplacian_values,
    zero_normal,
)
from tumor_phasefield.core.initial import prepare_initial
from tumor_phasefield.core.potential import cutoff_array, local_potential
from tumor_phasefield.core.sources import sigma_eval_array, source_matrix
from tumor_phasefield.errors import NumericalFailure, Subsystem
from tumor_phasefield.schemas.config import SimConfig
from tumor_phasefield.schemas.grid import Grid2D
from tumor_phasefield.schemas.potential import PotentialSpec
from tumor_phasefield.schemas.records import DiagnosticsRecord, InitialDataVerdict, SolveReport

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

CAHN_HILLIARD_SUBSYSTEMS: Final[dict[str, Subsystem]] = {
    "p": "cahn_hilliard_p",
    "d": "cahn_hilliard_d",
}


class SimState(BaseModel):
    """The discrete solution at one time level."""

    # model configuration
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    # fields
    phi_p: ScalarField
    phi_d: ScalarField
    mu_p: ScalarField
    mu_d: ScalarField
    q: Annotated[ScalarField, Field(description="Pressure of the last step.")]
    n: Annotated[ScalarField, Field(description="Nutrient of the last step.")]
    u: Annotated[VectorField, Field(description="Darcy velocity of the last step.")]
    psi_p: Annotated[ScalarField, Field(description="grad F_eps + grad F1, p-component, at phi.")]
    psi_d: Annotated[ScalarField, Field(description="grad F_eps + grad F1, d-component, at phi.")]
    energy: Annotated[float, Field(description="Regularized free energy at phi.")]
    t: float = 0.0
    step: int = 0

    @property
    def grid(self) -> Grid2D:
        return self.phi_p.grid


def gradient_energy(values: FloatArray, grid: Grid2D) -> float:
    gx, gy = grad_faces_values(values, grid, NEUMANN)
    return 0.5 * face_inner_values(gx, gy, gx, gy, grid)


def free_energy(phi_p: FloatArray, phi_d: FloatArray, grid: Grid2D, spec: PotentialSpec) -> float:
    bulk, _, _ = local_potential(phi_p, phi_d, spec)
    return _energy(bulk, phi_p, phi_d, grid)


def _energy(bulk: FloatArray, phi_p: FloatArray, phi_d: FloatArray, grid: Grid2D) -> float:
    return (
        float(np.sum(bulk) * grid.cell_area)
        + gradient_energy(phi_p, grid)
        + gradient_energy(phi_d, grid)
    )


def _grad_norm(values: FloatArray, grid: Grid2D) -> float:
    return float(np.sqrt(2.0 * gradient_energy(values, grid)))


def _field(grid: Grid2D, values: FloatArray, subsystem: str) -> ScalarField:
    if not np.all(np.isfinite(values)):
        raise NumericalFailure("linear_solve", f"non-finite values in {subsystem}.")
    return ScalarField(grid=grid, values=values, bc=NEUMANN)


def _record(
    *,
    state: SimState,
    energy_residual: float,
    mean_residuals: tuple[float, float],
    sigma_means: tuple[float, float],
    reports: dict[str, SolveReport],
    substeps: int = 1,
) -> DiagnosticsRecord:
    phi_p = state.phi_p.values
    phi_d = state.phi_d.values
    total = phi_p + phi_d
    grid = state.grid
    u = state.u
    return DiagnosticsRecord(
        step=state.step,
        t=state.t,
        energy=state.energy,
        mean_p=float(np.mean(phi_p)),
        mean_d=float(np.mean(phi_d)),
        min_p=float(np.min(phi_p)),
        max_p=float(np.max(phi_p)),
        min_d=float(np.min(phi_d)),
        max_d=float(np.max(phi_d)),
        min_sum=float(np.min(total)),
        max_sum=float(np.max(total)),
        min_n=float(np.min(state.n.values)),
        max_n=float(np.max(state.n.values)),
        grad_mu_p_l2=_grad_norm(state.mu_p.values, grid),
        grad_mu_d_l2=_grad_norm(state.mu_d.values, grid),
        u_l2=float(np.sqrt(face_inner_values(u.fx, u.fy, u.fx, u.fy, grid))),
        energy_residual=energy_residual,
        mean_residual_p=mean_residuals[0],
        mean_residual_d=mean_residuals[1],
        cg_iters_total=sum(r.iterations for r in reports.values()),
        sigma_mean_p=sigma_means[0],
        sigma_mean_d=sigma_means[1],
        max_velocity=u.max_abs(),
        substeps=substeps,
        solve_reports=reports,
    )


def _sources(
    cfg: SimConfig, n: FloatArray, phi_p: FloatArray, phi_d: FloatArray
) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    sigma_p, sigma_d = sigma_eval_array(cfg.source, n, phi_p, phi_d)
    m = source_matrix(cfg.source)
    s_p = sigma_p + m[0, 0] * phi_p + m[0, 1] * phi_d
    s_d = sigma_d + m[1, 0] * phi_p + m[1, 1] * phi_d
    return s_p, s_d, sigma_p, sigma_d


def initialize(cfg: SimConfig) -> tuple[SimState, DiagnosticsRecord, InitialDataVerdict]:
    """Builds the step-0 state from the initial-data spec.

    The chemical potentials are bootstrapped as mu_i = psi_i - L phi_i.

    Raises:
        ConfigurationError: If the initial data violate the simplex or mean hypotheses.
        NumericalFailure: If a solve fails.
    """
    grid = cfg.grid
    phi_p_field, phi_d_field, verdict, smoothing_reports = prepare_initial(cfg)
    phi_p = phi_p_field.values
    phi_d = phi_d_field.values

    bulk, psi_p, psi_d = local_potential(phi_p, phi_d, cfg.potential)
    mu_p = psi_p - laplacian_values(phi_p, grid, NEUMANN)
    mu_d = psi_d - laplacian_values(phi_d, grid, NEUMANN)

    n_field, report_n = solve_nutrient(phi_p_field, cfg.solver)
    s_p, s_d, sigma_p, sigma_d = _sources(cfg, n_field.values, phi_p, phi_d)
    mu_p_field = _field(grid, mu_p, "mu_p")
    mu_d_field = _field(grid, mu_d, "mu_d")
    q_field, u, report_q = solve_pressure(
        phi_p_field,
        phi_d_field,
        mu_p_field,
        mu_d_field,
        ScalarField(grid=grid, values=s_p + s_d, bc=None),
        cfg.solver,
    )
    state = SimState(
        phi_p=phi_p_field,
        phi_d=phi_d_field,
        mu_p=mu_p_field,
        mu_d=mu_d_field,
        q=q_field,
        n=n_field,
        u=u,
        psi_p=_field(grid, psi_p, "psi_p"),
        psi_d=_field(grid, psi_d, "psi_d"),
        energy=_energy(bulk, phi_p, phi_d, grid),
    )
    reports = {
        "smoothing_p": smoothing_reports[0],
        "smoothing_d": smoothing_reports[1],
        "nutrient": report_n,
        "pressure": report_q,
    }
    record = _record(
        state=state,
        energy_residual=0.0,
        mean_residuals=(0.0, 0.0),
        sigma_means=(float(np.mean(sigma_p)), float(np.mean(sigma_d))),
        reports=reports,
    )
    return state, record, verdict


def _cahn_hilliard(
    phi: FloatArray,
    psi: FloatArray,
    source: FloatArray,
    mobility: float,
    faces: tuple[FloatArray, FloatArray],
    h: float,
    cfg: SimConfig,
    subsystem: Subsystem,
) -> tuple[FloatArray, FloatArray, SolveReport]:
    """One implicit solve of (I + h M L^2) phi' = phi + h (M L psi + X + S); returns phi', mu', report."""
    grid = cfg.grid
    settings = cfg.solver
    tx, ty = face_coefficients(cutoff_array(phi))
    transport = -div_values(tx * faces[0], ty * faces[1], grid)
    rhs = phi + h * (mobility * laplacian_values(psi, grid, NEUMANN) + transport + source)
    op = cahn_hilliard_operator(grid, h, mobility, settings.cahn_hilliard_preconditioner, subsystem)
    phi_new, report = cg_solve(op, rhs, settings.cg_tol, settings.iteration_cap(grid), x0=phi)
    if not report.converged:
        raise NumericalFailure(
            subsystem,
            f"CG did not converge ({report.iterations} iterations, "
            f"relative residual {report.relative_residual:.3e}).",
        )
    # the operator preserves means, so the exact solution has the mean of rhs
    phi_new = phi_new + (np.mean(rhs) - np.mean(phi_new))
    return phi_new, psi - laplacian_values(phi_new, grid, NEUMANN), report


def _merge(reports: dict[str, SolveReport], name: str, report: SolveReport) -> None:
    previous = reports.get(name)
    if previous is None:
        reports[name] = report
        return
    reports[name] = SolveReport(
        iterations=previous.iterations + report.iterations,
        relative_residual=max(previous.relative_residual, report.relative_residual),
        converged=previous.converged and report.converged,
    )


def step(state: SimState, cfg: SimConfig) -> tuple[SimState, DiagnosticsRecord]:
    """Advances the state by one time step of size cfg.dt.

    The nutrient and the sources are evaluated once, at the start of the
    step. When max|u| dt / h exceeds `cfl_limit`, the pressure solve and the
    Cahn-Hilliard updates are repeated on sub-steps that each meet the limit,
    so the means still move by exactly dt * mean(S). The energy residual
    is taken over the whole step with time-averaged dissipation and work.

    Raises:
        NumericalFailure: If an inner solve fails or the step would need more
            than `max_substeps` sub-steps.
    """
    grid = state.grid
    dt = cfg.dt
    settings = cfg.solver
    phi_p = state.phi_p.values
    phi_d = state.phi_d.values

    # (1) nutrient
    n_field, report_n = solve_nutrient(state.phi_p, settings)

    # (2) sources
    s_p, s_d, sigma_p, sigma_d = _sources(cfg, n_field.values, phi_p, phi_d)
    forcing = ScalarField(grid=grid, values=s_p + s_d, bc=None)

    reports: dict[str, SolveReport] = {"nutrient": report_n}
    current = {"p": phi_p, "d": phi_d}
    mu = {"p": state.mu_p, "d": state.mu_d}
    psi = {"p": state.psi_p.values, "d": state.psi_d.values}
    mobility = {"p": cfg.mobility_p, "d": cfg.mobility_d}
    sources = {"p": s_p, "d": s_d}
    elapsed = 0.0
    exchange = 0.0
    cfl = 0.0
    substeps = 0
    while True:
        remaining = dt - elapsed
        if substeps == settings.max_substeps:
            raise NumericalFailure(
                "transport",
                f"CFL number {cfl:.3g} exceeds {settings.cfl_limit} at step {state.step + 1} "
                f"after {substeps} sub-steps ({remaining:.3g} of dt = {dt:.3g} left).",
            )
        substeps += 1

        # (3)-(4) pressure and velocity with the lagged chemical potentials
        q_field, u, report_q = solve_pressure(
            _field(grid, current["p"], "phi_p"),
            _field(grid, current["d"], "phi_d"),
            mu["p"],
            mu["d"],
            forcing,
            settings,
        )
        _merge(reports, "pressure", report_q)
        speed = u.max_abs()
        h = remaining
        cfl = speed * h / grid.min_spacing
        if cfl > settings.cfl_limit:
            h = settings.cfl_limit * grid.min_spacing / speed
        faces = zero_normal(u.fx, u.fy)

        # (5) implicit Cahn-Hilliard updates
        for name in ("p", "d"):
            subsystem = CAHN_HILLIARD_SUBSYSTEMS[name]
            current[name], mu_new, report = _cahn_hilliard(
                current[name], psi[name], sources[name], mobility[name], faces, h, cfg, subsystem
            )
            mu[name] = _field(grid, mu_new, f"mu_{name}")
            _merge(reports, subsystem, report)
        bulk, psi["p"], psi["d"] = local_potential(current["p"], current["d"], cfg.potential)

        dissipation = (
            cfg.mobility_p * _grad_norm(mu["p"].values, grid) ** 2
            + cfg.mobility_d * _grad_norm(mu["d"].values, grid) ** 2
            + face_inner_values(u.fx, u.fy, u.fx, u.fy, grid)
        )
        work = float(
            np.sum((s_p + s_d) * q_field.values + s_p * mu["p"].values + s_d * mu["d"].values)
            * grid.cell_area
        )
        exchange += h * (dissipation - work)
        if h == remaining:
            break
        elapsed += h

    if substeps > 1:
        logger.debug("step %d split into %d transport sub-steps", state.step + 1, substeps)

    # (6) new state and diagnostics
    energy = _energy(bulk, current["p"], current["d"], grid)
    new_state = SimState(
        phi_p=_field(grid, current["p"], "phi_p"),
        phi_d=_field(grid, current["d"], "phi_d"),
        mu_p=mu["p"],
        mu_d=mu["d"],
        q=q_field,
        n=n_field,
        u=u,
        psi_p=_field(grid, psi["p"], "psi_p"),
        psi_d=_field(grid, psi["d"], "psi_d"),
        energy=energy,
        t=state.t + dt,
        step=state.step + 1,
    )

    mean_residuals = (
        abs(float(np.mean(current["p"]) - np.mean(phi_p) - dt * np.mean(s_p))),
        abs(float(np.mean(current["d"]) - np.mean(phi_d) - dt * np.mean(s_d))),
    )
    energy_residual = abs((energy - state.energy) / dt + exchange / dt)

    record = _record(
        state=new_state,
        energy_residual=energy_residual,
        mean_residuals=mean_residuals,
        sigma_means=(float(np.mean(sigma_p)), float(np.mean(sigma_d))),
        reports=reports,
        substeps=substeps,
    )
    logger.debug(
        "step %d t=%.6g energy=%.10g residual=%.3e",
        new_state.step,
        new_state.t,
        energy,
        energy_residual,
    )
    return new_state, record


def iterate(
    cfg: SimConfig, state: SimState | None = None
) -> Iterator[tuple[SimState, DiagnosticsRecord]]:
    """Yields the initial state and then every step up to cfg.t_final."""
    if state is None:
        state, record, _ = initialize(cfg)
        yield state, record
    for _ in range(cfg.n_steps - state.step):
        state, record = step(state, cfg)
        yield state, record


def stable_dt_bound(cfg: SimConfig) -> float:
    """Largest dt for which the explicit potential term is linearly stable.

    The Hessian of F_eps + F1 is bounded by 1/eps + 3 chi, and the amplification
    factor (1 - dt M k H) / (1 + dt M k^2) stays above -1 for dt <= 8 / (M H^2).
    """
    hessian = 1.0 / cfg.epsilon + 3.0 * cfg.potential.chi
    mobility = max(cfg.mobility_p, cfg.mobility_d)
    return 8.0 / (mobility * hessian**2)
