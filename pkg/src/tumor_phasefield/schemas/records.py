from pathlib import Path
from typing import Annotated, Final

from pydantic import BaseModel, ConfigDict, Field

from tumor_phasefield.schemas.sources import InwardVerdict

DIAGNOSTICS_COLUMNS: Final[tuple[str, ...]] = (
    "step",
    "t",
    "energy",
    "mean_p",
    "mean_d",
    "min_p",
    "max_p",
    "min_d",
    "max_d",
    "min_sum",
    "max_sum",
    "min_n",
    "max_n",
    "grad_mu_p_l2",
    "grad_mu_d_l2",
    "u_l2",
    "energy_residual",
    "mean_residual_p",
    "mean_residual_d",
    "cg_iters_total",
)


class SolveReport(BaseModel):
    """Outcome of one conjugate-gradient solve."""

    model_config = ConfigDict(frozen=True)

    iterations: Annotated[int, Field(ge=0, description="CG iterations used.")]
    relative_residual: Annotated[
        float, Field(ge=0.0, description="Final |A x - b| / |b| (0 for b = 0).")
    ]
    converged: Annotated[bool, Field(description="Whether the tolerance was met.")]


class DiagnosticsRecord(BaseModel):
    """Per-step diagnostics. The first fields, in order, form one row of the diagnostics CSV."""

    model_config = ConfigDict(frozen=True)

    step: int
    t: float
    energy: Annotated[float, Field(description="Regularized free energy.")]
    mean_p: float
    mean_d: float
    min_p: float
    max_p: float
    min_d: float
    max_d: float
    min_sum: float
    max_sum: float
    min_n: float
    max_n: float
    grad_mu_p_l2: float
    grad_mu_d_l2: float
    u_l2: float
    energy_residual: Annotated[
        float, Field(description="Discrete residual of the energy identity over the last step.")
    ]
    mean_residual_p: float
    mean_residual_d: float
    cg_iters_total: int

    # not written to the CSV
    sigma_mean_p: Annotated[float, Field(description="Spatial mean of Sigma_p used in the step.")] = 0.0
    sigma_mean_d: Annotated[float, Field(description="Spatial mean of Sigma_d used in the step.")] = 0.0
    max_velocity: float = 0.0
    substeps: Annotated[
        int, Field(ge=1, description="Transport sub-steps the step was split into.")
    ] = 1
    solve_reports: Annotated[
        dict[str, SolveReport], Field(description="Reports keyed by subsystem.")
    ] = Field(default_factory=dict)

    def csv_row(self) -> list[str]:
        """Formats the CSV columns with a round-trip float format."""
        row: list[str] = []
        for name in DIAGNOSTICS_COLUMNS:
            value = getattr(self, name)
            row.append(str(value) if isinstance(value, int) else format(value, ".17g"))
        return row


class InitialDataVerdict(BaseModel):
    pointwise_in_simplex: bool
    mean_p: float
    mean_d: float
    mean_in_region_interior: bool
    signed_distance: Annotated[
        float, Field(description="Signed distance of the initial means to the region boundary.")
    ]


class RunManifest(BaseModel):
    """Record of a finished run, written next to its artifacts."""

    config: Annotated[dict, Field(description="Echo of the validated configuration.")]
    code_version: str
    wall_time_seconds: float
    n_steps: int
    output_files: Annotated[list[Path], Field(description="Files written by the run, relative to the run directory.")]
    inward_verdict: InwardVerdict
    initial_data: InitialDataVerdict
    worst_signed_distance: Annotated[
        float, Field(description="Largest signed distance of the spatial means to the region.")
    ]
    max_mean_ode_deviation: Annotated[
        float, Field(description="Largest deviation between the means and the co-integrated mean ODE.")
    ]
    max_mean_residual: float
    max_energy_residual: float
    final: DiagnosticsRecord


class ContinuationRow(BaseModel):
    epsilon: float
    distance_to_previous: Annotated[
        float | None,
        Field(description="Space-time L2 distance of phi_p to the previous epsilon."),
    ] = None
    ratio: Annotated[
        float | None, Field(description="Ratio of this distance to the previous one.")
    ] = None
    min_p: float
    max_p: float
    min_d: float
    max_d: float
    min_sum: float
    max_sum: float
    overshoot: Annotated[float, Field(description="max(0, -min phi_p) over the run.")]
    feps_grad_mean: Annotated[float, Field(description="Mean |grad F_eps| at the final time.")]
    feps_grad_max: Annotated[float, Field(description="Max |grad F_eps| at the final time.")]


class ContinuationTable(BaseModel):
    rows: list[ContinuationRow]

    @property
    def distances(self) -> list[float]:
        return [row.distance_to_previous for row in self.rows if row.distance_to_previous is not None]

    @property
    def overshoots(self) -> list[float]:
        return [row.overshoot for row in self.rows]
