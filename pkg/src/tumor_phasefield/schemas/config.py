from pathlib import Path
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from tumor_phasefield.schemas.grid import Grid2D
from tumor_phasefield.schemas.potential import PotentialSpec, SimplexPoint
from tumor_phasefield.schemas.sources import (
    AdmissibleRegion,
    Disk,
    LinearGrowth,
    SourceModel,
)

Pair = tuple[float, float]


# solvers
class SolverSettings(BaseModel):
    """Tolerances and preconditioners of the linear solves."""

    # model configuration
    model_config = ConfigDict(extra="forbid", frozen=True)

    # fields
    cg_tol: Annotated[
        float, Field(gt=0.0, lt=1.0, description="Relative residual tolerance of every CG solve.")
    ] = 1e-10
    max_iter: Annotated[
        int | None,
        Field(ge=1, description="CG iteration cap. Null means 10 * nx * ny."),
    ] = None
    cahn_hilliard_preconditioner: Annotated[
        Literal["spectral", "jacobi", "none"],
        Field(description="Preconditioner of the implicit Cahn-Hilliard operator."),
    ] = "spectral"
    pressure_preconditioner: Annotated[
        Literal["spectral", "none"],
        Field(description="Preconditioner of the pressure Laplacian."),
    ] = "spectral"
    nutrient_preconditioner: Annotated[
        Literal["jacobi", "none"],
        Field(description="Preconditioner of the nutrient operator."),
    ] = "jacobi"
    smoothing_preconditioner: Annotated[
        Literal["spectral", "jacobi", "none"],
        Field(description="Preconditioner of the initial-data smoothing operator."),
    ] = "spectral"
    cfl_limit: Annotated[
        float,
        Field(gt=0.0, description="Largest transport CFL number max|u| dt / h of one sub-step."),
    ] = 0.5
    max_substeps: Annotated[
        int,
        Field(
            ge=1,
            description="Sub-steps a time step may be split into to meet the CFL limit. "
            "The step aborts when more are needed.",
        ),
    ] = 64

    def iteration_cap(self, grid: Grid2D) -> int:
        return self.max_iter if self.max_iter is not None else 10 * grid.size


# initial data
class UniformWithNoise(BaseModel):
    """Constant state plus uniform noise shifted to zero mean."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["uniform_with_noise"] = "uniform_with_noise"
    base: Annotated[SimplexPoint, Field(description="Mean values of (phi_p, phi_d).")] = (
        SimplexPoint(s=0.3, r=0.3)
    )
    amplitude: Annotated[
        float, Field(ge=0.0, description="Noise drawn uniformly from [-amplitude, amplitude].")
    ] = 1e-3


class TwoBlobs(BaseModel):
    """Two disks of prescribed composition on a constant background."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["two_blobs"] = "two_blobs"
    background: Annotated[SimplexPoint, Field(description="Composition outside the blobs.")] = (
        SimplexPoint(s=0.25, r=0.25)
    )
    centers: Annotated[
        tuple[Pair, Pair], Field(description="Blob centers in physical coordinates.")
    ] = ((0.35, 0.5), (0.65, 0.5))
    radii: Annotated[
        tuple[float, float], Field(description="Blob radii.")
    ] = (0.12, 0.12)
    values: Annotated[
        tuple[SimplexPoint, SimplexPoint], Field(description="Composition inside each blob.")
    ] = (SimplexPoint(s=0.5, r=0.2), SimplexPoint(s=0.2, r=0.5))
    interface_width: Annotated[
        float,
        Field(ge=0.0, description="Width of the tanh transition. Zero gives sharp disks."),
    ] = 0.02

    @model_validator(mode="after")
    def validate_radii(self) -> "TwoBlobs":
        if any(r <= 0.0 for r in self.radii):
            raise ValueError(f"blob radii must be positive, got {self.radii}.")
        return self


class FromFile(BaseModel):
    """Fields read from CSV files with ny rows of nx values each."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["from_file"] = "from_file"
    path_p: Annotated[Path, Field(description="CSV file with phi_p.")]
    path_d: Annotated[Path, Field(description="CSV file with phi_d.")]


InitialSpec = Annotated[
    UniformWithNoise | TwoBlobs | FromFile, Field(discriminator="kind")
]


# simulation
class SimConfig(BaseModel):
    """Complete description of one simulation."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    grid: Annotated[Grid2D, Field(description="Mesh of the unit-scale rectangle.")] = Grid2D()
    dt: Annotated[float, Field(gt=0.0, description="Time step.")] = 1e-3
    t_final: Annotated[float, Field(ge=0.0, description="Final time.")] = 0.2
    output_every: Annotated[
        int, Field(ge=1, description="Steps between field snapshots.")
    ] = 50
    seed: Annotated[int, Field(ge=0, description="Seed of the initial-data noise (PCG64).")] = 0
    potential: Annotated[
        PotentialSpec, Field(description="Regularization parameter and interfacial coefficient.")
    ] = PotentialSpec()
    mobility_p: Annotated[float, Field(gt=0.0, description="Mobility of the proliferating phase.")] = 1.0
    mobility_d: Annotated[float, Field(gt=0.0, description="Mobility of the necrotic phase.")] = 1.0
    source: Annotated[SourceModel, Field(description="Source model, selected by `kind`.")] = (
        LinearGrowth(g_mean=1.0)
    )
    region: Annotated[
        AdmissibleRegion, Field(description="Admissible region of the spatial means.")
    ] = Disk(center=SimplexPoint(s=0.2, r=0.2), radius=0.15)
    initial: Annotated[InitialSpec, Field(description="Initial data, selected by `kind`.")] = (
        UniformWithNoise()
    )
    smoothing_delta: Annotated[
        float | None,
        Field(ge=0.0, description="Helmholtz smoothing of the initial data. Null means hx * hy."),
    ] = None
    solver: Annotated[SolverSettings, Field(description="Linear solver settings.")] = (
        SolverSettings()
    )

    @property
    def epsilon(self) -> float:
        return self.potential.epsilon

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    @property
    def effective_smoothing_delta(self) -> float:
        if self.smoothing_delta is not None:
            return self.smoothing_delta
        return self.grid.cell_area

    def with_epsilon(self, epsilon: float) -> "SimConfig":
        potential = PotentialSpec.model_validate(
            {**self.potential.model_dump(), "epsilon": epsilon}
        )
        return self.model_copy(update={"potential": potential})
