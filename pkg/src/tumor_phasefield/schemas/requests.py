from pathlib import Path
from typing import Annotated, Literal

from pydantic import BaseModel, Field, field_validator

from tumor_phasefield.schemas.config import SimConfig
from tumor_phasefield.schemas.validators import validate_epsilon_schedule, validate_safe_name


# configuration files
class RequestLoadConfig(BaseModel):
    path: Annotated[Path, Field(description="YAML or JSON configuration file to load.")]


class RequestWriteConfig(BaseModel):
    config: Annotated[SimConfig, Field(description="The configuration to write.")] = SimConfig()
    path: Annotated[Path, Field(description="Destination file. YAML output carries comments.")]


# simulation
class RequestSimulate(BaseModel):
    config: Annotated[SimConfig, Field(description="The validated simulation configuration.")]
    run_name: Annotated[
        str, Field(description="Name of the run directory under the output directory.")
    ] = "run"

    @field_validator("run_name")
    @classmethod
    def validate_name(cls, v: str) -> str:
        return validate_safe_name(v)


class RequestContinuation(BaseModel):
    config: Annotated[SimConfig, Field(description="The scenario solved for every epsilon.")]
    eps_list: Annotated[
        list[float], Field(description="Strictly decreasing epsilon values in (0, 1).")
    ]
    max_workers: Annotated[
        int | None,
        Field(ge=1, description="Worker processes. `None` solves the branches in order."),
    ] = None

    @field_validator("eps_list")
    @classmethod
    def validate_schedule(cls, v: list[float]) -> list[float]:
        return validate_epsilon_schedule(v)


# analysis
class RequestCheckRegion(BaseModel):
    config: Annotated[SimConfig, Field(description="Configuration providing the source and region.")]
    n_boundary_samples: Annotated[
        int, Field(ge=8, description="Number of sampled boundary points.")
    ] = 720


class RequestMeanOde(BaseModel):
    config: Annotated[SimConfig, Field(description="Configuration providing the source, region and initial means.")]
    t_final: Annotated[
        float | None, Field(ge=0.0, description="Final time. `None` uses the configuration's.")
    ] = None
    dt: Annotated[
        float | None, Field(gt=0.0, description="Time step. `None` uses the configuration's.")
    ] = None
    scheme: Annotated[
        Literal["rk4", "euler"], Field(description="One-step method of the mean ODE.")
    ] = "rk4"
    sigma_mean: Annotated[
        tuple[float, float] | None,
        Field(description="Constant mean of Sigma. `None` uses the nominal value of the source."),
    ] = None
    record_every: Annotated[int, Field(ge=1, description="Steps between recorded states.")] = 1
