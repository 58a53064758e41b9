from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field


class Grid2D(BaseModel):
    """Uniform cell-centered mesh on the rectangle [0, lx] x [0, ly].

    Index (i, j) refers to the cell centered at ((i + 1/2) hx, (j + 1/2) hy).
    Arrays on this grid have shape (nx, ny).
    """

    # model configuration
    model_config = ConfigDict(extra="forbid", frozen=True)

    # fields
    nx: Annotated[int, Field(ge=4, description="Number of cells in x.")] = 64
    ny: Annotated[int, Field(ge=4, description="Number of cells in y.")] = 64
    lx: Annotated[float, Field(gt=0.0, description="Domain length in x.")] = 1.0
    ly: Annotated[float, Field(gt=0.0, description="Domain length in y.")] = 1.0

    @property
    def hx(self) -> float:
        return self.lx / self.nx

    @property
    def hy(self) -> float:
        return self.ly / self.ny

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @property
    def min_spacing(self) -> float:
        return min(self.hx, self.hy)


class NeumannZero(BaseModel):
    """Homogeneous Neumann condition: mirror ghost cells."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["neumann"] = "neumann"


class DirichletConst(BaseModel):
    """Constant Dirichlet data imposed at the boundary faces."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["dirichlet"] = "dirichlet"
    value: Annotated[float, Field(description="Boundary value.")] = 0.0


BoundaryCondition = Annotated[NeumannZero | DirichletConst, Field(discriminator="kind")]
