"""Cell-centered finite differences on a uniform rectangle.

Ghost cells encode the boundary condition: the mirror ghost (value of the
edge cell) for homogeneous Neumann, and the linear reflection 2c - edge for a
Dirichlet value c imposed at the boundary face. Face fields store
x-components with shape (nx + 1, ny) and y-components with shape (nx, ny + 1);
the first and last slices along the normal direction are the boundary faces.
"""

from typing import Annotated

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from tumor_phasefield.schemas.grid import BoundaryCondition, DirichletConst, Grid2D, NeumannZero

FloatArray = NDArray[np.float64]


class ScalarField(BaseModel):
    """Cell values on a grid with an optional boundary tag."""

    # model configuration
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    # fields
    grid: Annotated[Grid2D, Field(description="The mesh the values live on.")]
    values: Annotated[np.ndarray, Field(description="Cell values of shape (nx, ny).")]
    bc: Annotated[
        BoundaryCondition | None,
        Field(description="Boundary condition used for ghost cells. None for derived fields."),
    ] = NeumannZero()

    @model_validator(mode="after")
    def validate_values(self) -> "ScalarField":
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values have shape {self.values.shape}, grid expects {self.grid.shape}."
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("ScalarField values must be finite.")
        return self

    @classmethod
    def constant(
        cls, grid: Grid2D, value: float, bc: BoundaryCondition | None = NeumannZero()
    ) -> "ScalarField":
        return cls(grid=grid, values=np.full(grid.shape, float(value)), bc=bc)

    def with_values(self, values: FloatArray) -> "ScalarField":
        return ScalarField(grid=self.grid, values=values, bc=self.bc)


class VectorField(BaseModel):
    """Face-centered vector field."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: Grid2D
    fx: Annotated[np.ndarray, Field(description="x-components on x-faces, shape (nx + 1, ny).")]
    fy: Annotated[np.ndarray, Field(description="y-components on y-faces, shape (nx, ny + 1).")]

    @model_validator(mode="after")
    def validate_shapes(self) -> "VectorField":
        nx, ny = self.grid.shape
        if self.fx.shape != (nx + 1, ny) or self.fy.shape != (nx, ny + 1):
            raise ValueError(
                f"face shapes {self.fx.shape}, {self.fy.shape} do not match grid {self.grid.shape}."
            )
        return self

    @classmethod
    def zeros(cls, grid: Grid2D) -> "VectorField":
        nx, ny = grid.shape
        return cls(grid=grid, fx=np.zeros((nx + 1, ny)), fy=np.zeros((nx, ny + 1)))

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.fx)), np.max(np.abs(self.fy))))


# array kernels


def ghost_pad(values: FloatArray, bc: BoundaryCondition) -> FloatArray:
    """Pads with one layer of ghost cells. Corner ghosts are never read."""
    padded = np.pad(values, 1, mode="edge")
    if isinstance(bc, DirichletConst):
        c2 = 2.0 * bc.value
        padded[0, 1:-1] = c2 - values[0, :]
        padded[-1, 1:-1] = c2 - values[-1, :]
        padded[1:-1, 0] = c2 - values[:, 0]
        padded[1:-1, -1] = c2 - values[:, -1]
    return padded


def grad_faces_values(
    values: FloatArray, grid: Grid2D, bc: BoundaryCondition
) -> tuple[FloatArray, FloatArray]:
    padded = ghost_pad(values, bc)
    gx = (padded[1:, 1:-1] - padded[:-1, 1:-1]) / grid.hx
    gy = (padded[1:-1, 1:] - padded[1:-1, :-1]) / grid.hy
    return gx, gy


def div_values(fx: FloatArray, fy: FloatArray, grid: Grid2D) -> FloatArray:
    return (fx[1:, :] - fx[:-1, :]) / grid.hx + (fy[:, 1:] - fy[:, :-1]) / grid.hy


def laplacian_values(values: FloatArray, grid: Grid2D, bc: BoundaryCondition) -> FloatArray:
    gx, gy = grad_faces_values(values, grid, bc)
    return div_values(gx, gy, grid)


def face_coefficients(values: FloatArray) -> tuple[FloatArray, FloatArray]:
    """Arithmetic face averages; boundary faces take the adjacent cell value."""
    padded = np.pad(values, 1, mode="edge")
    ax = 0.5 * (padded[1:, 1:-1] + padded[:-1, 1:-1])
    ay = 0.5 * (padded[1:-1, 1:] + padded[1:-1, :-1])
    return ax, ay


def zero_normal(fx: FloatArray, fy: FloatArray) -> tuple[FloatArray, FloatArray]:
    """Copies of the face components with the boundary normal components set to zero."""
    gx = fx.copy()
    gy = fy.copy()
    gx[0, :] = 0.0
    gx[-1, :] = 0.0
    gy[:, 0] = 0.0
    gy[:, -1] = 0.0
    return gx, gy


def _face_weights(n: int) -> FloatArray:
    w = np.ones(n + 1)
    w[0] = w[-1] = 0.5
    return w


def face_inner_values(
    ax: FloatArray, ay: FloatArray, bx: FloatArray, by: FloatArray, grid: Grid2D
) -> float:
    """Discrete L2 inner product of face fields with half weights on boundary faces.

    With this weighting the summation-by-parts identity
    sum(div(F) * xi) * hx * hy = -<F, grad xi> holds exactly for every face
    field F when xi has zero Dirichlet ghosts.
    """
    wx = _face_weights(grid.nx)[:, None]
    wy = _face_weights(grid.ny)[None, :]
    total = np.sum(wx * ax * bx) + np.sum(wy * ay * by)
    return float(total * grid.cell_area)


# field operations


def laplacian(f: ScalarField) -> ScalarField:
    if f.bc is None:
        raise ValueError("The Laplacian needs a boundary condition for ghost cells.")
    return ScalarField(grid=f.grid, values=laplacian_values(f.values, f.grid, f.bc), bc=None)


def grad_faces(f: ScalarField) -> VectorField:
    if f.bc is None:
        raise ValueError("Face gradients need a boundary condition for ghost cells.")
    gx, gy = grad_faces_values(f.values, f.grid, f.bc)
    return VectorField(grid=f.grid, fx=gx, fy=gy)


def div_flux(coefficient: tuple[FloatArray, FloatArray], g: VectorField) -> ScalarField:
    """Conservative divergence of a * g with face coefficients `a`."""
    ax, ay = coefficient
    values = div_values(ax * g.fx, ay * g.fy, g.grid)
    return ScalarField(grid=g.grid, values=values, bc=None)


def mean(f: ScalarField) -> float:
    return float(np.mean(f.values))


def integral(f: ScalarField) -> float:
    return float(np.sum(f.values) * f.grid.cell_area)


def inner(f: ScalarField, g: ScalarField) -> float:
    return float(np.sum(f.values * g.values) * f.grid.cell_area)


def face_inner(a: VectorField, b: VectorField) -> float:
    return face_inner_values(a.fx, a.fy, b.fx, b.fy, a.grid)


def face_norm(a: VectorField) -> float:
    return float(np.sqrt(face_inner(a, a)))


def cell_centers(grid: Grid2D) -> tuple[FloatArray, FloatArray]:
    x = (np.arange(grid.nx) + 0.5) * grid.hx
    y = (np.arange(grid.ny) + 0.5) * grid.hy
    return np.meshgrid(x, y, indexing="ij")
