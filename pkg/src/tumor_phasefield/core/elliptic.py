"""SPD linear solves: nutrient, Darcy pressure, implicit Cahn-Hilliard and smoothing.

Every operator acts on cell arrays of shape (nx, ny). The constant-coefficient
operators are diagonalized exactly by the orthonormal DCT-II (homogeneous
Neumann ghosts) and DST-II (homogeneous Dirichlet ghosts), which gives the
`spectral` preconditioners.
"""

import logging
from collections.abc import Callable
from functools import lru_cache
from typing import Annotated

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field
from scipy.fft import dctn, dstn, idctn, idstn
from scipy.sparse.linalg import LinearOperator, cg

from tumor_phasefield.core.grid import (
    ScalarField,
    VectorField,
    div_values,
    face_coefficients,
    grad_faces_values,
    laplacian_values,
    zero_normal,
)
from tumor_phasefield.core.potential import cutoff_array
from tumor_phasefield.errors import NumericalFailure, Subsystem
from tumor_phasefield.schemas.config import SolverSettings
from tumor_phasefield.schemas.grid import DirichletConst, Grid2D, NeumannZero
from tumor_phasefield.schemas.records import SolveReport

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
ArrayMap = Callable[[FloatArray], FloatArray]

NEUMANN = NeumannZero()
DIRICHLET_ZERO = DirichletConst(value=0.0)
DIRICHLET_ONE = DirichletConst(value=1.0)


class LinearOperatorSpec(BaseModel):
    """A linear map on cell arrays together with its asserted structure."""

    # model configuration
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    # fields
    subsystem: Annotated[Subsystem, Field(description="Name reported on failure.")]
    shape: Annotated[tuple[int, int], Field(description="Shape of the cell arrays.")]
    apply: Annotated[ArrayMap, Field(description="The action of the operator.")]
    preconditioner: Annotated[
        ArrayMap | None, Field(description="Approximate inverse, or None.")
    ] = None
    symmetric: bool = True
    positive_definite: bool = True


def cg_solve(
    op: LinearOperatorSpec,
    rhs: FloatArray,
    tol: float,
    max_iter: int,
    x0: FloatArray | None = None,
) -> tuple[FloatArray, SolveReport]:
    """Preconditioned conjugate gradients.

    Non-convergence is reported through `SolveReport.converged`; the caller decides
    how to fail.

    Raises:
        NumericalFailure: If the right-hand side or the iterate is not finite.
    """
    shape = op.shape
    size = shape[0] * shape[1]
    b = np.asarray(rhs, dtype=np.float64).reshape(size)
    if not np.all(np.isfinite(b)):
        raise NumericalFailure(op.subsystem, "non-finite right-hand side.")
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return np.zeros(shape), SolveReport(iterations=0, relative_residual=0.0, converged=True)

    def matvec(v: FloatArray) -> FloatArray:
        return op.apply(v.reshape(shape)).reshape(size)

    a_op = LinearOperator((size, size), matvec=matvec, dtype=np.float64)
    m_op = None
    if op.preconditioner is not None:
        precond = op.preconditioner
        m_op = LinearOperator(
            (size, size),
            matvec=lambda v: precond(v.reshape(shape)).reshape(size),
            dtype=np.float64,
        )

    iterations = 0

    def count(_: FloatArray) -> None:
        nonlocal iterations
        iterations += 1

    x = None if x0 is None else np.asarray(x0, dtype=np.float64).reshape(size)
    relative = np.inf
    info = 0
    # one restart from the returned iterate absorbs drift of the recursive residual
    for _ in range(2):
        x, info = cg(a_op, b, x0=x, rtol=tol, atol=0.0, maxiter=max_iter, M=m_op, callback=count)
        if not np.all(np.isfinite(x)):
            raise NumericalFailure(op.subsystem, "CG produced a non-finite iterate.")
        relative = float(np.linalg.norm(b - matvec(x)) / b_norm)
        if relative <= tol or info != 0:
            break

    report = SolveReport(
        iterations=iterations,
        relative_residual=relative,
        converged=bool(info == 0 and relative <= tol),
    )
    logger.debug(
        "%s solve: %d iterations, relative residual %.3e",
        op.subsystem,
        iterations,
        relative,
    )
    return x.reshape(shape), report


def _require(report: SolveReport, subsystem: Subsystem) -> None:
    if not report.converged:
        raise NumericalFailure(
            subsystem,
            f"CG did not converge ({report.iterations} iterations, "
            f"relative residual {report.relative_residual:.3e}).",
        )


# spectra


def _neumann_eigenvalues(n: int, h: float) -> FloatArray:
    k = np.arange(n)
    return -(4.0 / h**2) * np.sin(np.pi * k / (2.0 * n)) ** 2


def _dirichlet_eigenvalues(n: int, h: float) -> FloatArray:
    k = np.arange(n)
    return -(4.0 / h**2) * np.sin(np.pi * (k + 1) / (2.0 * n)) ** 2


@lru_cache(maxsize=32)
def _laplacian_symbol(grid: Grid2D, dirichlet: bool) -> FloatArray:
    eig = _dirichlet_eigenvalues if dirichlet else _neumann_eigenvalues
    return eig(grid.nx, grid.hx)[:, None] + eig(grid.ny, grid.hy)[None, :]


def _neumann_inverse(symbol: FloatArray) -> ArrayMap:
    def solve(v: FloatArray) -> FloatArray:
        return idctn(dctn(v, type=2, norm="ortho") / symbol, type=2, norm="ortho")

    return solve


def _dirichlet_inverse(symbol: FloatArray) -> ArrayMap:
    def solve(v: FloatArray) -> FloatArray:
        return idstn(dstn(v, type=2, norm="ortho") / symbol, type=2, norm="ortho")

    return solve


def _neighbor_counts(grid: Grid2D) -> tuple[FloatArray, FloatArray]:
    """Number of in-domain neighbors of every cell along x and along y."""
    nbx = np.full(grid.nx, 2.0)
    nbx[0] = nbx[-1] = 1.0
    nby = np.full(grid.ny, 2.0)
    nby[0] = nby[-1] = 1.0
    return nbx[:, None] * np.ones(grid.shape), nby[None, :] * np.ones(grid.shape)


def _dirichlet_diagonal(grid: Grid2D) -> FloatArray:
    """Diagonal of -Laplacian with zero Dirichlet ghosts."""
    nbx, nby = _neighbor_counts(grid)
    return (4.0 - nbx) / grid.hx**2 + (4.0 - nby) / grid.hy**2


# operators


@lru_cache(maxsize=32)
def dirichlet_laplacian_operator(grid: Grid2D, preconditioner: str = "spectral") -> LinearOperatorSpec:
    """-Laplacian with homogeneous Dirichlet data."""
    symbol = -_laplacian_symbol(grid, dirichlet=True)
    return LinearOperatorSpec(
        subsystem="pressure",
        shape=grid.shape,
        apply=lambda v: -laplacian_values(v, grid, DIRICHLET_ZERO),
        preconditioner=_dirichlet_inverse(symbol) if preconditioner == "spectral" else None,
    )


@lru_cache(maxsize=32)
def cahn_hilliard_operator(
    grid: Grid2D,
    dt: float,
    mobility: float,
    preconditioner: str = "spectral",
    subsystem: Subsystem = "cahn_hilliard_p",
) -> LinearOperatorSpec:
    """I + dt * mobility * L^2 with L the homogeneous Neumann Laplacian."""
    scale = dt * mobility

    def apply(v: FloatArray) -> FloatArray:
        lap = laplacian_values(v, grid, NEUMANN)
        return v + scale * laplacian_values(lap, grid, NEUMANN)

    precond: ArrayMap | None = None
    if preconditioner == "spectral":
        precond = _neumann_inverse(1.0 + scale * _laplacian_symbol(grid, dirichlet=False) ** 2)
    elif preconditioner == "jacobi":
        nbx, nby = _neighbor_counts(grid)
        l_diag = -(nbx / grid.hx**2 + nby / grid.hy**2)
        diag = 1.0 + scale * (l_diag**2 + nbx / grid.hx**4 + nby / grid.hy**4)
        precond = _diagonal_inverse(diag)
    return LinearOperatorSpec(
        subsystem=subsystem, shape=grid.shape, apply=apply, preconditioner=precond
    )


@lru_cache(maxsize=32)
def smoothing_operator(grid: Grid2D, delta: float, preconditioner: str = "spectral") -> LinearOperatorSpec:
    """I - delta * L with L the homogeneous Neumann Laplacian."""

    def apply(v: FloatArray) -> FloatArray:
        return v - delta * laplacian_values(v, grid, NEUMANN)

    precond: ArrayMap | None = None
    if preconditioner == "spectral":
        precond = _neumann_inverse(1.0 - delta * _laplacian_symbol(grid, dirichlet=False))
    elif preconditioner == "jacobi":
        nbx, nby = _neighbor_counts(grid)
        precond = _diagonal_inverse(1.0 + delta * (nbx / grid.hx**2 + nby / grid.hy**2))
    return LinearOperatorSpec(
        subsystem="smoothing", shape=grid.shape, apply=apply, preconditioner=precond
    )


def _diagonal_inverse(diag: FloatArray) -> ArrayMap:
    inverse = 1.0 / diag
    return lambda v: inverse * v


def nutrient_operator(
    grid: Grid2D, absorption: FloatArray, preconditioner: str = "jacobi"
) -> LinearOperatorSpec:
    """-Laplacian + diag(absorption) with homogeneous Dirichlet data."""

    def apply(v: FloatArray) -> FloatArray:
        return -laplacian_values(v, grid, DIRICHLET_ZERO) + absorption * v

    precond = None
    if preconditioner == "jacobi":
        precond = _diagonal_inverse(_dirichlet_diagonal(grid) + absorption)
    return LinearOperatorSpec(
        subsystem="nutrient", shape=grid.shape, apply=apply, preconditioner=precond
    )


# solves


def solve_nutrient(
    phi_p: ScalarField, settings: SolverSettings = SolverSettings()
) -> tuple[ScalarField, SolveReport]:
    """Solves -Lap n + T(phi_p) n = 0 with n = 1 on the boundary.

    The shifted unknown m = n - 1 has zero boundary data and solves
    (-Lap + T(phi_p)) m = -T(phi_p).

    Raises:
        NumericalFailure: If CG does not converge.
    """
    grid = phi_p.grid
    absorption = cutoff_array(phi_p.values)
    op = nutrient_operator(grid, absorption, settings.nutrient_preconditioner)
    m, report = cg_solve(op, -absorption, settings.cg_tol, settings.iteration_cap(grid))
    _require(report, "nutrient")
    return ScalarField(grid=grid, values=1.0 + m, bc=DIRICHLET_ONE), report


def solve_pressure(
    phi_p: ScalarField,
    phi_d: ScalarField,
    mu_p: ScalarField,
    mu_d: ScalarField,
    s_total: ScalarField,
    settings: SolverSettings = SolverSettings(),
) -> tuple[ScalarField, VectorField, SolveReport]:
    """Solves -Lap q = div(T(phi_p) grad mu_p + T(phi_d) grad mu_d) + S with q = 0 on the boundary.

    The chemical-potential flux has zero normal component on the boundary.

    Returns:
        (q, u, report) with u = -grad q - T(phi_p) grad mu_p - T(phi_d) grad mu_d on faces.

    Raises:
        NumericalFailure: If CG does not converge.
    """
    grid = phi_p.grid
    fx, fy = chemical_flux(phi_p.values, phi_d.values, mu_p.values, mu_d.values, grid)
    rhs = div_values(fx, fy, grid) + s_total.values
    op = dirichlet_laplacian_operator(grid, settings.pressure_preconditioner)
    q, report = cg_solve(op, rhs, settings.cg_tol, settings.iteration_cap(grid))
    _require(report, "pressure")
    gx, gy = grad_faces_values(q, grid, DIRICHLET_ZERO)
    u = VectorField(grid=grid, fx=-gx - fx, fy=-gy - fy)
    return ScalarField(grid=grid, values=q, bc=DIRICHLET_ZERO), u, report


def chemical_flux(
    phi_p: FloatArray,
    phi_d: FloatArray,
    mu_p: FloatArray,
    mu_d: FloatArray,
    grid: Grid2D,
) -> tuple[FloatArray, FloatArray]:
    """T(phi_p) grad mu_p + T(phi_d) grad mu_d on faces, zero normal component on the boundary."""
    tpx, tpy = face_coefficients(cutoff_array(phi_p))
    tdx, tdy = face_coefficients(cutoff_array(phi_d))
    gpx, gpy = zero_normal(*grad_faces_values(mu_p, grid, NEUMANN))
    gdx, gdy = zero_normal(*grad_faces_values(mu_d, grid, NEUMANN))
    return tpx * gpx + tdx * gdx, tpy * gpy + tdy * gdy


def smooth_initial(
    f0: ScalarField, delta: float, settings: SolverSettings = SolverSettings()
) -> tuple[ScalarField, SolveReport]:
    """Solves (I - delta Lap_N) f = f0. The mean is preserved exactly.

    Raises:
        NumericalFailure: If CG does not converge.
    """
    if delta < 0.0:
        raise ValueError(f"delta must be nonnegative, got {delta}.")
    if delta == 0.0:
        return f0.with_values(f0.values.copy()), SolveReport(
            iterations=0, relative_residual=0.0, converged=True
        )
    grid = f0.grid
    op = smoothing_operator(grid, float(delta), settings.smoothing_preconditioner)
    f, report = cg_solve(op, f0.values, settings.cg_tol, settings.iteration_cap(grid))
    _require(report, "smoothing")
    # the exact solution has the mean of f0
    f = f + (np.mean(f0.values) - np.mean(f))
    return ScalarField(grid=grid, values=f, bc=NEUMANN), report
