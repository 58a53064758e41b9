import numpy as np
import pytest
from pydantic import ValidationError

from tumor_phasefield.core.grid import (
    ScalarField,
    VectorField,
    cell_centers,
    div_flux,
    div_values,
    face_coefficients,
    face_inner,
    face_inner_values,
    grad_faces,
    grad_faces_values,
    integral,
    laplacian,
    laplacian_values,
    mean,
    zero_normal,
)
from tumor_phasefield.schemas.grid import DirichletConst, Grid2D, NeumannZero

DIRICHLET_ZERO = DirichletConst(value=0.0)


def _sine_error(n: int) -> float:
    grid = Grid2D(nx=n, ny=n)
    x, y = cell_centers(grid)
    f = np.sin(np.pi * x) * np.sin(np.pi * y)
    return float(np.max(np.abs(laplacian_values(f, grid, DIRICHLET_ZERO) + 2.0 * np.pi**2 * f)))


class TestLaplacian:
    def test_constant_field_with_neumann_condition(self, small_grid):
        # Act
        result = laplacian(ScalarField.constant(small_grid, 0.7))

        # Assert
        np.testing.assert_allclose(result.values, 0.0, atol=1e-12)
        assert result.bc is None

    def test_quadratic_is_exact_in_the_interior(self, small_grid):
        # Arrange
        x, y = cell_centers(small_grid)

        # Act
        values = laplacian_values(x**2 + y**2, small_grid, NeumannZero())

        # Assert
        np.testing.assert_allclose(values[1:-1, 1:-1], 4.0, rtol=1e-9)

    def test_dirichlet_data_enters_through_the_ghost_cells(self, small_grid):
        # Arrange
        h2 = small_grid.hx**2

        # Act
        values = laplacian_values(np.zeros(small_grid.shape), small_grid, DirichletConst(value=1.0))

        # Assert
        np.testing.assert_allclose(values[1:-1, 1:-1], 0.0)
        np.testing.assert_allclose(values[0, 1:-1], 2.0 / h2)
        np.testing.assert_allclose(values[1:-1, -1], 2.0 / h2)
        np.testing.assert_allclose(values[0, 0], 4.0 / h2)

    @pytest.mark.parametrize("bc", [NeumannZero(), DIRICHLET_ZERO])
    def test_operator_is_symmetric(self, rng, bc):
        # Arrange
        grid = Grid2D(nx=12, ny=20, lx=1.0, ly=2.0)
        u = rng.normal(size=grid.shape)
        v = rng.normal(size=grid.shape)

        # Act
        lu_v = np.sum(laplacian_values(u, grid, bc) * v)
        u_lv = np.sum(u * laplacian_values(v, grid, bc))

        # Assert
        assert lu_v == pytest.approx(u_lv, rel=1e-10)

    def test_second_order_consistency(self):
        # Act
        coarse, fine, finer = _sine_error(16), _sine_error(32), _sine_error(64)

        # Assert
        assert 3.5 <= coarse / fine <= 4.5
        assert 3.5 <= fine / finer <= 4.5

    def test_field_without_boundary_condition_is_rejected(self, small_grid):
        with pytest.raises(ValueError):
            laplacian(ScalarField.constant(small_grid, 1.0, bc=None))


class TestGradient:
    def test_constant_field_has_zero_gradient(self, small_grid):
        # Act
        g = grad_faces(ScalarField.constant(small_grid, 3.0))

        # Assert
        assert g.max_abs() == 0.0

    def test_linear_field(self, small_grid):
        # Arrange
        x, _ = cell_centers(small_grid)

        # Act
        g = grad_faces(ScalarField(grid=small_grid, values=x))

        # Assert
        np.testing.assert_allclose(g.fx[1:-1, :], 1.0)
        np.testing.assert_allclose(g.fy, 0.0, atol=1e-12)

    def test_neumann_boundary_faces_carry_no_normal_component(self, rng, small_grid):
        # Act
        gx, gy = grad_faces_values(rng.normal(size=small_grid.shape), small_grid, NeumannZero())

        # Assert
        assert np.all(gx[[0, -1], :] == 0.0)
        assert np.all(gy[:, [0, -1]] == 0.0)


class TestDivergence:
    def test_unit_coefficient_reproduces_the_laplacian(self, rng, small_grid):
        # Arrange
        f = ScalarField(grid=small_grid, values=rng.normal(size=small_grid.shape))
        ones = face_coefficients(np.ones(small_grid.shape))

        # Act
        result = div_flux(ones, grad_faces(f))

        # Assert
        np.testing.assert_allclose(result.values, laplacian(f).values, rtol=1e-12, atol=1e-9)

    def test_flux_without_normal_component_is_conservative(self, rng, small_grid):
        # Arrange
        nx, ny = small_grid.shape
        fx, fy = zero_normal(rng.normal(size=(nx + 1, ny)), rng.normal(size=(nx, ny + 1)))

        # Act
        total = np.sum(div_values(fx, fy, small_grid)) * small_grid.cell_area

        # Assert
        assert total == pytest.approx(0.0, abs=1e-12)

    def test_summation_by_parts_with_dirichlet_test_functions(self, rng):
        # Arrange
        grid = Grid2D(nx=10, ny=14, lx=2.0, ly=1.0)
        fx = rng.normal(size=(11, 14))
        fy = rng.normal(size=(10, 15))
        xi = rng.normal(size=grid.shape)

        # Act
        lhs = np.sum(div_values(fx, fy, grid) * xi) * grid.cell_area
        gx, gy = grad_faces_values(xi, grid, DIRICHLET_ZERO)
        rhs = -face_inner_values(fx, fy, gx, gy, grid)

        # Assert
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)

    def test_face_coefficients_average_neighbours(self):
        # Arrange
        values = np.arange(16.0).reshape(4, 4)

        # Act
        ax, ay = face_coefficients(values)

        # Assert
        assert ax.shape == (5, 4) and ay.shape == (4, 5)
        assert ax[1, 0] == pytest.approx(2.0)
        assert ax[0, 0] == 0.0 and ay[0, -1] == 3.0


class TestReductions:
    def test_mean_and_integral(self):
        # Arrange
        grid = Grid2D(nx=8, ny=4, lx=1.0, ly=0.5)
        x, _ = cell_centers(grid)

        # Assert
        assert mean(ScalarField.constant(grid, 2.5)) == pytest.approx(2.5)
        assert mean(ScalarField(grid=grid, values=x)) == pytest.approx(0.5)
        assert integral(ScalarField.constant(grid, 2.0)) == pytest.approx(1.0)

    def test_mean_is_linear(self, rng, small_grid):
        # Arrange
        u = rng.normal(size=small_grid.shape)
        v = rng.normal(size=small_grid.shape)

        # Act
        combined = mean(ScalarField(grid=small_grid, values=2.0 * u - 3.0 * v))
        parts = 2.0 * mean(ScalarField(grid=small_grid, values=u)) - 3.0 * mean(
            ScalarField(grid=small_grid, values=v)
        )

        # Assert
        assert combined == pytest.approx(parts, abs=1e-12)

    def test_face_inner_uses_half_weights_on_the_boundary(self):
        # Arrange
        grid = Grid2D(nx=4, ny=4)
        field = VectorField(grid=grid, fx=np.ones((5, 4)), fy=np.zeros((4, 5)))

        # Act
        value = face_inner(field, field)

        # Assert
        assert value == pytest.approx((3 + 2 * 0.5) * 4 * grid.cell_area)


class TestFieldModels:
    def test_shape_mismatch_is_rejected(self, small_grid):
        with pytest.raises(ValidationError):
            ScalarField(grid=small_grid, values=np.zeros((4, 4)))

    def test_non_finite_values_are_rejected(self, small_grid):
        # Arrange
        values = np.zeros(small_grid.shape)
        values[3, 3] = np.nan

        # Act & Assert
        with pytest.raises(ValidationError):
            ScalarField(grid=small_grid, values=values)

    def test_vector_field_shapes_are_checked(self, small_grid):
        with pytest.raises(ValidationError):
            VectorField(grid=small_grid, fx=np.zeros((16, 16)), fy=np.zeros((16, 17)))

    def test_grid_geometry(self):
        # Arrange
        grid = Grid2D(nx=10, ny=20, lx=2.0, ly=1.0)

        # Assert
        assert grid.hx == pytest.approx(0.2)
        assert grid.hy == pytest.approx(0.05)
        assert grid.cell_area == pytest.approx(0.01)
        assert grid.min_spacing == pytest.approx(0.05)
        assert grid.size == 200
