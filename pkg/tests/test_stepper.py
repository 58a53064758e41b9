import numpy as np
import pytest

from tumor_phasefield.core.elliptic import DIRICHLET_ZERO
from tumor_phasefield.core.grid import cell_centers, face_inner_values, grad_faces_values
from tumor_phasefield.core.regions import signed_distance
from tumor_phasefield.core.runner import MeanTracker
from tumor_phasefield.core.sources import fixed_point, source_eval_array
from tumor_phasefield.core.stepper import free_energy, initialize, iterate, stable_dt_bound, step
from tumor_phasefield.errors import ConfigurationError, NumericalFailure
from tumor_phasefield.io.fields import write_field_csv
from tumor_phasefield.schemas.config import FromFile, SimConfig, SolverSettings, UniformWithNoise
from tumor_phasefield.schemas.grid import Grid2D
from tumor_phasefield.schemas.potential import SimplexPoint
from tumor_phasefield.schemas.sources import CustomSource, Disk, LinearGrowth, ShrunkenSimplex


def _uniform(config: SimConfig, s: float, r: float) -> SimConfig:
    return config.model_copy(
        update={"initial": UniformWithNoise(base=SimplexPoint(s=s, r=r), amplitude=0.0)}
    )


def _quiet_noise_config(dt: float, t_final: float) -> SimConfig:
    """Sigma = 0 and M = 0 on the default noisy 64 x 64 start."""
    return SimConfig(
        dt=dt,
        t_final=t_final,
        source=CustomSource(),
        region=ShrunkenSimplex(),
        solver=SolverSettings(cg_tol=1e-12),
    )


class TestInitialize:
    def test_bootstraps_the_chemical_potentials(self, small_config):
        # Act
        state, record, verdict = initialize(small_config)

        # Assert
        assert state.step == 0 and state.t == 0.0
        assert verdict.mean_in_region_interior
        assert record.mean_p == pytest.approx(0.3, abs=1e-12)
        assert record.energy == pytest.approx(
            free_energy(state.phi_p.values, state.phi_d.values, small_config.grid, small_config.potential)
        )
        assert 0.0 <= record.min_n <= record.max_n <= 1.0

    def test_means_outside_the_region_are_rejected(self, small_config):
        # Arrange
        config = _uniform(small_config, 0.5, 0.1)

        # Act & Assert
        with pytest.raises(ConfigurationError, match="interior of the admissible region"):
            initialize(config)

    def test_data_outside_the_simplex_are_rejected(self, quiet_config):
        # Arrange
        config = quiet_config.model_copy(
            update={"initial": UniformWithNoise(base=SimplexPoint(s=0.3, r=0.3), amplitude=0.35)}
        )

        # Act & Assert
        with pytest.raises(ConfigurationError, match="at every cell"):
            initialize(config)


    def test_reads_initial_data_from_csv_files(self, tmp_path, quiet_config):
        # Arrange
        x, y = cell_centers(quiet_config.grid)
        path_p = tmp_path / "phi_p.csv"
        path_d = tmp_path / "phi_d.csv"
        write_field_csv(0.3 + 0.05 * np.cos(np.pi * x) * np.cos(np.pi * y), path_p)
        write_field_csv(0.3 + 0.05 * np.cos(np.pi * x), path_d)
        config = quiet_config.model_copy(
            update={"initial": FromFile(path_p=path_p, path_d=path_d)}
        )

        # Act
        state, record, verdict = initialize(config)

        # Assert
        assert verdict.pointwise_in_simplex
        assert record.mean_p == pytest.approx(0.3, abs=1e-12)
        assert record.mean_d == pytest.approx(0.3, abs=1e-12)
        # smoothing only damps the cosine modes
        assert 0.25 < record.min_p < record.max_p < 0.35
        assert state.phi_p.values[0, 0] > state.phi_p.values[-1, 0]


class TestStationaryStates:
    def test_center_of_the_simplex_is_an_equilibrium(self, quiet_config):
        # Arrange
        config = _uniform(quiet_config, 1 / 3, 1 / 3)

        # Act
        states = [state for state, _ in iterate(config)]

        # Assert
        assert len(states) == config.n_steps + 1
        final = states[-1]
        np.testing.assert_allclose(final.phi_p.values, 1 / 3, atol=1e-10)
        np.testing.assert_allclose(final.phi_d.values, 1 / 3, atol=1e-10)
        assert final.u.max_abs() <= 1e-10

    def test_uniform_state_stays_uniform(self, quiet_config):
        # Arrange
        config = _uniform(quiet_config, 0.2, 0.5)

        # Act
        *_, (final, record) = iterate(config)

        # Assert
        assert np.ptp(final.phi_p.values) <= 1e-10
        assert np.ptp(final.phi_d.values) <= 1e-10
        assert record.mean_p == pytest.approx(0.2, abs=1e-12)
        assert record.mean_d == pytest.approx(0.5, abs=1e-12)


class TestMeanDynamics:
    def test_means_follow_the_source_exactly(self, small_config):
        # Arrange
        config = small_config.model_copy(update={"t_final": 0.05})
        records = list(iterate(config))
        tracker = MeanTracker(config, records[0][1])

        # Act
        for _, record in records[1:]:
            tracker.update(record)

        # Assert
        assert tracker.max_mean_residual <= 1e-9
        assert tracker.max_deviation <= 1e-10
        assert tracker.worst_signed_distance < 0.0

    def test_velocity_is_compatible_with_the_source(self, rng, small_config):
        # Arrange
        config = small_config.model_copy(update={"t_final": 0.05})
        grid = config.grid
        pairs = list(iterate(config))

        for (previous, _), (current, _) in zip(pairs, pairs[1:]):
            # Act
            s_p, s_d = source_eval_array(
                config.source, current.n.values, previous.phi_p.values, previous.phi_d.values
            )
            for _ in range(20):
                xi = rng.normal(size=grid.shape)
                gx, gy = grad_faces_values(xi, grid, DIRICHLET_ZERO)
                pairing = face_inner_values(current.u.fx, current.u.fy, gx, gy, grid)
                forcing = np.sum((s_p + s_d) * xi) * grid.cell_area

                # Assert
                assert abs(pairing + forcing) <= 1e-6 * np.sqrt(np.sum(xi**2) * grid.cell_area)


class TestEnergy:
    def test_energy_decreases_up_to_the_residual(self):
        # Arrange
        config = _quiet_noise_config(1e-3, 0.05)

        # Act
        records = [record for _, record in iterate(config)]

        # Assert
        for before, after in zip(records, records[1:]):
            assert after.energy <= before.energy + config.dt * after.energy_residual + 1e-12
        assert records[-1].energy < records[0].energy

    @pytest.mark.slow
    def test_residual_is_first_order_in_time(self, record_property):
        # Arrange
        averages = []
        for dt in (4e-3, 2e-3, 1e-3):
            config = _quiet_noise_config(dt, 0.2)

            # Act
            # average over the same window for every dt, after the first coarse step
            residuals = [
                record.energy_residual for _, record in iterate(config) if record.t > 4e-3 + 1e-12
            ]
            averages.append(float(np.mean(residuals)))

        # Assert
        record_property("energy_residuals", averages)
        for coarse, fine in zip(averages, averages[1:]):
            assert 0.4 <= fine / coarse <= 0.6


class TestGuards:
    def test_transport_cfl_guard(self, small_config):
        # Arrange
        config = small_config.model_copy(update={"solver": SolverSettings(cfl_limit=1e-12)})
        state, _, _ = initialize(config)

        # Act & Assert
        with pytest.raises(NumericalFailure, match="transport") as exc_info:
            step(state, config)
        assert exc_info.value.subsystem == "transport"

    def test_substep_cap_is_reported(self, small_config):
        # Arrange
        config = small_config.model_copy(
            update={"solver": SolverSettings(cfl_limit=1e-12, max_substeps=3)}
        )
        state, _, _ = initialize(config)

        # Act & Assert
        with pytest.raises(NumericalFailure, match="after 3 sub-steps"):
            step(state, config)

    def test_noisy_default_start_is_split_into_substeps(self):
        # Arrange
        config = SimConfig(t_final=0.005)
        pairs = iterate(config)
        _, initial = next(pairs)
        tracker = MeanTracker(config, initial)

        # Act
        records = []
        for _, record in pairs:
            tracker.update(record)
            records.append(record)

        # Assert
        assert len(records) == 5
        # the grid-scale noise drives a fast Korteweg flow that one implicit solve removes
        assert records[0].substeps > 1
        assert records[-1].substeps == 1
        assert tracker.max_mean_residual <= 1e-9
        assert tracker.max_deviation <= 1e-10

    def test_substeps_keep_the_velocity_compatible(self, rng, small_config):
        # Arrange
        grid = small_config.grid
        state, _, _ = initialize(small_config)
        _, plain = step(state, small_config)
        cfl = plain.max_velocity * small_config.dt / grid.min_spacing
        config = small_config.model_copy(
            update={"solver": SolverSettings(cfl_limit=cfl / 4.0, max_substeps=1000)}
        )

        # Act
        current, record = step(state, config)

        # Assert
        assert record.substeps > 1
        s_p, s_d = source_eval_array(
            config.source, current.n.values, state.phi_p.values, state.phi_d.values
        )
        for _ in range(20):
            xi = rng.normal(size=grid.shape)
            gx, gy = grad_faces_values(xi, grid, DIRICHLET_ZERO)
            pairing = face_inner_values(current.u.fx, current.u.fy, gx, gy, grid)
            forcing = np.sum((s_p + s_d) * xi) * grid.cell_area
            assert abs(pairing + forcing) <= 1e-6 * np.sqrt(np.sum(xi**2) * grid.cell_area)
        assert record.mean_residual_p <= 1e-9
        assert record.mean_residual_d <= 1e-9

    def test_stable_step_bound(self, small_config):
        # Assert
        assert stable_dt_bound(small_config) == pytest.approx(8.0 / 13.0**2)
        assert stable_dt_bound(small_config.with_epsilon(0.05)) < stable_dt_bound(small_config)


@pytest.mark.slow
class TestLongRuns:
    def test_default_scenario(self):
        # Arrange
        config = SimConfig(t_final=2.0)
        pairs = iterate(config)
        _, initial = next(pairs)
        tracker = MeanTracker(config, initial)
        record = initial

        # Act
        for _, record in pairs:
            tracker.update(record)
            assert 0.0 <= record.min_n <= record.max_n <= 1.0 + 1e-10

        # Assert
        assert record.step == 2000
        assert tracker.max_mean_residual <= 1e-9
        assert tracker.max_deviation <= 1e-6
        assert tracker.worst_signed_distance <= 1e-8

    def test_means_stay_near_the_fixed_point_once_they_reach_it(self):
        # Arrange
        config = SimConfig(grid=Grid2D(nx=16, ny=16), dt=0.01, t_final=20.0)
        assert isinstance(config.source, LinearGrowth)

        # Act
        records = [record for _, record in iterate(config)]
        g_mean = records[-1].sigma_mean_p / config.source.lambda_M
        y_star = fixed_point(config.source, g_mean)
        region = Disk(center=SimplexPoint(s=float(y_star[0]), r=float(y_star[1])), radius=0.05)
        distance = signed_distance(
            region, np.array([r.mean_p for r in records]), np.array([r.mean_d for r in records])
        )

        # Assert
        inside = np.flatnonzero(distance < 0.0)
        assert inside.size > 0
        assert np.all(distance[inside[0] :] <= 1e-8)
