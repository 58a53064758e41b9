import numpy as np
import pytest

from tumor_phasefield.core.continuation import continuation_study, solve_branch, space_time_distance
from tumor_phasefield.errors import EXIT_CONFIG_ERROR
from tumor_phasefield.manager import SimulationManager
from tumor_phasefield.schemas.config import SimConfig, UniformWithNoise
from tumor_phasefield.schemas.potential import SimplexPoint
from tumor_phasefield.schemas.sources import CustomSource, ShrunkenSimplex


def test_uniform_center_state_does_not_depend_on_epsilon(quiet_config: SimConfig) -> None:
    # Arrange
    config = quiet_config.model_copy(
        update={"initial": UniformWithNoise(base=SimplexPoint(s=1 / 3, r=1 / 3), amplitude=0.0)}
    )

    # Act
    table = continuation_study(config, [0.1, 0.05, 0.025])

    # Assert
    assert [row.epsilon for row in table.rows] == [0.1, 0.05, 0.025]
    assert table.rows[0].distance_to_previous is None
    for row in table.rows[1:]:
        assert row.distance_to_previous == pytest.approx(0.0, abs=1e-10)
    for row in table.rows:
        assert row.overshoot == 0.0
        assert row.max_sum == pytest.approx(2 / 3)


def test_branch_keeps_the_snapshot_history(small_config: SimConfig) -> None:
    # Act
    branch = solve_branch(small_config)

    # Assert
    np.testing.assert_allclose(branch.times, [0.0, 0.005, 0.01])
    assert branch.history_p.shape == (3, *small_config.grid.shape)
    assert branch.min_p <= branch.max_p
    assert branch.feps_grad_max >= branch.feps_grad_mean > 0.0


def test_distance_of_a_branch_to_itself_is_zero(small_config: SimConfig) -> None:
    # Arrange
    branch = solve_branch(small_config)

    # Act & Assert
    assert space_time_distance(branch, branch, small_config.grid.cell_area) == 0.0


@pytest.mark.parametrize("eps_list", [[], [0.05, 0.1], [0.1, 0.1], [1.0, 0.5], [0.1, -0.01]])
def test_invalid_schedules_are_rejected(small_config: SimConfig, eps_list: list[float]) -> None:
    with pytest.raises(ValueError):
        continuation_study(small_config, eps_list)


def test_manager_reports_invalid_schedules(manager: SimulationManager, small_config: SimConfig) -> None:
    # Act
    res = manager.continuation(small_config, [0.05, 0.1])

    # Assert
    assert res.is_success is False
    assert res.exit_code == EXIT_CONFIG_ERROR
    assert res.table is None


def test_worker_processes_give_the_serial_result(small_config: SimConfig) -> None:
    # Arrange
    eps_list = [0.1, 0.05]

    # Act
    serial = continuation_study(small_config, eps_list)
    parallel = continuation_study(small_config, eps_list, max_workers=2)

    # Assert
    assert parallel == serial


@pytest.mark.slow
def test_branches_approach_each_other_as_epsilon_decreases(
    manager: SimulationManager, record_property
) -> None:
    # Arrange
    # Sigma = 0 and M = 0 on the noisy 64 x 64 start
    config = SimConfig(t_final=0.05, output_every=5, source=CustomSource(), region=ShrunkenSimplex())

    # Act
    res = manager.continuation(config, [0.1, 0.05, 0.025, 0.0125])

    # Assert
    assert res.is_success, res.message
    assert res.table is not None
    distances = [row.distance_to_previous for row in res.table.rows[1:] if row.distance_to_previous is not None]
    record_property("distances", distances)
    assert len(distances) == 3
    assert all(b < a for a, b in zip(distances, distances[1:]))
    overshoots = [row.overshoot for row in res.table.rows]
    assert all(b <= a for a, b in zip(overshoots, overshoots[1:]))
