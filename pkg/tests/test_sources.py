import numpy as np
import pytest
from pydantic import ValidationError

from tumor_phasefield.core.regions import (
    confinement_constants,
    contains,
    contains_interior,
    sample_boundary,
    signed_distance,
    validate_region,
)
from tumor_phasefield.core.sources import (
    check_inward,
    describe_inward_failure,
    equilibrium,
    fixed_point,
    integrate_mean_ode,
    k_bounds,
    mean_ode_step,
    rate_condition_holds,
    sigma_eval,
    sigma_eval_array,
    source_eval,
)
from tumor_phasefield.errors import RegionError
from tumor_phasefield.schemas.potential import SimplexPoint
from tumor_phasefield.schemas.sources import (
    CenteredDecay,
    CustomSource,
    Disk,
    LinearGrowth,
    MeanState,
    ShrunkenSimplex,
)

CENTER = SimplexPoint(s=1 / 3, r=1 / 3)
DECAY_WITH_NOISE = CenteredDecay(rate=3.0, bound=0.1)


class TestSigma:
    def test_linear_growth_examples(self):
        # Arrange
        model = LinearGrowth(lambda_M=0.1, n_c=0.05)

        # Assert
        np.testing.assert_allclose(sigma_eval(model, 1.0, CENTER), [0.1, 0.0])
        np.testing.assert_allclose(sigma_eval(model, 0.0, CENTER), [0.1 * 0.05, 0.0])

    def test_centered_decay_without_perturbation(self):
        np.testing.assert_allclose(sigma_eval(CenteredDecay(rate=3.0), 0.3, CENTER), [1.0, 1.0])

    def test_custom_source_clamps_the_nutrient(self):
        # Arrange
        model = CustomSource(
            sigma_base=(0.0, 0.1), sigma_slope=(0.2, -0.1), k_bounds=(0.0, 0.2, 0.0, 0.1)
        )

        # Assert
        np.testing.assert_allclose(sigma_eval(model, 2.0, CENTER), [0.2, 0.0])
        np.testing.assert_allclose(sigma_eval(model, -1.0, CENTER), [0.0, 0.1])

    def test_custom_source_rejects_sigma_outside_its_bounds(self):
        with pytest.raises(ValidationError):
            CustomSource(sigma_slope=(1.0, 0.0), k_bounds=(0.0, 0.5, 0.0, 0.0))

    @pytest.mark.parametrize(
        "model",
        [
            LinearGrowth(),
            LinearGrowth(lambda_M=0.3, n_c=0.2),
            CenteredDecay(rate=2.0, bound=0.4, gain=5.0, weights=(0.5, -1.0)),
            CustomSource(sigma_base=(0.0, 0.1), sigma_slope=(0.2, -0.1), k_bounds=(0.0, 0.2, 0.0, 0.1)),
        ],
    )
    def test_sigma_stays_in_its_declared_box(self, rng, model):
        # Arrange
        n = rng.uniform(-5.0, 5.0, size=10_000)
        s = rng.uniform(-1.0, 2.0, size=10_000)
        r = rng.uniform(-1.0, 2.0, size=10_000)
        kpm, kpp, kdm, kdp = k_bounds(model)

        # Act
        sp, sd = sigma_eval_array(model, n, s, r)

        # Assert
        assert np.all((sp >= kpm - 1e-12) & (sp <= kpp + 1e-12))
        assert np.all((sd >= kdm - 1e-12) & (sd <= kdp + 1e-12))


class TestSource:
    def test_linear_growth_necrotic_source(self):
        # Act
        source = source_eval(LinearGrowth(lambda_A=0.5, lambda_L=0.5), 0.7, SimplexPoint(s=0.2, r=0.1))

        # Assert
        assert source[1] == pytest.approx(0.05)

    def test_quiet_source_vanishes(self):
        np.testing.assert_array_equal(source_eval(CustomSource(), 0.5, SimplexPoint(s=0.0, r=0.0)), [0.0, 0.0])

    def test_center_is_a_fixed_point_of_centered_decay(self):
        np.testing.assert_allclose(source_eval(CenteredDecay(), 0.9, CENTER), [0.0, 0.0], atol=1e-15)


class TestInwardCheck:
    def test_disk_around_the_fixed_point(self):
        # Arrange
        model = LinearGrowth(lambda_M=0.1, lambda_A=0.5, lambda_L=0.5, n_c=0.05, g_mean=1.0)
        region = Disk(center=SimplexPoint(s=0.2, r=0.2), radius=0.05)

        # Act
        verdict = check_inward(model, region)

        # Assert
        assert verdict.holds
        assert verdict.worst_margin == pytest.approx(-0.0125, abs=1e-12)
        assert verdict.n_samples == 720

    def test_degenerate_source_fails(self):
        # Act
        verdict = check_inward(CustomSource(), ShrunkenSimplex())

        # Assert
        assert not verdict.holds
        assert verdict.worst_margin == 0.0

    def test_fast_proliferation_fails_and_names_the_rate_condition(self):
        # Arrange
        model = LinearGrowth(lambda_M=0.5, lambda_A=0.5, lambda_L=0.5, g_mean=1.0)
        region = Disk(center=SimplexPoint(s=0.3, r=0.3), radius=0.05)

        # Act
        verdict = check_inward(model, region)
        message = describe_inward_failure(model, verdict)

        # Assert
        assert not rate_condition_holds(model)
        assert not verdict.holds
        assert verdict.worst_margin > 0.0
        assert "lambda_M (lambda_A + lambda_L) < lambda_A lambda_L is violated" in message

    def test_disk_around_an_exterior_fixed_point_is_rejected(self):
        # Arrange
        model = LinearGrowth(lambda_M=0.5, lambda_A=0.5, lambda_L=0.5, g_mean=1.0)
        y_star = fixed_point(model, 1.0)
        region = Disk(center=SimplexPoint(s=0.45, r=0.45), radius=0.1)

        # Act & Assert
        assert y_star.sum() > 1.0
        with pytest.raises(RegionError):
            check_inward(model, region)

    def test_centered_decay_with_small_perturbation_holds(self):
        assert check_inward(DECAY_WITH_NOISE, ShrunkenSimplex()).holds

    def test_centered_decay_with_large_perturbation_fails(self):
        # Act
        verdict = check_inward(CenteredDecay(rate=3.0, bound=0.5, weights=(1.0, 1.0)), ShrunkenSimplex())

        # Assert
        assert not verdict.holds
        # the worst sample sits on the edge s + r = 1 - margin
        assert verdict.witness_normal == pytest.approx((2**-0.5, 2**-0.5))

    def test_full_bound_box_is_stricter_than_the_nominal_mean(self):
        # Arrange
        region = Disk(center=SimplexPoint(s=0.2, r=0.2), radius=0.05)

        # Act
        nominal = check_inward(LinearGrowth(g_mean=1.0), region)
        full = check_inward(LinearGrowth(), region)

        # Assert
        assert nominal.holds
        assert not full.holds


class TestMeanOde:
    @pytest.mark.parametrize(
        ("rates", "expected"),
        [((0.1, 0.5, 0.5), (0.2, 0.2)), ((0.1, 0.4, 0.8), (0.25, 0.125))],
    )
    def test_fixed_point(self, rates, expected):
        # Arrange
        model = LinearGrowth(lambda_M=rates[0], lambda_A=rates[1], lambda_L=rates[2])

        # Act
        y_star = fixed_point(model, 1.0)

        # Assert
        np.testing.assert_allclose(y_star, expected)
        np.testing.assert_allclose(equilibrium(model, [rates[0], 0.0]), expected)
        np.testing.assert_array_equal(fixed_point(model, 0.0), [0.0, 0.0])

    def test_singular_matrix_has_no_equilibrium(self):
        with pytest.raises(ValueError):
            equilibrium(CustomSource(), [0.0, 0.0])

    @pytest.mark.parametrize("scheme", ["rk4", "euler"])
    def test_equilibrium_is_stationary(self, scheme):
        # Arrange
        state = MeanState(y_p=0.2, y_d=0.2)

        # Act
        new = mean_ode_step(state, LinearGrowth(), (0.1, 0.0), 0.01, scheme=scheme)

        # Assert
        assert new.y_p == pytest.approx(0.2, abs=1e-12)
        assert new.y_d == pytest.approx(0.2, abs=1e-12)
        assert new.t == pytest.approx(0.01)

    def test_relaxes_to_the_fixed_point(self):
        # Act
        trajectory = integrate_mean_ode(
            MeanState(y_p=0.3, y_d=0.3), LinearGrowth(), (0.1, 0.0), dt=0.01, t_final=20.0
        )

        # Assert
        assert trajectory.final.t == pytest.approx(20.0)
        np.testing.assert_allclose(trajectory.final.as_tuple(), (0.2, 0.2), atol=1e-4)

    def test_quiet_source_keeps_the_state(self):
        # Act
        trajectory = integrate_mean_ode(
            MeanState(y_p=0.3, y_d=0.4), CustomSource(), (0.0, 0.0), dt=0.1, t_final=1.0
        )

        # Assert
        assert trajectory.final.as_tuple() == (0.3, 0.4)
        assert len(trajectory.states) == 11

    def test_records_every_kth_state(self):
        # Act
        trajectory = integrate_mean_ode(
            MeanState(y_p=0.3, y_d=0.3), LinearGrowth(), (0.1, 0.0), dt=0.01, t_final=1.0, record_every=30
        )

        # Assert
        assert [round(s.t, 6) for s in trajectory.states] == [0.0, 0.3, 0.6, 0.9, 1.0]

    def test_non_positive_step_is_rejected(self):
        with pytest.raises(ValueError):
            mean_ode_step(MeanState(y_p=0.3, y_d=0.3), LinearGrowth(), (0.1, 0.0), 0.0)


def _adversarial_walk(rng, model, region, start, n_steps, scheme):
    kpm, kpp, kdm, kdp = k_bounds(model)
    sigmas = np.column_stack(
        [rng.uniform(kpm, kpp, size=n_steps), rng.uniform(kdm, kdp, size=n_steps)]
    )
    state = MeanState(y_p=start[0], y_d=start[1])
    ys = [state.as_tuple()]
    for sigma in sigmas:
        state = mean_ode_step(state, model, sigma, 0.01, scheme=scheme)
        ys.append(state.as_tuple())
    ys = np.array(ys)
    return ys, signed_distance(region, ys[:, 0], ys[:, 1])


class TestForwardInvariance:
    REGION = ShrunkenSimplex()

    @pytest.mark.parametrize("scheme", ["rk4", "euler"])
    def test_adversarial_sigma_never_leaves_the_region(self, rng, scheme):
        # Arrange
        assert check_inward(DECAY_WITH_NOISE, self.REGION).holds
        c1, c2 = confinement_constants(self.REGION)
        starts = [(0.12, 0.12), (0.7, 0.12), (0.12, 0.7), (0.4, 0.3)]

        for start in starts:
            # Act
            ys, distance = _adversarial_walk(rng, DECAY_WITH_NOISE, self.REGION, start, 10_000, scheme)

            # Assert
            assert np.all(distance <= 1e-8)
            assert np.all(ys >= c1 - 1e-8)
            assert np.all(ys.sum(axis=1) >= c1 - 1e-8)
            assert np.all(ys.sum(axis=1) <= c2 + 1e-8)

    @pytest.mark.slow
    def test_adversarial_sigma_long_horizon(self, rng):
        # Arrange
        assert check_inward(DECAY_WITH_NOISE, self.REGION).holds

        # Act
        _, distance = _adversarial_walk(rng, DECAY_WITH_NOISE, self.REGION, (0.12, 0.12), 100_000, "rk4")

        # Assert
        assert np.all(distance <= 1e-8)


class TestRegions:
    def test_disk_outside_the_simplex_is_rejected(self):
        with pytest.raises(RegionError):
            validate_region(Disk(center=SimplexPoint(s=0.45, r=0.45), radius=0.1))

    def test_excessive_rounding_is_rejected(self):
        with pytest.raises(ValidationError):
            ShrunkenSimplex(margin=0.3, corner_rounding=0.15)

    def test_membership(self):
        # Arrange
        region = ShrunkenSimplex()

        # Assert
        assert contains_interior(region, 1 / 3, 1 / 3)
        assert not contains(region, 0.05, 0.5)
        assert contains(region, 0.05, 0.5, slack=0.06)
        assert signed_distance(region, 1 / 3, 1 / 3) < 0.0

    @pytest.mark.parametrize(
        "region",
        [
            Disk(center=SimplexPoint(s=0.2, r=0.3), radius=0.1),
            ShrunkenSimplex(),
            ShrunkenSimplex(margin=0.05, corner_rounding=0.01),
        ],
    )
    def test_boundary_samples_lie_on_the_boundary(self, region):
        # Act
        points, normals = sample_boundary(region, 360)

        # Assert
        np.testing.assert_allclose(signed_distance(region, points[:, 0], points[:, 1]), 0.0, atol=1e-12)
        np.testing.assert_allclose(np.linalg.norm(normals, axis=1), 1.0)
        # the signed distance grows along the outer normal
        outside = points + 1e-3 * normals
        assert np.all(signed_distance(region, outside[:, 0], outside[:, 1]) > 0.0)

    def test_confinement_constants(self):
        # Act
        c1, c2 = confinement_constants(Disk(center=SimplexPoint(s=0.2, r=0.3), radius=0.1))

        # Assert
        assert c1 == pytest.approx(0.1)
        assert c2 == pytest.approx(0.5 + 0.1 * np.sqrt(2.0))
        assert confinement_constants(ShrunkenSimplex()) == (0.1, 0.9)
