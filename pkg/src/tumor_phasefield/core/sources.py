"""Source terms S = Sigma(n) + M (phi_p, phi_d), the inward-pointing check and the mean ODE."""

import itertools
import logging
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from tumor_phasefield.core.potential import cutoff_array
from tumor_phasefield.core.regions import (
    DEFAULT_BOUNDARY_SAMPLES,
    sample_boundary,
    signed_distance,
    validate_region,
)
from tumor_phasefield.schemas.potential import SimplexPoint
from tumor_phasefield.schemas.sources import (
    AdmissibleRegion,
    CenteredDecay,
    CustomSource,
    InwardVerdict,
    LinearGrowth,
    MeanState,
    MeanTrajectory,
    SourceModel,
)

logger = logging.getLogger(__name__)

MeanScheme = Literal["rk4", "euler"]

FloatArray = NDArray[np.float64]


def source_matrix(model: SourceModel) -> FloatArray:
    if isinstance(model, LinearGrowth):
        return np.array(
            [[-model.lambda_A, 0.0], [model.lambda_A, -model.lambda_L]], dtype=np.float64
        )
    if isinstance(model, CenteredDecay):
        return -model.rate * np.eye(2)
    return np.array(model.matrix, dtype=np.float64)


def k_bounds(model: SourceModel) -> tuple[float, float, float, float]:
    """Declared bounds (K_p-, K_p+, K_d-, K_d+) with K_i- <= Sigma_i <= K_i+."""
    if isinstance(model, LinearGrowth):
        return (0.0, model.lambda_M, 0.0, 0.0)
    if isinstance(model, CenteredDecay):
        k = model.rate / 3.0
        wp, wd = (abs(w) * model.bound for w in model.weights)
        return (k - wp, k + wp, k - wd, k + wd)
    return model.k_bounds


def growth_function(model: LinearGrowth, n: ArrayLike) -> FloatArray:
    return np.maximum(model.n_c, np.minimum(np.asarray(n, dtype=np.float64), 1.0))


def sigma_eval_array(
    model: SourceModel, n: ArrayLike, s: ArrayLike, r: ArrayLike
) -> tuple[FloatArray, FloatArray]:
    """Cellwise (Sigma_p, Sigma_d). The phase fields enter only through the array shape."""
    n_arr, _, _ = np.broadcast_arrays(
        np.asarray(n, dtype=np.float64),
        np.asarray(s, dtype=np.float64),
        np.asarray(r, dtype=np.float64),
    )
    if isinstance(model, LinearGrowth):
        return model.lambda_M * growth_function(model, n_arr), np.zeros_like(n_arr)
    if isinstance(model, CenteredDecay):
        k = model.rate / 3.0
        shape = model.bound * np.tanh(model.gain * (n_arr - 0.5))
        return k + model.weights[0] * shape, k + model.weights[1] * shape
    t = cutoff_array(n_arr)
    return (
        model.sigma_base[0] + model.sigma_slope[0] * t,
        model.sigma_base[1] + model.sigma_slope[1] * t,
    )


def sigma_eval(model: SourceModel, n: float, p: SimplexPoint) -> FloatArray:
    sp, sd = sigma_eval_array(model, n, p.s, p.r)
    return np.array([float(sp), float(sd)])


def source_eval_array(
    model: SourceModel, n: ArrayLike, s: ArrayLike, r: ArrayLike
) -> tuple[FloatArray, FloatArray]:
    sp, sd = sigma_eval_array(model, n, s, r)
    m = source_matrix(model)
    s_arr = np.asarray(s, dtype=np.float64)
    r_arr = np.asarray(r, dtype=np.float64)
    return sp + m[0, 0] * s_arr + m[0, 1] * r_arr, sd + m[1, 0] * s_arr + m[1, 1] * r_arr


def source_eval(model: SourceModel, n: float, p: SimplexPoint) -> FloatArray:
    sp, sd = source_eval_array(model, n, p.s, p.r)
    return np.array([float(sp), float(sd)])


def nominal_sigma(model: SourceModel) -> FloatArray:
    """Sigma at the boundary nutrient level n = 1, or at the nominal g_mean if one is set."""
    if isinstance(model, LinearGrowth) and model.g_mean is not None:
        return np.array([model.lambda_M * model.g_mean, 0.0])
    return sigma_eval(model, 1.0, SimplexPoint(s=1.0 / 3.0, r=1.0 / 3.0))


def sigma_corners(model: SourceModel) -> FloatArray:
    """Corners of the set of Sigma values the inward check has to cover."""
    if isinstance(model, LinearGrowth) and model.g_mean is not None:
        return nominal_sigma(model)[None, :]
    kpm, kpp, kdm, kdp = k_bounds(model)
    corners = sorted(set(itertools.product((kpm, kpp), (kdm, kdp))))
    return np.array(corners, dtype=np.float64)


def check_inward(
    model: SourceModel,
    region: AdmissibleRegion,
    n_boundary_samples: int = DEFAULT_BOUNDARY_SAMPLES,
) -> InwardVerdict:
    """Samples (M y + x) . normal over the region boundary and the Sigma corners.

    The margin is linear in x, so its maximum over the bound box is attained
    at a corner.

    Raises:
        RegionError: If the region is not contained in the open simplex.
    """
    validate_region(region)
    points, normals = sample_boundary(region, n_boundary_samples)
    matrix = source_matrix(model)
    corners = sigma_corners(model)

    drift = points @ matrix.T
    # margins[c, k]: corner c against boundary sample k
    margins = np.einsum("ck,nk->cn", corners, normals) + np.einsum(
        "nk,nk->n", drift, normals
    )
    c_idx, k_idx = np.unravel_index(int(np.argmax(margins)), margins.shape)
    worst = float(margins[c_idx, k_idx])
    verdict = InwardVerdict(
        holds=worst < 0.0,
        worst_margin=worst,
        witness=SimplexPoint(s=float(points[k_idx, 0]), r=float(points[k_idx, 1])),
        witness_normal=(float(normals[k_idx, 0]), float(normals[k_idx, 1])),
        witness_sigma=(float(corners[c_idx, 0]), float(corners[c_idx, 1])),
        n_samples=n_boundary_samples,
    )
    logger.info(
        "inward check %s: worst margin %.6g at (%.4f, %.4f)",
        "holds" if verdict.holds else "fails",
        worst,
        verdict.witness.s,
        verdict.witness.r,
    )
    return verdict


def rate_condition_holds(model: LinearGrowth) -> bool:
    """lambda_M (lambda_A + lambda_L) < lambda_A lambda_L, i.e. the fixed point at g = 1 is inside the simplex."""
    return model.lambda_M * (model.lambda_A + model.lambda_L) < model.lambda_A * model.lambda_L


def describe_inward_failure(model: SourceModel, verdict: InwardVerdict) -> str:
    """Human-readable reason for a failed inward check."""
    message = (
        f"the source field points outward at ({verdict.witness.s:.4f}, {verdict.witness.r:.4f}) "
        f"with normal ({verdict.witness_normal[0]:.4f}, {verdict.witness_normal[1]:.4f}) "
        f"and Sigma ({verdict.witness_sigma[0]:.4g}, {verdict.witness_sigma[1]:.4g}); "
        f"margin {verdict.worst_margin:.6g} >= 0"
    )
    if isinstance(model, LinearGrowth) and not rate_condition_holds(model):
        message += (
            "; lambda_M (lambda_A + lambda_L) < lambda_A lambda_L is violated "
            f"({model.lambda_M * (model.lambda_A + model.lambda_L):.4g} >= "
            f"{model.lambda_A * model.lambda_L:.4g})"
        )
    return message


def equilibrium(model: SourceModel, sigma: ArrayLike) -> FloatArray:
    """Fixed point -M^{-1} sigma of the mean ODE for a constant sigma.

    Raises:
        ValueError: If M is singular.
    """
    try:
        return -np.linalg.solve(source_matrix(model), np.asarray(sigma, dtype=np.float64))
    except np.linalg.LinAlgError as e:
        raise ValueError("The source matrix is singular; no unique equilibrium.") from e


def fixed_point(model: LinearGrowth, g_mean: float) -> FloatArray:
    """Closed-form equilibrium (lambda_M / lambda_A, lambda_M / lambda_L) * g_mean."""
    if model.lambda_A == 0.0 or model.lambda_L == 0.0:
        raise ValueError("The source matrix is singular; a rate is zero.")
    return np.array(
        [model.lambda_M / model.lambda_A * g_mean, model.lambda_M / model.lambda_L * g_mean]
    )


def mean_ode_step(
    state: MeanState,
    model: SourceModel,
    sigma_mean: ArrayLike,
    dt: float,
    scheme: MeanScheme = "rk4",
) -> MeanState:
    """Advances y' = sigma_mean + M y by one step with sigma_mean held constant.

    `euler` is the map the finite-difference scheme induces on the spatial
    means; `rk4` is the classical fourth-order Runge-Kutta step.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}.")
    matrix = source_matrix(model)
    sigma = np.asarray(sigma_mean, dtype=np.float64)
    y = np.array(state.as_tuple())

    def rhs(v: FloatArray) -> FloatArray:
        return sigma + matrix @ v

    if scheme == "euler":
        y_new = y + dt * rhs(y)
    else:
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y_new = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return MeanState(y_p=float(y_new[0]), y_d=float(y_new[1]), t=state.t + dt)


def integrate_mean_ode(
    initial: MeanState,
    model: SourceModel,
    sigma_mean: ArrayLike,
    dt: float,
    t_final: float,
    *,
    region: AdmissibleRegion | None = None,
    scheme: MeanScheme = "rk4",
    record_every: int = 1,
) -> MeanTrajectory:
    """Integrates the mean ODE on [t0, t0 + t_final] with constant sigma_mean."""
    n_steps = int(round(t_final / dt))
    state = initial
    states = [state]
    worst = -np.inf
    if region is not None:
        worst = float(signed_distance(region, state.y_p, state.y_d))
    for k in range(1, n_steps + 1):
        state = mean_ode_step(state, model, sigma_mean, dt, scheme=scheme)
        if region is not None:
            worst = max(worst, float(signed_distance(region, state.y_p, state.y_d)))
        if k % record_every == 0 or k == n_steps:
            states.append(state)
    logger.debug("integrated mean ODE over %d steps", n_steps)
    return MeanTrajectory(
        states=states,
        worst_signed_distance=float(worst) if region is not None else float("nan"),
        scheme=scheme,
    )
