"""Logarithmic multi-well potential and its Moreau-Yosida regularization.

The singular part is

    F0(s, r) = s log s + r log r + h log h,    h = 1 - s - r,

finite on the closed simplex and +inf elsewhere. The smooth perturbation is

    F1(s, r) = chi/2 * (r(1-r) + s(1-s) + h(r+s)).

F_eps is the Moreau-Yosida envelope of F0. Its gradient is (x - prox(x)) / eps,
where prox(x) minimizes |p - x|^2 / (2 eps) + F0(p).

Every function has an `*_array` form operating on numpy arrays of s and r
components; the scalar forms wrap those.
"""

import logging
from typing import Final

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import wrightomega, xlogy

from tumor_phasefield.errors import DomainError, NumericalFailure
from tumor_phasefield.schemas.potential import PotentialSpec, ProxResult, SimplexPoint

logger = logging.getLogger(__name__)

LOG3: Final[float] = float(np.log(3.0))
PROX_TOLERANCE: Final[float] = 1e-12
PROX_MAX_ITER: Final[int] = 200
MAX_HALVINGS: Final[int] = 60
SMALLEST_FRACTION: Final[float] = float(np.finfo(np.float64).tiny)

FloatArray = NDArray[np.float64]


def _as_pair(s: ArrayLike, r: ArrayLike) -> tuple[FloatArray, FloatArray]:
    s_arr, r_arr = np.broadcast_arrays(
        np.asarray(s, dtype=np.float64), np.asarray(r, dtype=np.float64)
    )
    return s_arr, r_arr


# cutoff


def cutoff(r: float) -> float:
    """Clamps a real number to [0, 1]."""
    return max(0.0, min(1.0, float(r)))


def cutoff_array(values: ArrayLike) -> FloatArray:
    return np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)


# singular part


def f0_value_array(s: ArrayLike, r: ArrayLike, offset_log3: bool = True) -> FloatArray:
    """Evaluates F0 with the convention 0 log 0 = 0. Returns +inf outside the closed simplex."""
    s_arr, r_arr = _as_pair(s, r)
    total = s_arr + r_arr
    inside = (s_arr >= 0.0) & (r_arr >= 0.0) & (total <= 1.0)
    s_in = np.where(inside, s_arr, 0.0)
    r_in = np.where(inside, r_arr, 0.0)
    h_in = np.where(inside, np.maximum(1.0 - total, 0.0), 0.0)
    value = xlogy(s_in, s_in) + xlogy(r_in, r_in) + xlogy(h_in, h_in)
    if offset_log3:
        value = value + LOG3
    return np.where(inside, value, np.inf)


def f0_value(p: SimplexPoint, spec: PotentialSpec) -> float:
    return float(f0_value_array(p.s, p.r, offset_log3=spec.offset_log3))


def coercivity_gap(
    s: ArrayLike, r: ArrayLike, c1: float, c2: float, offset_log3: bool = True
) -> FloatArray:
    """F0 - (c1 (s^2 + r^2) - c2). Nonnegative wherever the quadratic lower bound holds."""
    s_arr, r_arr = _as_pair(s, r)
    return f0_value_array(s_arr, r_arr, offset_log3) - (c1 * (s_arr**2 + r_arr**2) - c2)


def f0_grad_array(s: ArrayLike, r: ArrayLike) -> tuple[FloatArray, FloatArray]:
    """Gradient of F0 on the open simplex.

    Raises:
        DomainError: If any point lies on the boundary of or outside the simplex.
    """
    s_arr, r_arr = _as_pair(s, r)
    h = 1.0 - s_arr - r_arr
    if not np.all((s_arr > 0.0) & (r_arr > 0.0) & (h > 0.0)):
        raise DomainError("The gradient of F0 is defined only inside the open simplex.")
    log_h = np.log(h)
    return np.log(s_arr) - log_h, np.log(r_arr) - log_h


def f0_grad(p: SimplexPoint) -> FloatArray:
    gs, gr = f0_grad_array(p.s, p.r)
    return np.array([float(gs), float(gr)])


def f0_hessian(p: SimplexPoint) -> FloatArray:
    """Hessian of F0 at an interior point."""
    if not p.in_open_simplex():
        raise DomainError("The Hessian of F0 is defined only inside the open simplex.")
    inv_h = 1.0 / p.host
    return np.array(
        [[1.0 / p.s + inv_h, inv_h], [inv_h, 1.0 / p.r + inv_h]], dtype=np.float64
    )


# smooth perturbation


def f1_value_array(s: ArrayLike, r: ArrayLike, chi: float) -> FloatArray:
    s_arr, r_arr = _as_pair(s, r)
    h = 1.0 - s_arr - r_arr
    return 0.5 * chi * (r_arr * (1.0 - r_arr) + s_arr * (1.0 - s_arr) + h * (r_arr + s_arr))


def f1_grad_array(
    s: ArrayLike, r: ArrayLike, chi: float
) -> tuple[FloatArray, FloatArray]:
    s_arr, r_arr = _as_pair(s, r)
    return chi * (1.0 - 2.0 * s_arr - r_arr), chi * (1.0 - s_arr - 2.0 * r_arr)


def f1_value(p: SimplexPoint, spec: PotentialSpec) -> float:
    return float(f1_value_array(p.s, p.r, spec.chi))


def f1_grad(p: SimplexPoint, spec: PotentialSpec) -> FloatArray:
    gs, gr = f1_grad_array(p.s, p.r, spec.chi)
    return np.array([float(gs), float(gr)])


# proximal map


def _host_constraint(
    log_h: FloatArray, a: FloatArray, b: FloatArray, epsilon: float
) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    """Evaluates s + r + h - 1 and its derivative in log h.

    For a fixed host fraction h the optimality conditions decouple, and
    s = eps * W(exp(log h + a)) with a = x_s / eps - log eps (likewise r),
    W being the Lambert function. `wrightomega` evaluates W(exp(z)) without
    overflow.
    """
    omega_s = np.real(wrightomega(log_h + a))
    omega_r = np.real(wrightomega(log_h + b))
    h = np.exp(log_h)
    defect = epsilon * (omega_s + omega_r) + h - 1.0
    slope = epsilon * (omega_s / (1.0 + omega_s) + omega_r / (1.0 + omega_r)) + h
    return defect, slope, omega_s, omega_r


def prox_array(
    xs: ArrayLike,
    xr: ArrayLike,
    epsilon: float,
    *,
    tol: float = PROX_TOLERANCE,
    max_iter: int = PROX_MAX_ITER,
) -> tuple[FloatArray, FloatArray, FloatArray, int, FloatArray]:
    """Pointwise proximal map of F0 with parameter `epsilon`.

    Runs a damped Newton iteration on the logarithm of the host fraction.
    The constraint defect is convex and increasing in log h and positive at
    log h = 0, so the undamped iteration already decreases monotonically to
    the root; step halving guards against round-off.

    Returns:
        (s, r, log_h, iterations, residual) where `residual` combines the
        constraint defect and the scaled first-order condition.

    Raises:
        NumericalFailure: If some point has not converged after `max_iter` iterations.
    """
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}.")
    xs_arr, xr_arr = _as_pair(xs, xr)
    if not (np.all(np.isfinite(xs_arr)) and np.all(np.isfinite(xr_arr))):
        raise NumericalFailure("prox", "non-finite input to the proximal map.")

    log_eps = np.log(epsilon)
    a = xs_arr / epsilon - log_eps
    b = xr_arr / epsilon - log_eps
    log_h = np.zeros_like(xs_arr)
    defect, slope, omega_s, omega_r = _host_constraint(log_h, a, b, epsilon)

    iterations = 0
    while True:
        active = np.abs(defect) > tol
        if not np.any(active):
            break
        if iterations >= max_iter:
            worst = float(np.max(np.abs(defect)))
            raise NumericalFailure(
                "prox",
                f"Newton iteration did not converge in {max_iter} iterations "
                f"(worst defect {worst:.3e}, epsilon={epsilon}).",
            )
        iterations += 1

        step = np.where(active, defect / slope, 0.0)
        trial = log_h - step
        t_defect, t_slope, t_omega_s, t_omega_r = _host_constraint(trial, a, b, epsilon)
        for _ in range(MAX_HALVINGS):
            worse = active & ~(np.abs(t_defect) <= np.abs(defect))
            if not np.any(worse):
                break
            step = np.where(worse, 0.5 * step, step)
            trial = log_h - step
            t_defect, t_slope, t_omega_s, t_omega_r = _host_constraint(
                trial, a, b, epsilon
            )

        log_h = np.where(active, trial, log_h)
        defect = np.where(active, t_defect, defect)
        slope = np.where(active, t_slope, slope)
        omega_s = np.where(active, t_omega_s, omega_s)
        omega_r = np.where(active, t_omega_r, omega_r)

    s = epsilon * omega_s
    r = epsilon * omega_r
    scale = 1.0 + np.maximum(np.abs(xs_arr), np.abs(xr_arr)) / epsilon
    with np.errstate(divide="ignore", invalid="ignore"):
        foc_s = np.where(s > 0.0, (s - xs_arr) / epsilon + np.log(s) - log_h, 0.0)
        foc_r = np.where(r > 0.0, (r - xr_arr) / epsilon + np.log(r) - log_h, 0.0)
    # omega underflows to 0 once x_i / eps drops below about -745; keep the point off the boundary
    s = np.maximum(s, SMALLEST_FRACTION)
    r = np.maximum(r, SMALLEST_FRACTION)
    residual = np.maximum(
        np.abs(defect), np.maximum(np.abs(foc_s), np.abs(foc_r)) / scale
    )
    logger.debug("prox converged in %d Newton iterations", iterations)
    return s, r, log_h, iterations, residual


def prox(x: ArrayLike, spec: PotentialSpec) -> ProxResult:
    """Proximal point of F0 at a single 2-vector `x`."""
    xs, xr = np.asarray(x, dtype=np.float64).reshape(2)
    s, r, log_h, iterations, residual = prox_array(xs, xr, spec.epsilon)
    return ProxResult(
        point=SimplexPoint(s=float(s), r=float(r)),
        log_host=float(log_h),
        newton_iters=iterations,
        residual=float(residual),
    )


# Moreau-Yosida envelope


def feps_eval_array(
    xs: ArrayLike, xr: ArrayLike, spec: PotentialSpec
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Returns (F_eps, dF_eps/ds, dF_eps/dr) at every point with a single proximal solve."""
    xs_arr, xr_arr = _as_pair(xs, xr)
    s, r, log_h, _, _ = prox_array(xs_arr, xr_arr, spec.epsilon)
    h = np.exp(log_h)
    f0 = xlogy(s, s) + xlogy(r, r) + h * log_h
    if spec.offset_log3:
        f0 = f0 + LOG3
    ds = xs_arr - s
    dr = xr_arr - r
    value = (ds * ds + dr * dr) / (2.0 * spec.epsilon) + f0
    return value, ds / spec.epsilon, dr / spec.epsilon


def feps_value_array(xs: ArrayLike, xr: ArrayLike, spec: PotentialSpec) -> FloatArray:
    return feps_eval_array(xs, xr, spec)[0]


def feps_grad_array(
    xs: ArrayLike, xr: ArrayLike, spec: PotentialSpec
) -> tuple[FloatArray, FloatArray]:
    _, gs, gr = feps_eval_array(xs, xr, spec)
    return gs, gr


def feps_value(x: ArrayLike, spec: PotentialSpec) -> float:
    xs, xr = np.asarray(x, dtype=np.float64).reshape(2)
    return float(feps_value_array(xs, xr, spec))


def feps_grad(x: ArrayLike, spec: PotentialSpec) -> FloatArray:
    xs, xr = np.asarray(x, dtype=np.float64).reshape(2)
    gs, gr = feps_grad_array(xs, xr, spec)
    return np.array([float(gs), float(gr)])


def local_potential(
    s: ArrayLike, r: ArrayLike, spec: PotentialSpec
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Bulk energy density F_eps + F1 and the local chemical potentials grad F_eps + grad F1.

    One prox evaluation serves all three.
    """
    s_arr, r_arr = _as_pair(s, r)
    value, gs, gr = feps_eval_array(s_arr, r_arr, spec)
    hs, hr = f1_grad_array(s_arr, r_arr, spec.chi)
    return value + f1_value_array(s_arr, r_arr, spec.chi), gs + hs, gr + hr
