"""Epsilon continuation: the same scenario solved for a decreasing sequence of epsilon."""

import logging
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict
from scipy.integrate import trapezoid

from tumor_phasefield.core.potential import feps_grad_array
from tumor_phasefield.core.stepper import iterate
from tumor_phasefield.errors import NumericalFailure
from tumor_phasefield.schemas.config import SimConfig
from tumor_phasefield.schemas.records import ContinuationRow, ContinuationTable
from tumor_phasefield.schemas.validators import validate_epsilon_schedule

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


class BranchResult(BaseModel):
    """History and extremes of one epsilon branch."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    epsilon: float
    times: np.ndarray
    history_p: np.ndarray
    min_p: float
    max_p: float
    min_d: float
    max_d: float
    min_sum: float
    max_sum: float
    feps_grad_mean: float
    feps_grad_max: float


def solve_branch(cfg: SimConfig) -> BranchResult:
    """Runs `cfg` without writing artifacts and keeps phi_p every `output_every` steps."""
    times: list[float] = []
    history: list[FloatArray] = []
    lo = np.full(3, np.inf)
    hi = np.full(3, -np.inf)
    state = None
    for state, record in iterate(cfg):
        lo = np.minimum(lo, (record.min_p, record.min_d, record.min_sum))
        hi = np.maximum(hi, (record.max_p, record.max_d, record.max_sum))
        if state.step % cfg.output_every == 0 or state.step == cfg.n_steps:
            times.append(state.t)
            history.append(state.phi_p.values.copy())
    if state is None:
        raise NumericalFailure("linear_solve", "the run produced no state.")

    gs, gr = feps_grad_array(state.phi_p.values, state.phi_d.values, cfg.potential)
    magnitude = np.hypot(gs, gr)
    logger.info("continuation branch epsilon=%.4g done (%d snapshots)", cfg.epsilon, len(times))
    return BranchResult(
        epsilon=cfg.epsilon,
        times=np.asarray(times),
        history_p=np.stack(history),
        min_p=float(lo[0]),
        max_p=float(hi[0]),
        min_d=float(lo[1]),
        max_d=float(hi[1]),
        min_sum=float(lo[2]),
        max_sum=float(hi[2]),
        feps_grad_mean=float(np.mean(magnitude)),
        feps_grad_max=float(np.max(magnitude)),
    )


def space_time_distance(a: BranchResult, b: BranchResult, cell_area: float) -> float:
    """Space-time L2 distance of two phi_p histories sampled at the same times.

    The time integral uses the trapezoidal rule; a single snapshot gives the spatial L2 norm.
    """
    squared = np.sum((a.history_p - b.history_p) ** 2, axis=(1, 2)) * cell_area
    if len(a.times) < 2:
        return float(np.sqrt(squared[0]))
    return float(np.sqrt(trapezoid(squared, a.times)))


def continuation_study(
    cfg: SimConfig, eps_list: list[float], max_workers: int | None = None
) -> ContinuationTable:
    """Solves the scenario for each epsilon and tabulates the Cauchy distances.

    Args:
        cfg: The scenario. Its own epsilon is replaced by each entry of `eps_list`.
        eps_list: Strictly decreasing values in (0, 1).
        max_workers: Number of worker processes. `None` or 1 runs the branches in order.

    Raises:
        ValueError: If `eps_list` is not a strictly decreasing schedule in (0, 1).
    """
    validate_epsilon_schedule(eps_list)
    configs = [cfg.with_epsilon(eps) for eps in eps_list]
    logger.info("continuation over epsilon %s", ", ".join(f"{eps:g}" for eps in eps_list))

    if max_workers is not None and max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as executor:
            branches = list(executor.map(solve_branch, configs))
    else:
        branches = [solve_branch(c) for c in configs]

    rows: list[ContinuationRow] = []
    previous_distance: float | None = None
    for k, branch in enumerate(branches):
        distance: float | None = None
        ratio: float | None = None
        if k > 0:
            distance = space_time_distance(branch, branches[k - 1], cfg.grid.cell_area)
            if previous_distance is not None and previous_distance > 0.0:
                ratio = distance / previous_distance
            previous_distance = distance
        rows.append(
            ContinuationRow(
                epsilon=branch.epsilon,
                distance_to_previous=distance,
                ratio=ratio,
                min_p=branch.min_p,
                max_p=branch.max_p,
                min_d=branch.min_d,
                max_d=branch.max_d,
                min_sum=branch.min_sum,
                max_sum=branch.max_sum,
                overshoot=max(0.0, -branch.min_p),
                feps_grad_mean=branch.feps_grad_mean,
                feps_grad_max=branch.feps_grad_max,
            )
        )
    return ContinuationTable(rows=rows)
