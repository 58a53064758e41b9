"""Initial data: realization, validation and Helmholtz smoothing."""

import logging

import numpy as np
from numpy.typing import NDArray

from tumor_phasefield.core.elliptic import smooth_initial
from tumor_phasefield.core.grid import ScalarField, cell_centers
from tumor_phasefield.core.regions import signed_distance
from tumor_phasefield.errors import ConfigurationError
from tumor_phasefield.io.fields import read_field_csv
from tumor_phasefield.schemas.config import FromFile, SimConfig, TwoBlobs, UniformWithNoise
from tumor_phasefield.schemas.records import InitialDataVerdict, SolveReport

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


def realize_initial(cfg: SimConfig) -> tuple[FloatArray, FloatArray]:
    """Builds (phi_p, phi_d) cell arrays from the initial-data spec.

    Noise is drawn from numpy's PCG64 generator seeded with `cfg.seed`: first
    the phi_p noise, then the phi_d noise, each in C order.
    """
    grid = cfg.grid
    spec = cfg.initial
    if isinstance(spec, UniformWithNoise):
        rng = np.random.default_rng(cfg.seed)
        noise_p = rng.uniform(-spec.amplitude, spec.amplitude, size=grid.shape)
        noise_d = rng.uniform(-spec.amplitude, spec.amplitude, size=grid.shape)
        phi_p = spec.base.s + (noise_p - np.mean(noise_p))
        phi_d = spec.base.r + (noise_d - np.mean(noise_d))
        return phi_p, phi_d
    if isinstance(spec, TwoBlobs):
        return _two_blobs(spec, cfg)
    return _from_file(spec, cfg)


def _two_blobs(spec: TwoBlobs, cfg: SimConfig) -> tuple[FloatArray, FloatArray]:
    x, y = cell_centers(cfg.grid)
    phi_p = np.full(cfg.grid.shape, spec.background.s)
    phi_d = np.full(cfg.grid.shape, spec.background.r)
    for (cx, cy), radius, value in zip(spec.centers, spec.radii, spec.values):
        dist = np.hypot(x - cx, y - cy)
        if spec.interface_width > 0.0:
            weight = 0.5 * (1.0 - np.tanh((dist - radius) / spec.interface_width))
        else:
            weight = (dist <= radius).astype(np.float64)
        phi_p = phi_p + weight * (value.s - spec.background.s)
        phi_d = phi_d + weight * (value.r - spec.background.r)
    return phi_p, phi_d


def _from_file(spec: FromFile, cfg: SimConfig) -> tuple[FloatArray, FloatArray]:
    try:
        return read_field_csv(spec.path_p, cfg.grid), read_field_csv(spec.path_d, cfg.grid)
    except (FileNotFoundError, ValueError) as e:
        raise ConfigurationError(f"initial: {e}") from e


def validate_initial(phi_p: FloatArray, phi_d: FloatArray, cfg: SimConfig) -> InitialDataVerdict:
    """Checks pointwise simplex membership and that the means lie inside the admissible region.

    Raises:
        ConfigurationError: If either condition fails.
    """
    total = phi_p + phi_d
    pointwise = bool(np.all(phi_p >= 0.0) and np.all(phi_d >= 0.0) and np.all(total <= 1.0))
    mean_p = float(np.mean(phi_p))
    mean_d = float(np.mean(phi_d))
    distance = float(signed_distance(cfg.region, mean_p, mean_d))
    verdict = InitialDataVerdict(
        pointwise_in_simplex=pointwise,
        mean_p=mean_p,
        mean_d=mean_d,
        mean_in_region_interior=distance < 0.0,
        signed_distance=distance,
    )
    if not pointwise:
        raise ConfigurationError(
            "initial: the initial fields must satisfy 0 <= phi_p, 0 <= phi_d and "
            f"phi_p + phi_d <= 1 at every cell (found min phi_p={np.min(phi_p):.6g}, "
            f"min phi_d={np.min(phi_d):.6g}, max sum={np.max(total):.6g})."
        )
    if not verdict.mean_in_region_interior:
        raise ConfigurationError(
            f"initial: the initial means ({mean_p:.6g}, {mean_d:.6g}) must lie in the "
            f"interior of the admissible region (signed distance {distance:.6g})."
        )
    return verdict


def prepare_initial(
    cfg: SimConfig,
) -> tuple[ScalarField, ScalarField, InitialDataVerdict, list[SolveReport]]:
    """Realizes, validates and smooths the initial phase fields."""
    phi_p, phi_d = realize_initial(cfg)
    verdict = validate_initial(phi_p, phi_d, cfg)
    delta = cfg.effective_smoothing_delta
    smooth_p, report_p = smooth_initial(
        ScalarField(grid=cfg.grid, values=phi_p), delta, cfg.solver
    )
    smooth_d, report_d = smooth_initial(
        ScalarField(grid=cfg.grid, values=phi_d), delta, cfg.solver
    )
    logger.info(
        "initial data ready: means (%.6f, %.6f), smoothing delta %.3e",
        verdict.mean_p,
        verdict.mean_d,
        delta,
    )
    return smooth_p, smooth_d, verdict, [report_p, report_d]
