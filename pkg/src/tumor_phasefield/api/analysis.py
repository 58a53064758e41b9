import numpy as np

from tumor_phasefield.api.common import failure
from tumor_phasefield.core.initial import realize_initial
from tumor_phasefield.core.sources import (
    check_inward,
    describe_inward_failure,
    integrate_mean_ode,
    nominal_sigma,
)
from tumor_phasefield.errors import EXIT_HYPOTHESIS_VIOLATION
from tumor_phasefield.schemas import requests as req_schemas
from tumor_phasefield.schemas import responses as res_schemas
from tumor_phasefield.schemas.contexts import RunContext
from tumor_phasefield.schemas.sources import MeanState


def check_region(
    request: req_schemas.RequestCheckRegion, context: RunContext
) -> res_schemas.ResponseCheckRegion:
    """Runs the inward-pointing check. A failed check is reported with exit code 3."""
    try:
        cfg = request.config
        verdict = check_inward(cfg.source, cfg.region, request.n_boundary_samples)
        if verdict.holds:
            return res_schemas.ResponseCheckRegion(
                is_success=True,
                message=(
                    f"The source points into the region on all {verdict.n_samples} samples "
                    f"(worst margin {verdict.worst_margin:.6g})."
                ),
                verdict=verdict,
            )
        return res_schemas.ResponseCheckRegion(
            is_success=False,
            message=describe_inward_failure(cfg.source, verdict) + ".",
            exit_code=EXIT_HYPOTHESIS_VIOLATION,
            verdict=verdict,
        )
    except Exception as e:
        return failure(res_schemas.ResponseCheckRegion, e)


def mean_ode(
    request: req_schemas.RequestMeanOde, context: RunContext
) -> res_schemas.ResponseMeanOde:
    """Integrates the mean ODE from the means of the configured initial data."""
    try:
        cfg = request.config
        phi_p, phi_d = realize_initial(cfg)
        initial = MeanState(y_p=float(np.mean(phi_p)), y_d=float(np.mean(phi_d)))
        sigma = (
            np.asarray(request.sigma_mean)
            if request.sigma_mean is not None
            else nominal_sigma(cfg.source)
        )
        trajectory = integrate_mean_ode(
            initial,
            cfg.source,
            sigma,
            request.dt if request.dt is not None else cfg.dt,
            request.t_final if request.t_final is not None else cfg.t_final,
            region=cfg.region,
            scheme=request.scheme,
            record_every=request.record_every,
        )
        final = trajectory.final
        return res_schemas.ResponseMeanOde(
            is_success=True,
            message=(
                f"Means at t = {final.t:.6g}: ({final.y_p:.8f}, {final.y_d:.8f}); "
                f"worst signed distance {trajectory.worst_signed_distance:.3e}."
            ),
            trajectory=trajectory,
        )
    except Exception as e:
        return failure(res_schemas.ResponseMeanOde, e)
