from tumor_phasefield.api.common import failure
from tumor_phasefield.core.continuation import continuation_study
from tumor_phasefield.core.runner import run
from tumor_phasefield.io.handlers import RunDataIO
from tumor_phasefield.schemas import requests as req_schemas
from tumor_phasefield.schemas import responses as res_schemas
from tumor_phasefield.schemas.contexts import RunContext


def simulate(
    request: req_schemas.RequestSimulate, context: RunContext
) -> res_schemas.ResponseSimulate:
    """Runs one simulation into `<base_dir>/<run_name>`."""
    io = RunDataIO(context, request.run_name)
    try:
        manifest = run(request.config, io)
        return res_schemas.ResponseSimulate(
            is_success=True,
            message=(
                f"Run '{request.run_name}' finished after {manifest.n_steps} steps "
                f"in {manifest.wall_time_seconds:.2f} s; artifacts in {io.run_dir}."
            ),
            manifest=manifest,
        )
    except Exception as e:
        return failure(res_schemas.ResponseSimulate, e)


def continuation(
    request: req_schemas.RequestContinuation, context: RunContext
) -> res_schemas.ResponseContinuation:
    """Solves the scenario for every epsilon of the schedule. Nothing is written to disk."""
    try:
        table = continuation_study(
            request.config, request.eps_list, max_workers=request.max_workers
        )
        return res_schemas.ResponseContinuation(
            is_success=True,
            message=f"Continuation over {len(table.rows)} epsilon values finished.",
            table=table,
        )
    except Exception as e:
        return failure(res_schemas.ResponseContinuation, e)
