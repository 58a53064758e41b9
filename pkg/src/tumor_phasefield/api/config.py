from tumor_phasefield.api.common import failure
from tumor_phasefield.io.handlers import parse_config, write_config
from tumor_phasefield.schemas import requests as req_schemas
from tumor_phasefield.schemas import responses as res_schemas
from tumor_phasefield.schemas.contexts import RunContext


def load_config(
    request: req_schemas.RequestLoadConfig, context: RunContext
) -> res_schemas.ResponseLoadConfig:
    try:
        config = parse_config(request.path, encoding=context.encoding)
        return res_schemas.ResponseLoadConfig(
            is_success=True, message=f"Loaded {request.path}.", config=config
        )
    except Exception as e:
        return failure(res_schemas.ResponseLoadConfig, e)


def save_config(
    request: req_schemas.RequestWriteConfig, context: RunContext
) -> res_schemas.ResponseWriteConfig:
    """Writes a configuration file with the field descriptions as comments."""
    try:
        write_config(
            request.config,
            request.path,
            indent=context.indent,
            file_permission=context.file_permission or 0o644,
            dir_permission=context.dir_permission or 0o755,
            encoding=context.encoding,
        )
        return res_schemas.ResponseWriteConfig(
            is_success=True, message=f"Configuration written to {request.path}."
        )
    except Exception as e:
        return failure(res_schemas.ResponseWriteConfig, e)
