from typing import Annotated

from pydantic import BaseModel, Field

from tumor_phasefield.errors import EXIT_SUCCESS
from tumor_phasefield.schemas.config import SimConfig
from tumor_phasefield.schemas.records import ContinuationTable, RunManifest
from tumor_phasefield.schemas.sources import InwardVerdict, MeanTrajectory


class BaseResponse(BaseModel):
    is_success: Annotated[
        bool, Field(description="Whether the operation completed successfully.")
    ]
    message: Annotated[str, Field(description="A message for the results.")] = ""
    exit_code: Annotated[
        int, Field(description="Process exit code: 0 success, 2 configuration, 3 hypothesis, 4 numerical.")
    ] = EXIT_SUCCESS


# configuration files
class ResponseLoadConfig(BaseResponse):
    config: Annotated[SimConfig | None, Field(description="The loaded configuration.")] = None


class ResponseWriteConfig(BaseResponse):
    pass


# simulation
class ResponseSimulate(BaseResponse):
    manifest: Annotated[
        RunManifest | None, Field(description="Manifest of the finished run.")
    ] = None


class ResponseContinuation(BaseResponse):
    table: Annotated[
        ContinuationTable | None, Field(description="One row per epsilon.")
    ] = None


# analysis
class ResponseCheckRegion(BaseResponse):
    verdict: Annotated[
        InwardVerdict | None, Field(description="Outcome of the inward-pointing check.")
    ] = None


class ResponseMeanOde(BaseResponse):
    trajectory: Annotated[
        MeanTrajectory | None, Field(description="The integrated mean trajectory.")
    ] = None
