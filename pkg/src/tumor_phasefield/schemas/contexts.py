from pathlib import Path
from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, field_validator

from tumor_phasefield.schemas.validators import validate_safe_name


class RunContext(BaseModel):
    """File-system settings shared by every run."""

    # configuration of the `RunContext` class
    model_config = ConfigDict(extra="forbid")

    # fields
    base_dir: Annotated[
        Path,
        Field(description="Directory under which every run gets its own subdirectory."),
    ] = Path.cwd() / "runs"
    config_file_name: Annotated[
        str, Field(description="Filename of the configuration echo. Supported formats: JSON, YAML.")
    ] = "config.yaml"
    diagnostics_file_name: Annotated[
        str, Field(description="Filename of the per-step diagnostics CSV.")
    ] = "diagnostics.csv"
    manifest_file_name: Annotated[
        str, Field(description="Filename of the run manifest.")
    ] = "manifest.json"
    snapshot_dir_name: Annotated[
        str, Field(description="Subdirectory holding the field snapshots.")
    ] = "snapshots"
    snapshot_fields: Annotated[
        tuple[str, ...],
        Field(description="Fields written at every snapshot."),
    ] = ("phi_p", "phi_d", "n", "q")
    encoding: Annotated[str, Field(description="File encoding for text files.")] = "utf-8"
    indent: Annotated[
        int, Field(ge=0, le=8, description="Indentation level for JSON/YAML.")
    ] = 2
    dir_permission: Annotated[
        int | None,
        Field(description="Directory permission. `None` provides the OS default."),
    ] = 0o755
    file_permission: Annotated[
        int | None,
        Field(description="File permission. `None` provides the OS default."),
    ] = 0o644

    @field_validator("config_file_name", "manifest_file_name")
    @classmethod
    def validate_file_extension(cls, v: str) -> str:
        if not v.lower().endswith((".json", ".yaml", ".yml")):
            raise ValueError(
                f"Structured files must be in JSON or YAML format. Received: {v}"
            )
        return v

    @field_validator("diagnostics_file_name")
    @classmethod
    def validate_csv_extension(cls, v: str) -> str:
        if not v.lower().endswith(".csv"):
            raise ValueError(f"The diagnostics file must be a CSV file. Received: {v}")
        return v

    @field_validator(
        "config_file_name", "diagnostics_file_name", "manifest_file_name", "snapshot_dir_name"
    )
    @classmethod
    def validate_name(cls, v: str) -> str:
        return validate_safe_name(v)

    @field_validator("snapshot_fields")
    @classmethod
    def validate_snapshot_fields(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        known = {"phi_p", "phi_d", "mu_p", "mu_d", "n", "q"}
        unknown = [name for name in v if name not in known]
        if unknown:
            raise ValueError(f"Unknown snapshot fields {unknown}; choose from {sorted(known)}.")
        return tuple(dict.fromkeys(v))

    def get_run_dir(self, run_name: str) -> Path:
        """Gets the directory of a specific run."""
        return self.base_dir / run_name

    def get_config_file(self, run_name: str) -> Path:
        return self.get_run_dir(run_name) / self.config_file_name

    def get_diagnostics_file(self, run_name: str) -> Path:
        return self.get_run_dir(run_name) / self.diagnostics_file_name

    def get_manifest_file(self, run_name: str) -> Path:
        return self.get_run_dir(run_name) / self.manifest_file_name

    def get_snapshot_file(self, run_name: str, field: str, step: int, suffix: str) -> Path:
        """Gets the path of a snapshot such as `snapshots/phi_p_000100.csv`."""
        return self.get_run_dir(run_name) / self.snapshot_dir_name / f"{field}_{step:06d}{suffix}"
