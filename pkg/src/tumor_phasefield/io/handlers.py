import csv
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any, TextIO

from pydantic import ValidationError

from tumor_phasefield.errors import ConfigurationError
from tumor_phasefield.io.fields import write_field_csv, write_field_pgm
from tumor_phasefield.io.json_handler import load_data_from_json, save_data_to_json
from tumor_phasefield.io.yaml_handler import (
    build_commented_map,
    load_data_from_yaml,
    save_data_to_yaml,
)
from tumor_phasefield.schemas.config import SimConfig
from tumor_phasefield.schemas.contexts import RunContext
from tumor_phasefield.schemas.records import DIAGNOSTICS_COLUMNS, DiagnosticsRecord, RunManifest


def format_validation_error(error: ValidationError) -> str:
    """One line per violated constraint, prefixed with the dotted field path."""
    lines = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{path}: {item['msg']}")
    return "; ".join(lines)


def parse_config(path: Path, *, encoding: str = "utf-8") -> SimConfig:
    """Loads and validates a simulation configuration (YAML or JSON).

    Raises:
        ConfigurationError: If the file is missing, cannot be parsed, or fails validation.
    """
    try:
        data = StructuredDataIO.load(path, encoding=encoding)
    except (FileNotFoundError, ValueError) as e:
        raise ConfigurationError(str(e)) from e
    try:
        return SimConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(
            f"Invalid configuration {path}: {format_validation_error(e)}"
        ) from e


def write_config(
    config: SimConfig,
    path: Path,
    *,
    indent: int = 2,
    file_permission: int = 0o644,
    dir_permission: int = 0o755,
    encoding: str = "utf-8",
) -> None:
    """Writes a configuration; YAML output carries the field descriptions as comments."""
    data: dict[str, Any] = (
        build_commented_map(config) if StructuredDataIO.is_yaml(path) else config.model_dump(mode="json")
    )
    StructuredDataIO.save(
        path=path,
        data=data,
        indent=indent,
        file_permission=file_permission,
        dir_permission=dir_permission,
        encoding=encoding,
    )


class RunDataIO:
    """IO handler for the artifacts of one run using RunContext."""

    def __init__(self, ctx: RunContext, run_name: str):
        self.ctx = ctx
        self.run_name = run_name
        self.written: list[Path] = []

    @property
    def run_dir(self) -> Path:
        return self.ctx.get_run_dir(self.run_name)

    @property
    def _file_permission(self) -> int:
        return self.ctx.file_permission or 0o644

    @property
    def _dir_permission(self) -> int:
        return self.ctx.dir_permission or 0o755

    def _track(self, path: Path) -> None:
        relative = path.relative_to(self.run_dir)
        if relative not in self.written:
            self.written.append(relative)

    def save_config(self, config: SimConfig) -> None:
        """Saves the validated configuration echo."""
        path = self.ctx.get_config_file(self.run_name)
        write_config(
            config,
            path,
            indent=self.ctx.indent,
            file_permission=self._file_permission,
            dir_permission=self._dir_permission,
            encoding=self.ctx.encoding,
        )
        self._track(path)

    @contextmanager
    def diagnostics_writer(self) -> Iterator["DiagnosticsWriter"]:
        """Opens the diagnostics CSV and yields a row writer."""
        path = self.ctx.get_diagnostics_file(self.run_name)
        path.parent.mkdir(parents=True, exist_ok=True)
        try:
            with open(path, "w", encoding=self.ctx.encoding, newline="") as f:
                writer = DiagnosticsWriter(f)
                yield writer
        except OSError as e:
            raise OSError(f"Failed to write the file: {path}.") from e
        path.chmod(self._file_permission)
        self._track(path)

    def save_snapshot(self, fields: dict[str, Any], step: int) -> None:
        """Writes the configured fields as CSV and PGM."""
        for name in self.ctx.snapshot_fields:
            values = fields[name]
            for suffix, writer in ((".csv", write_field_csv), (".pgm", write_field_pgm)):
                path = self.ctx.get_snapshot_file(self.run_name, name, step, suffix)
                writer(
                    values,
                    path,
                    file_permission=self._file_permission,
                    dir_permission=self._dir_permission,
                )
                self._track(path)

    def save_manifest(self, manifest: RunManifest) -> None:
        """Writes the manifest atomically. It lists every file written before it."""
        path = self.ctx.get_manifest_file(self.run_name)
        StructuredDataIO.save(
            path=path,
            data=manifest.model_dump(mode="json"),
            indent=self.ctx.indent,
            file_permission=self._file_permission,
            dir_permission=self._dir_permission,
            encoding=self.ctx.encoding,
        )

    def load_manifest(self) -> RunManifest:
        path = self.ctx.get_manifest_file(self.run_name)
        return RunManifest.model_validate(StructuredDataIO.load(path, encoding=self.ctx.encoding))


class DiagnosticsWriter:
    """Streams diagnostics rows; the header is written on construction."""

    def __init__(self, stream: TextIO):
        self._writer = csv.writer(stream, lineterminator="\n")
        self._writer.writerow(DIAGNOSTICS_COLUMNS)
        self.rows = 0

    def write(self, record: DiagnosticsRecord) -> None:
        self._writer.writerow(record.csv_row())
        self.rows += 1


class StructuredDataIO:
    """A specialized IO handler for structured text data (JSON and YAML).

    Note: Field arrays and diagnostics tables are handled by `io.fields` and `RunDataIO`.
    """

    @staticmethod
    def is_json(path: Path) -> bool:
        """Checks if the file extension is JSON."""
        return path.suffix.lower() == ".json"

    @staticmethod
    def is_yaml(path: Path) -> bool:
        """Checks if the file extension is YAML."""
        return path.suffix.lower() in (".yaml", ".yml")

    @classmethod
    def save(
        cls,
        path: Path,
        data: dict[str, Any],
        *,
        indent: int = 2,
        file_permission: int = 0o644,
        dir_permission: int = 0o755,
        encoding: str = "utf-8",
    ) -> None:
        """Saves a dictionary to a JSON or YAML file.

        Args:
            path: Path to a JSON/YAML file to save.
            data: A dictionary to save.
            indent: The indentation level for a JSON/YAML file. Defaults to 2.
            file_permission: The permissions for a JSON/YAML file. Defaults to 644.
            dir_permission: The permissions for a parent directory of a JSON/YAML file. Defaults to 755.
            encoding: An encoding for a JSON/YAML file. Defaults to 'utf-8'.

        Raises:
            ValueError: If the file extension is not .json, .yaml, or .yml.
        """
        if cls.is_json(path):
            save_data_to_json(
                data=data,
                output_json_file=path,
                indent=indent,
                file_permission=file_permission,
                dir_permission=dir_permission,
                encoding=encoding,
            )
        elif cls.is_yaml(path):
            save_data_to_yaml(
                data=data,
                output_yaml_file=path,
                indent=indent,
                file_permission=file_permission,
                dir_permission=dir_permission,
                encoding=encoding,
            )
        else:
            raise ValueError(
                f"Unsupported file format: '{path.suffix}'. "
                "StructuredDataIO only supports JSON (.json) and YAML (.yaml, .yml)."
            )

    @classmethod
    def load(cls, path: Path, *, encoding: str = "utf-8") -> dict[str, Any]:
        """Loads data from a JSON or YAML file.

        Args:
            path: Path to a JSON/YAML file to load.
            encoding: An encoding for a JSON/YAML file. Defaults to 'utf-8'.

        Returns:
            A structured data used for instantiation of the relevant class.

        Raises:
            ValueError: If the file extension is not .json, .yaml, or .yml.
        """
        if cls.is_json(path):
            return load_data_from_json(input_json_file=path, encoding=encoding)
        elif cls.is_yaml(path):
            return load_data_from_yaml(input_yaml_file=path, encoding=encoding)
        else:
            raise ValueError(
                f"Unsupported file format: '{path.suffix}'. "
                "StructuredDataIO only supports JSON (.json) and YAML (.yaml, .yml)."
            )


