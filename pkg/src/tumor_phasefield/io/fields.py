"""CSV and PGM serialization of cell fields.

CSV files hold the transposed array: ny rows of nx values, so that a row is a
line of constant y. PGM snapshots are 8-bit binary (P5) after an affine
rescale of the values to [0, 255].
"""

import os
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from tumor_phasefield.schemas.grid import Grid2D


def write_field_csv(
    values: NDArray[np.float64],
    path: Path,
    *,
    file_permission: int = 0o644,
    dir_permission: int = 0o755,
) -> None:
    """Writes a field with full round-trip precision.

    Raises:
        OSError: If the file cannot be written.
    """
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        os.chmod(path.parent, dir_permission)
        np.savetxt(path, values.T, delimiter=",", fmt="%.17g")
        os.chmod(path, file_permission)
    except OSError as e:
        raise OSError(f"Failed to write the file: {path}.") from e


def read_field_csv(path: Path, grid: Grid2D) -> NDArray[np.float64]:
    """Reads a field written by `write_field_csv` and checks it against the grid.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If the file cannot be parsed or its shape does not match the grid.
    """
    if not path.exists():
        raise FileNotFoundError(f"Input file not found: {path}.")
    try:
        table = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as e:
        raise ValueError(f"Error parsing CSV file: {path}.") from e
    if table.shape != (grid.ny, grid.nx):
        raise ValueError(
            f"{path} holds a {table.shape[0]}x{table.shape[1]} table; "
            f"expected {grid.ny} rows of {grid.nx} values."
        )
    return np.ascontiguousarray(table.T)


def write_field_pgm(
    values: NDArray[np.float64],
    path: Path,
    *,
    file_permission: int = 0o644,
    dir_permission: int = 0o755,
) -> None:
    """Writes an 8-bit grayscale snapshot, top row = largest y.

    Raises:
        OSError: If the file cannot be written.
    """
    lo = float(np.min(values))
    hi = float(np.max(values))
    span = hi - lo
    scaled = np.zeros_like(values) if span == 0.0 else (values - lo) / span * 255.0
    image = np.flipud(np.rint(scaled).astype(np.uint8).T)
    height, width = image.shape
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        os.chmod(path.parent, dir_permission)
        with open(path, "wb") as f:
            f.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
            f.write(image.tobytes())
        os.chmod(path, file_permission)
    except OSError as e:
        raise OSError(f"Failed to write the file: {path}.") from e
