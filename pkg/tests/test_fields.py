from pathlib import Path

import numpy as np
import pytest

from tumor_phasefield.io.fields import read_field_csv, write_field_csv, write_field_pgm
from tumor_phasefield.schemas.grid import Grid2D


def test_csv_rows_are_lines_of_constant_y(tmp_path: Path) -> None:
    # Arrange
    grid = Grid2D(nx=4, ny=6)
    values = np.arange(24.0).reshape(grid.shape) / 7.0
    path = tmp_path / "field.csv"

    # Act
    write_field_csv(values, path)
    lines = path.read_text().splitlines()
    restored = read_field_csv(path, grid)

    # Assert
    assert len(lines) == grid.ny
    assert all(len(line.split(",")) == grid.nx for line in lines)
    np.testing.assert_array_equal(restored, values)


def test_csv_shape_must_match_the_grid(tmp_path: Path) -> None:
    # Arrange
    path = tmp_path / "field.csv"
    write_field_csv(np.zeros((4, 6)), path)

    # Act & Assert
    with pytest.raises(ValueError, match="expected 4 rows of 6 values"):
        read_field_csv(path, Grid2D(nx=6, ny=4))


def test_missing_csv(tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError):
        read_field_csv(tmp_path / "absent.csv", Grid2D(nx=4, ny=4))


def test_pgm_header_and_scaling(tmp_path: Path) -> None:
    # Arrange
    values = np.zeros((5, 4))
    values[4, 3] = 2.0
    path = tmp_path / "field.pgm"

    # Act
    write_field_pgm(values, path)
    data = path.read_bytes()

    # Assert
    header = b"P5\n5 4\n255\n"
    assert data.startswith(header)
    pixels = np.frombuffer(data[len(header) :], dtype=np.uint8).reshape(4, 5)
    # largest x and y sit in the top-right pixel
    assert pixels[0, 4] == 255
    assert pixels.sum() == 255


def test_constant_field_gives_a_black_image(tmp_path: Path) -> None:
    # Arrange
    path = tmp_path / "flat.pgm"

    # Act
    write_field_pgm(np.full((4, 4), 0.3), path)

    # Assert
    assert set(path.read_bytes()[len(b"P5\n4 4\n255\n") :]) == {0}
