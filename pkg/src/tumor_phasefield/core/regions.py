"""Geometry of admissible regions inside the simplex.

A ShrunkenSimplex with margin m and rounding rho is the Minkowski sum of the
core triangle (every edge of {s >= m, r >= m, s + r <= 1 - m} pulled inwards
by rho) with the disk of radius rho. Its straight edges lie on the lines of the
sharp triangle and its vertices are circular arcs, so the outer normal is
defined everywhere on the boundary.
"""

import math
from typing import Final

import numpy as np
from numpy.typing import ArrayLike, NDArray

from tumor_phasefield.errors import RegionError
from tumor_phasefield.schemas.sources import AdmissibleRegion, Disk, ShrunkenSimplex

DEFAULT_BOUNDARY_SAMPLES: Final[int] = 720
SQRT2: Final[float] = math.sqrt(2.0)

FloatArray = NDArray[np.float64]

# outward unit normals of the edges A->B, B->C and C->A of the core triangle
_EDGE_NORMALS: Final = np.array([[0.0, -1.0], [1.0 / SQRT2, 1.0 / SQRT2], [-1.0, 0.0]])


def _core_triangle(region: ShrunkenSimplex) -> FloatArray:
    """Vertices A, B, C of the core triangle in counter-clockwise order."""
    rho = region.rounding
    a = region.margin + rho
    b = 1.0 - region.margin - rho * SQRT2 - a
    return np.array([[a, a], [b, a], [a, b]])


def validate_region(region: AdmissibleRegion) -> None:
    """Checks that the region is contained in the open simplex.

    Raises:
        RegionError: If some point of the region lies on or outside the simplex boundary.
    """
    if isinstance(region, Disk):
        c = region.center
        clearance = min(c.s, c.r, c.host / SQRT2)
        if clearance <= region.radius:
            raise RegionError(
                f"Disk centered at ({c.s}, {c.r}) with radius {region.radius} is not "
                f"contained in the open simplex (clearance {clearance:.6g})."
            )
    # a shrunken simplex is interior by construction: its edges sit at distance margin > 0


def signed_distance(region: AdmissibleRegion, y_p: ArrayLike, y_d: ArrayLike) -> FloatArray:
    """Signed distance to the region boundary, negative inside."""
    yp = np.asarray(y_p, dtype=np.float64)
    yd = np.asarray(y_d, dtype=np.float64)
    if isinstance(region, Disk):
        return np.hypot(yp - region.center.s, yd - region.center.r) - region.radius
    return _triangle_signed_distance(_core_triangle(region), yp, yd) - region.rounding


def _triangle_signed_distance(vertices: FloatArray, yp: FloatArray, yd: FloatArray) -> FloatArray:
    points = np.stack(np.broadcast_arrays(yp, yd), axis=-1)
    offsets = np.einsum("ek,...k->...e", _EDGE_NORMALS, points) - np.einsum(
        "ek,ek->e", _EDGE_NORMALS, vertices
    )
    inside_value = offsets.max(axis=-1)

    # outside: distance to the closest edge segment
    dist = np.full(points.shape[:-1], np.inf)
    for k in range(3):
        start = vertices[k]
        edge = vertices[(k + 1) % 3] - start
        t = np.clip(((points - start) @ edge) / (edge @ edge), 0.0, 1.0)
        closest = start + np.asarray(t)[..., None] * edge
        dist = np.minimum(dist, np.linalg.norm(points - closest, axis=-1))
    return np.where(inside_value <= 0.0, inside_value, dist)


def contains(
    region: AdmissibleRegion, y_p: float, y_d: float, slack: float = 0.0
) -> bool:
    return bool(signed_distance(region, y_p, y_d) <= slack)


def contains_interior(region: AdmissibleRegion, y_p: float, y_d: float) -> bool:
    return bool(signed_distance(region, y_p, y_d) < 0.0)


def sample_boundary(
    region: AdmissibleRegion, n_samples: int = DEFAULT_BOUNDARY_SAMPLES
) -> tuple[FloatArray, FloatArray]:
    """Samples the boundary uniformly in arc length.

    Returns:
        (points, normals), both of shape (n_samples, 2); normals are outer unit normals.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be positive, got {n_samples}.")
    if isinstance(region, Disk):
        angles = 2.0 * np.pi * np.arange(n_samples) / n_samples
        normals = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        center = np.array([region.center.s, region.center.r])
        return center + region.radius * normals, normals
    return _sample_rounded_triangle(region, n_samples)


def _sample_rounded_triangle(
    region: ShrunkenSimplex, n_samples: int
) -> tuple[FloatArray, FloatArray]:
    vertices = _core_triangle(region)
    rho = region.rounding
    normal_angles = np.arctan2(_EDGE_NORMALS[:, 1], _EDGE_NORMALS[:, 0])

    # pieces: edge k, then the arc at the end vertex of edge k
    pieces: list[tuple[str, int, float, float]] = []
    for k in range(3):
        start, end = vertices[k], vertices[(k + 1) % 3]
        pieces.append(("edge", k, 0.0, float(np.linalg.norm(end - start))))
        a0 = normal_angles[k]
        a1 = normal_angles[(k + 1) % 3]
        sweep = (a1 - a0) % (2.0 * np.pi)
        pieces.append(("arc", k, float(a0), rho * sweep))

    lengths = np.array([p[3] for p in pieces])
    breaks = np.concatenate([[0.0], np.cumsum(lengths)])
    arclength = breaks[-1] * np.arange(n_samples) / n_samples

    points = np.empty((n_samples, 2))
    normals = np.empty((n_samples, 2))
    for idx, s in enumerate(arclength):
        piece = min(int(np.searchsorted(breaks, s, side="right")) - 1, len(pieces) - 1)
        kind, k, a0, length = pieces[piece]
        local = s - breaks[piece]
        if kind == "edge":
            start, end = vertices[k], vertices[(k + 1) % 3]
            normal = _EDGE_NORMALS[k]
            points[idx] = start + (local / length) * (end - start) + rho * normal
            normals[idx] = normal
        else:
            angle = a0 + local / rho
            normal = np.array([np.cos(angle), np.sin(angle)])
            points[idx] = vertices[(k + 1) % 3] + rho * normal
            normals[idx] = normal
    return points, normals


def confinement_constants(region: AdmissibleRegion) -> tuple[float, float]:
    """Bounds (c1, c2) with c1 <= y_p, y_d and c1 <= y_p + y_d <= c2 on the whole region."""
    if isinstance(region, Disk):
        c = region.center
        c1 = min(c.s, c.r) - region.radius
        c2 = c.s + c.r + SQRT2 * region.radius
        return c1, c2
    return region.margin, 1.0 - region.margin
