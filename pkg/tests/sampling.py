import numpy as np


def sample_triangle(
    rng: np.random.Generator, vertices: np.ndarray, size: int
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform samples in the triangle with the given (3, 2) vertices."""
    u = rng.uniform(size=size)
    v = rng.uniform(size=size)
    flip = u + v > 1.0
    u[flip], v[flip] = 1.0 - u[flip], 1.0 - v[flip]
    a, b, c = vertices
    points = a + u[:, None] * (b - a) + v[:, None] * (c - a)
    return points[:, 0], points[:, 1]


def shrunken_vertices(margin: float) -> np.ndarray:
    return np.array(
        [[margin, margin], [1.0 - 2.0 * margin, margin], [margin, 1.0 - 2.0 * margin]]
    )


def interior_points(rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform points of the open simplex, a tenth of them pushed towards an edge or vertex."""
    fractions = rng.dirichlet(np.ones(3), size=size)
    near = rng.uniform(size=size) < 0.1
    component = rng.integers(0, 3, size=size)
    scale = 10.0 ** rng.uniform(-8.0, -1.0, size=size)
    rows = np.flatnonzero(near)
    fractions[rows, component[rows]] *= scale[rows]
    fractions /= fractions.sum(axis=1, keepdims=True)
    return fractions[:, 0], fractions[:, 1]
