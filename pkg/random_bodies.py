"""
Random convex bodies, affine maps and density samplers for the randomized checks
"""

import numpy as np
from scipy.spatial import ConvexHull

from geometry import Body, GeometryError, polygon_area, sample_uniform, volume
from logconcave import LogConcaveFunction
from numerics import gamma_fn

MIN_TRIANGLE_AREA = 0.1
MIN_CONDITION = 1e-2


def random_triangle(rng: np.random.Generator, low: float = -2.0, high: float = 2.0) -> Body:
    """
    Draw a triangle with vertices uniform in [low, high]^2.

    Near-degenerate draws (area below 0.1) are rejected and redrawn.

    Args:
        rng: Random generator
        low: Lower coordinate bound
        high: Upper coordinate bound

    Returns:
        Simplex body labelled "random-triangle"
    """
    while True:
        vertices = rng.uniform(low, high, size=(3, 2))
        if abs(polygon_area(vertices)) > MIN_TRIANGLE_AREA:
            return Body.simplex(vertices, label="random-triangle")


def random_polygon(rng: np.random.Generator, count: int = 12, radius: float = 1.0) -> Body:
    """Convex hull of ``count`` uniform points of the disk of the given radius."""
    if count < 3:
        raise GeometryError("a polygon needs at least 3 points")
    while True:
        angles = rng.uniform(0.0, 2.0 * np.pi, size=count)
        radii = radius * np.sqrt(rng.uniform(size=count))
        points = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
        hull = ConvexHull(points)
        if hull.volume > MIN_TRIANGLE_AREA:
            return Body.vpolytope(points[hull.vertices], label="random-polygon")


def random_affine_map(rng: np.random.Generator, dim: int):
    """Random (M, v) with entries uniform in [-2, 2] and |det M| >= 0.01."""
    while True:
        M = rng.uniform(-2.0, 2.0, size=(dim, dim))
        if abs(np.linalg.det(M)) >= MIN_CONDITION:
            return M, rng.uniform(-1.0, 1.0, size=dim)


def sample_function_density(f: LogConcaveFunction, count: int, rng: np.random.Generator,
                            exponent: float = 1.0) -> np.ndarray:
    """
    Draw points with density proportional to f^exponent.

    The level sets of f^exponent are K_{t/exponent}(f), so the level t has
    density proportional to e^{-t} t^k (a Gamma(k+1) law) and the point is
    uniform on that level set.
    """
    if exponent <= 0:
        raise ValueError("exponent must be positive")
    times = rng.gamma(f.level_exponent + 1.0, 1.0, size=count)
    unit = sample_uniform(f.body, count, rng)
    scales = np.array([f.level_scale(t / exponent) for t in times])
    return unit * scales[:, None]


def density_mass(f: LogConcaveFunction, exponent: float = 1.0) -> float:
    """int f^exponent = |K| Gamma(k+1) s(1/exponent)^n, with s(t)^n proportional to t^k."""
    return (volume(f.body) * gamma_fn(f.level_exponent + 1.0)
            * f.level_scale(1.0 / exponent) ** f.dim)
