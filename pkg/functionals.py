"""
Objects built from a log-concave function f: the covariogram functional g_f,
Ball bodies K~_p(g), the polar projection bodies of a body and of f, and the
chord-power integral linking them.

Every representable f has level sets K_t(f) = s(t) K, so t-integrals of
dilation-covariant quantities factor into a one-dimensional moment of s(t)
times a quantity of the base body K.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property, lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from geometry import (Body, GeometryError, bounding_box, chord_interval, chord_moment,
                      covariogram_body, difference_body, integrate_over_body, max_chord,
                      minkowski_functional, one_sided_chord, project_volume, project_volumes,
                      radial, volume)
from logconcave import FunctionKind, LogConcaveFunction, evaluate, l1_norm
from numerics import (DEFAULT_SPEC, DirectionGrid, DomainError, QuadratureError, QuadratureSpec,
                      gamma_fn, integrate_exp_weighted, integrate_interval,
                      integrate_power_weighted, tensor_gauss, unit_ball_volume)

logger = logging.getLogger(__name__)

# Level beyond which f < 1e-16; rays and boxes are cut at K_T for this T.
DECAY_LEVEL = 16.0 * math.log(10.0)
MIN_INTEGRAL_NODES = 96
COVARIOGRAM_DIM3_NODES = 20
DIVERGENCE_BOUND = 1e12


@dataclass(frozen=True)
class StarBody:
    """Star body known through its radial function on a direction grid."""
    grid: DirectionGrid
    radii: np.ndarray

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        if radii.shape != (len(self.grid),):
            raise ValueError("need exactly one radius per grid direction")
        if not np.all(np.isfinite(radii)) or np.any(radii <= 0):
            raise ValueError("star body radii must be positive and finite")
        radii.setflags(write=False)
        object.__setattr__(self, "radii", radii)

    @property
    def dim(self) -> int:
        return self.grid.dim

    def scaled(self, factor: float) -> "StarBody":
        return StarBody(self.grid, self.radii * factor)


def star_volume(S: StarBody) -> float:
    """(1/n) sum_i w_i rho_i^n, the polar-coordinate volume."""
    return float(np.sum(S.grid.weights * S.radii ** S.dim)) / S.dim


def radial_table(S: StarBody) -> pd.DataFrame:
    """Sampled radial function as a table (theta_or_index, u1.., rho)."""
    index = S.grid.angles if S.grid.angles is not None else np.arange(len(S.grid))
    table = {"theta_or_index": index}
    for axis in range(S.dim):
        table[f"u{axis + 1}"] = S.grid.directions[:, axis]
    table["rho"] = S.radii
    return pd.DataFrame(table)


class CovariogramMethod(Enum):
    LEVEL_SET = "level-set"
    MIN_INTEGRAL = "min-integral"


@lru_cache(maxsize=8192)
def _body_ray_moment(K: Body, direction: Tuple[float, ...], p: float,
                     spec: QuadratureSpec) -> float:
    """Integral of r^{p-1} g_K(r u) over [0, longest chord along u]."""
    u = np.array(direction)
    reach = max_chord(K, u)
    return integrate_power_weighted(lambda r: covariogram_body(K, r * u), 0.0, reach, p - 1.0, spec)


@dataclass(frozen=True, eq=False)
class CovariogramFn:
    """g_f(x) = int_0^inf e^{-t} |K_t(f) cap (x + K_t(f))| dt."""
    f: LogConcaveFunction
    method: CovariogramMethod = CovariogramMethod.LEVEL_SET
    spec: QuadratureSpec = DEFAULT_SPEC

    @property
    def dim(self) -> int:
        return self.f.dim

    @cached_property
    def at_origin(self) -> float:
        """g_f(0) = ||f||_1, the maximum of g_f."""
        return l1_norm(self.f, self.spec)

    def __call__(self, x) -> float:
        return covariogram_fn(self.f, x, self.method, self.spec)

    def integral(self) -> float:
        """int g_f = int_0^inf e^{-t} |K_t(f)|^2 dt."""
        return volume(self.f.body) ** 2 * self.f.moment(2.0 * self.dim, self.spec)

    def quadrature_integral(self) -> float:
        """int g_f by n-dim quadrature of g_K over K - K; the t-integral of s(t)^{2n} is exact."""
        return (self.f.moment(2.0 * self.dim, self.spec)
                * body_covariogram_integral(self.f.body, self.spec))

    def ray_moment(self, u, p: float) -> float:
        """int_0^inf r^{p-1} g_f(r u) dr for p > 0."""
        if p <= 0:
            raise DomainError(f"ray moments need p > 0, got {p}")
        u = _unit(u, self.dim)
        return (self.f.moment(self.dim + p, self.spec)
                * _body_ray_moment(self.f.body, tuple(float(c) for c in u), float(p), self.spec))

    def __repr__(self) -> str:
        return f"CovariogramFn({self.f.describe()}, {self.method.value})"


def body_covariogram_integral(K: Body, spec: Optional[QuadratureSpec] = None) -> float:
    """int g_K over its support K - K (equal to |K|^2)."""

    def values(points: np.ndarray) -> np.ndarray:
        return np.array([covariogram_body(K, point) for point in points])

    return integrate_over_body(difference_body(K), values, spec, nodes=COVARIOGRAM_DIM3_NODES)


def _unit(u, dim: int) -> np.ndarray:
    u = np.asarray(u, dtype=float).reshape(dim)
    norm = float(np.linalg.norm(u))
    if norm <= 0:
        raise DomainError("direction must be nonzero")
    return u / norm


def covariogram_fn(f: LogConcaveFunction, x,
                   method: CovariogramMethod = CovariogramMethod.LEVEL_SET,
                   spec: Optional[QuadratureSpec] = None) -> float:
    """Covariogram functional g_f(x).

    Args:
        f: Log-concave function
        x: Point of R^n
        method: LEVEL_SET integrates the body covariogram of K_t(f) against
            e^{-t}; MIN_INTEGRAL integrates min(f(y), f(y - x)) over y
        spec: Tolerances

    Returns:
        The value of g_f at x
    """
    spec = spec or DEFAULT_SPEC
    x = np.asarray(x, dtype=float).reshape(f.dim)
    if method is CovariogramMethod.MIN_INTEGRAL:
        return _min_integral(f, x, spec)

    K, n = f.body, f.dim
    start = f.level_time(float(minkowski_functional(difference_body(K), x)))

    def overlap(t: float) -> float:
        scale = f.level_scale(t)
        if scale <= 0:
            return 0.0
        return scale ** n * covariogram_body(K, x / scale)

    return integrate_exp_weighted(overlap, spec, points=[start])


def _min_integral(f: LogConcaveFunction, x: np.ndarray, spec: QuadratureSpec) -> float:
    loose = replace(spec, rel_tol=max(spec.rel_tol, 1e-7), abs_tol=max(spec.abs_tol, 1e-9))
    K = f.body
    reach = f.level_scale(DECAY_LEVEL) if f.kind is not FunctionKind.INDICATOR else 1.0
    lower, upper = bounding_box(K.scaled(reach))
    lower, upper = np.minimum(lower, lower + x), np.maximum(upper, upper + x)

    def smaller(points: np.ndarray) -> np.ndarray:
        return np.minimum(evaluate(f, points), evaluate(f, points - x))

    if f.dim == 1:
        breaks = [0.0, x[0]]
        if K.is_polytope:
            corners = K.vertices[:, 0] * reach
            breaks += list(corners) + list(corners + x[0])
        return integrate_interval(lambda y: float(smaller(np.array([[y]]))[0]),
                                  float(lower[0]), float(upper[0]), loose, points=breaks)

    if f.dim == 2:
        ray_slopes = []
        if f.kind is FunctionKind.EXPNORM and K.is_polytope:
            ray_slopes = [v for v in K.vertices if abs(v[0]) > 1e-12]
        e2 = np.array([0.0, 1.0])

        def column(y1: float) -> float:
            breaks = [0.0, x[1]]
            for v in ray_slopes:
                breaks.append(y1 * v[1] / v[0])
                breaks.append(x[1] + (y1 - x[0]) * v[1] / v[0])
            if f.kind is FunctionKind.INDICATOR:
                for shift in (np.zeros(2), x):
                    low, high = chord_interval(K, np.array([y1 - shift[0], 0.0]), e2)
                    breaks += [float(low[0]) + shift[1], float(high[0]) + shift[1]]
            return integrate_interval(lambda y2: float(smaller(np.array([[y1, y2]]))[0]),
                                      float(lower[1]), float(upper[1]), loose, points=breaks)

        outer = [0.0, x[0]]
        if K.is_polytope:
            corners = K.vertices[:, 0] * reach
            outer += list(corners) + list(corners + x[0])
        return integrate_interval(column, float(lower[0]), float(upper[0]), loose, points=outer)

    points, weights = tensor_gauss(lower, upper, MIN_INTEGRAL_NODES)
    return float(np.sum(smaller(points) * weights))


CovariogramInput = Union[CovariogramFn, LogConcaveFunction]


def _ray_integral(g: CovariogramInput, u: np.ndarray, p: float,
                  spec: QuadratureSpec) -> Tuple[float, float]:
    """(int_0^inf r^{p-1} g(r u) dr, g(0))."""
    if isinstance(g, CovariogramFn):
        return g.ray_moment(u, p), g.at_origin
    K = g.body
    if g.kind is FunctionKind.INDICATOR:
        reach = float(one_sided_chord(K, np.zeros(g.dim), u))
        return integrate_power_weighted(lambda r: 1.0, 0.0, reach, p - 1.0, spec), 1.0
    reach = g.level_scale(DECAY_LEVEL) * float(radial(K, u))
    moment = integrate_power_weighted(lambda r: evaluate(g, r * u), 0.0, reach, p - 1.0, spec)
    return moment, 1.0


def ball_body_radial(g: CovariogramInput, p: float, u,
                     spec: Optional[QuadratureSpec] = None) -> float:
    """Radial function of K~_p(g): [(p / g(0)) int_0^inf r^{p-1} g(r u) dr]^{1/p}."""
    spec = spec or DEFAULT_SPEC
    if p <= 0:
        raise DomainError(f"Ball bodies are defined for p > 0, got {p}")
    u = _unit(u, g.dim)
    moment, at_origin = _ray_integral(g, u, p, spec)
    if at_origin <= 0:
        raise DomainError("Ball bodies need g(0) > 0")
    value = p * moment / at_origin
    if not math.isfinite(value) or value > DIVERGENCE_BOUND:
        raise QuadratureError("radial moment diverges", value, math.inf)
    if value <= 0:
        raise GeometryError(f"Ball body has empty radius in direction {u}")
    return value ** (1.0 / p)


def ball_body(g: CovariogramInput, p: float, grid: DirectionGrid,
              spec: Optional[QuadratureSpec] = None) -> StarBody:
    """K~_p(g) sampled on grid; covariograms are even, so antipodes are mirrored."""
    spec = spec or DEFAULT_SPEC
    radii = np.empty(len(grid))
    antipodes = grid.antipodes() if isinstance(g, CovariogramFn) else None
    for index, u in enumerate(grid.directions):
        if antipodes is not None and antipodes[index] < index:
            radii[index] = radii[antipodes[index]]
            continue
        radii[index] = ball_body_radial(g, p, u, spec)
    logger.debug("ball body p=%s over %d directions", p, len(grid))
    return StarBody(grid, radii)


def polar_projection_body(K: Body, grid: DirectionGrid) -> StarBody:
    """Pi*(K) with rho(u) = 1 / |P_{u-perp} K|."""
    if K.dim < 2:
        raise GeometryError("polar projection bodies need dimension 2 or 3")
    shadows = project_volumes(K, grid.directions)
    if np.any(shadows <= 0):
        raise GeometryError("body has a degenerate projection")
    return StarBody(grid, 1.0 / shadows)


def polar_projection_fn(f: LogConcaveFunction, grid: DirectionGrid,
                        spec: Optional[QuadratureSpec] = None) -> StarBody:
    """Pi*(f) with rho(u) = 1 / (2 int_0^inf e^{-t} |P_{u-perp} K_t(f)| dt)."""
    if f.dim < 2:
        raise GeometryError("polar projection bodies need dimension 2 or 3")
    shadow_moment = f.moment(f.dim - 1.0, spec)
    shadows = project_volumes(f.body, grid.directions)
    return StarBody(grid, 1.0 / (2.0 * shadow_moment * shadows))


def projection_product(K: Body, grid: DirectionGrid) -> float:
    """Affine invariant |K|^{n-1} |Pi*(K)|."""
    return volume(K) ** (K.dim - 1) * star_volume(polar_projection_body(K, grid))


def zhang_body_bounds(n: int) -> Tuple[float, float]:
    """(binom(2n, n) / n^n, |B^n|^n / |B^{n-1}|^n)."""
    lower = math.comb(2 * n, n) / n ** n
    upper = (unit_ball_volume(n) / unit_ball_volume(n - 1)) ** n
    return lower, upper


def chord_power_integral(f: LogConcaveFunction, u, p: float,
                         spec: Optional[QuadratureSpec] = None) -> float:
    """(1/((p+1)||f||_1)) int e^{-t} int_{P K_t} |K_t cap (y + <u>)|^{p+1} dy dt."""
    spec = spec or DEFAULT_SPEC
    if p <= -1:
        raise DomainError(f"chord powers need p > -1, got {p}")
    u = _unit(u, f.dim)
    chords = chord_moment(f.body, u, lambda c: c ** (p + 1.0), spec)
    return f.moment(f.dim + p, spec) * chords / ((p + 1.0) * l1_norm(f, spec))


def projection_gauge(f: LogConcaveFunction, u, spec: Optional[QuadratureSpec] = None) -> float:
    """||u||_{Pi*(f)} = 2 |u| int_0^inf e^{-t} |P_{u-perp} K_t(f)| dt."""
    u = np.asarray(u, dtype=float).reshape(f.dim)
    length = float(np.linalg.norm(u))
    return 2.0 * length * f.moment(f.dim - 1.0, spec) * project_volume(f.body, u / length)


@dataclass(frozen=True)
class LimitRow:
    p: float
    lhs: float
    target: float
    gap: float


def remark3_limit_check(f: LogConcaveFunction, u, p_sequence: Sequence[float],
                        spec: Optional[QuadratureSpec] = None) -> List[LimitRow]:
    """Approach of chord_power_integral / Gamma(1+p) to ||u||_{Pi*f} / (2||f||_1) as p -> -1."""
    spec = spec or DEFAULT_SPEC
    values = [float(p) for p in p_sequence]
    if any(not -1.0 < p < 0.0 for p in values):
        raise DomainError("limit sequence must lie in (-1, 0)")
    if any(b >= a for a, b in zip(values, values[1:])):
        raise DomainError("limit sequence must decrease toward -1")
    u = _unit(u, f.dim)
    target = projection_gauge(f, u, spec) / (2.0 * l1_norm(f, spec))
    rows = []
    for p in values:
        lhs = chord_power_integral(f, u, p, spec) / gamma_fn(1.0 + p)
        rows.append(LimitRow(p, lhs, target, abs(lhs - target)))
    return rows
