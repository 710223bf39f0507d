"""
Numerical primitives shared by the geometry, functional and Berwald modules.

Provides the exponentially weighted quadrature used for every level-set
integral, interval quadrature, direction grids on the unit sphere, seeded
Monte Carlo estimators and the Gamma function.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

logger = logging.getLogger(__name__)

EULER_GAMMA = 0.577215664901533

# Width of the head panel [0, POWER_SPLIT] where t**power is integrated
# against the algebraic weight instead of being sampled.
POWER_SPLIT = 1e-4

# Smallest sample point handed to a head-panel integrand.
TINY = float(np.finfo(float).tiny)

# Accepted ratio between the reported error bound and the requested tolerance
# when QUADPACK flags roundoff rather than running out of subdivisions.
ROUNDOFF_SLACK = 100.0

SPHERE_MEASURE = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(f"{message} (estimate={estimate:.6g}, error bound={error_bound:.3g})")
        self.estimate = estimate
        self.error_bound = error_bound


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances of the one-dimensional adaptive rules.

    Args:
        rel_tol: Relative tolerance requested from QUADPACK
        abs_tol: Absolute tolerance requested from QUADPACK
        max_subdivisions: Subinterval limit before a QuadratureError is raised
        exp_truncation: Upper limit T replacing infinity under the e^{-t} weight
    """
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_subdivisions: int = 200
    exp_truncation: float = 50.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be a positive integer")
        if self.exp_truncation < 30:
            raise ValueError("exp_truncation must be at least 30")

    def target(self, estimate: float) -> float:
        """Error bound accepted for a result of the given size."""
        return max(self.abs_tol, self.rel_tol * abs(estimate))


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class DirectionGrid:
    """Discretisation of the surface measure of the unit sphere."""
    dim: int
    directions: np.ndarray
    weights: np.ndarray
    angles: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.weights)

    def antipodes(self) -> Optional[np.ndarray]:
        """Index of -u for every direction u, when the grid contains it."""
        count = len(self)
        if self.dim == 1:
            return np.array([1, 0])
        if self.dim == 2 and count % 2 == 0:
            return (np.arange(count) + count // 2) % count
        return None


def gamma_fn(x: float) -> float:
    """Gamma function on the positive half-line."""
    if not x > 0:
        raise DomainError(f"gamma_fn is defined for x > 0, got {x}")
    return float(special.gamma(x))


def unit_ball_volume(n: int) -> float:
    """Lebesgue measure of the Euclidean unit ball in dimension n (1 for n=0)."""
    return math.pi ** (n / 2.0) / gamma_fn(n / 2.0 + 1.0)


def _checked_quad(func: Callable, a: float, b: float, spec: QuadratureSpec,
                  **kwargs) -> Tuple[float, float]:
    result = integrate.quad(func, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                            limit=spec.max_subdivisions, full_output=1, **kwargs)
    value, error = float(result[0]), float(result[1])
    if len(result) > 3:
        # QUADPACK appended a diagnostic: accept roundoff-limited results whose
        # error bound is still close to the request.
        if not np.isfinite(value) or error > ROUNDOFF_SLACK * spec.target(value):
            raise QuadratureError(f"quadrature on [{a:.6g}, {b:.6g}] failed: {result[3]}",
                                  value, error)
        logger.debug("quad on [%.4g, %.4g] accepted with warning: %s", a, b, result[3])
    return value, error


def _interior_points(points: Optional[Sequence[float]], a: float, b: float) -> Optional[list]:
    if points is None:
        return None
    inner = sorted({float(p) for p in points if a < p < b})
    return inner or None


def integrate_interval(phi: Callable[[float], float], a: float, b: float,
                       spec: Optional[QuadratureSpec] = None,
                       points: Optional[Sequence[float]] = None) -> float:
    """Adaptive Gauss-Kronrod quadrature of phi over [a, b].

    Args:
        phi: Scalar integrand
        a: Lower limit
        b: Upper limit, b >= a
        spec: Tolerances (defaults to QuadratureSpec())
        points: Optional break points where phi has kinks or jumps

    Returns:
        The integral estimate
    """
    spec = spec or DEFAULT_SPEC
    if a > b:
        raise DomainError(f"integrate_interval needs a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    value, _ = _checked_quad(phi, a, b, spec, points=_interior_points(points, a, b))
    return value


def integrate_power_weighted(phi: Callable[[float], float], a: float, b: float, power: float,
                             spec: Optional[QuadratureSpec] = None) -> float:
    """Integral of (x - a)**power * phi(x) over [a, b] for power > -1.

    The endpoint singularity is carried by QUADPACK's algebraic weight, so
    phi only needs to be regular on [a, b].
    """
    spec = spec or DEFAULT_SPEC
    if power <= -1:
        raise DomainError(f"power weight needs power > -1, got {power}")
    if a >= b:
        return 0.0
    if power == 0:
        return integrate_interval(phi, a, b, spec)
    value, _ = _checked_quad(phi, a, b, spec, weight="alg", wvar=(power, 0.0))
    return value


def integrate_exp_weighted(phi: Callable[[float], float], spec: Optional[QuadratureSpec] = None,
                           *, power: float = 0.0,
                           points: Optional[Sequence[float]] = None) -> float:
    """Integral of t**power * phi(t) * e^{-t} over [0, exp_truncation].

    phi may carry a log-type singularity at 0 (handled by the extrapolating
    QAGS rule); algebraic singularities t**power with power > -1 must be
    passed through ``power`` so that the head panel is weighted analytically.

    Args:
        phi: Scalar integrand, regular part
        spec: Tolerances and truncation point
        power: Exponent of the endpoint power law at 0
        points: Break points of phi inside (0, T)

    Returns:
        The weighted integral
    """
    spec = spec or DEFAULT_SPEC
    upper = spec.exp_truncation
    if power <= -1:
        raise DomainError(f"integrate_exp_weighted needs power > -1, got {power}")

    def weighted(t: float) -> float:
        return phi(t) * math.exp(-t)

    if power == 0:
        value, _ = _checked_quad(weighted, 0.0, upper, spec,
                                 points=_interior_points(points, 0.0, upper))
        return value

    # QAWS samples the endpoint itself; phi may be singular there
    head, _ = _checked_quad(lambda t: weighted(max(t, TINY)), 0.0, POWER_SPLIT, spec,
                            weight="alg", wvar=(power, 0.0))
    tail, _ = _checked_quad(lambda t: t ** power * weighted(t), POWER_SPLIT, upper, spec,
                            points=_interior_points(points, POWER_SPLIT, upper))
    return head + tail


def gauss_legendre(a: float, b: float, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [a, b]."""
    nodes, weights = np.polynomial.legendre.leggauss(count)
    half = 0.5 * (b - a)
    return a + half * (nodes + 1.0), half * weights


def tensor_gauss(lower: Sequence[float], upper: Sequence[float],
                 count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Tensor-product Gauss-Legendre rule on an axis-aligned box.

    Returns:
        Tuple of (points with shape (count**d, d), weights with shape (count**d,))
    """
    axes = [gauss_legendre(lo, hi, count) for lo, hi in zip(lower, upper)]
    grids = np.meshgrid(*[nodes for nodes, _ in axes], indexing="ij")
    wgrids = np.meshgrid(*[weights for _, weights in axes], indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.prod(np.stack([w.ravel() for w in wgrids], axis=-1), axis=-1)
    return points, weights


def direction_grid(dim: int, count: int) -> DirectionGrid:
    """Equal-weight direction grid on S^{dim-1}.

    dim 1 gives {+1, -1}; dim 2 equally spaced angles starting at 0; dim 3
    the Fibonacci sphere.
    """
    if dim not in SPHERE_MEASURE:
        raise DomainError(f"direction grids exist for dim 1, 2, 3 only, got {dim}")
    if count < 2:
        raise DomainError(f"direction grid needs at least 2 directions, got {count}")

    if dim == 1:
        directions = np.array([[1.0], [-1.0]])
        return DirectionGrid(1, directions, np.ones(2))

    weights = np.full(count, SPHERE_MEASURE[dim] / count)
    if dim == 2:
        angles = 2.0 * math.pi * np.arange(count) / count
        directions = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        return DirectionGrid(2, directions, weights, angles)

    index = np.arange(count)
    z = 1.0 - (2.0 * index + 1.0) / count
    ring = np.sqrt(1.0 - z * z)
    azimuth = index * math.pi * (3.0 - math.sqrt(5.0))
    directions = np.stack([ring * np.cos(azimuth), ring * np.sin(azimuth), z], axis=-1)
    directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    return DirectionGrid(3, directions, weights)


def _box_arrays(box) -> Tuple[np.ndarray, np.ndarray]:
    lower, upper = (np.atleast_1d(np.asarray(side, dtype=float)) for side in box)
    if lower.shape != upper.shape:
        raise DomainError("box corners must have the same dimension")
    if np.any(upper - lower <= 0):
        raise DomainError("Monte Carlo box has a side of zero length")
    return lower, upper


def mc_integrate(integrand: Callable[[np.ndarray], np.ndarray],
                 sampler: Callable[[np.random.Generator, int], np.ndarray],
                 samples: int, seed: int, batch_size: int = 100_000) -> Tuple[float, float]:
    """Mean-value Monte Carlo estimate of E[integrand(X)] for X drawn by sampler.

    The integrand is expected to already carry the inverse sampling density,
    so the mean is the integral. Samples are drawn in batches from a private
    generator seeded with ``seed``.

    Returns:
        Tuple of (estimate, standard error)
    """
    if samples < 1000:
        raise DomainError(f"Monte Carlo needs at least 1000 samples, got {samples}")
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    drawn = 0
    while drawn < samples:
        size = min(batch_size, samples - drawn)
        values = np.asarray(integrand(sampler(rng, size)), dtype=float)
        total += float(values.sum())
        total_sq += float(np.square(values).sum())
        drawn += size
    mean = total / samples
    variance = max(total_sq / samples - mean * mean, 0.0)
    return mean, math.sqrt(variance / samples)


def mc_volume(membership: Callable[[np.ndarray], np.ndarray], box, samples: int,
              seed: int) -> Tuple[float, float]:
    """Hit-or-miss volume of {x in box : membership(x)}.

    Args:
        membership: Vectorised predicate on arrays of shape (m, d)
        box: Pair (lower corner, upper corner)
        samples: Number of uniform points, at least 1000
        seed: Generator seed

    Returns:
        Tuple of (estimate, binomial standard error)
    """
    lower, upper = _box_arrays(box)
    box_volume = float(np.prod(upper - lower))

    def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(lower, upper, size=(size, len(lower)))

    def hits(points: np.ndarray) -> np.ndarray:
        return np.asarray(membership(points), dtype=bool).astype(float)

    fraction, _ = mc_integrate(hits, sampler, samples, seed)
    std_error = box_volume * math.sqrt(fraction * (1.0 - fraction) / samples)
    return box_volume * fraction, std_error
