"""
Log-concave functions with f(0) = ||f||_inf = 1: indicators, exponentials of
a gauge, and the standard Gaussian, together with their level sets and the
epigraph region L = {(x, t) : f(x) >= e^{-t}}.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from geometry import (Body, GeometryError, contains, minkowski_functional, sample_uniform,
                      volume)
from numerics import DomainError, QuadratureSpec, integrate_exp_weighted

logger = logging.getLogger(__name__)

EPIGRAPH_TOL = 1e-12


class FunctionKind(Enum):
    INDICATOR = "indicator"
    EXPNORM = "expnorm"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True, eq=False)
class LogConcaveFunction:
    """Log-concave function whose level sets are dilates s(t) K of one body K.

    Indicator: s(t) = 1; exponential of the gauge of K: s(t) = t; Gaussian
    e^{-|x|^2/2}: K is the unit ball and s(t) = sqrt(2t).
    """
    kind: FunctionKind
    body: Body

    @classmethod
    def indicator(cls, K: Body) -> "LogConcaveFunction":
        if not contains(K, np.zeros(K.dim)):
            raise GeometryError("indicator needs 0 in K so that f(0) = 1")
        return cls(FunctionKind.INDICATOR, K)

    @classmethod
    def expnorm(cls, K: Body) -> "LogConcaveFunction":
        if not K.origin_interior:
            raise GeometryError("e^{-||x||_K} needs the origin in the interior of K")
        return cls(FunctionKind.EXPNORM, K)

    @classmethod
    def gaussian(cls, dim: int) -> "LogConcaveFunction":
        return cls(FunctionKind.GAUSSIAN, Body.ball(np.zeros(dim), 1.0, label="ball"))

    @property
    def dim(self) -> int:
        return self.body.dim

    @property
    def sup_norm(self) -> float:
        return 1.0

    @property
    def level_exponent(self) -> float:
        """k such that |K_t(f)| is proportional to t**k."""
        return {FunctionKind.INDICATOR: 0.0,
                FunctionKind.EXPNORM: float(self.dim),
                FunctionKind.GAUSSIAN: self.dim / 2.0}[self.kind]

    def level_scale(self, t: float) -> float:
        """Dilation factor s(t) with K_t(f) = s(t) K."""
        if self.kind is FunctionKind.INDICATOR:
            return 1.0
        if self.kind is FunctionKind.EXPNORM:
            return t
        return math.sqrt(2.0 * t)

    def level_time(self, scale: float) -> float:
        """Smallest t with s(t) >= scale (inverse of level_scale)."""
        if self.kind is FunctionKind.INDICATOR:
            return 0.0
        if self.kind is FunctionKind.EXPNORM:
            return scale
        return 0.5 * scale * scale

    def potential(self, x):
        """-log f(x), vectorised over rows of x."""
        if self.kind is FunctionKind.INDICATOR:
            values = np.where(np.asarray(contains(self.body, x)), 0.0, np.inf)
        elif self.kind is FunctionKind.EXPNORM:
            values = np.asarray(minkowski_functional(self.body, x))
        else:
            points = np.asarray(x, dtype=float)
            values = 0.5 * np.sum(points * points, axis=-1)
        return float(values) if values.ndim == 0 else values

    def moment(self, power: float, spec: Optional[QuadratureSpec] = None) -> float:
        """Integral of e^{-t} s(t)**power over [0, T]."""
        if self.kind is FunctionKind.INDICATOR:
            return integrate_exp_weighted(lambda t: 1.0, spec)
        if self.kind is FunctionKind.EXPNORM:
            return integrate_exp_weighted(lambda t: 1.0, spec, power=power)
        return 2.0 ** (power / 2.0) * integrate_exp_weighted(lambda t: 1.0, spec,
                                                             power=power / 2.0)

    def describe(self) -> str:
        if self.kind is FunctionKind.GAUSSIAN:
            return f"gaussian:{self.dim}"
        return f"{self.kind.value}:{self.body.label or 'body'}"

    def __repr__(self) -> str:
        return f"LogConcaveFunction({self.describe()})"


def evaluate(f: LogConcaveFunction, x):
    """f(x) in [0, 1], vectorised over rows of x."""
    potential = f.potential(x)
    if isinstance(potential, np.ndarray):
        return np.exp(-potential)
    return math.exp(-potential) if math.isfinite(potential) else 0.0


def level_set(f: LogConcaveFunction, t: float) -> Body:
    """K_t(f) = {x : f(x) >= e^{-t}}.

    The level set at t = 0 of a non-indicator function is the single point
    {0}; it has no Body representation and is rejected here, while the
    t-integrals treat it as a null set.
    """
    if t < 0:
        raise DomainError(f"level sets need t >= 0, got {t}")
    if f.kind is FunctionKind.INDICATOR:
        return f.body
    if t == 0:
        raise GeometryError("the level set at t = 0 is the point {0}")
    return f.body.scaled(f.level_scale(t))


def level_volume(f: LogConcaveFunction, t: float) -> float:
    """|K_t(f)|, 0 for the degenerate set at t = 0."""
    if t < 0:
        raise DomainError(f"level sets need t >= 0, got {t}")
    return volume(f.body) * f.level_scale(t) ** f.dim


def l1_norm(f: LogConcaveFunction, spec: Optional[QuadratureSpec] = None) -> float:
    """||f||_1 via the layer-cake integral of e^{-t} |K_t(f)|."""
    base = volume(f.body)
    if f.kind is FunctionKind.INDICATOR:
        return base * integrate_exp_weighted(lambda t: 1.0, spec)
    return base * integrate_exp_weighted(lambda t: f.level_scale(t) ** f.dim, spec)


def closed_form_l1_norm(f: LogConcaveFunction) -> float:
    """|K|, n! |K| or (2 pi)^{n/2}."""
    if f.kind is FunctionKind.INDICATOR:
        return volume(f.body)
    if f.kind is FunctionKind.EXPNORM:
        return math.factorial(f.dim) * volume(f.body)
    return (2.0 * math.pi) ** (f.dim / 2.0)


@dataclass(frozen=True, eq=False)
class Epigraph:
    """Region L = {(x, t) : x in K_t(f)} carrying mu = e^{-t} dt dx / weight."""
    f: LogConcaveFunction

    @property
    def dim(self) -> int:
        return self.f.dim


def epigraph_weight(L: Epigraph, spec: Optional[QuadratureSpec] = None) -> float:
    """Normalising constant of mu, equal to ||f||_1."""
    return l1_norm(L.f, spec)


def epigraph_contains(L: Epigraph, x, t):
    """(x, t) in L, vectorised when x has rows and t is an array."""
    times = np.asarray(t, dtype=float)
    if np.any(times < 0):
        raise DomainError("epigraph points need t >= 0")
    result = np.asarray(L.f.potential(x)) <= times + EPIGRAPH_TOL
    return bool(result) if result.ndim == 0 else result


def sample_epigraph(L: Epigraph, count: int, seed: int,
                    t_max: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Points of L: t from an exponential law (capped at t_max), x uniform in K_t(f).

    Returns:
        Tuple of (x with shape (count, n), t with shape (count,))
    """
    rng = np.random.default_rng(seed)
    times = rng.exponential(1.0, size=count) + 1e-9
    if t_max is not None:
        times = np.minimum(times, t_max)
    unit = sample_uniform(L.f.body, count, rng)
    scales = np.array([L.f.level_scale(t) for t in times])
    return unit * scales[:, None], times

