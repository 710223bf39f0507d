"""
Berwald-type moment functionals.

phi_gamma is the Gamma-normalised p-moment of a concave profile against e^{-r};
berwald_epigraph is its analogue for a concave witness h on the epigraph L of a
log-concave function; berwald_classical and holder_mean are the body versions.
rearranged_gamma reduces (L, h) to a profile with the same distribution.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from scipy.special import digamma, gammaln

from geometry import (Body, bounding_box, chord_length, chord_moment, clipped_volume, contains,
                      covariogram_body, integrate_over_body, max_chord, one_sided_chord,
                      sample_uniform, support_value, volume)
from logconcave import Epigraph, FunctionKind, LogConcaveFunction, epigraph_weight, sample_epigraph
from numerics import (DEFAULT_SPEC, EULER_GAMMA, DomainError, QuadratureError, QuadratureSpec,
                      gamma_fn, integrate_exp_weighted, integrate_interval,
                      integrate_power_weighted, tensor_gauss)

logger = logging.getLogger(__name__)

DIVERGENCE_BOUND = 1e12
PROFILE_SAMPLES = 100
WITNESS_SAMPLES = 500
CONCAVITY_SLACK = 1e-10
REARRANGEMENT_SPAN = 20.0
REARRANGEMENT_NODES = 64
BISECTION_XTOL = 1e-9
TOUCH_TOL = 1e-10
AFFINE_DIM3_NODES = 48


class DivergentIntegralError(ArithmeticError):
    """A negative moment is infinite."""

    def __init__(self, p: float, estimate: float, message: str = "moment diverges"):
        super().__init__(f"{message} at p={p} (estimate={estimate:.6g})")
        self.p = p
        self.estimate = estimate


class AdmissibilityError(ValueError):
    """Profile or witness violates non-negativity, monotonicity or concavity."""


def _check_finite(p: float, value: float) -> float:
    if not math.isfinite(value) or abs(value) > DIVERGENCE_BOUND:
        raise DivergentIntegralError(p, value)
    return value


class ProfileKind(Enum):
    LINEAR = "linear"
    POWER = "power"
    CONSTANT = "constant"
    PIECEWISE_LINEAR = "piecewise"
    SAMPLED = "sampled"


@dataclass(frozen=True, eq=False)
class MomentProfile:
    """Concave non-decreasing gamma : [0, inf) -> [0, inf).

    coefficient is c for LINEAR and CONSTANT and the exponent alpha for POWER.
    PIECEWISE_LINEAR continues with its last slope; SAMPLED is a monotone
    cubic interpolant held constant outside its knots.
    """
    kind: ProfileKind
    coefficient: float = 1.0
    knots: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None

    @classmethod
    def linear(cls, c: float) -> "MomentProfile":
        if not c > 0:
            raise AdmissibilityError("linear profile needs c > 0")
        return cls(ProfileKind.LINEAR, float(c))

    @classmethod
    def power(cls, alpha: float) -> "MomentProfile":
        if not 0 < alpha <= 1:
            raise AdmissibilityError("power profile needs alpha in (0, 1]")
        return cls(ProfileKind.POWER, float(alpha))

    @classmethod
    def constant(cls, c: float) -> "MomentProfile":
        if not c > 0:
            raise AdmissibilityError("constant profile needs c > 0")
        return cls(ProfileKind.CONSTANT, float(c))

    @classmethod
    def piecewise_linear(cls, knots: Sequence[float], values: Sequence[float]) -> "MomentProfile":
        knots = np.asarray(knots, dtype=float)
        values = np.asarray(values, dtype=float)
        if knots.shape != values.shape or len(knots) < 2:
            raise AdmissibilityError("piecewise profile needs at least two (r, value) knots")
        if knots[0] != 0 or np.any(np.diff(knots) <= 0):
            raise AdmissibilityError("knots must start at 0 and increase")
        slopes = np.diff(values) / np.diff(knots)
        if values[0] < 0 or np.any(slopes < 0) or np.any(np.diff(slopes) > CONCAVITY_SLACK):
            raise AdmissibilityError("piecewise profile must be nonnegative, non-decreasing, concave")
        if np.all(values == 0):
            raise AdmissibilityError("profile is identically zero")
        return cls(ProfileKind.PIECEWISE_LINEAR, knots=knots, values=values)

    @classmethod
    def sampled(cls, knots: Sequence[float], values: Sequence[float]) -> "MomentProfile":
        knots = np.asarray(knots, dtype=float)
        values = np.maximum.accumulate(np.maximum(np.asarray(values, dtype=float), 0.0))
        if np.any(np.diff(knots) <= 0):
            raise AdmissibilityError("sample knots must increase")
        return cls(ProfileKind.SAMPLED, knots=knots, values=values)

    def __post_init__(self):
        if self.kind is ProfileKind.SAMPLED:
            object.__setattr__(self, "_interpolant", PchipInterpolator(self.knots, self.values))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind is ProfileKind.LINEAR:
            out = self.coefficient * r
        elif self.kind is ProfileKind.POWER:
            out = np.power(np.maximum(r, 0.0), self.coefficient)
        elif self.kind is ProfileKind.CONSTANT:
            out = np.full_like(r, self.coefficient)
        elif self.kind is ProfileKind.PIECEWISE_LINEAR:
            slope = (self.values[-1] - self.values[-2]) / (self.knots[-1] - self.knots[-2])
            out = np.where(r <= self.knots[-1], np.interp(r, self.knots, self.values),
                           self.values[-1] + slope * (r - self.knots[-1]))
        else:
            out = self._interpolant(np.clip(r, self.knots[0], self.knots[-1]))
        return float(out) if out.ndim == 0 else out

    @property
    def vanishing_order(self) -> float:
        """beta with gamma(r) ~ r^beta near 0 (0 when gamma(0) > 0 or unknown)."""
        if self.kind is ProfileKind.LINEAR:
            return 1.0
        if self.kind is ProfileKind.POWER:
            return self.coefficient
        if self.kind is ProfileKind.PIECEWISE_LINEAR and self.values[0] == 0:
            return 1.0
        return 0.0

    def regular_part(self, r: float) -> float:
        """gamma(r) / r^beta, bounded near 0."""
        beta = self.vanishing_order
        if beta == 0:
            return float(self(r))
        r = max(r, 1e-300)
        return float(self(r)) / r ** beta

    def span(self) -> float:
        if self.knots is not None:
            return float(self.knots[-1]) * (1.0 if self.kind is ProfileKind.SAMPLED else 2.0)
        return 10.0

    def check_admissible(self) -> None:
        """Sampled non-negativity, monotonicity and midpoint concavity."""
        r = np.linspace(0.0, self.span(), PROFILE_SAMPLES)
        values = np.asarray(self(r))
        if np.any(values < 0):
            raise AdmissibilityError("profile takes negative values")
        if np.any(np.diff(values) < -CONCAVITY_SLACK):
            raise AdmissibilityError("profile is not non-decreasing")
        if self.kind is ProfileKind.SAMPLED:
            return
        midpoints = np.asarray(self(0.5 * (r[:, None] + r[None, :])))
        chords = 0.5 * (values[:, None] + values[None, :])
        if np.any(midpoints < chords - CONCAVITY_SLACK):
            raise AdmissibilityError("profile is not concave")

    def describe(self) -> str:
        if self.knots is None:
            return f"{self.kind.value}:{self.coefficient:g}"
        return f"{self.kind.value}:{len(self.knots)} knots"


def phi_gamma(gamma: MomentProfile, p: float, spec: Optional[QuadratureSpec] = None) -> float:
    """((1/Gamma(1+p)) int_0^inf gamma(r)^p e^{-r} dr)^{1/p}, with the log limit at p = 0."""
    spec = spec or DEFAULT_SPEC
    if p <= -1:
        raise DomainError(f"phi_gamma needs p > -1, got {p}")
    beta = gamma.vanishing_order

    if p == 0:
        def log_regular(r: float) -> float:
            value = gamma.regular_part(r)
            if value <= 0:
                raise DivergentIntegralError(0.0, -math.inf, "log moment is -inf")
            return math.log(value)

        # int beta log r e^{-r} dr = -beta * EULER_GAMMA is taken in closed form.
        mean_log = integrate_exp_weighted(log_regular, spec)
        return math.exp(EULER_GAMMA * (1.0 - beta) + mean_log)

    if p < 0:
        samples = np.linspace(0.0, gamma.span(), PROFILE_SAMPLES)[1:]
        if np.any(np.asarray(gamma(samples)) <= 0):
            raise DivergentIntegralError(p, math.inf, "profile vanishes on an interval")
    integral = integrate_exp_weighted(lambda r: gamma.regular_part(r) ** p, spec, power=p * beta)
    integral = _check_finite(p, integral)
    return (integral / gamma_fn(1.0 + p)) ** (1.0 / p)


class WitnessKind(Enum):
    ONE_SIDED_CHORD = "chord"
    COORDINATE_AFFINE = "affine"


@dataclass(frozen=True, eq=False)
class ConcaveWitness:
    """Concave h : L -> [0, inf).

    ONE_SIDED_CHORD: h(x, t) = |{lam >= 0 : x + lam u in K_t(f)}|.
    COORDINATE_AFFINE: h(x, t) = a.x + b t + c.
    """
    kind: WitnessKind
    direction: Optional[np.ndarray] = None
    slope: Optional[np.ndarray] = None
    time_slope: float = 0.0
    intercept: float = 0.0

    @classmethod
    def one_sided_chord(cls, u) -> "ConcaveWitness":
        u = np.asarray(u, dtype=float).ravel()
        norm = float(np.linalg.norm(u))
        if norm == 0:
            raise AdmissibilityError("chord witness needs a nonzero direction")
        return cls(WitnessKind.ONE_SIDED_CHORD, direction=u / norm)

    @classmethod
    def coordinate_affine(cls, a, b: float = 0.0, c: float = 0.0) -> "ConcaveWitness":
        a = np.asarray(a, dtype=float).ravel()
        if np.all(a == 0) and b == 0 and c == 0:
            raise AdmissibilityError("witness is identically zero")
        return cls(WitnessKind.COORDINATE_AFFINE, slope=a, time_slope=float(b),
                   intercept=float(c))

    def __call__(self, L: Epigraph, x, t) -> np.ndarray:
        points = np.asarray(x, dtype=float).reshape(-1, L.dim)
        times = np.broadcast_to(np.asarray(t, dtype=float), (len(points),))
        if self.kind is WitnessKind.COORDINATE_AFFINE:
            return points @ self.slope + self.time_slope * times + self.intercept
        scales = np.array([L.f.level_scale(float(s)) for s in times])
        values = np.zeros(len(points))
        live = scales > 0
        values[live] = scales[live] * np.asarray(
            one_sided_chord(L.f.body, points[live] / scales[live, None], self.direction))
        return values

    def validate(self, L: Epigraph, samples: int = WITNESS_SAMPLES, seed: int = 0) -> None:
        """Reject witnesses that are negative, non-concave or identically zero on sampled L."""
        if self.kind is WitnessKind.ONE_SIDED_CHORD and len(self.direction) != L.dim:
            raise AdmissibilityError("chord direction has the wrong dimension")
        if self.kind is WitnessKind.COORDINATE_AFFINE and len(self.slope) != L.dim:
            raise AdmissibilityError("affine witness has the wrong dimension")
        xs, ts = sample_epigraph(L, samples, seed)
        values = self(L, xs, ts)
        if np.any(values < -1e-12):
            raise AdmissibilityError("witness takes negative values on L")
        if np.all(values <= 0):
            raise AdmissibilityError("witness is identically zero on L")
        half = samples // 2
        mids = self(L, 0.5 * (xs[:half] + xs[half:2 * half]), 0.5 * (ts[:half] + ts[half:2 * half]))
        if np.any(mids < 0.5 * (values[:half] + values[half:2 * half]) - 1e-9):
            raise AdmissibilityError("witness is not concave on L")

    def describe(self) -> str:
        if self.kind is WitnessKind.ONE_SIDED_CHORD:
            return "chord:" + ",".join(f"{c:g}" for c in self.direction)
        return ("affine:" + ",".join(f"{c:g}" for c in self.slope)
                + f",{self.time_slope:g},{self.intercept:g}")


def superlevel_measure(L: Epigraph, h: ConcaveWitness, s: float,
                       spec: Optional[QuadratureSpec] = None) -> float:
    """I_h(s) = mu({(x, t) in L : h(x, t) >= s})."""
    spec = spec or DEFAULT_SPEC
    if s <= 0:
        return 1.0
    f, K, n = L.f, L.f.body, L.dim

    if h.kind is WitnessKind.ONE_SIDED_CHORD:
        u = h.direction
        reach = max_chord(K, u)

        # The chord from x reaches s iff x and x + s u both lie in K_t.
        def slice_volume(t: float) -> float:
            scale = f.level_scale(t)
            if scale * reach <= s:
                return 0.0
            return scale ** n * covariogram_body(K, s * u / scale)

        start = [f.level_time(s / reach)]
    else:
        def slice_volume(t: float) -> float:
            scale = f.level_scale(t)
            if scale <= 0:
                return 0.0
            threshold = s - h.intercept - h.time_slope * t
            return scale ** n * clipped_volume(K, h.slope, threshold / scale)

        start = None

    mass = integrate_exp_weighted(slice_volume, spec, points=start)
    return min(max(mass / epigraph_weight(L, spec), 0.0), 1.0)


@dataclass(frozen=True)
class RearrangedProfile:
    r: np.ndarray
    gamma: np.ndarray
    gamma1: MomentProfile


def rearranged_gamma(L: Epigraph, h: ConcaveWitness, r_grid: Optional[Sequence[float]] = None,
                     spec: Optional[QuadratureSpec] = None, seed: int = 0) -> RearrangedProfile:
    """gamma(r) = sup{s : I_h(s) > r^n} on r_grid, and gamma1(r) = gamma(e^{-r/n}).

    The default grid puts quadratically spaced gamma1-knots on [0, 20].
    """
    spec = replace(spec or DEFAULT_SPEC, abs_tol=1e-14)
    n = L.dim
    h.validate(L, seed=seed)
    if r_grid is None:
        times = REARRANGEMENT_SPAN * (np.arange(REARRANGEMENT_NODES + 1) / REARRANGEMENT_NODES) ** 2
        radii = np.exp(-times / n)
    else:
        radii = np.asarray(r_grid, dtype=float)
        if np.any(radii <= 0) or np.any(radii > 1):
            raise DomainError("rearrangement grid must lie in (0, 1]")
        times = -n * np.log(radii)

    xs, ts = sample_epigraph(L, WITNESS_SAMPLES, seed)
    top = 1.01 * float(np.max(h(L, xs, ts)))

    def excess(s: float, level: float) -> float:
        return superlevel_measure(L, h, s, spec) - level

    gamma = np.zeros(len(radii))
    for index, r in enumerate(radii):
        level = r ** n
        if level >= 1.0:
            continue
        upper = top
        for _ in range(60):
            if excess(upper, level) < 0:
                break
            upper *= 2.0
        else:
            raise QuadratureError("no bracket for the rearranged profile", upper, math.inf)
        gamma[index] = brentq(excess, 0.0, upper, args=(level,), xtol=BISECTION_XTOL)
        logger.debug("rearranged gamma(%.6g) = %.9g", r, gamma[index])

    order = np.argsort(times)
    gamma1 = MomentProfile.sampled(times[order], gamma[order])
    return RearrangedProfile(radii, gamma, gamma1)


def _log_scale_moment(f: LogConcaveFunction) -> float:
    """int_0^inf e^{-t} s(t)^n log s(t) dt."""
    n = f.dim
    if f.kind is FunctionKind.INDICATOR:
        return 0.0
    if f.kind is FunctionKind.EXPNORM:
        # int e^{-t} t^n log t dt = Gamma(n+1) psi(n+1)
        return gamma_fn(n + 1.0) * float(digamma(n + 1.0))
    half = n / 2.0 + 1.0
    return 2.0 ** (n / 2.0) * 0.5 * gamma_fn(half) * (math.log(2.0) + float(digamma(half)))


def _affine_body_moment(K: Body, a: np.ndarray, offset: float, p: float,
                        spec: QuadratureSpec) -> float:
    """int_K (a.y + offset)^p dy, or int_K log(a.y + offset) dy when p = 0."""

    def power(z):
        z = np.maximum(z, 0.0)
        if p == 0:
            with np.errstate(divide="ignore"):
                return np.log(z)
        return z ** p

    norm = float(np.linalg.norm(a))
    if norm <= 1e-14:
        return volume(K) * float(power(np.array(offset)))

    if K.dim == 1:
        def antiderivative(y: float) -> float:
            z = max(a[0] * y + offset, 0.0)
            if p == 0:
                return 0.0 if z == 0 else z * (math.log(z) - 1.0) / a[0]
            return z ** (p + 1.0) / (a[0] * (p + 1.0))

        lower, upper = (float(v[0]) for v in bounding_box(K))
        return antiderivative(upper) - antiderivative(lower)

    if K.dim == 2:
        axis = a / norm
        across = np.array([-axis[1], axis[0]])
        lower = -float(support_value(K, -axis))
        upper = float(support_value(K, axis))
        lowest = norm * lower + offset
        if lowest < -TOUCH_TOL * max(1.0, abs(offset)):
            raise AdmissibilityError("affine witness is negative on a level set")
        breaks = K.vertices @ axis if K.is_polytope else None

        def section(sigma: float) -> float:
            return float(chord_length(K, sigma * axis, across))

        if abs(lowest) <= TOUCH_TOL * max(1.0, abs(offset)) and p != 0:
            return norm ** p * integrate_power_weighted(section, lower, upper, p, spec)
        return integrate_interval(lambda sigma: float(power(norm * sigma + offset)) * section(sigma),
                                  lower, upper, spec, points=breaks)

    box_lower, box_upper = bounding_box(K)
    points, weights = tensor_gauss(box_lower, box_upper, AFFINE_DIM3_NODES)
    inside = np.asarray(contains(K, points))
    return float(np.sum(power(points[inside] @ a + offset) * weights[inside]))


def _affine_moment(L: Epigraph, h: ConcaveWitness, p: float, spec: QuadratureSpec) -> float:
    f, K, n = L.f, L.f.body, L.dim

    def level_moment(t: float) -> float:
        scale = f.level_scale(t)
        if scale <= 0:
            return 0.0
        offset = h.time_slope * t + h.intercept
        return scale ** n * _affine_body_moment(K, scale * h.slope, offset, p, spec)

    return integrate_exp_weighted(level_moment, spec)


def _chord_body_moment(K: Body, u: np.ndarray, p: float, spec: QuadratureSpec) -> float:
    """int_K h(x)^p dx for the one-sided chord h(x) = |{lam >= 0 : x + lam u in K}|."""
    return integrate_over_body(K, lambda x: np.asarray(one_sided_chord(K, x, u)) ** p, spec)


def berwald_epigraph(L: Epigraph, h: ConcaveWitness, p: float,
                     spec: Optional[QuadratureSpec] = None, direct: bool = False) -> float:
    """((1/(Gamma(1+p) int_L e^{-t})) int_L h^p e^{-t} dx dt)^{1/p}; log limit at p = 0.

    Chord witnesses integrate along each chord in closed form
    (int_0^c (c - lam)^p dlam = c^{p+1}/(p+1)), leaving an integral over the
    shadow of K; affine witnesses slice level sets across the gradient of h.

    Args:
        L: Epigraph of a log-concave function
        h: Concave witness on L
        p: Moment order, p > -1
        spec: Quadrature tolerances
        direct: For chord witnesses, integrate h^p over the level sets
            K_t = s(t) K numerically instead of along chords (p > 0 only)

    Returns:
        The Gamma-normalised p-mean of h
    """
    spec = spec or DEFAULT_SPEC
    if p <= -1:
        raise DomainError(f"berwald_epigraph needs p > -1, got {p}")
    f, K, n = L.f, L.f.body, L.dim
    weight = epigraph_weight(L, spec)

    if h.kind is WitnessKind.ONE_SIDED_CHORD:
        u = h.direction
        if direct:
            if p <= 0:
                raise DomainError(f"direct chord-witness moments need p > 0, got {p}")
            moment = f.moment(n + p, spec) * _chord_body_moment(K, u, p, spec) / weight
            return (_check_finite(p, moment) / gamma_fn(1.0 + p)) ** (1.0 / p)
        if p == 0:
            entropy = chord_moment(K, u, lambda c: c * np.log(c) - c, spec)
            mean_log = (entropy * f.moment(float(n), spec)
                        + volume(K) * _log_scale_moment(f)) / weight
            return math.exp(EULER_GAMMA + _check_finite(p, mean_log))
        chords = chord_moment(K, u, lambda c: c ** (p + 1.0), spec)
        moment = f.moment(n + p, spec) * chords / ((p + 1.0) * weight)
    else:
        moment = _affine_moment(L, h, p, spec) / weight
        if p == 0:
            return math.exp(EULER_GAMMA + _check_finite(p, moment))

    moment = _check_finite(p, moment)
    return (moment / gamma_fn(1.0 + p)) ** (1.0 / p)


def _check_on_body(K: Body, phi: Callable[[np.ndarray], np.ndarray], concave: bool,
                   seed: int = 0, samples: int = 200) -> None:
    rng = np.random.default_rng(seed)
    points = sample_uniform(K, samples, rng)
    values = np.asarray(phi(points), dtype=float)
    if np.any(values < -1e-12):
        raise AdmissibilityError("function takes negative values on K")
    if not concave:
        return
    half = samples // 2
    mids = np.asarray(phi(0.5 * (points[:half] + points[half:2 * half])), dtype=float)
    if np.any(mids < 0.5 * (values[:half] + values[half:2 * half]) - 1e-9):
        raise AdmissibilityError("function is not concave on K")


def berwald_classical(K: Body, phi: Callable[[np.ndarray], np.ndarray], p: float,
                      spec: Optional[QuadratureSpec] = None) -> float:
    """(binom(p+n, n)/|K| int_K phi^p)^{1/p} for concave phi >= 0 on K."""
    if p <= 0:
        raise DomainError(f"berwald_classical needs p > 0, got {p}")
    _check_on_body(K, phi, concave=True)
    n = K.dim
    binom = math.exp(gammaln(p + n + 1.0) - gammaln(p + 1.0)) / math.factorial(n)
    integral = integrate_over_body(K, lambda x: np.maximum(phi(x), 0.0) ** p, spec)
    return (binom * integral / volume(K)) ** (1.0 / p)


def holder_mean(K: Body, phi: Callable[[np.ndarray], np.ndarray], p: float,
                spec: Optional[QuadratureSpec] = None) -> float:
    """((1/|K|) int_K phi^p)^{1/p} for phi >= 0."""
    if p <= 0:
        raise DomainError(f"holder_mean needs p > 0, got {p}")
    _check_on_body(K, phi, concave=False)
    integral = integrate_over_body(K, lambda x: np.maximum(phi(x), 0.0) ** p, spec)
    return (integral / volume(K)) ** (1.0 / p)
