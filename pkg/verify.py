"""
Inequality suite: each statement about log-concave functions, covariograms,
Ball bodies and projection bodies as a named numerical check producing a
CheckReport, and the VerificationSuite that runs them over the presets.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from berwald import (ConcaveWitness, DivergentIntegralError, MomentProfile, ProfileKind,
                     WitnessKind, berwald_classical, berwald_epigraph, holder_mean, phi_gamma,
                     rearranged_gamma)
from functionals import (CovariogramFn, ball_body, ball_body_radial, chord_power_integral,
                         polar_projection_fn, projection_product, remark3_limit_check,
                         star_volume, zhang_body_bounds)
from geometry import Body, affine_map
from logconcave import Epigraph, LogConcaveFunction, evaluate, l1_norm
from numerics import (DEFAULT_SPEC, DirectionGrid, QuadratureError, QuadratureSpec, direction_grid,
                      gamma_fn, mc_integrate)
from presets import Presets, SuiteDefaults
from random_bodies import (density_mass, random_affine_map, random_polygon, random_triangle,
                           sample_function_density)

logger = logging.getLogger(__name__)


class CheckStatus(Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED_DIVERGED = "skipped-diverged"


@dataclass
class CheckReport:
    name: str
    status: CheckStatus
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    runtime_ms: float = 0.0
    details: str = ""

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS

    def to_dict(self) -> Dict[str, object]:
        def number(value: float) -> Optional[float]:
            value = float(value)
            return value if math.isfinite(value) else None

        return {
            "name": self.name,
            "status": self.status.value,
            "lhs": number(self.lhs),
            "rhs": number(self.rhs),
            "margin": number(self.margin),
            "tolerance": float(self.tolerance),
            "runtime_ms": float(self.runtime_ms),
            "details": self.details,
        }


def _report(name: str, passed: bool, lhs: float, rhs: float, margin: float, tolerance: float,
            details: str = "") -> CheckReport:
    status = CheckStatus.PASS if passed else CheckStatus.FAIL
    return CheckReport(name, status, float(lhs), float(rhs), float(margin), tolerance,
                       details=details)


def _grid(dim: int, grid: Optional[DirectionGrid]) -> DirectionGrid:
    return grid if grid is not None else direction_grid(dim, SuiteDefaults.grid_size(dim))


def _format(values: Sequence[Tuple[float, float]]) -> str:
    return ", ".join(f"{p:g}:{value:.9g}" for p, value in values)


def _monotone_margin(values: Sequence[Tuple[float, float]], increasing: bool = False) -> float:
    """Smallest relative step in the required direction (negative when violated)."""
    steps = []
    for (_, first), (_, second) in zip(values, values[1:]):
        step = (second - first) if increasing else (first - second)
        steps.append(step / abs(first) if first != 0 else step)
    return min(steps) if steps else 0.0


def _sweep(name: str, evaluate_at: Callable[[float], float], p_grid: Sequence[float],
           tolerance: float, increasing: bool = False) -> Tuple[CheckReport, List[Tuple[float, float]]]:
    values, diverged = [], []
    for p in sorted(p_grid):
        try:
            values.append((p, evaluate_at(p)))
        except DivergentIntegralError as error:
            logger.info("%s: p=%g diverged (%s)", name, p, error)
            diverged.append(p)
    details = f"values=[{_format(values)}]"
    if diverged:
        details += f"; diverged p={diverged}"
    if not values:
        return CheckReport(name, CheckStatus.SKIPPED_DIVERGED, math.nan, math.nan, math.nan,
                           tolerance, details=details), values
    margin = _monotone_margin(values, increasing)
    return _report(name, margin >= -tolerance, values[0][1], values[-1][1], margin, tolerance,
                   details), values


def verify_lemma21(gamma: MomentProfile, p_grid: Sequence[float] = SuiteDefaults.P_GRID_PROFILE,
                   tolerance: Optional[float] = None,
                   spec: Optional[QuadratureSpec] = None) -> CheckReport:
    """Phi_gamma(p) is non-increasing over p_grid; linear profiles must be constant."""
    tolerance = SuiteDefaults.tolerance("lemma21") if tolerance is None else tolerance
    gamma.check_admissible()
    report, values = _sweep(f"lemma21:{gamma.describe()}", lambda p: phi_gamma(gamma, p, spec),
                            p_grid, tolerance)
    if gamma.kind is ProfileKind.LINEAR and values:
        spread = max(abs(value - gamma.coefficient) for _, value in values) / gamma.coefficient
        constant = spread <= tolerance
        report.details += f"; numerically constant={constant} (spread {spread:.3g})"
        if not constant:
            report.status = CheckStatus.FAIL
    return report


def verify_thm11(f: LogConcaveFunction, h: ConcaveWitness,
                 p_grid: Sequence[float] = SuiteDefaults.P_GRID_EPIGRAPH,
                 tolerance: Optional[float] = None,
                 spec: Optional[QuadratureSpec] = None) -> CheckReport:
    """The epigraph Berwald functional is non-increasing over p_grid.

    Chord witnesses also have to agree with the level-set integration route.
    """
    tolerance = SuiteDefaults.tolerance("thm11", f.dim) if tolerance is None else tolerance
    L = Epigraph(f)
    h.validate(L)
    report, _ = _sweep(f"thm11:{f.describe()}:{h.describe()}",
                       lambda p: berwald_epigraph(L, h, p, spec), p_grid, tolerance)
    if h.kind is WitnessKind.ONE_SIDED_CHORD and report.status is not CheckStatus.SKIPPED_DIVERGED:
        p = SuiteDefaults.P_DIRECT_ROUTE
        along_chords = berwald_epigraph(L, h, p, spec)
        over_levels = berwald_epigraph(L, h, p, spec, direct=True)
        gap = abs(along_chords - over_levels) / along_chords
        report.details += f"; p={p:g} chord route={along_chords:.9g} level route={over_levels:.9g}"
        if gap > tolerance:
            report.status = CheckStatus.FAIL
    return report


def verify_zhang_petty_body(K: Body, grid: Optional[DirectionGrid] = None,
                            tolerance: Optional[float] = None) -> CheckReport:
    """binom(2n,n)/n^n <= |K|^{n-1} |Pi*(K)| <= |B^n|^n / |B^{n-1}|^n."""
    n = K.dim
    tolerance = SuiteDefaults.tolerance("zhang_petty_body", n) if tolerance is None else tolerance
    product = projection_product(K, _grid(n, grid))
    lower, upper = zhang_body_bounds(n)
    margin = min(product - lower, upper - product)
    return _report(f"zhang_petty_body:{K.label or 'body'}", margin >= -tolerance, product, upper,
                   margin, tolerance, f"lower={lower:.9g} product={product:.9g}")


def zhang_sides(f: LogConcaveFunction, grid: DirectionGrid,
                spec: Optional[QuadratureSpec]) -> Tuple[float, float, float]:
    """(int g_f by quadrature over its support, 2^n n! ||f||_1^{n+1} |Pi*(f)|, layer-cake int g_f)."""
    n = f.dim
    g = CovariogramFn(f, spec=spec or DEFAULT_SPEC)
    lhs = g.quadrature_integral()
    norm = l1_norm(f, spec)
    rhs = 2 ** n * math.factorial(n) * norm ** (n + 1) * star_volume(polar_projection_fn(f, grid, spec))
    return lhs, rhs, g.integral()


def _min_integral_mc(f: LogConcaveFunction, samples: int, seed: int) -> Tuple[float, float]:
    """int int min(f(x), f(y)) by importance sampling from f^{1/2} x f^{1/2}."""
    n = f.dim
    mass = density_mass(f, 0.5)

    def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
        return np.hstack([sample_function_density(f, size, rng, 0.5),
                          sample_function_density(f, size, rng, 0.5)])

    def integrand(pairs: np.ndarray) -> np.ndarray:
        fx, fy = evaluate(f, pairs[:, :n]), evaluate(f, pairs[:, n:])
        density = np.sqrt(fx * fy)
        safe = np.where(density > 0, density, 1.0)
        return np.where(density > 0, np.minimum(fx, fy) / safe, 0.0) * mass * mass

    return mc_integrate(integrand, sampler, samples, seed)


def verify_zhang_functional(f: LogConcaveFunction, grid: Optional[DirectionGrid] = None,
                            mc_samples: int = SuiteDefaults.MC_SAMPLES,
                            seed: int = SuiteDefaults.SEED, tolerance: Optional[float] = None,
                            expect_equality: bool = False,
                            equality_tolerance: float = SuiteDefaults.EQUALITY_TOLERANCE,
                            spec: Optional[QuadratureSpec] = None) -> CheckReport:
    """int int min{f(x), f(y)} <= 2^n n! ||f||_1^{n+1} |Pi*(f)|.

    The left side is cross-checked against the layer-cake integral of g_f and
    a 2n-dimensional Monte Carlo estimate (3 standard errors).
    """
    n = f.dim
    tolerance = SuiteDefaults.tolerance("zhang_functional", n) if tolerance is None else tolerance
    lhs, rhs, layer_cake = zhang_sides(f, _grid(n, grid), spec)
    estimate, std_error = _min_integral_mc(f, mc_samples, seed)
    ratio = lhs / rhs
    mc_agrees = abs(lhs - estimate) <= 3.0 * std_error + 1e-3 * lhs
    paths_agree = abs(lhs - layer_cake) <= max(tolerance, 1e-3) * lhs
    passed = lhs <= rhs * (1.0 + tolerance) and mc_agrees and paths_agree
    details = (f"ratio={ratio:.9g} layer_cake={layer_cake:.9g} mc={estimate:.9g}"
               f"+-{std_error:.3g} equality_like={ratio >= SuiteDefaults.EQUALITY_THRESHOLD}")
    if expect_equality:
        passed = passed and abs(ratio - 1.0) <= equality_tolerance
        details += " expected equality"
    return _report(f"zhang_functional:{f.describe()}", passed, lhs, rhs, ratio - 1.0, tolerance,
                   details)


def verify_zhang_consistency(K: Body, grid: Optional[DirectionGrid] = None,
                             tolerance: Optional[float] = None,
                             spec: Optional[QuadratureSpec] = None) -> CheckReport:
    """For f = e^{-||x||_K} the functional ratio equals binom(2n,n)/n^n / P(K)."""
    n = K.dim
    tolerance = SuiteDefaults.tolerance("zhang_consistency", n) if tolerance is None else tolerance
    grid = _grid(n, grid)
    lhs, rhs, _ = zhang_sides(LogConcaveFunction.expnorm(K), grid, spec)
    functional = lhs / rhs
    body = zhang_body_bounds(n)[0] / projection_product(K, grid)
    margin = abs(functional - body) / body
    return _report(f"zhang_consistency:{K.label or 'body'}", margin <= tolerance, functional, body,
                   margin, tolerance)


def verify_lemma31(g: Union[CovariogramFn, LogConcaveFunction],
                   grid: Optional[DirectionGrid] = None, tolerance: Optional[float] = None,
                   spec: Optional[QuadratureSpec] = None) -> CheckReport:
    """|K~_n(g)| = (1/g(0)) int g."""
    n = g.dim
    tolerance = SuiteDefaults.tolerance("lemma31", n) if tolerance is None else tolerance
    lhs = star_volume(ball_body(g, float(n), _grid(n, grid), spec))
    if isinstance(g, CovariogramFn):
        rhs = g.integral() / g.at_origin
        name = f"lemma31:covariogram:{g.f.describe()}"
    else:
        rhs = l1_norm(g, spec)
        name = f"lemma31:{g.describe()}"
    margin = (rhs - lhs) / rhs
    return _report(name, abs(margin) <= tolerance, lhs, rhs, margin, tolerance)


def verify_lemma33(f: LogConcaveFunction, u, p: float, tolerance: Optional[float] = None,
                   spec: Optional[QuadratureSpec] = None) -> CheckReport:
    """rho_{K~_p(g_f)}(u)^p equals the normalised chord-power integral along u."""
    tolerance = SuiteDefaults.tolerance("lemma33", f.dim) if tolerance is None else tolerance
    u = np.asarray(u, dtype=float)
    lhs = ball_body_radial(CovariogramFn(f, spec=spec or DEFAULT_SPEC), p, u, spec) ** p
    rhs = chord_power_integral(f, u, p, spec)
    margin = (rhs - lhs) / rhs
    direction = ",".join(f"{c:.4f}" for c in u)
    return _report(f"lemma33:{f.describe()}:p={p:g}:u=({direction})", abs(margin) <= tolerance,
                   lhs, rhs, margin, tolerance)


def verify_remark2(g: Union[CovariogramFn, LogConcaveFunction], p: float, q: float,
                   grid: Optional[DirectionGrid] = None, tolerance: Optional[float] = None,
                   spec: Optional[QuadratureSpec] = None) -> CheckReport:
    """Gamma(1+p)^{1/p} / Gamma(1+q)^{1/q} K~_q(g) within K~_p(g) within K~_q(g) for p <= q."""
    if not 0 < p <= q:
        raise ValueError(f"remark 2 needs 0 < p <= q, got p={p}, q={q}")
    n = g.dim
    tolerance = SuiteDefaults.tolerance("remark2", n) if tolerance is None else tolerance
    grid = _grid(n, grid)
    inner = ball_body(g, p, grid, spec).radii
    outer = ball_body(g, q, grid, spec).radii
    factor = gamma_fn(1.0 + p) ** (1.0 / p) / gamma_fn(1.0 + q) ** (1.0 / q)
    left = float(np.min((inner - factor * outer) / outer))
    right = float(np.min((outer - inner) / outer))
    margin = min(left, right)
    label = g.describe() if isinstance(g, LogConcaveFunction) else f"covariogram:{g.f.describe()}"
    return _report(f"remark2:{label}:p={p:g}:q={q:g}", margin >= -tolerance,
                   float(np.min(inner / outer)), factor, margin, tolerance,
                   f"left={left:.3g} right={right:.3g}")


def verify_final_inclusion(f: LogConcaveFunction, grid: Optional[DirectionGrid] = None,
                           tolerance: Optional[float] = None, expect_equality: bool = False,
                           equality_tolerance: float = SuiteDefaults.EQUALITY_TOLERANCE,
                           spec: Optional[QuadratureSpec] = None) -> CheckReport:
    """rho_{K~_n(g_f)} <= 2 (n!)^{1/n} ||f||_1 rho_{Pi*(f)} at every grid direction."""
    n = f.dim
    tolerance = SuiteDefaults.tolerance("final_inclusion", n) if tolerance is None else tolerance
    grid = _grid(n, grid)
    g = CovariogramFn(f, spec=spec or DEFAULT_SPEC)
    left = ball_body(g, float(n), grid, spec).radii
    scale = 2.0 * math.factorial(n) ** (1.0 / n) * l1_norm(f, spec)
    right = scale * polar_projection_fn(f, grid, spec).radii
    slack = right / left - 1.0
    margin = float(np.min(slack))
    deviation = float(np.max(np.abs(slack)))
    passed = margin >= -tolerance
    details = f"max_deviation={deviation:.6g}"
    if expect_equality:
        passed = passed and deviation <= equality_tolerance
        details += " expected equality"
    return _report(f"final_inclusion:{f.describe()}", passed, float(np.max(left / right)), 1.0,
                   margin, tolerance, details)


def verify_affine_invariance(K: Body, M, v=None, grid: Optional[DirectionGrid] = None,
                             tolerance: Optional[float] = None) -> CheckReport:
    """|K|^{n-1} |Pi*(K)| is unchanged by K -> M K + v."""
    n = K.dim
    tolerance = SuiteDefaults.tolerance("affine_invariance", n) if tolerance is None else tolerance
    grid = _grid(n, grid)
    before = projection_product(K, grid)
    after = projection_product(affine_map(K, M, v), grid)
    margin = abs(after - before) / before
    return _report(f"affine_invariance:{K.label or 'body'}:det={np.linalg.det(M):.4g}",
                   margin <= tolerance, after, before, margin, tolerance)


def verify_remark3(f: LogConcaveFunction, u,
                   p_sequence: Sequence[float] = SuiteDefaults.REMARK3_SEQUENCE,
                   tolerance: Optional[float] = None,
                   spec: Optional[QuadratureSpec] = None) -> CheckReport:
    """The chord-power integral over Gamma(1+p) approaches ||u||_{Pi*f} / (2||f||_1) as p -> -1."""
    tolerance = SuiteDefaults.tolerance("remark3", f.dim) if tolerance is None else tolerance
    rows = remark3_limit_check(f, u, p_sequence, spec)
    gaps = [row.gap for row in rows]
    shrinking = all(b < a for a, b in zip(gaps, gaps[1:]))
    last = rows[-1]
    details = "gaps=[" + ", ".join(f"{row.p:g}:{row.gap:.6g}" for row in rows) + "]"
    return _report(f"remark3:{f.describe()}", shrinking and last.gap <= tolerance, last.lhs,
                   last.target, last.gap, tolerance, details)


def verify_rearrangement(f: LogConcaveFunction, h: ConcaveWitness,
                         p_values: Sequence[float] = SuiteDefaults.P_REARRANGEMENT,
                         tolerance: Optional[float] = None, seed: int = SuiteDefaults.SEED,
                         spec: Optional[QuadratureSpec] = None) -> CheckReport:
    """Phi of the rearranged profile gamma_1 reproduces the epigraph functional."""
    tolerance = SuiteDefaults.tolerance("rearrangement", f.dim) if tolerance is None else tolerance
    L = Epigraph(f)
    profile = rearranged_gamma(L, h, spec=spec, seed=seed)
    pairs = [(p, phi_gamma(profile.gamma1, p, spec), berwald_epigraph(L, h, p, spec))
             for p in p_values]
    errors = [abs(a - b) / abs(b) for _, a, b in pairs]
    worst = max(errors)
    details = ", ".join(f"{p:g}:{a:.9g}/{b:.9g}" for p, a, b in pairs)
    return _report(f"rearrangement:{f.describe()}:{h.describe()}", worst <= tolerance,
                   pairs[-1][1], pairs[-1][2], worst, tolerance, details)


def verify_classical_berwald(K: Body, phi: Callable[[np.ndarray], np.ndarray], label: str,
                             p_grid: Sequence[float] = SuiteDefaults.P_GRID_BODY,
                             tolerance: Optional[float] = None,
                             spec: Optional[QuadratureSpec] = None) -> CheckReport:
    """(binom(p+n,n)/|K| int_K phi^p)^{1/p} is non-increasing in p > 0."""
    tolerance = SuiteDefaults.tolerance("classical_berwald", K.dim) if tolerance is None else tolerance
    report, _ = _sweep(f"classical_berwald:{K.label or 'body'}:{label}",
                       lambda p: berwald_classical(K, phi, p, spec), p_grid, tolerance)
    return report


def verify_holder_mean(K: Body, phi: Callable[[np.ndarray], np.ndarray], label: str,
                       p_grid: Sequence[float] = SuiteDefaults.P_GRID_BODY,
                       tolerance: Optional[float] = None,
                       spec: Optional[QuadratureSpec] = None) -> CheckReport:
    """((1/|K|) int_K phi^p)^{1/p} is non-decreasing in p > 0."""
    tolerance = SuiteDefaults.tolerance("holder_mean", K.dim) if tolerance is None else tolerance
    report, _ = _sweep(f"holder_mean:{K.label or 'body'}:{label}",
                       lambda p: holder_mean(K, phi, p, spec), p_grid, tolerance, increasing=True)
    return report


def verify_remark1(name: str, functional: Callable[[float], float], step: float = 1e-3,
                   tolerance: Optional[float] = None) -> CheckReport:
    """The value at p = 0 (Euler-Mascheroni form) is the limit of the p != 0 values."""
    tolerance = SuiteDefaults.tolerance("remark1") if tolerance is None else tolerance
    at_zero = functional(0.0)
    limit = 0.5 * (functional(-step) + functional(step))
    margin = abs(at_zero - limit) / at_zero
    return _report(f"remark1:{name}", margin <= tolerance, at_zero, limit, margin, tolerance)


@dataclass(frozen=True)
class SuiteConfig:
    """What the suite runs and with which settings.

    presets, when set, keeps only the cases whose bodies, functions and
    profiles are all named in it. tolerance replaces every check tolerance,
    equality tolerances included.
    """
    suites: Tuple[str, ...] = SuiteDefaults.SUITES
    dim: int = 2
    grid_size: Optional[int] = None
    seed: int = SuiteDefaults.SEED
    mc_samples: int = SuiteDefaults.MC_SAMPLES
    tolerance: Optional[float] = None
    presets: Optional[Tuple[str, ...]] = None
    bodies: Mapping[str, Body] = field(default_factory=dict)
    timings: bool = False
    spec: QuadratureSpec = DEFAULT_SPEC

    def __post_init__(self):
        unknown = [name for name in self.suites if name not in SuiteDefaults.SUITES]
        if unknown:
            raise ValueError(f"unknown suites: {', '.join(unknown)}")
        if self.dim not in (2, 3):
            raise ValueError(f"the suite runs in dimension 2 or 3, got {self.dim}")
        if self.grid_size is not None and self.grid_size < 4:
            raise ValueError("direction grids need at least 4 directions")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ValueError("tolerance override must be positive")

    @classmethod
    def from_options(cls, options: Mapping[str, str],
                     bodies: Optional[Mapping[str, Body]] = None) -> "SuiteConfig":
        """Build from the string options of a [suite] config section."""
        values = {}
        if "suites" in options:
            values["suites"] = suite_names(options["suites"])
        for key in ("dim", "grid_size", "seed", "mc_samples"):
            if key in options:
                values[key] = int(options[key])
        if "tolerance" in options:
            values["tolerance"] = float(options["tolerance"])
        if "presets" in options:
            values["presets"] = tuple(name.strip() for name in options["presets"].split(",")
                                      if name.strip())
        if "timings" in options:
            values["timings"] = options["timings"].strip().lower() in ("1", "true", "yes", "on")
        return cls(bodies=dict(bodies or {}), **values)


def suite_names(text: str) -> Tuple[str, ...]:
    names = tuple(name.strip() for name in text.split(",") if name.strip())
    return SuiteDefaults.SUITES if "all" in names else names


@dataclass(frozen=True)
class SuiteCase:
    suite: str
    tags: Tuple[str, ...]
    run: Callable[[], CheckReport]


class VerificationSuite:
    def __init__(self, config: SuiteConfig):
        """
        Initialize the suite.

        Args:
            config: Suite selection, grids, tolerances and seed
        """
        self.config = config
        self.spec = config.spec
        self.grid = direction_grid(config.dim, config.grid_size or SuiteDefaults.grid_size(config.dim))
        self.case_builders = {2: self._planar_cases, 3: self._spatial_cases}

    def _tol(self, check: str, dim: Optional[int] = None) -> float:
        if self.config.tolerance is not None:
            return self.config.tolerance
        return SuiteDefaults.tolerance(check, dim or self.config.dim)

    def _equality_tol(self) -> float:
        if self.config.tolerance is not None:
            return self.config.tolerance
        return SuiteDefaults.EQUALITY_TOLERANCE

    def _body(self, name: str) -> Body:
        return Presets.body(name, self.config.bodies)

    def _fn(self, descriptor: str) -> LogConcaveFunction:
        return Presets.function(descriptor, self.config.bodies)

    @staticmethod
    def _tags(*descriptors: str) -> Tuple[str, ...]:
        """Preset names behind descriptors: 'expnorm:square' -> 'square'."""
        tags = []
        for descriptor in descriptors:
            kind, _, argument = descriptor.partition(":")
            tags.append(argument if kind in ("indicator", "expnorm") else descriptor)
        return tuple(tags)

    def _planar_cases(self) -> List[SuiteCase]:
        spec, grid = self.spec, self.grid
        rng = np.random.default_rng(self.config.seed)
        cases = []

        def add(suite: str, tags: Tuple[str, ...], run: Callable[[], CheckReport]) -> None:
            cases.append(SuiteCase(suite, tags, run))

        for descriptor in ("power:0.5", "linear:3", "piecewise:0,0;1,1;3,2"):
            add("lemma21", (descriptor,), lambda d=descriptor: verify_lemma21(
                Presets.profile(d), tolerance=self._tol("lemma21"), spec=spec))
            add("remarks", (descriptor,), lambda d=descriptor: verify_remark1(
                d, lambda p, g=Presets.profile(d): phi_gamma(g, p, spec),
                tolerance=self._tol("remark1")))

        pairs = [("indicator:interval01", "affine:x"), ("indicator:square", "affine:x1+1"),
                 ("expnorm:square", "chord"), ("expnorm:simplex2", "chord"),
                 ("gaussian:2", "chord")]
        for fd, hd in pairs:
            add("thm11", self._tags(fd), lambda fd=fd, hd=hd: verify_thm11(
                self._fn(fd), Presets.witness(hd, self._fn(fd).dim),
                tolerance=self._tol("thm11"), spec=spec))
        for fd, hd in (("indicator:interval01", "affine:x"), ("expnorm:square", "chord")):
            add("remarks", self._tags(fd), lambda fd=fd, hd=hd: self._remark1_epigraph(fd, hd))
            add("rearrangement", self._tags(fd), lambda fd=fd, hd=hd: verify_rearrangement(
                self._fn(fd), Presets.witness(hd, self._fn(fd).dim),
                tolerance=self._tol("rearrangement"), seed=self.config.seed, spec=spec))

        for name in ("simplex2", "triangle", "disk", "square"):
            add("zhang", (name,), lambda name=name: verify_zhang_petty_body(
                self._body(name), grid, self._tol("zhang_petty_body")))
        for _ in range(2):
            triangle = random_triangle(rng)
            add("zhang", ("triangle",), lambda K=triangle: verify_zhang_petty_body(
                K, grid, self._tol("zhang_petty_body")))
        polygon = random_polygon(rng)
        add("zhang", ("random-polygon",), lambda K=polygon: verify_zhang_petty_body(
            K, grid, self._tol("zhang_petty_body")))
        for name, K in self.config.bodies.items():
            if K.dim == 2:
                add("zhang", (name,), lambda K=K: verify_zhang_petty_body(
                    K, grid, self._tol("zhang_petty_body")))
        for descriptor in ("indicator:square", "expnorm:square", "expnorm:disk", "gaussian:2",
                           "expnorm:simplex2"):
            add("zhang", self._tags(descriptor), lambda d=descriptor: verify_zhang_functional(
                self._fn(d), grid, self.config.mc_samples, self.config.seed,
                self._tol("zhang_functional"), expect_equality=d == "expnorm:simplex2",
                equality_tolerance=self._equality_tol(), spec=spec))
        for name in ("square", "simplex2", "disk"):
            add("zhang", (name,), lambda name=name: verify_zhang_consistency(
                self._body(name), grid, self._tol("zhang_consistency"), spec))

        line = direction_grid(1, 2)
        add("lemma31", ("interval",), lambda: verify_lemma31(
            self._fn("expnorm:interval"), line, self._tol("lemma31", 1), spec))
        for descriptor in ("expnorm:square", "expnorm:simplex2", "gaussian:2"):
            add("lemma31", self._tags(descriptor), lambda d=descriptor: verify_lemma31(
                self._fn(d), grid, self._tol("lemma31"), spec))
        for descriptor in ("expnorm:square", "expnorm:simplex2"):
            add("lemma31", self._tags(descriptor), lambda d=descriptor: verify_lemma31(
                CovariogramFn(self._fn(d), spec=spec), grid, self._tol("lemma31"), spec))

        add("lemma33", ("interval",), lambda: verify_lemma33(
            self._fn("expnorm:interval"), [1.0], 1.0, self._tol("lemma33", 1), spec))
        directions = direction_grid(2, SuiteDefaults.LEMMA33_DIRECTIONS).directions
        for descriptor in ("expnorm:square", "indicator:disk", "expnorm:simplex2"):
            for p in SuiteDefaults.P_CHORD_POWER:
                for u in directions:
                    add("lemma33", self._tags(descriptor), lambda d=descriptor, p=p, u=u:
                        verify_lemma33(self._fn(d), u, p, self._tol("lemma33"), spec))

        for descriptor in ("expnorm:square", "gaussian:2"):
            for p, q in SuiteDefaults.REMARK2_PAIRS:
                add("remarks", self._tags(descriptor), lambda d=descriptor, p=p, q=q:
                    verify_remark2(self._fn(d), p, q, grid, self._tol("remark2"), spec))
        for descriptor in ("expnorm:square", "indicator:disk"):
            add("remarks", self._tags(descriptor), lambda d=descriptor: verify_remark3(
                self._fn(d), [1.0, 0.0], tolerance=self._tol("remark3"), spec=spec))

        for descriptor in ("expnorm:simplex2", "indicator:square", "gaussian:2"):
            add("inclusion", self._tags(descriptor), lambda d=descriptor: verify_final_inclusion(
                self._fn(d), grid, self._tol("final_inclusion"),
                expect_equality=d == "expnorm:simplex2",
                equality_tolerance=self._equality_tol(), spec=spec))

        shear = np.array([[1.0, 1.0], [0.0, 1.0]])
        for name, M in (("simplex2", 2.0 * np.eye(2)), ("square", shear),
                        ("disk", np.diag([1.0, 3.0]))):
            add("affine", (name,), lambda name=name, M=M: verify_affine_invariance(
                self._body(name), M, None, grid, self._tol("affine_invariance")))
        M, v = random_affine_map(rng, 2)
        add("affine", ("triangle",), lambda M=M, v=v: verify_affine_invariance(
            self._body("triangle"), M, v, grid, self._tol("affine_invariance")))

        for body_name, fn_descriptors in (("interval01", ("affine:-1,1", "constant:1", "affine:1,0")),
                                          ("disk", ("cone",))):
            for fn_descriptor in fn_descriptors:
                add("classical", (body_name,), lambda b=body_name, d=fn_descriptor:
                    verify_classical_berwald(self._body(b), Presets.concave_function(d, self._body(b)),
                                             d, tolerance=self._tol("classical_berwald"), spec=spec))
            add("classical", (body_name,), lambda b=body_name, d=fn_descriptors[-1]:
                verify_holder_mean(self._body(b), Presets.concave_function(d, self._body(b)), d,
                                   tolerance=self._tol("holder_mean"), spec=spec))
        return cases

    def _remark1_epigraph(self, fn_descriptor: str, witness_descriptor: str) -> CheckReport:
        f = self._fn(fn_descriptor)
        L, h = Epigraph(f), Presets.witness(witness_descriptor, f.dim)
        return verify_remark1(f"{f.describe()}:{h.describe()}",
                              lambda p: berwald_epigraph(L, h, p, self.spec),
                              tolerance=self._tol("remark1", f.dim))

    def _spatial_cases(self) -> List[SuiteCase]:
        spec, grid = self.spec, self.grid
        cases = []
        for name in ("simplex3", "cube", "ball3"):
            cases.append(SuiteCase("zhang", (name,), lambda name=name: verify_zhang_petty_body(
                self._body(name), grid, self._tol("zhang_petty_body"))))
        for name, K in self.config.bodies.items():
            if K.dim == 3:
                cases.append(SuiteCase("zhang", (name,), lambda K=K: verify_zhang_petty_body(
                    K, grid, self._tol("zhang_petty_body"))))
        shear = np.array([[1.0, 0.5, 0.0], [0.0, 1.0, 0.5], [0.0, 0.0, 2.0]])
        cases.append(SuiteCase("affine", ("cube",), lambda: verify_affine_invariance(
            self._body("cube"), shear, None, grid, self._tol("affine_invariance"))))
        cases.append(SuiteCase("lemma31", ("cube",), lambda: verify_lemma31(
            self._fn("expnorm:cube"), grid, self._tol("lemma31"), spec)))
        cases.append(SuiteCase("lemma31", ("gaussian:3",), lambda: verify_lemma31(
            CovariogramFn(self._fn("gaussian:3"), spec=spec), grid, self._tol("lemma31"), spec)))
        cases.append(SuiteCase("remarks", ("cube",), lambda: verify_remark2(
            self._fn("expnorm:cube"), 1.0, 2.0, grid, self._tol("remark2"), spec)))
        return cases

    def cases(self) -> List[SuiteCase]:
        """Selected cases in declaration order."""
        selected = []
        for case in self.case_builders[self.config.dim]():
            if case.suite not in self.config.suites:
                continue
            if self.config.presets is not None and not set(case.tags) <= set(self.config.presets):
                continue
            selected.append(case)
        return selected

    def run(self) -> List[CheckReport]:
        """Run every selected case; failures are recorded and the suite continues."""
        reports = []
        for case in self.cases():
            started = time.perf_counter()
            try:
                report = case.run()
            except DivergentIntegralError as error:
                report = CheckReport(f"{case.suite}:{','.join(case.tags)}",
                                     CheckStatus.SKIPPED_DIVERGED, math.nan, math.nan, math.nan,
                                     self.config.tolerance or 0.0, details=str(error))
            except (QuadratureError, ValueError, ArithmeticError, RuntimeError) as error:
                logger.warning("%s check on %s failed: %s", case.suite, case.tags, error)
                report = CheckReport(f"{case.suite}:{','.join(case.tags)}", CheckStatus.FAIL,
                                     math.nan, math.nan, math.nan,
                                     self.config.tolerance or 0.0, details=str(error))
            if self.config.timings:
                report.runtime_ms = 1000.0 * (time.perf_counter() - started)
            logger.info("%s: %s", report.name, report.status.value)
            reports.append(report)
        return reports


def run_suite(config: SuiteConfig) -> List[CheckReport]:
    return VerificationSuite(config).run()


def suite_passed(reports: Sequence[CheckReport]) -> bool:
    """Aggregate status: no report failed (an empty report passes)."""
    return all(report.status is not CheckStatus.FAIL for report in reports)
