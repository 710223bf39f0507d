"""
Named bodies, functions, profiles and witnesses, the descriptor strings that
refer to them, and the default settings of the verification suite.
"""

import configparser
import logging
import re
from typing import Callable, Dict, Mapping, Optional, Tuple

import numpy as np

from berwald import ConcaveWitness, MomentProfile
from geometry import Body, BodyKind, GeometryError, minkowski_functional
from logconcave import LogConcaveFunction

logger = logging.getLogger(__name__)


class DescriptorError(ValueError):
    """A preset name, descriptor string or description file cannot be resolved."""


_SQUARE_NORMALS = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
_CUBE_NORMALS = np.vstack([np.eye(3), -np.eye(3)])


class Presets:
    """Named objects shared by the suite, the CLI and the tests."""

    BODIES: Dict[str, Callable[[], Body]] = {
        "interval": lambda: Body.hpolytope([[1.0], [-1.0]], [1.0, 1.0], label="interval"),
        "interval01": lambda: Body.hpolytope([[1.0], [-1.0]], [1.0, 0.0], label="interval01"),
        "square": lambda: Body.hpolytope(_SQUARE_NORMALS, np.ones(4), label="square"),
        "cube": lambda: Body.hpolytope(_CUBE_NORMALS, np.ones(6), label="cube"),
        "disk": lambda: Body.ball(np.zeros(2), 1.0, label="disk"),
        "ball3": lambda: Body.ball(np.zeros(3), 1.0, label="ball3"),
        "ellipse": lambda: Body.ball(np.zeros(2), 1.0, shape=np.diag([1.0, 3.0]), label="ellipse"),
        "simplex2": lambda: Body.simplex([[-0.25, -0.25], [0.75, -0.25], [-0.25, 0.75]],
                                         label="simplex2"),
        "simplex3": lambda: Body.simplex([[-0.25, -0.25, -0.25], [0.75, -0.25, -0.25],
                                          [-0.25, 0.75, -0.25], [-0.25, -0.25, 0.75]],
                                         label="simplex3"),
        "triangle": lambda: Body.simplex([[0.0, 0.0], [2.0, 0.0], [0.5, 1.5]], label="triangle"),
    }

    @classmethod
    def body_names(cls) -> Tuple[str, ...]:
        return tuple(cls.BODIES)

    @classmethod
    def body(cls, name: str, extra: Optional[Mapping[str, Body]] = None) -> Body:
        """Resolve a preset name, preferring bodies loaded from a config file."""
        if extra and name in extra:
            return extra[name]
        if name not in cls.BODIES:
            raise DescriptorError(f"unknown body preset '{name}'")
        return cls.BODIES[name]()

    @classmethod
    def function(cls, descriptor: str,
                 extra: Optional[Mapping[str, Body]] = None) -> LogConcaveFunction:
        """indicator:<body>, expnorm:<body> or gaussian:<dim>."""
        kind, _, argument = descriptor.partition(":")
        try:
            if kind == "gaussian":
                dim = int(argument)
                if dim not in (1, 2, 3):
                    raise DescriptorError(f"gaussian dimension must be 1, 2 or 3, got {dim}")
                return LogConcaveFunction.gaussian(dim)
            if kind == "indicator":
                return LogConcaveFunction.indicator(cls.body(argument, extra))
            if kind == "expnorm":
                return LogConcaveFunction.expnorm(cls.body(argument, extra))
        except (GeometryError, ValueError) as error:
            if isinstance(error, DescriptorError):
                raise
            raise DescriptorError(f"bad function descriptor '{descriptor}': {error}") from error
        raise DescriptorError(f"unknown function kind in '{descriptor}'")

    @classmethod
    def profile(cls, descriptor: str) -> MomentProfile:
        """linear:c, power:alpha, constant:c or piecewise:r0,v0;r1,v1;..."""
        kind, _, argument = descriptor.partition(":")
        try:
            if kind == "linear":
                return MomentProfile.linear(float(argument))
            if kind == "power":
                return MomentProfile.power(float(argument))
            if kind == "constant":
                return MomentProfile.constant(float(argument))
            if kind == "piecewise":
                pairs = [_floats(chunk) for chunk in argument.split(";") if chunk.strip()]
                if any(len(pair) != 2 for pair in pairs):
                    raise DescriptorError("piecewise knots are r,value pairs")
                knots, values = zip(*pairs)
                return MomentProfile.piecewise_linear(knots, values)
        except ValueError as error:
            if isinstance(error, DescriptorError):
                raise
            raise DescriptorError(f"bad profile descriptor '{descriptor}': {error}") from error
        raise DescriptorError(f"unknown profile kind in '{descriptor}'")

    @classmethod
    def witness(cls, descriptor: str, dim: int) -> ConcaveWitness:
        """chord[:u], affine:<a1,..,an,b,c> or the shorthand affine:x, affine:x1+1."""
        kind, _, argument = descriptor.partition(":")
        try:
            if kind == "chord":
                direction = _floats(argument) if argument else np.eye(dim)[0]
                _expect_length(direction, dim, descriptor)
                return ConcaveWitness.one_sided_chord(direction)
            if kind == "affine":
                shorthand = re.fullmatch(r"x(\d?)([+-]\d+(?:\.\d*)?)?", argument.replace(" ", ""))
                if shorthand:
                    axis = int(shorthand.group(1) or 1) - 1
                    if not 0 <= axis < dim:
                        raise DescriptorError(f"coordinate out of range in '{descriptor}'")
                    return ConcaveWitness.coordinate_affine(np.eye(dim)[axis], 0.0,
                                                            float(shorthand.group(2) or 0.0))
                values = _floats(argument)
                _expect_length(values, dim + 2, descriptor)
                return ConcaveWitness.coordinate_affine(values[:dim], values[dim], values[dim + 1])
        except ValueError as error:
            if isinstance(error, DescriptorError):
                raise
            raise DescriptorError(f"bad witness descriptor '{descriptor}': {error}") from error
        raise DescriptorError(f"unknown witness kind in '{descriptor}'")

    @classmethod
    def concave_function(cls, descriptor: str, K: Body) -> Callable[[np.ndarray], np.ndarray]:
        """constant:c, cone (1 - ||x||_K) or affine:a1,..,an,c; vectorised over rows."""
        kind, _, argument = descriptor.partition(":")
        try:
            if kind == "constant":
                value = float(argument or 1.0)
                return lambda x: np.full(len(np.atleast_2d(x)), value)
            if kind == "cone":
                if not K.origin_interior:
                    raise DescriptorError("the cone function needs the origin inside the body")
                return lambda x: 1.0 - np.asarray(minkowski_functional(K, np.atleast_2d(x)))
            if kind == "affine":
                values = _floats(argument)
                _expect_length(values, K.dim + 1, descriptor)
                slope, offset = values[:K.dim], values[K.dim]
                return lambda x: np.atleast_2d(x) @ slope + offset
        except ValueError as error:
            if isinstance(error, DescriptorError):
                raise
            raise DescriptorError(f"bad function descriptor '{descriptor}': {error}") from error
        raise DescriptorError(f"unknown concave function kind in '{descriptor}'")


def _floats(text: str) -> np.ndarray:
    return np.array([float(part) for part in text.split(",") if part.strip()])


def _expect_length(values: np.ndarray, count: int, descriptor: str) -> None:
    if len(values) != count:
        raise DescriptorError(f"expected {count} numbers in '{descriptor}', got {len(values)}")


class SuiteDefaults:
    """Defaults of the verification suite."""

    SUITES = ("lemma21", "thm11", "zhang", "lemma31", "lemma33", "remarks", "inclusion",
              "affine", "rearrangement", "classical")

    P_GRID_PROFILE = (-0.9, -0.5, -0.1, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0)
    P_GRID_EPIGRAPH = (-0.9, -0.5, -0.1, 0.0, 0.5, 1.0, 2.0, 4.0)
    P_GRID_BODY = (0.5, 1.0, 2.0, 4.0, 8.0)
    P_CHORD_POWER = (0.5, 1.0, 2.0)
    P_REARRANGEMENT = (0.5, 1.0, 2.0)
    P_DIRECT_ROUTE = 1.0
    REMARK2_PAIRS = ((1.0, 2.0), (0.5, 3.0))
    REMARK3_SEQUENCE = (-0.5, -0.9, -0.99)

    TOLERANCES = {
        "lemma21": 1e-6,
        "thm11": 1e-4,
        "zhang_petty_body": 1e-3,
        "zhang_functional": 1e-3,
        "lemma31": 1e-2,
        "lemma33": 1e-3,
        "remark1": 1e-4,
        "remark2": 1e-6,
        "remark3": 1e-2,
        "final_inclusion": 1e-4,
        "affine_invariance": 1e-3,
        "rearrangement": 1e-3,
        "classical_berwald": 1e-6,
        "holder_mean": 1e-6,
        "zhang_consistency": 2e-2,
    }
    TOLERANCE_3D = 2e-2
    EQUALITY_TOLERANCE = 2e-2
    EQUALITY_THRESHOLD = 0.97

    GRID_SIZE = {1: 2, 2: 720, 3: 1000}
    LEMMA33_DIRECTIONS = 8
    MC_SAMPLES = 400_000
    SEED = 42

    @classmethod
    def tolerance(cls, check: str, dim: int = 2) -> float:
        base = cls.TOLERANCES[check]
        return max(base, cls.TOLERANCE_3D) if dim == 3 else base

    @classmethod
    def grid_size(cls, dim: int) -> int:
        return cls.GRID_SIZE[dim]


def _rows(text: str) -> list:
    return [line.strip() for line in text.strip().splitlines() if line.strip()]


def body_from_section(section: Mapping[str, str], label: str = "") -> Body:
    """Build a body from `kind`, `dim`, `vertices` / `constraints` (a1 a2 / b) or `center` and `radius`."""
    try:
        kind = BodyKind(section.get("kind", "").strip())
        dim = int(section.get("dim", "0"))
        if dim not in (1, 2, 3):
            raise DescriptorError(f"body dimension must be 1, 2 or 3, got {dim}")
        if kind is BodyKind.BALL:
            center = np.array([float(v) for v in section.get("center", "0 " * dim).split()])
            if len(center) != dim:
                raise DescriptorError("center has the wrong dimension")
            return Body.ball(center, float(section.get("radius", "1")), label=label)
        if kind is BodyKind.HPOLYTOPE:
            normals, offsets = [], []
            for row in _rows(section.get("constraints", "")):
                lhs, _, rhs = row.partition("/")
                normals.append([float(v) for v in lhs.split()])
                offsets.append(float(rhs))
            if any(len(normal) != dim for normal in normals):
                raise DescriptorError("constraint rows have the wrong dimension")
            return Body.hpolytope(normals, offsets, label=label)
        vertices = [[float(v) for v in row.split()] for row in _rows(section.get("vertices", ""))]
        if not vertices or any(len(vertex) != dim for vertex in vertices):
            raise DescriptorError("vertex rows missing or of the wrong dimension")
        if kind is BodyKind.SIMPLEX:
            return Body.simplex(vertices, label=label)
        return Body.vpolytope(vertices, label=label)
    except DescriptorError:
        raise
    except (GeometryError, ValueError) as error:
        raise DescriptorError(f"invalid body description: {error}") from error


def _read_config(path: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except (OSError, configparser.Error) as error:
        raise DescriptorError(f"cannot read {path}: {error}") from error
    return parser


def load_body_file(path: str) -> Body:
    """Read the [body] section of a description file."""
    parser = _read_config(path)
    if not parser.has_section("body"):
        raise DescriptorError(f"{path} has no [body] section")
    return body_from_section(parser["body"], label=path)


def load_suite_file(path: str) -> Tuple[Dict[str, str], Dict[str, Body]]:
    """Read the [suite] options and the [body.<name>] sections of a config file."""
    parser = _read_config(path)
    options = dict(parser["suite"]) if parser.has_section("suite") else {}
    bodies = {}
    for name in parser.sections():
        if name.startswith("body."):
            label = name[len("body."):]
            bodies[label] = body_from_section(parser[name], label=label)
    logger.info("loaded %d suite options and %d bodies from %s", len(options), len(bodies), path)
    return options, bodies
