"""
Convex bodies in dimensions 1-3 and their exact primitives: gauge and radial
functions, support values, volumes, shadows, chords and the covariogram.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property, lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError

from numerics import (DEFAULT_SPEC, QuadratureSpec, gauss_legendre, integrate_interval,
                      tensor_gauss, unit_ball_volume)

logger = logging.getLogger(__name__)

ABS_TOL = 1e-12
CHORD_TOL = 1e-12
DIM3_CHORD_NODES = 64


class GeometryError(ValueError):
    """Invalid or degenerate convex body, or an unsupported operation on it."""


class BodyKind(Enum):
    HPOLYTOPE = "hpolytope"
    VPOLYTOPE = "vpolytope"
    BALL = "ball"
    SIMPLEX = "simplex"


def _frozen(array: Optional[np.ndarray]) -> Optional[np.ndarray]:
    if array is None:
        return None
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


def _hessian_normal(normals: np.ndarray, offsets: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    lengths = np.linalg.norm(normals, axis=1)
    if np.any(lengths <= ABS_TOL):
        raise GeometryError("halfspace normals must be nonzero")
    return normals / lengths[:, None], offsets / lengths


def polygon_area(vertices: np.ndarray) -> float:
    """Shoelace area of a polygon given by its vertex cycle."""
    if len(vertices) < 3:
        return 0.0
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


def clip_polygon(vertices: np.ndarray, normal: np.ndarray, offset: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a polygon against {z : normal.z <= offset}."""
    if len(vertices) == 0:
        return vertices
    signed = vertices @ normal - offset
    kept = []
    count = len(vertices)
    for i in range(count):
        j = (i + 1) % count
        if signed[i] <= 0:
            kept.append(vertices[i])
        if signed[i] * signed[j] < 0:
            share = signed[i] / (signed[i] - signed[j])
            kept.append(vertices[i] + share * (vertices[j] - vertices[i]))
    return np.array(kept).reshape(-1, 2)


def chebyshev_ball(normals: np.ndarray, offsets: np.ndarray) -> Tuple[float, Optional[np.ndarray]]:
    """Radius and centre of the largest ball inside {x : normals x <= offsets}."""
    dim = normals.shape[1]
    lengths = np.linalg.norm(normals, axis=1)
    cost = np.zeros(dim + 1)
    cost[-1] = -1.0
    result = linprog(cost, A_ub=np.hstack([normals, lengths[:, None]]), b_ub=offsets,
                     bounds=[(None, None)] * dim + [(0, None)], method="highs")
    if result.status != 0:
        logger.debug("chebyshev LP status %s: %s", result.status, result.message)
        return 0.0, None
    return float(result.x[-1]), result.x[:-1]


def _halfspace_polytope_volume(normals: np.ndarray, offsets: np.ndarray) -> float:
    radius, center = chebyshev_ball(normals, offsets)
    if center is None or radius <= 1e-10:
        return 0.0
    try:
        section = HalfspaceIntersection(np.hstack([normals, -offsets[:, None]]), center)
        return float(ConvexHull(section.intersections).volume)
    except QhullError as exc:
        logger.debug("degenerate halfspace intersection: %s", exc)
        return 0.0


def _cap_measure(dim: int, radius: float, height: float) -> float:
    """Measure of {z in radius*B : n.z >= height} for a unit vector n."""
    if height >= radius:
        return 0.0
    if height <= -radius:
        return unit_ball_volume(dim) * radius ** dim
    if dim == 1:
        return radius - height
    if dim == 2:
        return radius ** 2 * math.acos(height / radius) - height * math.sqrt(radius ** 2 - height ** 2)
    return math.pi * (radius - height) ** 2 * (2.0 * radius + height) / 3.0


def _lens_measure(dim: int, radius: float, distance: float) -> float:
    """Measure of the intersection of two radius-balls whose centres are distance apart."""
    if distance >= 2.0 * radius:
        return 0.0
    return 2.0 * _cap_measure(dim, radius, 0.5 * distance)


@dataclass(frozen=True, eq=False)
class Body:
    """Immutable convex body with nonempty interior in dimension 1, 2 or 3.

    Polytopes carry both an H-representation (unit normals, offsets) and a
    vertex list; planar vertex lists are counter-clockwise. A ball is the
    ellipsoid center + shape @ (radius * B), shape being the identity unless
    the body came out of an affine map.
    """
    kind: BodyKind
    dim: int
    normals: Optional[np.ndarray] = None
    offsets: Optional[np.ndarray] = None
    vertices: Optional[np.ndarray] = None
    center: Optional[np.ndarray] = None
    radius: Optional[float] = None
    shape: Optional[np.ndarray] = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        for name in ("normals", "offsets", "vertices", "center", "shape"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    # -- constructors -----------------------------------------------------

    @classmethod
    def hpolytope(cls, normals, offsets, label: str = "") -> "Body":
        """Polytope {x : a_i . x <= b_i}; must be bounded with nonempty interior."""
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        offsets = np.atleast_1d(np.asarray(offsets, dtype=float))
        if normals.shape[0] != offsets.shape[0]:
            raise GeometryError("need one offset per normal")
        dim = normals.shape[1]
        _check_dim(dim)
        normals, offsets = _hessian_normal(normals, offsets)

        for axis in range(dim):
            for sign in (1.0, -1.0):
                cost = np.zeros(dim)
                cost[axis] = -sign
                result = linprog(cost, A_ub=normals, b_ub=offsets,
                                 bounds=[(None, None)] * dim, method="highs")
                if result.status == 3:
                    raise GeometryError("halfspace system is unbounded")
                if result.status != 0:
                    raise GeometryError(f"halfspace system is infeasible: {result.message}")

        radius, center = chebyshev_ball(normals, offsets)
        if center is None or radius <= 1e-9:
            raise GeometryError("halfspace system has empty interior")

        if dim == 1:
            upper = float(np.min(offsets[normals[:, 0] > 0] / normals[normals[:, 0] > 0, 0]))
            lower = float(np.max(offsets[normals[:, 0] < 0] / normals[normals[:, 0] < 0, 0]))
            vertices = np.array([[lower], [upper]])
        else:
            section = HalfspaceIntersection(np.hstack([normals, -offsets[:, None]]), center)
            hull = ConvexHull(section.intersections)
            vertices = section.intersections[hull.vertices]
        return cls(BodyKind.HPOLYTOPE, dim, normals=normals, offsets=offsets,
                   vertices=vertices, label=label)

    @classmethod
    def vpolytope(cls, vertices, label: str = "", kind: BodyKind = BodyKind.VPOLYTOPE) -> "Body":
        """Convex hull of a finite point set with full-dimensional affine hull."""
        points = np.asarray(vertices, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        dim = points.shape[1]
        _check_dim(dim)
        if dim == 1:
            lower, upper = float(points.min()), float(points.max())
            if upper - lower <= ABS_TOL:
                raise GeometryError("interval has zero length")
            return cls(kind, 1, normals=np.array([[1.0], [-1.0]]),
                       offsets=np.array([upper, -lower]),
                       vertices=np.array([[lower], [upper]]), label=label)
        try:
            hull = ConvexHull(points)
        except QhullError as exc:
            raise GeometryError(f"vertices do not span dimension {dim}: {exc}") from exc
        if hull.volume <= ABS_TOL:
            raise GeometryError("convex hull has zero volume")
        return cls(kind, dim, normals=hull.equations[:, :-1], offsets=-hull.equations[:, -1],
                   vertices=points[hull.vertices], label=label)

    @classmethod
    def simplex(cls, vertices, label: str = "") -> "Body":
        """Simplex spanned by dim+1 affinely independent points."""
        points = np.asarray(vertices, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if points.shape[0] != points.shape[1] + 1:
            raise GeometryError("a simplex in dimension n needs n+1 vertices")
        if abs(np.linalg.det(points[1:] - points[0])) <= ABS_TOL:
            raise GeometryError("simplex vertices are affinely dependent")
        return cls.vpolytope(points, label=label, kind=BodyKind.SIMPLEX)

    @classmethod
    def ball(cls, center, radius: float, shape=None, label: str = "") -> "Body":
        """Euclidean ball, or the ellipsoid center + shape(radius B) when shape is given."""
        center = np.atleast_1d(np.asarray(center, dtype=float))
        dim = center.shape[0]
        _check_dim(dim)
        if not radius > 0:
            raise GeometryError("ball radius must be positive")
        shape = np.eye(dim) if shape is None else np.asarray(shape, dtype=float)
        if shape.shape != (dim, dim) or abs(np.linalg.det(shape)) <= ABS_TOL:
            raise GeometryError("ellipsoid shape must be an invertible square matrix")
        return cls(BodyKind.BALL, dim, center=center, radius=float(radius), shape=shape,
                   label=label)

    # -- derived data -----------------------------------------------------

    @property
    def is_polytope(self) -> bool:
        return self.kind is not BodyKind.BALL

    @cached_property
    def hull(self) -> ConvexHull:
        return ConvexHull(self.vertices)

    @cached_property
    def shape_inverse(self) -> np.ndarray:
        return np.linalg.inv(self.shape)

    @cached_property
    def origin_interior(self) -> bool:
        if self.is_polytope:
            return bool(np.all(self.offsets > ABS_TOL))
        local = self.shape_inverse @ self.center
        return bool(local @ local < self.radius ** 2 * (1.0 - 1e-12))

    def scaled(self, factor: float) -> "Body":
        """The dilate factor * K (factor > 0)."""
        if not factor > 0:
            raise GeometryError(f"dilation factor must be positive, got {factor}")
        if self.is_polytope:
            return replace(self, offsets=self.offsets * factor, vertices=self.vertices * factor)
        return replace(self, center=self.center * factor, radius=self.radius * factor)

    def translated(self, shift) -> "Body":
        shift = np.asarray(shift, dtype=float)
        if self.is_polytope:
            return replace(self, offsets=self.offsets + self.normals @ shift,
                           vertices=self.vertices + shift)
        return replace(self, center=self.center + shift)

    def __repr__(self) -> str:
        name = f" {self.label}" if self.label else ""
        return f"Body({self.kind.value}{name}, dim={self.dim})"


def _check_dim(dim: int) -> None:
    if dim not in (1, 2, 3):
        raise GeometryError(f"bodies live in dimension 1, 2 or 3, got {dim}")


def _points(K: Body, x) -> Tuple[np.ndarray, bool]:
    array = np.asarray(x, dtype=float)
    single = array.ndim <= 1 and array.size == K.dim
    return array.reshape(-1, K.dim), single


def _unwrap(values: np.ndarray, single: bool):
    return float(values[0]) if single else values


def contains(K: Body, x, tol: float = ABS_TOL):
    """Membership test, vectorised over rows of x."""
    points, single = _points(K, x)
    if K.is_polytope:
        inside = np.all(points @ K.normals.T <= K.offsets + tol, axis=1)
    else:
        local = (points - K.center) @ K.shape_inverse.T
        inside = np.einsum("ij,ij->i", local, local) <= (K.radius + tol) ** 2
    return bool(inside[0]) if single else inside


def minkowski_functional(K: Body, x):
    """Gauge inf{lam > 0 : x in lam K}; +inf when no dilate contains x."""
    points, single = _points(K, x)
    zero = np.linalg.norm(points, axis=1) <= ABS_TOL

    if K.is_polytope:
        products = points @ K.normals.T
        b = K.offsets
        positive, negative = b > ABS_TOL, b < -ABS_TOL
        flat = ~(positive | negative)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = products / np.where(flat, 1.0, b)
        lower = np.max(np.where(positive, ratios, 0.0), axis=1, initial=0.0)
        upper = np.min(np.where(negative, ratios, np.inf), axis=1, initial=np.inf)
        blocked = np.any(flat & (products > ABS_TOL), axis=1)
        infeasible = blocked | (lower > upper) | (upper <= 0)
        values = np.where(infeasible, np.inf, lower)
    else:
        y = points @ K.shape_inverse.T
        d = K.shape_inverse @ K.center
        a = K.radius ** 2 - d @ d
        b = y @ d
        c = np.einsum("ij,ij->i", y, y)
        disc = b * b + a * c
        with np.errstate(divide="ignore", invalid="ignore"):
            if a > ABS_TOL:
                values = (np.sqrt(np.maximum(disc, 0.0)) - b) / a
            elif a >= -ABS_TOL:
                values = np.where(b > 0, c / (2.0 * b), np.inf)
            else:
                root = np.sqrt(np.maximum(disc, 0.0))
                small, large = (-b + root) / a, (-b - root) / a
                values = np.where((disc >= 0) & (large > 0), np.maximum(small, 0.0), np.inf)
    values = np.where(zero, 0.0, values)
    return _unwrap(values, single)


def radial(K: Body, u):
    """Radial function sup{lam >= 0 : lam u in K}; needs 0 in int K."""
    if not K.origin_interior:
        raise GeometryError("radial function needs the origin in the interior of the body")
    directions, single = _points(K, u)
    return _unwrap(1.0 / np.asarray(minkowski_functional(K, directions)), single)


def support_value(K: Body, u):
    """Support function max_{x in K} u.x, vectorised over rows of u."""
    directions, single = _points(K, u)
    if K.is_polytope:
        values = np.max(directions @ K.vertices.T, axis=1)
    else:
        values = directions @ K.center + K.radius * np.linalg.norm(directions @ K.shape, axis=1)
    return _unwrap(values, single)


def width(K: Body, u):
    """Extent of K along u: h_K(u) + h_K(-u)."""
    directions, single = _points(K, u)
    values = support_value(K, directions) + support_value(K, -directions)
    return _unwrap(np.asarray(values), single)


def bounding_box(K: Body) -> Tuple[np.ndarray, np.ndarray]:
    axes = np.eye(K.dim)
    return -np.asarray(support_value(K, -axes)), np.asarray(support_value(K, axes))


def volume(K: Body) -> float:
    """Lebesgue measure of K."""
    if K.kind is BodyKind.BALL:
        return unit_ball_volume(K.dim) * K.radius ** K.dim * abs(float(np.linalg.det(K.shape)))
    if K.dim == 1:
        return float(K.vertices[1, 0] - K.vertices[0, 0])
    if K.kind is BodyKind.SIMPLEX:
        edges = K.vertices[1:] - K.vertices[0]
        return abs(float(np.linalg.det(edges))) / math.factorial(K.dim)
    if K.dim == 2:
        return polygon_area(K.vertices)
    return float(K.hull.volume)


def _plane_basis(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis of u-perp as rows (dim 2 or 3)."""
    if len(u) == 2:
        return np.array([[-u[1], u[0]]])
    helper = np.eye(3)[int(np.argmin(np.abs(u)))]
    first = np.cross(u, helper)
    first /= np.linalg.norm(first)
    return np.array([first, np.cross(u, first)])


def project_volume(K: Body, u) -> float:
    """(dim-1)-measure of the orthogonal projection of K onto u-perp.

    In dimension 1 the shadow is a point, measured with the counting measure.
    """
    u = np.asarray(u, dtype=float).reshape(K.dim)
    if K.dim == 1:
        return 1.0
    if K.dim == 2:
        return float(width(K, _plane_basis(u)[0]))
    if K.kind is BodyKind.BALL:
        return (math.pi * K.radius ** 2 * abs(float(np.linalg.det(K.shape)))
                * float(np.linalg.norm(K.shape_inverse @ u)))
    shadow = K.vertices @ _plane_basis(u).T
    return float(ConvexHull(shadow).volume)


@lru_cache(maxsize=128)
def _facet_measures(K: Body) -> Tuple[np.ndarray, np.ndarray]:
    hull = K.hull
    corners = hull.points[hull.simplices]
    areas = 0.5 * np.linalg.norm(np.cross(corners[:, 1] - corners[:, 0],
                                          corners[:, 2] - corners[:, 0]), axis=1)
    return hull.equations[:, :3], areas


def project_volumes(K: Body, directions: np.ndarray) -> np.ndarray:
    """Shadow measures for many directions at once.

    Planar bodies use the support extent along u-perp; polytopes in dimension 3
    use the Cauchy formula |P K| = 1/2 sum_F |F| |n_F . u|.
    """
    directions = np.asarray(directions, dtype=float).reshape(-1, K.dim)
    if K.dim == 1:
        return np.ones(len(directions))
    if K.dim == 2:
        perp = np.stack([-directions[:, 1], directions[:, 0]], axis=-1)
        return np.asarray(width(K, perp))
    if K.kind is BodyKind.BALL:
        scale = math.pi * K.radius ** 2 * abs(float(np.linalg.det(K.shape)))
        return scale * np.linalg.norm(directions @ K.shape_inverse.T, axis=1)
    normals, areas = _facet_measures(K)
    return 0.5 * np.abs(directions @ normals.T) @ areas


def chord_interval(K: Body, y, u) -> Tuple[np.ndarray, np.ndarray]:
    """Parameter range {lam : y + lam u in K}, vectorised over rows of y.

    Empty ranges come back with upper < lower.
    """
    points, _ = _points(K, y)
    u = np.asarray(u, dtype=float).reshape(K.dim)
    if K.is_polytope:
        slopes = K.normals @ u
        slack = K.offsets - points @ K.normals.T
        moving = np.abs(slopes) > ABS_TOL
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = slack / np.where(moving, slopes, 1.0)
        lower = np.max(np.where(moving & (slopes < 0), ratios, -np.inf), axis=1)
        upper = np.min(np.where(moving & (slopes > 0), ratios, np.inf), axis=1)
        blocked = np.any(~moving & (slack < -ABS_TOL), axis=1)
        upper = np.where(blocked, -np.inf, upper)
        return lower, upper
    local = (points - K.center) @ K.shape_inverse.T
    direction = K.shape_inverse @ u
    a = direction @ direction
    b = 2.0 * local @ direction
    c = np.einsum("ij,ij->i", local, local) - K.radius ** 2
    disc = b * b - 4.0 * a * c
    root = np.sqrt(np.maximum(disc, 0.0))
    lower = np.where(disc > 0, (-b - root) / (2.0 * a), np.inf)
    upper = np.where(disc > 0, (-b + root) / (2.0 * a), -np.inf)
    return lower, upper


def chord_length(K: Body, y, u):
    """Length of K cut by the line y + span(u); 0 if the line misses K."""
    points, single = _points(K, y)
    lower, upper = chord_interval(K, points, u)
    lengths = upper - lower
    lengths = np.where(lengths < CHORD_TOL, 0.0, lengths)
    return _unwrap(lengths, single)


def one_sided_chord(K: Body, x, u):
    """Length of {lam >= 0 : x + lam u in K}."""
    points, single = _points(K, x)
    lower, upper = chord_interval(K, points, u)
    lengths = upper - np.maximum(lower, 0.0)
    lengths = np.where(lengths < CHORD_TOL, 0.0, lengths)
    return _unwrap(lengths, single)


def chord_moment(K: Body, u, transform: Callable[[np.ndarray], np.ndarray],
                 spec: Optional[QuadratureSpec] = None) -> float:
    """Integral over the shadow P_{u-perp} K of transform(chord length).

    transform must send 0 to 0. Dimension 1 uses the counting measure on the
    one-point shadow; dimension 3 a tensor Gauss grid over the shadow's
    bounding box.
    """
    spec = spec or DEFAULT_SPEC
    u = np.asarray(u, dtype=float).reshape(K.dim)
    u = u / np.linalg.norm(u)
    if K.dim == 1:
        return float(transform(np.array([volume(K)]))[0])

    basis = _plane_basis(u)
    if K.dim == 2:
        w = basis[0]
        lo, hi = -float(support_value(K, -w)), float(support_value(K, w))
        breaks = K.vertices @ w if K.is_polytope else None

        def slice_value(tau: float) -> float:
            length = chord_length(K, tau * w, u)
            return float(transform(np.array([length]))[0]) if length > 0 else 0.0

        return integrate_interval(slice_value, lo, hi, spec, points=breaks)

    axes = []
    for w in basis:
        axes.append(gauss_legendre(-float(support_value(K, -w)), float(support_value(K, w)),
                                   DIM3_CHORD_NODES))
    t1, t2 = np.meshgrid(axes[0][0], axes[1][0], indexing="ij")
    w1, w2 = np.meshgrid(axes[0][1], axes[1][1], indexing="ij")
    offsets = np.outer(t1.ravel(), basis[0]) + np.outer(t2.ravel(), basis[1])
    lengths = np.asarray(chord_length(K, offsets, u))
    values = np.zeros_like(lengths)
    inside = lengths > 0
    values[inside] = transform(lengths[inside])
    return float(np.sum(values * (w1 * w2).ravel()))


@lru_cache(maxsize=128)
def difference_body(K: Body) -> Body:
    """Difference body K - K (origin symmetric)."""
    if K.kind is BodyKind.BALL:
        return Body.ball(np.zeros(K.dim), 2.0 * K.radius, K.shape)
    differences = (K.vertices[:, None, :] - K.vertices[None, :, :]).reshape(-1, K.dim)
    return Body.vpolytope(differences)


def max_chord(K: Body, u) -> float:
    """Longest chord of K parallel to u (radial function of K - K)."""
    return float(radial(difference_body(K), u))


def covariogram_body(K: Body, x) -> float:
    """Covariogram g_K(x) = |K cap (x + K)|."""
    x = np.asarray(x, dtype=float).reshape(K.dim)
    if K.kind is BodyKind.BALL:
        local = K.shape_inverse @ x
        return (abs(float(np.linalg.det(K.shape)))
                * _lens_measure(K.dim, K.radius, float(np.linalg.norm(local))))
    if K.dim == 1:
        return max(0.0, volume(K) - abs(float(x[0])))
    shifted = K.offsets + K.normals @ x
    if K.dim == 2:
        section = K.vertices
        for normal, offset in zip(K.normals, shifted):
            section = clip_polygon(section, normal, offset)
            if len(section) < 3:
                return 0.0
        return polygon_area(section)
    return _halfspace_polytope_volume(np.vstack([K.normals, K.normals]),
                                      np.concatenate([K.offsets, shifted]))


def clipped_volume(K: Body, a, c: float) -> float:
    """Measure of K cap {x : a.x >= c}."""
    a = np.asarray(a, dtype=float).reshape(K.dim)
    norm = float(np.linalg.norm(a))
    if norm <= ABS_TOL:
        return volume(K) if c <= 0 else 0.0
    if K.kind is BodyKind.BALL:
        stretched = K.shape.T @ a
        length = float(np.linalg.norm(stretched))
        height = (c - float(a @ K.center)) / length
        return abs(float(np.linalg.det(K.shape))) * _cap_measure(K.dim, K.radius, height)
    if K.dim == 1:
        lower, upper = float(K.vertices[0, 0]), float(K.vertices[1, 0])
        cut = c / a[0]
        if a[0] > 0:
            return max(0.0, upper - max(lower, cut))
        return max(0.0, min(upper, cut) - lower)
    if K.dim == 2:
        return polygon_area(clip_polygon(K.vertices, -a, -c))
    return _halfspace_polytope_volume(np.vstack([K.normals, -a[None, :]]),
                                      np.concatenate([K.offsets, [-c]]))


def affine_map(K: Body, M, v=None) -> Body:
    """Image M K + v, kept in the representation family of K."""
    M = np.asarray(M, dtype=float).reshape(K.dim, K.dim)
    v = np.zeros(K.dim) if v is None else np.asarray(v, dtype=float).reshape(K.dim)
    det = float(np.linalg.det(M))
    if abs(det) <= ABS_TOL:
        raise GeometryError("affine map is singular")
    if K.kind is BodyKind.BALL:
        return Body.ball(M @ K.center + v, K.radius, M @ K.shape, label=K.label)
    vertices = K.vertices @ M.T + v
    if K.dim == 2 and det < 0:
        vertices = vertices[::-1]
    normals = K.normals @ np.linalg.inv(M)
    offsets = K.offsets + normals @ v
    normals, offsets = _hessian_normal(normals, offsets)
    if K.dim == 1 and det < 0:
        vertices = vertices[::-1]
    return Body(K.kind, K.dim, normals=normals, offsets=offsets, vertices=vertices,
                label=K.label)


def _inner_spec(spec: QuadratureSpec) -> QuadratureSpec:
    return replace(spec, rel_tol=0.1 * spec.rel_tol, abs_tol=0.1 * spec.abs_tol)


def _polar_integral(K: Body, fn: Callable[[np.ndarray], np.ndarray],
                    spec: QuadratureSpec) -> float:
    """Integral over a planar ellipse in polar coordinates about its center."""
    inner = _inner_spec(spec)

    def ring(theta: float) -> float:
        axis = K.shape @ np.array([math.cos(theta), math.sin(theta)])
        return integrate_interval(lambda r: r * float(fn((K.center + r * axis)[None, :])[0]),
                                  0.0, K.radius, inner)

    return abs(float(np.linalg.det(K.shape))) * integrate_interval(ring, 0.0, 2.0 * math.pi, spec)


def integrate_over_body(K: Body, fn: Callable[[np.ndarray], np.ndarray],
                        spec: Optional[QuadratureSpec] = None, nodes: int = 64) -> float:
    """Integral of a vectorised fn over K.

    Dimensions 1 and 2 use (iterated) adaptive quadrature, with the chords of
    K as inner limits or polar coordinates for ellipses; dimension 3 a tensor
    Gauss grid over the bounding box restricted to K.
    """
    spec = spec or DEFAULT_SPEC
    lower, upper = bounding_box(K)
    if K.dim == 1:
        return integrate_interval(lambda s: float(fn(np.array([[s]]))[0]),
                                  float(lower[0]), float(upper[0]), spec)
    if K.dim == 2 and K.kind is BodyKind.BALL:
        return _polar_integral(K, fn, spec)
    if K.dim == 2:
        e2 = np.array([0.0, 1.0])
        breaks = K.vertices[:, 0]
        inner = _inner_spec(spec)

        def column(s: float) -> float:
            low, high = chord_interval(K, np.array([s, 0.0]), e2)
            low, high = float(low[0]), float(high[0])
            if high - low < CHORD_TOL:
                return 0.0
            return integrate_interval(lambda r: float(fn(np.array([[s, r]]))[0]),
                                      low, high, inner)

        return integrate_interval(column, float(lower[0]), float(upper[0]), spec, points=breaks)

    points, weights = tensor_gauss(lower, upper, nodes)
    inside = np.asarray(contains(K, points))
    if not np.any(inside):
        return 0.0
    return float(np.sum(np.asarray(fn(points[inside])) * weights[inside]))


def sample_uniform(K: Body, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points of K: exact for ellipsoids, box rejection for polytopes."""
    if K.kind is BodyKind.BALL:
        directions = rng.standard_normal((count, K.dim))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = K.radius * rng.uniform(size=count) ** (1.0 / K.dim)
        return K.center + (directions * radii[:, None]) @ K.shape.T
    lower, upper = bounding_box(K)
    accepted = []
    total = 0
    while total < count:
        batch = rng.uniform(lower, upper, size=(max(2 * (count - total), 64), K.dim))
        batch = batch[np.asarray(contains(K, batch))]
        accepted.append(batch)
        total += len(batch)
    return np.vstack(accepted)[:count]
