#!/usr/bin/env python3
"""
Test convex bodies and their primitives
"""

import math
import sys

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from geometry import (Body, BodyKind, GeometryError, affine_map, chord_length, chord_moment,
                      clipped_volume, contains, covariogram_body, integrate_over_body, max_chord,
                      minkowski_functional, one_sided_chord, project_volume, project_volumes,
                      radial, sample_uniform, support_value, volume)
from numerics import direction_grid
from presets import Presets
from random_bodies import random_polygon, random_triangle


def square():
    return Presets.body("square")


def test_preset_volumes():
    assert volume(square()) == pytest.approx(4.0)
    assert volume(Presets.body("cube")) == pytest.approx(8.0)
    assert volume(Presets.body("disk")) == pytest.approx(math.pi)
    assert volume(Presets.body("ball3")) == pytest.approx(4.0 * math.pi / 3.0)
    assert volume(Presets.body("simplex2")) == pytest.approx(0.5)
    assert volume(Presets.body("simplex3")) == pytest.approx(1.0 / 6.0)
    assert volume(Presets.body("ellipse")) == pytest.approx(3.0 * math.pi)
    assert volume(Presets.body("interval01")) == pytest.approx(1.0)


def test_gauge_radial_support():
    K = square()
    assert minkowski_functional(K, [2.0, 0.0]) == pytest.approx(2.0)
    assert minkowski_functional(K, [0.0, 0.0]) == 0.0
    assert minkowski_functional(K, [[1.0, 1.0], [0.5, -0.25]]) == pytest.approx([1.0, 0.5])
    assert radial(Presets.body("disk"), [0.0, 1.0]) == pytest.approx(1.0)
    assert radial(K, [1.0, 1.0]) == pytest.approx(1.0)
    assert support_value(K, [1.0, 1.0]) == pytest.approx(2.0)
    assert support_value(Presets.body("disk"), [3.0, 4.0]) == pytest.approx(5.0)


def test_radial_needs_interior_origin():
    with pytest.raises(GeometryError):
        radial(Presets.body("triangle"), [1.0, 0.0])


def test_projections():
    assert project_volume(square(), [1.0, 0.0]) == pytest.approx(2.0)
    diagonal = np.array([1.0, 1.0]) / math.sqrt(2.0)
    assert project_volume(square(), diagonal) == pytest.approx(2.0 * math.sqrt(2.0))
    assert project_volume(Presets.body("disk"), [0.6, 0.8]) == pytest.approx(2.0)
    assert project_volume(Presets.body("cube"), [0.0, 0.0, 1.0]) == pytest.approx(4.0)
    assert project_volume(Presets.body("ball3"), [0.0, 1.0, 0.0]) == pytest.approx(math.pi)


def test_cauchy_formula_matches_projected_hull():
    rng = np.random.default_rng(11)
    directions = rng.standard_normal((6, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    for name in ("cube", "simplex3"):
        K = Presets.body(name)
        cauchy = project_volumes(K, directions)
        direct = [project_volume(K, u) for u in directions]
        assert cauchy == pytest.approx(direct, rel=1e-9)


def test_ellipsoid_shadow_matches_projected_surface():
    shear = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    E = affine_map(Presets.body("ball3"), shear)
    surface = direction_grid(3, 20000).directions @ shear.T
    directions = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.6, 0.0, 0.8]])
    for u in directions:
        plane = np.linalg.svd(u[None, :])[2][1:]
        shadow = ConvexHull(surface @ plane.T).volume
        assert project_volume(E, u) == pytest.approx(shadow, rel=2e-3)
    assert project_volume(E, [1.0, 0.0, 0.0]) == pytest.approx(math.pi)
    assert project_volumes(E, directions) == pytest.approx(
        [project_volume(E, u) for u in directions], rel=1e-12)


def test_chords():
    K = square()
    assert chord_length(K, [0.0, 0.0], [1.0, 0.0]) == pytest.approx(2.0)
    assert chord_length(K, [0.0, 5.0], [1.0, 0.0]) == 0.0
    assert one_sided_chord(K, [0.5, 0.0], [1.0, 0.0]) == pytest.approx(0.5)
    assert one_sided_chord(K, [0.5, 0.0], [-1.0, 0.0]) == pytest.approx(1.5)
    assert max_chord(K, [1.0, 0.0]) == pytest.approx(2.0)
    assert max_chord(K, [1.0, 1.0]) == pytest.approx(2.0 * math.sqrt(2.0))


def test_chord_moment():
    K = square()
    # every chord along e1 has length 2 over a shadow of length 2
    assert chord_moment(K, [1.0, 0.0], lambda c: c ** 2) == pytest.approx(8.0, rel=1e-8)
    disk = Presets.body("disk")
    # int of the chord length over the shadow is the area
    assert chord_moment(disk, [0.0, 1.0], lambda c: c) == pytest.approx(math.pi, rel=1e-7)
    assert chord_moment(Presets.body("interval"), [1.0], lambda c: c ** 3) == pytest.approx(8.0)
    cube = Presets.body("cube")
    assert chord_moment(cube, [0.0, 0.0, 1.0], lambda c: c) == pytest.approx(8.0, rel=1e-6)


def test_body_covariogram():
    assert covariogram_body(square(), [1.0, 0.0]) == pytest.approx(2.0)
    assert covariogram_body(square(), [0.0, 0.0]) == pytest.approx(4.0)
    assert covariogram_body(square(), [2.5, 0.0]) == 0.0
    assert covariogram_body(Presets.body("disk"), [0.0, 0.0]) == pytest.approx(math.pi)
    assert covariogram_body(Presets.body("interval01"), [0.5]) == pytest.approx(0.5)
    assert covariogram_body(Presets.body("cube"), [1.0, 1.0, 0.0]) == pytest.approx(2.0)
    # two unit disks at distance 1 overlap in 2pi/3 - sqrt(3)/2
    lens = 2.0 * math.pi / 3.0 - math.sqrt(3.0) / 2.0
    assert covariogram_body(Presets.body("disk"), [1.0, 0.0]) == pytest.approx(lens)


def test_clipped_volume():
    assert clipped_volume(square(), [1.0, 0.0], 0.0) == pytest.approx(2.0)
    assert clipped_volume(square(), [1.0, 0.0], 2.0) == 0.0
    assert clipped_volume(Presets.body("disk"), [0.0, 1.0], 0.0) == pytest.approx(math.pi / 2.0)
    assert clipped_volume(Presets.body("interval01"), [1.0], 0.25) == pytest.approx(0.75)
    assert clipped_volume(Presets.body("cube"), [0.0, 0.0, 1.0], 0.5) == pytest.approx(2.0)


def test_affine_map():
    shear = np.array([[1.0, 1.0], [0.0, 1.0]])
    image = affine_map(square(), shear, [3.0, -1.0])
    assert image.kind is BodyKind.HPOLYTOPE
    assert volume(image) == pytest.approx(4.0)
    assert contains(image, [3.0, -1.0])
    ellipse = affine_map(Presets.body("disk"), np.diag([1.0, 3.0]))
    assert ellipse.kind is BodyKind.BALL
    assert volume(ellipse) == pytest.approx(3.0 * math.pi)
    assert contains(ellipse, [0.0, 2.9])
    assert not contains(ellipse, [1.0, 1.0])
    flipped = affine_map(square(), np.diag([-1.0, 1.0]))
    assert volume(flipped) == pytest.approx(4.0)
    with pytest.raises(GeometryError):
        affine_map(square(), np.zeros((2, 2)))


def test_invalid_bodies():
    with pytest.raises(GeometryError):
        Body.hpolytope([[1.0, 0.0], [-1.0, 0.0]], [1.0, 1.0])
    with pytest.raises(GeometryError):
        Body.simplex([[0.0, 0.0], [1.0, 0.0]])
    with pytest.raises(GeometryError):
        Body.vpolytope([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    with pytest.raises(GeometryError):
        Body.ball([0.0, 0.0], -1.0)


def test_integrate_over_body():
    assert integrate_over_body(Presets.body("disk"), lambda x: np.ones(len(x))) == pytest.approx(
        math.pi, rel=1e-7)
    assert integrate_over_body(square(), lambda x: x[:, 0] ** 2) == pytest.approx(4.0 / 3.0)
    cube_volume = integrate_over_body(Presets.body("cube"), lambda x: np.ones(len(x)))
    assert cube_volume == pytest.approx(8.0, rel=1e-6)


def test_volume_from_radial_function():
    grid = direction_grid(2, 720)
    bodies = [square(), Presets.body("disk"), Presets.body("ellipse"),
              Body.simplex([[-1.0, -1.0], [2.0, -1.0], [-1.0, 2.0]])]
    for K in bodies:
        rho = np.asarray(radial(K, grid.directions))
        assert np.sum(grid.weights * rho ** 2) / 2.0 == pytest.approx(volume(K), rel=5e-3)


def test_body_covariogram_is_even():
    rng = np.random.default_rng(17)
    bodies = [Presets.body("simplex2"), Presets.body("triangle"), random_polygon(rng),
              Presets.body("simplex3")]
    for K in bodies:
        for x in rng.uniform(-0.6, 0.6, size=(8, K.dim)):
            assert covariogram_body(K, x) == pytest.approx(covariogram_body(K, -x), abs=1e-12)


def test_chord_lengths_integrate_to_volume():
    rng = np.random.default_rng(23)
    for index in range(10):
        K = random_triangle(rng) if index % 2 else random_polygon(rng)
        angle = rng.uniform(0.0, 2.0 * math.pi)
        u = [math.cos(angle), math.sin(angle)]
        assert chord_moment(K, u, lambda c: c) == pytest.approx(volume(K), rel=1e-3)


def test_projection_and_chords_are_translation_invariant():
    rng = np.random.default_rng(29)
    bodies = [square(), Presets.body("ellipse"), random_polygon(rng), Presets.body("cube"),
              Presets.body("ball3")]
    for K in bodies:
        shift = rng.uniform(-3.0, 3.0, size=K.dim)
        moved = K.translated(shift)
        u = rng.standard_normal(K.dim)
        u /= np.linalg.norm(u)
        y = rng.uniform(-0.5, 0.5, size=K.dim)
        assert project_volume(moved, u) == pytest.approx(project_volume(K, u), abs=1e-12)
        assert chord_length(moved, y + shift, u) == pytest.approx(chord_length(K, y, u),
                                                                 abs=1e-12)



def test_sample_uniform_stays_inside():
    rng = np.random.default_rng(5)
    for name in ("square", "disk", "simplex3", "ellipse"):
        K = Presets.body(name)
        points = sample_uniform(K, 400, rng)
        assert points.shape == (400, K.dim)
        assert np.all(contains(K, points))


def test_scaled_and_translated():
    K = square().scaled(2.0)
    assert volume(K) == pytest.approx(16.0)
    moved = square().translated([5.0, 0.0])
    assert contains(moved, [5.5, 0.5])
    assert not moved.origin_interior


if __name__ == "__main__":
    print("=== Testing geometry ===")
    sys.exit(pytest.main([__file__, "-q"]))
