#!/usr/bin/env python3
"""
Test preset bodies, descriptor parsing and the INI body format
"""

import sys

import numpy as np
import pytest

from berwald import ProfileKind, WitnessKind
from geometry import BodyKind, volume
from logconcave import FunctionKind
from presets import (DescriptorError, Presets, SuiteDefaults, body_from_section, load_body_file,
                     load_suite_file)


SUITE_FILE = """
[suite]
suites = zhang, affine
dim = 2
grid_size = 180
presets = kite

[body.kite]
kind = vpolytope
dim = 2
vertices =
    -1 0
    0 -0.5
    1 0
    0 2
"""


def test_body_presets():
    assert set(Presets.body_names()) >= {"interval", "square", "cube", "disk", "ball3",
                                         "simplex2", "simplex3", "triangle", "ellipse"}
    for name in ("square", "cube", "disk", "ball3", "simplex2", "simplex3", "interval"):
        assert Presets.body(name).origin_interior, name
    assert not Presets.body("triangle").origin_interior
    assert Presets.body("simplex2").kind is BodyKind.SIMPLEX
    with pytest.raises(DescriptorError):
        Presets.body("dodecahedron")


def test_extra_bodies_take_precedence():
    kite = body_from_section({"kind": "ball", "dim": "2", "radius": "2"}, label="square")
    assert Presets.body("square", {"square": kite}) is kite


def test_function_descriptors():
    f = Presets.function("expnorm:square")
    assert f.kind is FunctionKind.EXPNORM and f.dim == 2
    assert Presets.function("gaussian:3").dim == 3
    assert Presets.function("indicator:interval01").kind is FunctionKind.INDICATOR
    for bad in ("gaussian:4", "gaussian:x", "expnorm:triangle", "logistic:square", "indicator:nope"):
        with pytest.raises(DescriptorError):
            Presets.function(bad)


def test_profile_descriptors():
    assert Presets.profile("linear:3").kind is ProfileKind.LINEAR
    assert Presets.profile("power:0.5").coefficient == 0.5
    piecewise = Presets.profile("piecewise:0,0;1,1;3,2")
    assert piecewise.kind is ProfileKind.PIECEWISE_LINEAR
    assert list(piecewise.knots) == [0.0, 1.0, 3.0]
    for bad in ("power:2", "linear:abc", "piecewise:0,0;1", "spline:1"):
        with pytest.raises(DescriptorError):
            Presets.profile(bad)


def test_witness_descriptors():
    chord = Presets.witness("chord", 2)
    assert chord.kind is WitnessKind.ONE_SIDED_CHORD
    assert chord.direction == pytest.approx([1.0, 0.0])
    assert Presets.witness("chord:0,2", 2).direction == pytest.approx([0.0, 1.0])

    shifted = Presets.witness("affine:x1+1", 2)
    assert shifted.kind is WitnessKind.COORDINATE_AFFINE
    assert shifted.slope == pytest.approx([1.0, 0.0])
    assert shifted.intercept == 1.0
    assert Presets.witness("affine:x2", 2).slope == pytest.approx([0.0, 1.0])

    general = Presets.witness("affine:1,0,0.5,2", 2)
    assert general.time_slope == 0.5 and general.intercept == 2.0
    for bad in ("chord:1,0,0", "affine:x3", "affine:1,2", "ray"):
        with pytest.raises(DescriptorError):
            Presets.witness(bad, 2)


def test_concave_functions():
    disk = Presets.body("disk")
    cone = Presets.concave_function("cone", disk)
    assert cone(np.array([[0.0, 0.0], [0.5, 0.0]])) == pytest.approx([1.0, 0.5])
    affine = Presets.concave_function("affine:-1,1", Presets.body("interval01"))
    assert affine(np.array([[0.25]])) == pytest.approx([0.75])
    assert Presets.concave_function("constant:2", disk)(np.zeros((3, 2))) == pytest.approx([2.0] * 3)
    with pytest.raises(DescriptorError):
        Presets.concave_function("cone", Presets.body("triangle"))


def test_suite_defaults():
    assert SuiteDefaults.tolerance("lemma21") == 1e-6
    assert SuiteDefaults.tolerance("lemma21", dim=3) == SuiteDefaults.TOLERANCE_3D
    assert SuiteDefaults.tolerance("lemma31", dim=3) == 2e-2
    assert SuiteDefaults.grid_size(2) == 720
    assert SuiteDefaults.grid_size(3) == 1000


def test_body_sections():
    square = body_from_section({"kind": "hpolytope", "dim": "2",
                                "constraints": "1 0 / 1\n-1 0 / 1\n0 1 / 1\n0 -1 / 1"})
    assert volume(square) == pytest.approx(4.0)
    simplex = body_from_section({"kind": "simplex", "dim": "2",
                                 "vertices": "0 0\n1 0\n0 1"})
    assert volume(simplex) == pytest.approx(0.5)
    ball = body_from_section({"kind": "ball", "dim": "3", "center": "0 0 1", "radius": "2"})
    assert ball.radius == 2.0
    for bad in ({"kind": "torus", "dim": "2"},
                {"kind": "ball", "dim": "4"},
                {"kind": "vpolytope", "dim": "2", "vertices": "0 0\n1 1\n2 2"},
                {"kind": "hpolytope", "dim": "2", "constraints": "1 0 / 1\n-1 0 / 1"}):
        with pytest.raises(DescriptorError):
            body_from_section(bad)


def test_load_body_file(tmp_path):
    path = tmp_path / "kite.ini"
    path.write_text("[body]\nkind = vpolytope\ndim = 2\nvertices =\n"
                    "    -1 0\n    0 -0.5\n    1 0\n    0 2\n", encoding="utf-8")
    kite = load_body_file(str(path))
    assert volume(kite) == pytest.approx(2.5)
    empty = tmp_path / "empty.ini"
    empty.write_text("[other]\nx = 1\n", encoding="utf-8")
    with pytest.raises(DescriptorError):
        load_body_file(str(empty))
    with pytest.raises(DescriptorError):
        load_body_file(str(tmp_path / "missing.ini"))


def test_load_suite_file(tmp_path):
    path = tmp_path / "suite.ini"
    path.write_text(SUITE_FILE, encoding="utf-8")
    options, bodies = load_suite_file(str(path))
    assert options["grid_size"] == "180"
    assert options["presets"] == "kite"
    assert set(bodies) == {"kite"}
    assert bodies["kite"].label == "kite"
    assert volume(bodies["kite"]) == pytest.approx(2.5)


if __name__ == "__main__":
    print("=== Testing presets ===")
    sys.exit(pytest.main([__file__, "-q"]))
