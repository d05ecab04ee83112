"""
Tests for polytopes and unions of boxes.
"""
import math

import pytest
from hypothesis import given, settings, strategies as st

from geometry.loader import load_geometry, parse_geometry
from geometry.planar import GeometryError
from geometry.polytope import (
    Box, BoxUnion, PolytopeEdge, PolytopeSummary, box_union, dihedral_subtraction_constant,
    polytope_coefficients,
)


def boxes(*corners):
    return [Box(min=lo, max=hi) for lo, hi in corners]


@pytest.mark.parametrize("name, expected", [
    ("cube", (3.0, 3.0, 1.0)),
    ("box_1x1x2", (4.0, 5.0, 2.0)),
    ("l_shape_3d", (21.0 / 4.0 - 1.0 / math.pi, 7.0, 3.0)),
])
def test_box_union_coefficients(load_fixture, name, expected):
    coefficients = polytope_coefficients(box_union(load_fixture(name)))
    assert coefficients.as_tuple() == pytest.approx(expected, rel=1e-12)


def test_l_shape_edges(load_fixture):
    summary = box_union(load_fixture("l_shape_3d"))
    assert summary.volume == pytest.approx(3.0)
    assert summary.surface_area == pytest.approx(14.0)
    assert math.fsum(e.length for e in summary.convex_edges()) == pytest.approx(21.0)
    [reflex] = summary.concave_edges()
    assert reflex.length == pytest.approx(1.0)
    assert reflex.dihedral == pytest.approx(1.5 * math.pi)
    assert summary.inclusion_exclusion == pytest.approx((summary.volume, summary.surface_area))


def test_explicit_summary_matches_boxes(load_fixture):
    explicit = polytope_coefficients(load_fixture("l_shape_summary"))
    from_boxes = polytope_coefficients(box_union(load_fixture("l_shape_3d")))
    assert explicit.as_tuple() == pytest.approx(from_boxes.as_tuple(), rel=1e-12)


def test_stacked_boxes_merge_edges(load_fixture):
    summary = box_union(load_fixture("box_1x1x2"))
    assert len(summary.edges) == 12
    assert sorted(e.length for e in summary.edges)[-4:] == pytest.approx([2.0] * 4)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 5.0), st.floats(0.1, 5.0), st.floats(0.1, 5.0))
def test_single_box(a, b, c):
    coefficients = polytope_coefficients(box_union(boxes(((0, 0, 0), (a, b, c)))))
    assert coefficients.L1 == pytest.approx(a + b + c, rel=1e-12)
    assert coefficients.L2 == pytest.approx(a * b + b * c + a * c, rel=1e-12)
    assert coefficients.L3 == pytest.approx(a * b * c, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.2, 3.0), st.floats(0.2, 3.0), st.floats(0.1, 0.9))
def test_split_box_matches_whole(a, b, c, fraction):
    cut = fraction * c
    whole = polytope_coefficients(box_union(boxes(((0, 0, 0), (a, b, c)))))
    halves = polytope_coefficients(box_union(boxes(((0, 0, 0), (a, b, cut)), ((0, 0, cut), (a, b, c)))))
    assert halves.as_tuple() == pytest.approx(whole.as_tuple(), rel=1e-9)


@pytest.mark.parametrize("corners, message", [
    ((((0, 0, 0), (1, 1, 1)), ((0.5, 0, 0), (1.5, 1, 1))), "overlapping"),
    ((((0, 0, 0), (1, 1, 1)), ((1, 1, 0), (2, 2, 1))), "edge only"),
    ((((0, 0, 0), (1, 1, 1)), ((1, 1, 1), (2, 2, 2))), "corner only"),
])
def test_invalid_box_unions(corners, message):
    with pytest.raises(GeometryError, match=message):
        box_union(boxes(*corners))


def test_degenerate_box():
    with pytest.raises(ValueError):
        Box(min=(0, 0, 0), max=(1, 0, 1))


def test_reflex_edge_lowers_l1():
    convex = PolytopeSummary(volume=1.0, surface_area=6.0, edges=[PolytopeEdge(length=2.0, dihedral=math.pi / 2)])
    reflex = PolytopeSummary(volume=1.0, surface_area=6.0, edges=[PolytopeEdge(length=2.0, dihedral=1.5 * math.pi)])
    assert polytope_coefficients(convex).L1 == pytest.approx(0.5)
    assert polytope_coefficients(reflex).L1 == pytest.approx(-2.0 / math.pi)
    assert not reflex.edges[0].convex


def test_dihedral_subtraction_constant():
    assert dihedral_subtraction_constant(math.pi / 2.0) == pytest.approx(1.068310, abs=1e-6)
    for alpha in (0.0, math.pi):
        with pytest.raises(GeometryError):
            dihedral_subtraction_constant(alpha)


def test_parse_geometry_errors():
    with pytest.raises(GeometryError, match="dimension"):
        parse_geometry({"dimension": 4})
    with pytest.raises(GeometryError, match="invalid polytope"):
        parse_geometry({"dimension": 3, "volume": 1, "surface_area": 6, "edges": [{"length": 1, "dihedral": 7}]})
    with pytest.raises(GeometryError, match="overlapping"):
        parse_geometry({"dimension": 3, "boxes": [{"min": [0, 0, 0], "max": [1, 1, 1]},
                                                   {"min": [0, 0, 0], "max": [1, 1, 1]}]})


def test_load_geometry_hash_and_errors(fixture_path, tmp_path):
    geometry, digest = load_geometry(fixture_path("cube"))
    assert isinstance(geometry, BoxUnion)
    assert len(digest) == 64
    assert load_geometry(fixture_path("cube"))[1] == digest

    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(GeometryError, match="not valid JSON"):
        load_geometry(broken)
    with pytest.raises(GeometryError, match="cannot read"):
        load_geometry(tmp_path / "missing.json")
