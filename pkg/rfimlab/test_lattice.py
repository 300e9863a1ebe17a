import pytest

from rfimlab.exceptions import EmptyRegionError, ParameterError
from rfimlab.physics.lattice import (
    ORIGIN,
    RectRegion,
    SiteSet,
    Vertex,
    Window,
    annulus,
    box,
    outer_boundary,
    ordered_edges,
    scaled_box,
)


def test_outer_boundary_of_single_vertex():
    assert outer_boundary(box(0)) == {Vertex(1, 0), Vertex(0, 1), Vertex(-1, 0), Vertex(0, -1)}


def test_outer_boundary_of_unit_box_skips_corners():
    ring = outer_boundary(box(1))
    assert len(ring) == 12
    assert all(max(abs(v.x), abs(v.y)) == 2 for v in ring)
    assert Vertex(2, 2) not in ring


def test_outer_boundary_of_diagonal_pair_merges_shared_neighbours():
    ring = outer_boundary([Vertex(0, 0), Vertex(1, 1)])
    # (1, 0) and (0, 1) neighbour both vertices
    assert len(ring) == 6
    assert {Vertex(1, 0), Vertex(0, 1)} <= ring


def test_outer_boundary_of_empty_set_raises():
    with pytest.raises(EmptyRegionError):
        outer_boundary(SiteSet.empty(Window(x0=0, y0=0, width=2, height=2)))


def test_ordered_edges():
    assert len(ordered_edges([ORIGIN], outer_boundary(box(0)))) == 4
    assert ordered_edges([ORIGIN], [ORIGIN]) == []
    edges = ordered_edges(box(1), outer_boundary(box(1)))
    assert len(edges) == 12
    assert edges[0][0] == Vertex(-1, -1)


def test_scaled_box():
    assert scaled_box(box(4), 2) == box(8)
    rect = RectRegion.centered(ORIGIN, 8, 2)
    big = scaled_box(rect, 4)
    assert big.radius == 16 and big.center == rect.center
    assert scaled_box(RectRegion(corner=ORIGIN, width=3, height=1), 32).radius == 48
    with pytest.raises(ParameterError):
        scaled_box(box(4), 3)


def test_rotated_rectangle_keeps_center():
    rect = RectRegion.centered(ORIGIN, 8, 2)
    turned = rect.rotated()
    assert (turned.width, turned.height) == (2, 8)
    assert turned.center == rect.center == ORIGIN
    assert rect.horizontal and not turned.horizontal


def test_annulus_geometry():
    ann = annulus(4, 1)
    assert ann.size == 81 - 9
    assert ann.contains(Vertex(2, 0)) and not ann.contains(ORIGIN)
    with pytest.raises(ValueError):
        annulus(1, 1)


def test_box_ring_and_sizes():
    b = box(3)
    assert b.size == 49
    assert len(b.ring()) == 24
    assert b.long_side == 6


def test_site_set_algebra():
    a = SiteSet.of([Vertex(0, 0), Vertex(1, 0)])
    b = SiteSet.of([Vertex(1, 0), Vertex(5, 5)])
    assert set((a & b).vertices()) == {Vertex(1, 0)}
    assert len(a | b) == 3
    assert set((a - b).vertices()) == {Vertex(0, 0)}
    assert (a & b).issubset(a)
    assert Vertex(5, 5) not in a


def test_coordinates_out_of_range():
    with pytest.raises(ValueError):
        box(2**31)
