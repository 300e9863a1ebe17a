import math

import numpy as np
import pytest

from rfimlab.exceptions import ParameterError
from rfimlab.physics.lattice import ORIGIN, RectRegion, SiteSet, Vertex, annulus, box, outer_boundary
from rfimlab.physics.percolation import (
    coarse_grid,
    cross,
    cross_easy,
    cross_hard,
    dual_consistent,
    geodesic,
    induced_distance,
    induced_graph,
    max_open_animal,
)


def row(xs, y=0):
    return [Vertex(x, y) for x in xs]


def test_distance_through_full_box():
    assert induced_distance(box(16), [ORIGIN], [Vertex(4, 0)]) == 4
    assert induced_distance(box(16), box(1), box(8).ring()) == 7


def test_distance_through_empty_set_is_infinite():
    empty = SiteSet.empty(box(2).window)
    assert induced_distance(empty, [ORIGIN], [Vertex(1, 0)]) == math.inf


def test_distance_along_a_segment():
    segment = row(range(5, 10))
    assert induced_distance(segment, [Vertex(5, 0)], [Vertex(9, 0)]) == 4
    path = geodesic(segment, [Vertex(5, 0)], [Vertex(9, 0)])
    assert path == segment
    broken = row([5, 6, 8, 9])
    assert induced_distance(broken, [Vertex(5, 0)], [Vertex(9, 0)]) == math.inf
    assert geodesic(broken, [Vertex(5, 0)], [Vertex(9, 0)]) == []


def test_targets_outside_the_domain_anchor_on_their_neighbours():
    region = box(2)
    assert induced_distance(region, outer_boundary(region), [ORIGIN], domain=region) == 2


def test_geodesic_steps_are_nearest_neighbours():
    path = geodesic(box(3), [Vertex(-3, -3)], [Vertex(3, 3)])
    assert len(path) == 13
    assert all(a.l1(b) == 1 for a, b in zip(path, path[1:]))


def test_rectangle_crossing():
    rect = RectRegion(corner=ORIGIN, width=8, height=3)
    assert cross(rect, row(range(8), y=1))
    assert not cross(rect, row([0, 1, 2, 4, 5, 6, 7], y=1))
    assert not cross(rect, SiteSet.empty(rect.window))
    tall = rect.rotated()
    assert cross(tall, tall.sites())


def test_easy_annulus_crossing():
    ann = annulus(4, 1)
    assert cross_easy(ann, ann.sites())
    assert not cross_easy(ann, box(3).ring())
    assert cross_easy(ann, row(range(2, 5)))


def test_hard_annulus_crossing():
    ann = annulus(4, 1)
    assert cross_hard(ann, ann.sites())
    slit = ann.sites() - SiteSet.of(row(range(2, 5)))
    assert not cross_hard(ann, slit)
    assert cross_hard(ann, box(3).ring())
    assert not cross_hard(ann, SiteSet.empty(ann.window))


def test_hard_crossing_excludes_easy_crossing_of_complement():
    ann = annulus(3, 1)
    inside = ann.mask()
    rng = np.random.default_rng(20190615)
    hard = easy = 0
    for i in range(3000):
        p = 0.5 if i % 2 else 0.9
        c = SiteSet(ann.window, (rng.random(inside.shape) < p) & inside)
        complement = ann.sites() - c
        h, e = cross_hard(ann, c), cross_easy(ann, complement)
        assert not (h and e)
        assert dual_consistent(ann, c)
        hard += h
        easy += e
    assert hard > 0 and easy > 0


def test_ring_is_dual_to_a_blocked_complement():
    ann = annulus(4, 1)
    ring = box(3).ring()
    assert cross_hard(ann, ring)
    assert not cross_easy(ann, ann.sites() - ring)
    assert dual_consistent(ann, ring)


def test_coarse_grid_tiles_the_box():
    grid = coarse_grid(8, 2)
    assert grid.k == 4
    assert len(grid.tiles) == 16
    assert sum(t.size for t in grid.tiles) == 17 * 17
    covered = SiteSet.empty(box(8).window)
    for tile in grid.tiles:
        covered = covered | tile.sites()
    assert covered == box(8).sites()

    single = coarse_grid(8, 8)
    assert len(single.tiles) == 1 and single.tiles[0].size == 17 * 17
    with pytest.raises(ParameterError):
        coarse_grid(2, 4)


def test_lattice_animals():
    grid = coarse_grid(8, 2)
    assert max_open_animal(grid.with_open(np.ones(16))) == 16
    assert max_open_animal(grid) == 0
    diagonal = np.zeros((4, 4), dtype=bool)
    diagonal[0, 0] = diagonal[1, 1] = True
    assert max_open_animal(grid.with_open(diagonal)) == 2
    assert grid.with_open(diagonal).open_count() == 2


def test_induced_graph_of_unit_box():
    g = induced_graph(box(1))
    assert g.number_of_nodes() == 9
    assert g.number_of_edges() == 12
