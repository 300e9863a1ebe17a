"""
Percolation queries on disagreement sets.

Geodesics in the induced subgraph, crossings of rectangles and annuli, and the
coarse grid of tiles whose open clusters are counted as lattice animals.
Clusters are 4-connected; separating circuits are detected through the
8-connected complement.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Union

import networkx as nx
import numpy as np
from scipy import ndimage

from rfimlab.config import validate_power_of_two
from rfimlab.exceptions import ParameterError
from rfimlab.physics.lattice import (
    CROSS,
    NEIGHBOR_OFFSETS,
    SQUARE,
    AnnulusRegion,
    RectRegion,
    SiteLike,
    SiteSet,
    Vertex,
    as_sites,
    dilate,
)

logger = logging.getLogger(__name__)


def induced_graph(sites: SiteLike) -> nx.Graph:
    """Nearest-neighbour graph induced on ``sites``; nodes are vertices."""
    s = as_sites(sites)
    g = nx.Graph()
    g.add_nodes_from(s.vertices())
    m, win = s.mask, s.window
    horizontal = m[:, :-1] & m[:, 1:]
    vertical = m[:-1, :] & m[1:, :]
    for r, c in zip(*np.nonzero(horizontal)):
        g.add_edge(win.vertex(r, c), win.vertex(r, c + 1))
    for r, c in zip(*np.nonzero(vertical)):
        g.add_edge(win.vertex(r, c), win.vertex(r + 1, c))
    return g


def _anchors(c: SiteSet, targets: SiteLike, domain: Optional[SiteSet]) -> set[Vertex]:
    points = set()
    for v in as_sites(targets).vertices() if not isinstance(targets, (set, frozenset)) else targets:
        v = Vertex(*v)
        if domain is not None and v not in domain:
            candidates = [u for u in v.neighbors() if u in domain]
        else:
            candidates = [v]
        points.update(u for u in candidates if u in c)
    return points


def induced_distance(
    c: SiteLike, src: SiteLike, dst: SiteLike, domain: Optional[SiteLike] = None
) -> Union[int, float]:
    """
    Graph distance through ``c`` between its sites in ``src`` and in ``dst``.

    When ``domain`` is given, a target vertex outside it stands for its
    in-domain neighbours. Returns ``math.inf`` when no path exists.
    """
    cs = as_sites(c)
    dom = as_sites(domain) if domain is not None else None
    starts = _anchors(cs, src, dom)
    goals = _anchors(cs, dst, dom)
    if not starts or not goals:
        return math.inf
    graph = induced_graph(cs)
    for depth, layer in enumerate(nx.bfs_layers(graph, sorted(starts, key=lambda v: (v.y, v.x)))):
        if goals.intersection(layer):
            return depth
    return math.inf


def geodesic(c: SiteLike, src: SiteLike, dst: SiteLike) -> List[Vertex]:
    """One shortest path for :func:`induced_distance`, expanded E, N, W, S from the first start."""
    cs = as_sites(c)
    starts = sorted(_anchors(cs, src, None), key=lambda v: (v.y, v.x))
    goals = _anchors(cs, dst, None)
    parent = {v: None for v in starts}
    frontier = list(starts)
    while frontier:
        nxt = []
        for u in frontier:
            if u in goals:
                path = [u]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            for dx, dy in NEIGHBOR_OFFSETS:
                w = Vertex(u.x + dx, u.y + dy)
                if w in cs and w not in parent:
                    parent[w] = u
                    nxt.append(w)
        frontier = nxt
    return []


def _clusters_meet(mask: np.ndarray, a: np.ndarray, b: np.ndarray, structure: np.ndarray) -> bool:
    labeled, _ = ndimage.label(mask, structure=structure)
    left = np.unique(labeled[a & mask])
    right = np.unique(labeled[b & mask])
    return bool(np.intersect1d(left[left > 0], right[right > 0]).size)


def cross(rect: RectRegion, c: SiteLike) -> bool:
    """A 4-connected path of ``c`` inside ``rect`` joins its two shorter sides."""
    m = as_sites(c).reframe(rect.window).mask
    a = np.zeros_like(m)
    b = np.zeros_like(m)
    if rect.horizontal:
        a[:, 0], b[:, -1] = True, True
    else:
        a[0, :], b[-1, :] = True, True
    return _clusters_meet(m, a, b, CROSS)


def _annulus_frame(ann: AnnulusRegion, c: SiteLike):
    win = ann.window
    inside = ann.mask()
    cm = as_sites(c).reframe(win).mask & inside
    outer = ann.outer.ring().mask & inside
    return win, inside, cm, outer


def cross_easy(ann: AnnulusRegion, c: SiteLike) -> bool:
    """A 4-connected path of ``c`` in the annulus joins the hole's neighbours to the outer ring."""
    win, inside, cm, outer = _annulus_frame(ann, c)
    near_hole = dilate(ann.hole(), CROSS).reframe(win).mask & inside
    return _clusters_meet(cm, near_hole, outer, CROSS)


def cross_hard(ann: AnnulusRegion, c: SiteLike) -> bool:
    """``c`` separates hole from exterior: no 8-connected complement path crosses the annulus."""
    win, inside, cm, outer = _annulus_frame(ann, c)
    near_hole = dilate(ann.hole(), SQUARE).reframe(win).mask & inside
    return not _clusters_meet(inside & ~cm, near_hole, outer, SQUARE)


def dual_consistent(ann: AnnulusRegion, c: SiteLike) -> bool:
    """A hard crossing of ``c`` excludes an easy crossing of its complement in the annulus."""
    complement = ann.sites() - as_sites(c)
    return not (cross_hard(ann, c) and cross_easy(ann, complement))


@dataclass(frozen=True, eq=False)
class CoarseGrid:
    """
    Tiling of the box of radius ``N`` by ``k x k`` squares of side ``2 N'``.

    The last row and column of the box join the last tile on each axis.
    ``tiles`` and ``open`` are ordered row-major (tile row j by y, column i by x).
    """

    N: int
    N_prime: int
    tiles: List[RectRegion]
    open: np.ndarray

    @property
    def k(self) -> int:
        return self.N // self.N_prime

    def with_open(self, flags) -> "CoarseGrid":
        flags = np.asarray(flags, dtype=bool).reshape(self.k, self.k)
        return CoarseGrid(N=self.N, N_prime=self.N_prime, tiles=self.tiles, open=flags)

    def open_count(self) -> int:
        return int(self.open.sum())


def coarse_grid(n: int, n_prime: int) -> CoarseGrid:
    validate_power_of_two("N", n)
    validate_power_of_two("N_prime", n_prime)
    if n_prime > n:
        raise ParameterError(f"N_prime={n_prime} exceeds N={n}")
    k = n // n_prime
    side = 2 * n_prime
    tiles = []
    for j in range(k):
        for i in range(k):
            width = side + (1 if i == k - 1 else 0)
            height = side + (1 if j == k - 1 else 0)
            tiles.append(
                RectRegion(corner=Vertex(-n + i * side, -n + j * side), width=width, height=height)
            )
    return CoarseGrid(N=n, N_prime=n_prime, tiles=tiles, open=np.zeros((k, k), dtype=bool))


def max_open_animal(grid: CoarseGrid) -> int:
    """Largest set of open tiles connected under tile l-infinity adjacency."""
    labeled, count = ndimage.label(grid.open, structure=SQUARE)
    if count == 0:
        return 0
    return int(np.bincount(labeled.ravel())[1:].max())
