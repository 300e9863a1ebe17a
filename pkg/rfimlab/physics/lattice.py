"""
Integer-lattice geometry.

Boxes, annuli and axis-parallel rectangles on Z^2, their outer boundaries,
ordered edge sets and the scaled companion boxes used by the crossing and
coarse-graining experiments. Every region is rasterized on a rectangular
``Window`` whose arrays are indexed ``[row, col] = [y - y0, x - x0]``, so
row-major iteration visits vertices by increasing ``y`` then ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, List, NamedTuple, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import ndimage

from rfimlab.exceptions import EmptyRegionError, ParameterError

# E, N, W, S: the fixed neighbour expansion order used everywhere.
NEIGHBOR_OFFSETS: Tuple[Tuple[int, int], ...] = ((1, 0), (0, 1), (-1, 0), (0, -1))

CROSS = ndimage.generate_binary_structure(2, 1)
SQUARE = ndimage.generate_binary_structure(2, 2)

SCALE_FACTORS = frozenset({2, 4, 8, 32})

_INT32_MIN = -(2**31)
_INT32_MAX = 2**31 - 1


class Vertex(NamedTuple):
    x: int
    y: int

    def neighbors(self) -> Tuple["Vertex", ...]:
        return tuple(Vertex(self.x + dx, self.y + dy) for dx, dy in NEIGHBOR_OFFSETS)

    def linf(self, other: "Vertex") -> int:
        return max(abs(self.x - other.x), abs(self.y - other.y))

    def l1(self, other: "Vertex") -> int:
        return abs(self.x - other.x) + abs(self.y - other.y)


ORIGIN = Vertex(0, 0)


def row_major_key(v: Vertex) -> Tuple[int, int]:
    return (v.y, v.x)


def _check_coordinate(value: int) -> None:
    if not _INT32_MIN <= value <= _INT32_MAX:
        raise ParameterError(f"lattice coordinate {value} outside signed 32-bit range")


class Window(BaseModel):
    """Axis-parallel block of vertices ``[x0, x0+width) x [y0, y0+height)``."""

    model_config = ConfigDict(frozen=True)

    x0: int
    y0: int
    width: int = Field(ge=0)
    height: int = Field(ge=0)

    @classmethod
    def spanning(cls, vertices: Iterable[Vertex]) -> "Window":
        vs = list(vertices)
        if not vs:
            return cls(x0=0, y0=0, width=0, height=0)
        xs = [v.x for v in vs]
        ys = [v.y for v in vs]
        return cls(
            x0=min(xs), y0=min(ys), width=max(xs) - min(xs) + 1, height=max(ys) - min(ys) + 1
        )

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.height, self.width)

    @property
    def x1(self) -> int:
        return self.x0 + self.width - 1

    @property
    def y1(self) -> int:
        return self.y0 + self.height - 1

    def contains(self, v: Vertex) -> bool:
        return self.x0 <= v.x <= self.x1 and self.y0 <= v.y <= self.y1

    def covers(self, other: "Window") -> bool:
        return (
            other.width == 0
            or other.height == 0
            or (
                self.x0 <= other.x0
                and self.y0 <= other.y0
                and other.x1 <= self.x1
                and other.y1 <= self.y1
            )
        )

    def index(self, v: Vertex) -> Tuple[int, int]:
        return (v.y - self.y0, v.x - self.x0)

    def vertex(self, row: int, col: int) -> Vertex:
        return Vertex(int(self.x0 + col), int(self.y0 + row))

    def expand(self, k: int) -> "Window":
        return Window(
            x0=self.x0 - k, y0=self.y0 - k, width=self.width + 2 * k, height=self.height + 2 * k
        )

    def union(self, other: "Window") -> "Window":
        if other.width == 0 or other.height == 0:
            return self
        if self.width == 0 or self.height == 0:
            return other
        x0, y0 = min(self.x0, other.x0), min(self.y0, other.y0)
        x1, y1 = max(self.x1, other.x1), max(self.y1, other.y1)
        return Window(x0=x0, y0=y0, width=x1 - x0 + 1, height=y1 - y0 + 1)

    def coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return ``(xs, ys)`` integer grids of this window's shape."""
        ys, xs = np.mgrid[self.y0 : self.y0 + self.height, self.x0 : self.x0 + self.width]
        return xs.astype(np.int64), ys.astype(np.int64)

    def slices_of(self, inner: "Window") -> Tuple[slice, slice]:
        """Array slices selecting ``inner`` inside this window."""
        r0, c0 = inner.y0 - self.y0, inner.x0 - self.x0
        return (slice(r0, r0 + inner.height), slice(c0, c0 + inner.width))


def embed(array: np.ndarray, src: Window, dst: Window, fill=0) -> np.ndarray:
    """Copy ``array`` laid out on ``src`` onto a fresh array laid out on ``dst``."""
    out = np.full(dst.shape, fill, dtype=array.dtype)
    x0, y0 = max(src.x0, dst.x0), max(src.y0, dst.y0)
    x1, y1 = min(src.x1, dst.x1), min(src.y1, dst.y1)
    if x0 > x1 or y0 > y1:
        return out
    overlap = Window(x0=x0, y0=y0, width=x1 - x0 + 1, height=y1 - y0 + 1)
    out[dst.slices_of(overlap)] = array[src.slices_of(overlap)]
    return out


class Region(BaseModel):
    """A finite vertex set with a rectangular bounding window."""

    model_config = ConfigDict(frozen=True)

    @property
    def window(self) -> Window:
        raise NotImplementedError

    def mask(self) -> np.ndarray:
        raise NotImplementedError

    def contains(self, v: Vertex) -> bool:
        raise NotImplementedError

    @property
    def size(self) -> int:
        return int(self.mask().sum())

    def sites(self) -> "SiteSet":
        return SiteSet(self.window, self.mask())

    def vertices(self) -> List[Vertex]:
        return self.sites().vertices()


class BoxRegion(Region):
    """The box ``{v : |v - center|_inf <= radius}``."""

    center: Vertex = ORIGIN
    radius: int = Field(ge=0)

    @model_validator(mode="after")
    def _check_range(self) -> "BoxRegion":
        for c in (self.center.x - self.radius, self.center.x + self.radius):
            _check_coordinate(c)
        for c in (self.center.y - self.radius, self.center.y + self.radius):
            _check_coordinate(c)
        return self

    @property
    def window(self) -> Window:
        side = 2 * self.radius + 1
        return Window(
            x0=self.center.x - self.radius, y0=self.center.y - self.radius, width=side, height=side
        )

    @property
    def long_side(self) -> int:
        return 2 * self.radius

    @property
    def size(self) -> int:
        return (2 * self.radius + 1) ** 2

    def mask(self) -> np.ndarray:
        return np.ones(self.window.shape, dtype=bool)

    def contains(self, v: Vertex) -> bool:
        return self.center.linf(v) <= self.radius

    def ring(self) -> "SiteSet":
        """Vertices of the box that have a neighbour outside it."""
        m = np.zeros(self.window.shape, dtype=bool)
        m[0, :] = m[-1, :] = m[:, 0] = m[:, -1] = True
        return SiteSet(self.window, m)


class AnnulusRegion(Region):
    """``outer`` minus ``inner`` for two concentric boxes."""

    outer: BoxRegion
    inner: BoxRegion

    @model_validator(mode="after")
    def _check_nesting(self) -> "AnnulusRegion":
        if self.inner.center != self.outer.center:
            raise ParameterError("annulus boxes must share a center")
        if not self.inner.radius < self.outer.radius:
            raise ParameterError(
                f"inner radius {self.inner.radius} must be below outer radius {self.outer.radius}"
            )
        return self

    @property
    def window(self) -> Window:
        return self.outer.window

    @property
    def center(self) -> Vertex:
        return self.outer.center

    def hole(self) -> "SiteSet":
        return self.inner.sites().reframe(self.window)

    def mask(self) -> np.ndarray:
        return ~self.hole().mask

    def contains(self, v: Vertex) -> bool:
        return self.outer.contains(v) and not self.inner.contains(v)


class RectRegion(Region):
    """Axis-parallel rectangle of ``width x height`` vertices with lower-left ``corner``."""

    corner: Vertex
    width: int = Field(ge=1)
    height: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_range(self) -> "RectRegion":
        _check_coordinate(self.corner.x + self.width - 1)
        _check_coordinate(self.corner.y + self.height - 1)
        return self

    @property
    def window(self) -> Window:
        return Window(x0=self.corner.x, y0=self.corner.y, width=self.width, height=self.height)

    @property
    def long_side(self) -> int:
        return max(self.width, self.height)

    @property
    def horizontal(self) -> bool:
        """True when the long direction is along x (squares count as horizontal)."""
        return self.width >= self.height

    @property
    def center(self) -> Vertex:
        return Vertex(self.corner.x + (self.width - 1) // 2, self.corner.y + (self.height - 1) // 2)

    def mask(self) -> np.ndarray:
        return np.ones(self.window.shape, dtype=bool)

    def contains(self, v: Vertex) -> bool:
        return self.window.contains(v)

    def rotated(self) -> "RectRegion":
        """The same rectangle turned by 90 degrees about its center."""
        c = self.center
        return RectRegion(
            corner=Vertex(c.x - (self.height - 1) // 2, c.y - (self.width - 1) // 2),
            width=self.height,
            height=self.width,
        )

    @classmethod
    def centered(cls, center: Vertex, width: int, height: int) -> "RectRegion":
        return cls(
            corner=Vertex(center.x - (width - 1) // 2, center.y - (height - 1) // 2),
            width=width,
            height=height,
        )


@dataclass(frozen=True, eq=False)
class SiteSet:
    """A vertex set stored as a boolean mask over a window."""

    window: Window
    mask: np.ndarray

    @classmethod
    def of(cls, vertices: Iterable[Vertex], window: Window | None = None) -> "SiteSet":
        vs = [Vertex(*v) for v in vertices]
        win = window if window is not None else Window.spanning(vs)
        m = np.zeros(win.shape, dtype=bool)
        for v in vs:
            if not win.contains(v):
                raise ParameterError(f"vertex {v} outside window {win}")
            m[win.index(v)] = True
        return cls(win, m)

    @classmethod
    def empty(cls, window: Window) -> "SiteSet":
        return cls(window, np.zeros(window.shape, dtype=bool))

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __bool__(self) -> bool:
        return bool(self.mask.any())

    def __contains__(self, v) -> bool:
        v = Vertex(*v)
        return self.window.contains(v) and bool(self.mask[self.window.index(v)])

    def __iter__(self) -> Iterator[Vertex]:
        return iter(self.vertices())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SiteSet):
            return NotImplemented
        return set(self.vertices()) == set(other.vertices())

    def vertices(self) -> List[Vertex]:
        rows, cols = np.nonzero(self.mask)
        return [self.window.vertex(r, c) for r, c in zip(rows, cols)]

    def reframe(self, window: Window) -> "SiteSet":
        return SiteSet(window, embed(self.mask, self.window, window, fill=False))

    def __and__(self, other: "SiteSet") -> "SiteSet":
        return SiteSet(self.window, self.mask & other.reframe(self.window).mask)

    def __or__(self, other: "SiteSet") -> "SiteSet":
        win = self.window.union(other.window)
        return SiteSet(win, self.reframe(win).mask | other.reframe(win).mask)

    def __sub__(self, other: "SiteSet") -> "SiteSet":
        return SiteSet(self.window, self.mask & ~other.reframe(self.window).mask)

    def issubset(self, other: "SiteSet") -> bool:
        return not (self - other).mask.any()


SiteLike = Union[Region, SiteSet, Iterable[Vertex]]


def as_sites(obj: SiteLike) -> SiteSet:
    if isinstance(obj, SiteSet):
        return obj
    if isinstance(obj, Region):
        return obj.sites()
    return SiteSet.of(obj)


def box(radius: int, center: Vertex = ORIGIN) -> BoxRegion:
    return BoxRegion(center=center, radius=radius)


def annulus(outer_radius: int, inner_radius: int, center: Vertex = ORIGIN) -> AnnulusRegion:
    return AnnulusRegion(
        outer=BoxRegion(center=center, radius=outer_radius),
        inner=BoxRegion(center=center, radius=inner_radius),
    )


def dilate(sites: SiteSet, structure: np.ndarray = CROSS) -> SiteSet:
    """Sites within one step (per ``structure``) of ``sites``, on a window grown by one."""
    win = sites.window.expand(1)
    grown = ndimage.binary_dilation(sites.reframe(win).mask, structure=structure)
    return SiteSet(win, grown)


def outer_boundary(region: SiteLike) -> frozenset[Vertex]:
    """Vertices outside ``region`` that are 4-adjacent to it."""
    sites = as_sites(region)
    if not sites:
        raise EmptyRegionError("outer boundary of an empty region")
    return frozenset((dilate(sites) - sites).vertices())


def ordered_edges(a: SiteLike, b: SiteLike) -> List[Tuple[Vertex, Vertex]]:
    """All ordered pairs ``<u, v>`` with ``u`` in ``a``, ``v`` in ``b`` and ``u ~ v``."""
    target = set(as_sites(b).vertices()) if not isinstance(b, (set, frozenset)) else b
    edges = []
    for u in sorted(as_sites(a).vertices(), key=row_major_key):
        for v in u.neighbors():
            if v in target:
                edges.append((u, v))
    return edges


def scaled_box(region: Union[BoxRegion, RectRegion], factor: int) -> BoxRegion:
    """Concentric square box of side ``factor * l`` where ``l`` is the longer side."""
    if factor not in SCALE_FACTORS:
        raise ParameterError(f"scale factor must be one of {sorted(SCALE_FACTORS)}, got {factor}")
    return BoxRegion(center=region.center, radius=(factor * region.long_side) // 2)
