"""
Three-valued labels and disagreement sets.

A site is labeled plus (minus) when both extremal ground states agree on +1
(-1) and zero when the plus-boundary state is +1 while the minus-boundary
state is -1. The zero sites form the disagreement set, whose 4-connected
components are the percolation clusters studied by the experiments.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, Optional

import numpy as np
from scipy import ndimage

from rfimlab.config import config
from rfimlab.exceptions import InvariantViolation, PreconditionError, RegionMismatchError
from rfimlab.models import Boundary, Label
from rfimlab.physics.disorder import FieldSample
from rfimlab.physics.groundstate import SpinConfig, ground_state
from rfimlab.physics.lattice import (
    CROSS,
    NEIGHBOR_OFFSETS,
    Region,
    SiteLike,
    SiteSet,
    Vertex,
    Window,
    as_sites,
)
from rfimlab.solvers.maxflow import DinicSolver

logger = logging.getLogger(__name__)

# Transition matrices are indexed by ``code + 1``: minus, zero, plus.
LABEL_ORDER = (Label.MINUS, Label.ZERO, Label.PLUS)
FORBIDDEN_UPWARD = ((Label.ZERO, Label.MINUS), (Label.PLUS, Label.ZERO), (Label.PLUS, Label.MINUS))


def _same_region(a: Region, b: Region) -> bool:
    return a.window == b.window and np.array_equal(a.mask(), b.mask())


@dataclass(frozen=True, eq=False)
class LabelGrid:
    """
    Labels of a region derived from a plus/minus ground-state pair.

    Attributes:
        region (Region): Labeled sites.
        codes (np.ndarray): int8 grid over ``region.window``: +1 plus, -1 minus, 0 zero (and off-region).
        plus_state (Optional[SpinConfig]): Plus-boundary ground state.
        minus_state (Optional[SpinConfig]): Minus-boundary ground state.
    """

    region: Region
    codes: np.ndarray
    plus_state: Optional[SpinConfig] = None
    minus_state: Optional[SpinConfig] = None

    @classmethod
    def from_states(cls, plus_state: SpinConfig, minus_state: SpinConfig) -> "LabelGrid":
        if not _same_region(plus_state.region, minus_state.region):
            raise RegionMismatchError("plus and minus states live on different regions")
        mask = plus_state.region.mask()
        s_plus = plus_state.spins.astype(np.int8)
        s_minus = minus_state.spins.astype(np.int8)
        forbidden = mask & (s_plus < 0) & (s_minus > 0)
        if forbidden.any():
            rows, cols = np.nonzero(forbidden)
            where = plus_state.region.window.vertex(rows[0], cols[0])
            raise InvariantViolation(
                "monotone-coupling",
                f"plus state below minus state at {tuple(where)}",
                sites=int(forbidden.sum()),
            )
        # +1/+1 -> +1, -1/-1 -> -1, +1/-1 -> 0
        codes = np.where(mask, (s_plus + s_minus) // 2, 0).astype(np.int8)
        return cls(
            region=plus_state.region, codes=codes, plus_state=plus_state, minus_state=minus_state
        )

    @property
    def window(self) -> Window:
        return self.region.window

    @property
    def mask(self) -> np.ndarray:
        return self.region.mask()

    @property
    def zero_mask(self) -> np.ndarray:
        return self.mask & (self.codes == 0)

    @property
    def tie(self) -> bool:
        return bool(
            (self.plus_state is not None and self.plus_state.tie)
            or (self.minus_state is not None and self.minus_state.tie)
        )

    def label(self, v: Vertex) -> Label:
        if not self.region.contains(v):
            raise RegionMismatchError(f"vertex {tuple(v)} outside the labeled region")
        return LABEL_ORDER[int(self.codes[self.window.index(v)]) + 1]

    def counts(self) -> Dict[Label, int]:
        tally = np.bincount(self.codes[self.mask].astype(np.int64) + 1, minlength=3)
        return {label: int(tally[i]) for i, label in enumerate(LABEL_ORDER)}

    def dump(self) -> str:
        """Text grid of ``+``/``-``/``0`` (``.`` off-region), one row per y, increasing."""
        glyphs = np.array(["-", "0", "+", "."])
        idx = np.where(self.mask, self.codes.astype(np.int64) + 1, 3)
        return "\n".join("".join(r) for r in glyphs[idx]) + "\n"


def labels(field: FieldSample, region: Region, solver: Optional[DinicSolver] = None) -> LabelGrid:
    """Solve both boundary conditions on ``region`` and combine them into labels."""
    plus_state = ground_state(field, region, Boundary.PLUS, solver=solver)
    minus_state = ground_state(field, region, Boundary.MINUS, solver=solver)
    return LabelGrid.from_states(plus_state, minus_state)


@dataclass(frozen=True, eq=False)
class DisagreementSet:
    """
    Zero-labeled sites of a region with their 4-connected components.

    Attributes:
        region (Region): Region the labels were computed on.
        members (SiteSet): Zero-labeled sites, on ``region.window``.
        components (np.ndarray): Component id per site (0 for non-members, ids from 1).
        count (int): Number of components.
    """

    region: Region
    members: SiteSet
    components: np.ndarray
    count: int

    @classmethod
    def of(cls, region: Region, member_mask: np.ndarray) -> "DisagreementSet":
        member_mask = np.asarray(member_mask, dtype=bool) & region.mask()
        components, count = ndimage.label(member_mask, structure=CROSS)
        return cls(
            region=region,
            members=SiteSet(region.window, member_mask),
            components=components,
            count=int(count),
        )

    def __len__(self) -> int:
        return len(self.members)

    def __bool__(self) -> bool:
        return bool(self.members)

    def __contains__(self, v) -> bool:
        return v in self.members

    def component_of(self, v: Vertex) -> int:
        """Component id of ``v`` (0 when ``v`` is not a member)."""
        if v not in self.members:
            return 0
        return int(self.components[self.region.window.index(Vertex(*v))])

    def component(self, cid: int) -> SiteSet:
        return SiteSet(self.region.window, self.components == cid)

    def iter_components(self) -> Iterator[SiteSet]:
        for cid in range(1, self.count + 1):
            yield self.component(cid)

    def component_sizes(self) -> np.ndarray:
        return np.bincount(self.components.ravel(), minlength=self.count + 1)[1:]


def disagreement_set(lg: LabelGrid) -> DisagreementSet:
    return DisagreementSet.of(lg.region, lg.zero_mask)


def common_disagreement(a: DisagreementSet, b: DisagreementSet) -> DisagreementSet:
    """Sites in both sets, with components recomputed."""
    if not _same_region(a.region, b.region):
        raise RegionMismatchError("disagreement sets come from different regions")
    return DisagreementSet.of(a.region, a.members.mask & b.members.mask)


def check_domain_monotone(big: DisagreementSet, small: DisagreementSet) -> None:
    """Raise unless the larger domain's set, cut down to the smaller domain, lies inside the smaller one's."""
    inside = big.members & small.region.sites().reframe(big.members.window)
    if not inside.issubset(small.members):
        extra = inside - small.members
        raise InvariantViolation(
            "domain-monotone",
            "disagreement of the larger domain is not contained in that of the smaller",
            sites=len(extra),
        )


def _padded_codes(lg: LabelGrid, boundary: Boundary) -> tuple[Window, np.ndarray]:
    """Label codes on the window grown by one, off-region sites carrying the boundary label."""
    boundary_code = Boundary(boundary).sign
    win = lg.window.expand(1)
    codes = np.full(win.shape, boundary_code, dtype=np.int64)
    codes[win.slices_of(lg.window)] = np.where(lg.mask, lg.codes, boundary_code)
    return win, codes


def _neighbor(grid: np.ndarray, dx: int, dy: int, fill) -> np.ndarray:
    """``out[r, c] = grid[r + dy, c + dx]`` with ``fill`` past the edge."""
    out = np.full_like(grid, fill)
    h, w = grid.shape
    rs, rd = (slice(dy, h), slice(0, h - dy)) if dy >= 0 else (slice(0, h + dy), slice(-dy, h))
    cs, cd = (slice(dx, w), slice(0, w - dx)) if dx >= 0 else (slice(0, w + dx), slice(-dx, w))
    out[rd, cd] = grid[rs, cs]
    return out


def _check_inside(sites: SiteSet, lg: LabelGrid) -> None:
    if not sites.issubset(lg.region.sites()):
        raise RegionMismatchError("vertex set is not contained in the labeled region")


def boundary_edge_partition(
    sites: SiteLike, lg: LabelGrid, boundary: Boundary = Boundary.PLUS
) -> Dict[Label, int]:
    """
    Count edges from ``sites`` to its complement by the label of the outside end.

    Outside ends beyond the region carry the boundary label of ``boundary``.
    """
    s = as_sites(sites)
    _check_inside(s, lg)
    win, codes = _padded_codes(lg, boundary)
    inside = s.reframe(win).mask
    tally = np.zeros(3, dtype=np.int64)
    for dx, dy in NEIGHBOR_OFFSETS:
        crossing = inside & ~_neighbor(inside, dx, dy, False)
        tally += np.bincount(_neighbor(codes, dx, dy, 0)[crossing] + 1, minlength=3)
    return {label: int(tally[i]) for i, label in enumerate(LABEL_ORDER)}


def flip_energy_scaled(
    sites: SiteLike, field: FieldSample, lg: LabelGrid, boundary: Boundary = Boundary.PLUS
) -> int:
    """
    Half the energy cost of flipping zero-labeled ``sites`` in the ``boundary`` state, in fixed point.

    Plus form ``h_S + n+ - n- + n0``; minus form ``-h_S - n+ + n- + n0``, with
    edges leaving the region counted under the matching boundary label.
    """
    boundary = Boundary(boundary)
    s = as_sites(sites)
    _check_inside(s, lg)
    picked = s.reframe(lg.window).mask
    if (picked & ~lg.zero_mask).any():
        raise PreconditionError("flip energy is defined for zero-labeled sites only")
    scale = config.capacity_scale
    q_sum = int(field.restrict(lg.region).quantized(scale)[picked].sum())
    n = boundary_edge_partition(s, lg, boundary)
    if boundary is Boundary.PLUS:
        return q_sum + scale * (n[Label.PLUS] - n[Label.MINUS] + n[Label.ZERO])
    return -q_sum + scale * (-n[Label.PLUS] + n[Label.MINUS] + n[Label.ZERO])


def flip_energy_delta(
    sites: SiteLike, field: FieldSample, lg: LabelGrid, boundary: Boundary = Boundary.PLUS
) -> float:
    """Stability margin of ``sites`` in energy units; never negative for a true ground state."""
    return flip_energy_scaled(sites, field, lg, boundary) / config.capacity_scale


def label_transitions(before: LabelGrid, after: LabelGrid) -> np.ndarray:
    """3x3 counts ``[from, to]`` over minus, zero, plus."""
    if not _same_region(before.region, after.region):
        raise RegionMismatchError("label grids come from different regions")
    mask = before.mask
    a = before.codes[mask].astype(np.int64) + 1
    b = after.codes[mask].astype(np.int64) + 1
    return np.bincount(3 * a + b, minlength=9).reshape(3, 3)


def check_field_monotone(before: LabelGrid, after: LabelGrid) -> np.ndarray:
    """Transition counts after raising the field; raise on any downward transition."""
    counts = label_transitions(before, after)
    bad = {
        f"{src.value}->{dst.value}": int(counts[src.code + 1, dst.code + 1])
        for src, dst in FORBIDDEN_UPWARD
        if counts[src.code + 1, dst.code + 1]
    }
    if bad:
        raise InvariantViolation("field-monotone", "a label moved down after raising the field", **bad)
    return counts


@dataclass(frozen=True)
class LabelAudit:
    """Stability margins of every zero component under both boundary conditions (fixed point)."""

    components: int
    min_plus_margin: Optional[int]
    min_minus_margin: Optional[int]
    violations: int

    @property
    def ok(self) -> bool:
        return self.violations == 0


def audit_labels(field: FieldSample, lg: LabelGrid, raise_on_violation: bool = True) -> LabelAudit:
    """
    Check the stability inequality for every full zero component in one pass.

    Neighbours of a full component are never zero, so each margin is built
    from the component's field sum and its plus/minus/boundary edge counts.
    """
    comps = disagreement_set(lg)
    k = comps.count
    if k == 0:
        return LabelAudit(components=0, min_plus_margin=None, min_minus_margin=None, violations=0)

    scale = config.capacity_scale
    q = field.restrict(lg.region).quantized(scale)
    q_sum = np.zeros(k + 1, dtype=np.int64)
    np.add.at(q_sum, comps.components[lg.zero_mask], q[lg.zero_mask])

    win = lg.window.expand(1)
    cid = np.zeros(win.shape, dtype=np.int64)
    cid[win.slices_of(lg.window)] = comps.components
    # 2 marks sites beyond the region
    outside = np.full(win.shape, 2, dtype=np.int64)
    outside[win.slices_of(lg.window)] = np.where(lg.mask, lg.codes, 2)

    plus = np.zeros(k + 1, dtype=np.int64)
    minus = np.zeros(k + 1, dtype=np.int64)
    beyond = np.zeros(k + 1, dtype=np.int64)
    for dx, dy in NEIGHBOR_OFFSETS:
        nb_cid = _neighbor(cid, dx, dy, 0)
        nb_code = _neighbor(outside, dx, dy, 2)
        leaving = (cid > 0) & (nb_cid != cid)
        src = cid[leaving]
        kind = nb_code[leaving]
        plus += np.bincount(src[kind == 1], minlength=k + 1)
        minus += np.bincount(src[kind == -1], minlength=k + 1)
        beyond += np.bincount(src[kind == 2], minlength=k + 1)

    plus_margin = (q_sum + scale * (plus - minus + beyond))[1:]
    minus_margin = (-q_sum + scale * (minus - plus + beyond))[1:]
    violations = int((plus_margin < 0).sum() + (minus_margin < 0).sum())
    audit = LabelAudit(
        components=k,
        min_plus_margin=int(plus_margin.min()),
        min_minus_margin=int(minus_margin.min()),
        violations=violations,
    )
    if violations and raise_on_violation:
        raise InvariantViolation(
            "stability",
            "a zero component could be flipped at negative energy cost",
            violations=violations,
            min_plus_margin=audit.min_plus_margin,
            min_minus_margin=audit.min_minus_margin,
        )
    return audit
