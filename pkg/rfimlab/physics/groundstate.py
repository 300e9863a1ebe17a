"""
Zero-temperature ground states under plus and minus boundary conditions.

The Hamiltonian is minimized exactly by an s-t minimum cut. Field values are
taken in fixed point (``config.capacity_scale`` units per unit energy), the
boundary term is folded into an effective field, and the extremal plus-set is
read off the residual graph. A brute-force enumerator over the identically
rounded field serves as the oracle on small regions.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from rfimlab.config import config
from rfimlab.exceptions import (
    EmptyRegionError,
    FieldMagnitudeError,
    InvariantViolation,
    RegionMismatchError,
    RegionTooLargeError,
)
from rfimlab.models import Boundary, Extremality
from rfimlab.physics.disorder import FieldSample
from rfimlab.physics.lattice import Region, Vertex
from rfimlab.solvers.maxflow import DinicSolver, FlowNetwork, create_flow_solver

logger = logging.getLogger(__name__)

_BRUTEFORCE_CHUNK = 1 << 15


@dataclass(frozen=True, eq=False)
class SpinConfig:
    """
    A spin configuration on a region.

    Attributes:
        region (Region): Sites carrying spins.
        spins (np.ndarray): int8 grid over ``region.window``; +1/-1 on the region, 0 elsewhere.
        boundary (Boundary): Boundary condition the configuration was solved under.
        energy (float): Hamiltonian of ``spins`` for the field it was solved with.
        tie (bool): The fixed-point minimizer was not unique.
    """

    region: Region
    spins: np.ndarray
    boundary: Boundary
    energy: float
    tie: bool = False

    def spin(self, v: Vertex) -> int:
        if not self.region.contains(v):
            raise RegionMismatchError(f"vertex {tuple(v)} outside the configuration region")
        return int(self.spins[self.region.window.index(v)])

    def dump(self) -> str:
        """Text grid of ``+``/``-`` (``.`` off-region), one row per y, increasing."""
        glyphs = np.array([".", "+", "-"])
        rows = glyphs[np.where(self.spins > 0, 1, np.where(self.spins < 0, 2, 0))]
        return "\n".join("".join(r) for r in rows) + "\n"


def interior_edge_masks(mask: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Horizontal and vertical edges with both ends in ``mask`` (each counted once)."""
    return mask[:, :-1] & mask[:, 1:], mask[:-1, :] & mask[1:, :]


def interior_edge_count(mask: np.ndarray) -> int:
    horizontal, vertical = interior_edge_masks(mask)
    return int(horizontal.sum() + vertical.sum())


def boundary_counts(mask: np.ndarray) -> np.ndarray:
    """Number of 4-neighbours outside ``mask`` for every site of ``mask`` (0 elsewhere)."""
    padded = np.pad(mask, 1, constant_values=False).astype(np.int64)
    inside = padded[1:-1, 2:] + padded[1:-1, :-2] + padded[2:, 1:-1] + padded[:-2, 1:-1]
    return np.where(mask, 4 - inside, 0)


def _pair_sum(s: np.ndarray, mask: np.ndarray) -> int:
    horizontal, vertical = interior_edge_masks(mask)
    return int((s[:, :-1] * s[:, 1:])[horizontal].sum() + (s[:-1, :] * s[1:, :])[vertical].sum())


def _energy(spins: np.ndarray, mask: np.ndarray, boundary: Boundary, values: np.ndarray) -> float:
    s = spins.astype(np.int64)
    coupling = _pair_sum(s, mask) + boundary.sign * int((boundary_counts(mask) * s)[mask].sum())
    return -math.fsum([float(coupling)] + (s[mask] * values[mask]).tolist())


def _scaled_energy(
    spins: np.ndarray, mask: np.ndarray, boundary: Boundary, quantized: np.ndarray, scale: int
) -> int:
    s = spins.astype(np.int64)
    coupling = _pair_sum(s, mask) + boundary.sign * int((boundary_counts(mask) * s)[mask].sum())
    return -(scale * coupling + int((s[mask] * quantized[mask]).sum()))


def hamiltonian(spins: SpinConfig, field: FieldSample) -> float:
    """Energy of ``spins`` in ``field`` with the boundary term of ``spins.boundary``."""
    if not field.covers(spins.region):
        raise RegionMismatchError("spin region is not contained in the field region")
    sub = field.restrict(spins.region)
    return _energy(spins.spins, spins.region.mask(), spins.boundary, sub.values)


def effective_field(field: FieldSample, region: Region, boundary: Boundary) -> np.ndarray:
    """
    Field with the boundary term folded in: ``h'_u = h_u +/- #{boundary neighbours of u}``.

    Returned as a grid over ``region.window`` (0 off-region).
    """
    boundary = Boundary(boundary)
    mask = region.mask()
    values = field.restrict(region).values
    return np.where(mask, values + boundary.sign * boundary_counts(mask), 0.0)


def _effective_quantized(sub: FieldSample, mask: np.ndarray, boundary: Boundary, scale: int) -> np.ndarray:
    return np.where(mask, sub.quantized(scale) + boundary.sign * scale * boundary_counts(mask), 0)


def _prepare(field: FieldSample, region: Region) -> Tuple[FieldSample, np.ndarray]:
    mask = region.mask()
    if not mask.any():
        raise EmptyRegionError("ground state of an empty region")
    if not field.covers(region):
        raise RegionMismatchError("field does not cover the region")
    sub = field.restrict(region)
    values = sub.values[mask]
    if not np.all(np.isfinite(values)) or np.abs(values).max() > config.field_bound:
        raise FieldMagnitudeError(
            f"field magnitude exceeds the bound {config.field_bound:g}; capacities would overflow"
        )
    return sub, mask


def build_flow_network(q_eff: np.ndarray, mask: np.ndarray, scale: int) -> FlowNetwork:
    """
    Cut network for the fixed-point effective field ``q_eff`` on ``mask``.

    Site nodes are numbered row-major; the source (plus side) and sink follow.
    Every interior edge becomes two antiparallel arcs of capacity ``2*scale``;
    a positive ``q'`` becomes a source arc of capacity ``2q'``, a negative one a
    sink arc of capacity ``2|q'|``.
    """
    n = int(mask.sum())
    index = np.full(mask.shape, -1, dtype=np.int64)
    index[mask] = np.arange(n, dtype=np.int64)
    source, sink = n, n + 1

    horizontal, vertical = interior_edge_masks(mask)
    a = np.concatenate([index[:, :-1][horizontal], index[:-1, :][vertical]])
    b = np.concatenate([index[:, 1:][horizontal], index[1:, :][vertical]])

    q = q_eff[mask].astype(np.int64)
    nodes = np.arange(n, dtype=np.int64)
    pos, neg = q > 0, q < 0

    tails = np.concatenate([a, b, np.full(pos.sum(), source), nodes[neg]])
    heads = np.concatenate([b, a, nodes[pos], np.full(neg.sum(), sink)])
    caps = np.concatenate(
        [np.full(2 * a.size, 2 * scale, dtype=np.int64), 2 * q[pos], -2 * q[neg]]
    )
    return FlowNetwork(
        node_count=n + 2,
        tails=tails.astype(np.int64),
        heads=heads.astype(np.int64),
        capacities=caps.astype(np.int64),
        source=source,
        sink=sink,
    )


def ground_state(
    field: FieldSample,
    region: Region,
    boundary: Boundary,
    extremality: Optional[Extremality] = None,
    solver: Optional[DinicSolver] = None,
) -> SpinConfig:
    """
    Exact minimizer of the Hamiltonian on ``region`` under ``boundary``.

    ``extremality`` defaults to maximal_plus under the plus boundary and
    minimal_plus under the minus boundary, which makes the plus state
    pointwise above the minus state.
    """
    boundary = Boundary(boundary)
    extremality = Extremality(extremality) if extremality else Extremality.for_boundary(boundary)
    sub, mask = _prepare(field, region)
    scale = config.capacity_scale

    q_eff = _effective_quantized(sub, mask, boundary, scale)
    network = build_flow_network(q_eff, mask, scale)
    cut = (solver or create_flow_solver()).min_cut(network)

    n = network.node_count - 2
    minimal, maximal = cut.minimal_source[:n], cut.maximal_source[:n]
    tie = not np.array_equal(minimal, maximal)
    chosen = maximal if extremality is Extremality.MAXIMAL_PLUS else minimal

    spins = np.zeros(mask.shape, dtype=np.int8)
    spins[mask] = np.where(chosen, 1, -1)

    scaled = _scaled_energy(spins, mask, boundary, sub.quantized(scale), scale)
    expected = cut.value - scale * interior_edge_count(mask) - int(np.abs(q_eff[mask]).sum())
    if scaled != expected:
        raise InvariantViolation(
            "energy-bookkeeping",
            "cut value does not reproduce the fixed-point energy",
            cut_value=cut.value,
            scaled_energy=scaled,
            expected=expected,
        )
    if tie:
        logger.warning(
            "fixed-point tie: %d sites differ between extremal minimizers (seed=%d sample=%d %s)",
            int((minimal != maximal).sum()),
            field.master_seed,
            field.sample_index,
            boundary.value,
        )

    return SpinConfig(
        region=region,
        spins=spins,
        boundary=boundary,
        energy=_energy(spins, mask, boundary, sub.values),
        tie=tie,
    )


def ground_state_bruteforce(
    field: FieldSample,
    region: Region,
    boundary: Boundary,
    extremality: Extremality = Extremality.MAXIMAL_PLUS,
) -> SpinConfig:
    """
    Exhaustive minimization over all ``2^|region|`` configurations.

    Configurations are ordered lexicographically in row-major site order with
    plus above minus; ties go to the largest (maximal_plus) or smallest
    (minimal_plus) minimizer, which coincide with the extremal cuts.
    """
    boundary = Boundary(boundary)
    extremality = Extremality(extremality)
    n = region.size
    if n > config.bruteforce_max_sites:
        raise RegionTooLargeError(
            f"brute force is limited to {config.bruteforce_max_sites} sites, region has {n}"
        )
    sub, mask = _prepare(field, region)
    scale = config.capacity_scale

    linear = _effective_quantized(sub, mask, boundary, scale)[mask].astype(np.int64)
    index = np.full(mask.shape, -1, dtype=np.int64)
    index[mask] = np.arange(n)
    horizontal, vertical = interior_edge_masks(mask)
    a = np.concatenate([index[:, :-1][horizontal], index[:-1, :][vertical]])
    b = np.concatenate([index[:, 1:][horizontal], index[1:, :][vertical]])
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)

    best_energy: Optional[int] = None
    best_code = 0
    minimizers = 0
    total = 1 << n
    for start in range(0, total, _BRUTEFORCE_CHUNK):
        codes = np.arange(start, min(start + _BRUTEFORCE_CHUNK, total), dtype=np.int64)
        s = 2 * ((codes[:, None] >> shifts[None, :]) & 1) - 1
        energies = -(scale * (s[:, a] * s[:, b]).sum(axis=1) + s @ linear)
        low = int(energies.min())
        hits = codes[energies == low]
        if best_energy is None or low < best_energy:
            best_energy, minimizers = low, hits.size
            best_code = int(hits[-1] if extremality is Extremality.MAXIMAL_PLUS else hits[0])
        elif low == best_energy:
            minimizers += hits.size
            if extremality is Extremality.MAXIMAL_PLUS:
                best_code = int(hits[-1])

    spins = np.zeros(mask.shape, dtype=np.int8)
    spins[mask] = np.where((best_code >> shifts) & 1, 1, -1)
    return SpinConfig(
        region=region,
        spins=spins,
        boundary=boundary,
        energy=_energy(spins, mask, boundary, sub.values),
        tie=minimizers > 1,
    )
