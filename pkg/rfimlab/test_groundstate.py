import numpy as np
import pytest

from rfimlab.exceptions import FieldMagnitudeError, RegionMismatchError, RegionTooLargeError
from rfimlab.models import Boundary, Extremality
from rfimlab.physics.disorder import FieldSample, sample_field
from rfimlab.physics.groundstate import (
    SpinConfig,
    build_flow_network,
    effective_field,
    ground_state,
    ground_state_bruteforce,
    hamiltonian,
)
from rfimlab.physics.lattice import ORIGIN, Vertex, box


def single(h: float) -> FieldSample:
    return FieldSample.from_values(box(0), np.array([[h]]))


def spin_config(region, value: int, boundary: Boundary) -> SpinConfig:
    spins = np.where(region.mask(), value, 0).astype(np.int8)
    return SpinConfig(region=region, spins=spins, boundary=boundary, energy=0.0)


def test_hamiltonian_of_single_site():
    assert hamiltonian(spin_config(box(0), 1, Boundary.PLUS), single(0.0)) == -4.0
    assert hamiltonian(spin_config(box(0), -1, Boundary.PLUS), single(0.0)) == 4.0
    assert hamiltonian(spin_config(box(0), 1, Boundary.MINUS), single(5.0)) == -1.0


def test_effective_field_folds_in_the_boundary():
    assert effective_field(single(0.5), box(0), Boundary.PLUS)[0, 0] == 4.5
    zero = FieldSample.from_values(box(1), np.zeros((3, 3)))
    q = effective_field(zero, box(1), Boundary.MINUS)
    assert q[0, 0] == -2.0
    assert q[1, 0] == -1.0
    assert q[1, 1] == 0.0


def test_single_site_ground_states():
    plus = ground_state(single(0.0), box(0), Boundary.PLUS)
    assert plus.spin(ORIGIN) == 1 and plus.energy == -4.0 and not plus.tie
    flipped = ground_state(single(-5.0), box(0), Boundary.PLUS)
    assert flipped.spin(ORIGIN) == -1 and flipped.energy == -1.0
    minus = ground_state_bruteforce(single(0.0), box(0), Boundary.MINUS)
    assert minus.spin(ORIGIN) == -1


def test_zero_field_follows_the_boundary():
    zero = FieldSample.from_values(box(1), np.zeros((3, 3)))
    gs = ground_state(zero, box(1), Boundary.PLUS)
    assert (gs.spins == 1).all()
    assert gs.energy == -24.0
    assert (ground_state(zero, box(1), Boundary.MINUS).spins == -1).all()


def test_strong_field_overrides_both_boundaries():
    strong = FieldSample.from_values(box(2), np.full((5, 5), 1e6))
    for boundary in Boundary:
        assert (ground_state(strong, box(2), boundary).spins == 1).all()


@pytest.mark.parametrize("epsilon", [0.5, 1.0, 4.0])
def test_min_cut_matches_exhaustive_search(epsilon):
    region = box(1)
    for index in range(100):
        field = sample_field(region, epsilon, 20190615, index)
        for boundary in Boundary:
            extremality = Extremality.for_boundary(boundary)
            fast = ground_state(field, region, boundary)
            slow = ground_state_bruteforce(field, region, boundary, extremality)
            assert np.array_equal(fast.spins, slow.spins), (index, boundary)
            assert fast.energy == pytest.approx(slow.energy)


def test_plus_state_dominates_minus_state():
    region = box(4)
    for index in range(20):
        field = sample_field(region, 1.0, 3, index)
        plus = ground_state(field, region, Boundary.PLUS)
        minus = ground_state(field, region, Boundary.MINUS)
        assert (plus.spins >= minus.spins).all()


def test_exact_tie_picks_the_extremal_minimizer():
    tied = ground_state(single(-4.0), box(0), Boundary.PLUS)
    assert tied.tie and tied.spin(ORIGIN) == 1
    other = ground_state(single(-4.0), box(0), Boundary.PLUS, Extremality.MINIMAL_PLUS)
    assert other.spin(ORIGIN) == -1
    assert ground_state(single(4.0), box(0), Boundary.MINUS).spin(ORIGIN) == -1


def test_precondition_errors():
    with pytest.raises(FieldMagnitudeError):
        ground_state(single(2.0**31), box(0), Boundary.PLUS)
    with pytest.raises(RegionMismatchError):
        ground_state(sample_field(box(1), 1.0, 1, 0), box(2), Boundary.PLUS)
    with pytest.raises(RegionTooLargeError):
        ground_state_bruteforce(sample_field(box(2), 1.0, 1, 0), box(2), Boundary.PLUS)


def test_flow_network_arcs():
    mask = box(1).mask()
    scale = 1 << 20
    network = build_flow_network(np.zeros(mask.shape, dtype=np.int64), mask, scale)
    assert network.arc_count == 24
    assert network.node_count == 11
    assert set(network.capacities.tolist()) == {2 * scale}

    q = np.zeros(mask.shape, dtype=np.int64)
    q[0, 0], q[2, 2] = 3, -5
    network = build_flow_network(q, mask, scale)
    arcs = list(network.arcs())
    assert (network.source, 0, 6) in arcs
    assert (8, network.sink, 10) in arcs


def test_spin_lookup_outside_region():
    gs = ground_state(single(1.0), box(0), Boundary.PLUS)
    with pytest.raises(RegionMismatchError):
        gs.spin(Vertex(3, 3))
