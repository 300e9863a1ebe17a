import numpy as np

from rfimlab.solvers.maxflow import FlowNetwork, create_flow_solver


def network(arcs, node_count=3, source=0, sink=2) -> FlowNetwork:
    tails, heads, caps = zip(*arcs)
    return FlowNetwork(
        node_count=node_count,
        tails=np.array(tails, dtype=np.int64),
        heads=np.array(heads, dtype=np.int64),
        capacities=np.array(caps, dtype=np.int64),
        source=source,
        sink=sink,
    )


def test_unique_cut():
    cut = create_flow_solver().min_cut(network([(0, 1, 3), (1, 2, 2), (0, 2, 1)]))
    assert cut.value == 3
    assert cut.unique
    assert cut.minimal_source.tolist() == [True, True, False]


def test_tied_cut_reports_both_extremes():
    cut = create_flow_solver().min_cut(network([(0, 1, 1), (1, 2, 1)]))
    assert cut.value == 1
    assert not cut.unique
    assert cut.minimal_source.tolist() == [True, False, False]
    assert cut.maximal_source.tolist() == [True, True, False]


def test_disconnected_sink():
    cut = create_flow_solver().min_cut(network([(0, 1, 5)]))
    assert cut.value == 0
    # every node not reaching the sink may sit on the source side
    assert cut.maximal_source.tolist() == [True, True, False]
    assert cut.minimal_source.tolist() == [True, True, False]
