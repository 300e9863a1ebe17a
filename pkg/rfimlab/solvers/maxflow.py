"""Module for building s-t flow networks and solving them for extremal minimum cuts."""

import logging
from dataclasses import dataclass
from typing import Iterator, Tuple

import networkx as nx
import numpy as np
from networkx.algorithms.flow import dinitz

from rfimlab.config import config

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FlowNetwork:
    """
    Capacitated directed graph with distinguished source and sink.

    Attributes:
        node_count (int): Nodes are ``0 .. node_count - 1`` (terminals included).
        tails, heads (np.ndarray): Arc endpoints.
        capacities (np.ndarray): Nonnegative int64 arc capacities.
        source, sink (int): Terminal node ids.
    """

    node_count: int
    tails: np.ndarray
    heads: np.ndarray
    capacities: np.ndarray
    source: int
    sink: int

    @property
    def arc_count(self) -> int:
        return int(self.tails.size)

    def arcs(self) -> Iterator[Tuple[int, int, int]]:
        return zip(self.tails.tolist(), self.heads.tolist(), self.capacities.tolist())

    def to_digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.node_count))
        g.add_weighted_edges_from(self.arcs(), weight="capacity")
        return g


@dataclass(frozen=True, eq=False)
class MinCut:
    """
    Value of a minimum cut and the two extremal source sides.

    ``minimal_source`` holds the nodes reachable from the source in the
    residual graph; ``maximal_source`` is the complement of the nodes that
    reach the sink. Every minimum cut's source side lies between them.
    """

    value: int
    minimal_source: np.ndarray
    maximal_source: np.ndarray

    @property
    def unique(self) -> bool:
        return bool(np.array_equal(self.minimal_source, self.maximal_source))


class DinicSolver:
    """Exact max-flow by Dinic's algorithm (BFS level graphs, blocking flows)."""

    def __init__(self, name: str = "dinitz"):
        self.name = name

    def min_cut(self, network: FlowNetwork) -> MinCut:
        graph = network.to_digraph()
        residual = dinitz(graph, network.source, network.sink, capacity="capacity")
        value = int(residual.graph["flow_value"])

        def has_room(u, v):
            arc = residual[u][v]
            return arc["capacity"] - arc["flow"] > 0

        open_arcs = nx.subgraph_view(residual, filter_edge=has_room)
        reach = nx.descendants(open_arcs, network.source) | {network.source}
        coreach = nx.ancestors(open_arcs, network.sink) | {network.sink}

        minimal = np.zeros(network.node_count, dtype=bool)
        minimal[list(reach)] = True
        maximal = np.ones(network.node_count, dtype=bool)
        maximal[list(coreach)] = False
        logger.debug(
            "min cut value=%d nodes=%d arcs=%d", value, network.node_count, network.arc_count
        )
        return MinCut(value=value, minimal_source=minimal, maximal_source=maximal)


def create_flow_solver() -> DinicSolver:
    """
    Create the max-flow solver used by the ground-state module.

    The contract is the extremal cut, not the algorithm; any exact solver
    returning residual reachability can replace this one.
    """
    settings = config.get_solver_settings()
    logger.debug("creating flow solver with fixed-point scale %d", settings["scale"])
    return DinicSolver()
