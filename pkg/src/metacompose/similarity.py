"""Similarity relations between operations and the instance-layer network.

Four set relations over input/output parameter sets are provided. Only the
full-similarity network is used for layering; the other three are built and
exported for inspection.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import reduce
from itertools import combinations, permutations

import networkx as nx

from .registry import OperationDescriptor, Registry


class SimilarityKind(str, enum.Enum):
    FULL = "full"
    PARTIAL = "partial"
    EXCESS = "excess"
    RELATION = "relation"

    @property
    def directed(self) -> bool:
        return self in (SimilarityKind.PARTIAL, SimilarityKind.EXCESS)


class WrongKindError(ValueError):
    pass


def _distinct(o1: OperationDescriptor, o2: OperationDescriptor) -> None:
    if o1.id == o2.id:
        raise ValueError(f"cannot compare operation {o1.id!r} with itself")


def full_sim(o1: OperationDescriptor, o2: OperationDescriptor) -> bool:
    """Same outputs and overlapping inputs."""
    _distinct(o1, o2)
    return o1.outputs == o2.outputs and not o1.inputs.isdisjoint(o2.inputs)


def partial_sim(o1: OperationDescriptor, o2: OperationDescriptor) -> bool:
    """o2 is partially similar to o1: o2 misses some of o1's outputs, inputs overlap."""
    _distinct(o1, o2)
    return o1.outputs > o2.outputs and not o1.inputs.isdisjoint(o2.inputs)


def excess_sim(o1: OperationDescriptor, o2: OperationDescriptor) -> bool:
    """o2 is similar to o1 with excess: more outputs from a subset of o1's inputs."""
    _distinct(o1, o2)
    return o1.outputs < o2.outputs and o1.inputs >= o2.inputs


def relation_sim(o1: OperationDescriptor, o2: OperationDescriptor) -> bool:
    """Same outputs, disjoint inputs."""
    _distinct(o1, o2)
    return o1.outputs == o2.outputs and o1.inputs.isdisjoint(o2.inputs)


PREDICATES = {
    SimilarityKind.FULL: full_sim,
    SimilarityKind.PARTIAL: partial_sim,
    SimilarityKind.EXCESS: excess_sim,
    SimilarityKind.RELATION: relation_sim,
}


@dataclass(frozen=True)
class SimilarityNetwork:
    """Operation graph for one similarity kind.

    Undirected edges are stored as sorted id pairs. A directed edge
    ``(u, v)`` means operation ``u`` is similar to ``v`` in the relation's
    asymmetric sense.
    """

    kind: SimilarityKind
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    @property
    def directed(self) -> bool:
        return self.kind.directed

    def to_networkx(self) -> nx.Graph:
        g = nx.DiGraph() if self.directed else nx.Graph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.edges)
        return g

    def neighbors(self, node: str) -> set[str]:
        out = set()
        for u, v in self.edges:
            if u == node:
                out.add(v)
            elif v == node:
                out.add(u)
        return out

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "nodes": list(self.nodes), "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, data: dict) -> SimilarityNetwork:
        return cls(SimilarityKind(data["kind"]), tuple(data["nodes"]), tuple(tuple(e) for e in data["edges"]))


def build_similarity_network(registry: Registry, kind: SimilarityKind | str = SimilarityKind.FULL) -> SimilarityNetwork:
    kind = SimilarityKind(kind)
    pred = PREDICATES[kind]
    ops = registry.operations
    edges = []
    if kind.directed:
        for o1, o2 in permutations(ops, 2):
            if pred(o1, o2):
                edges.append((o2.id, o1.id))
    else:
        for o1, o2 in combinations(ops, 2):
            if pred(o1, o2):
                edges.append((o1.id, o2.id))
    return SimilarityNetwork(kind, registry.ids, tuple(sorted(edges)))


@dataclass(frozen=True)
class Community:
    id: str
    members: tuple[str, ...]


def communities(network: SimilarityNetwork) -> list[Community]:
    """Connected components of a full-similarity network, ordered by smallest member."""
    if network.kind is not SimilarityKind.FULL:
        raise WrongKindError(f"communities are extracted from full-similarity networks only, got {network.kind.value}")
    comps = [tuple(sorted(c)) for c in nx.connected_components(network.to_networkx())]
    comps.sort(key=lambda c: c[0])
    return [Community(f"c{i}", members) for i, members in enumerate(comps, start=1)]


def maximal_cliques(network: SimilarityNetwork) -> list[frozenset[str]]:
    """All maximal cliques, largest first, ties broken by smallest member id."""
    if network.directed:
        raise WrongKindError("maximal cliques need an undirected network")
    cliques = [frozenset(c) for c in nx.find_cliques(network.to_networkx())]
    cliques.sort(key=lambda c: (-len(c), sorted(c)))
    return cliques


def common_inputs(registry: Registry, clique) -> frozenset[str]:
    """Input parameters shared by every member of ``clique`` (possibly empty)."""
    return reduce(frozenset.intersection, (registry[i].inputs for i in clique))
