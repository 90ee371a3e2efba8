"""Meta-operations and the interaction network between them."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from .registry import OperationDescriptor, Registry
from .similarity import Community


class MissingNodeError(KeyError):
    pass


class MissingEdgeError(KeyError):
    pass


@dataclass(frozen=True)
class MetaOperation:
    """Representative of one community.

    ``refined`` is set once refinement has dropped members; the id is kept
    and only the display name changes (m1 -> m1').
    """

    id: str
    community: str
    members: tuple[OperationDescriptor, ...]
    inputs: frozenset[str]
    outputs: frozenset[str]
    refined: bool = False

    def __post_init__(self):
        if not self.members:
            raise ValueError(f"meta-operation {self.id!r} has no members")

    @classmethod
    def from_members(cls, meta_id: str, community: str, members: Iterable[OperationDescriptor], refined: bool = False) -> MetaOperation:
        members = tuple(sorted(members, key=lambda o: o.id))
        inputs = frozenset().union(*(o.inputs for o in members))
        outputs = frozenset().union(*(o.outputs for o in members))
        return cls(meta_id, community, members, inputs, outputs, refined)

    @property
    def member_ids(self) -> tuple[str, ...]:
        return tuple(o.id for o in self.members)

    @property
    def display_name(self) -> str:
        return self.id + "'" if self.refined else self.id

    def without(self, dropped: Iterable[str]) -> MetaOperation:
        dropped = set(dropped)
        if not dropped & set(self.member_ids):
            return self
        kept = [o for o in self.members if o.id not in dropped]
        return MetaOperation.from_members(self.id, self.community, kept, refined=True)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "community": self.community,
            "members": list(self.member_ids),
            "inputs": sorted(self.inputs),
            "outputs": sorted(self.outputs),
            "refined": self.refined,
        }


class MetaNetwork:
    """Directed graph of meta-operations with parameter-set edge labels.

    Used both for the full interaction network and for meta-compositions,
    which are sub-networks of it.
    """

    def __init__(self, nodes: Iterable[MetaOperation], edges: dict[tuple[str, str], frozenset[str]]):
        self._nodes = {m.id: m for m in nodes}
        self._order = tuple(self._nodes)
        self._edges = dict(sorted(edges.items(), key=lambda kv: (self._order.index(kv[0][0]), self._order.index(kv[0][1]))))
        self._preds: dict[str, list[str]] = {n: [] for n in self._order}
        for src, dst in self._edges:
            self._preds[dst].append(src)

    @property
    def nodes(self) -> tuple[MetaOperation, ...]:
        return tuple(self._nodes[n] for n in self._order)

    @property
    def node_ids(self) -> tuple[str, ...]:
        return self._order

    @property
    def edges(self) -> dict[tuple[str, str], frozenset[str]]:
        return dict(self._edges)

    def __len__(self) -> int:
        return len(self._order)

    def __contains__(self, meta_id: str) -> bool:
        return meta_id in self._nodes

    def __getitem__(self, meta_id: str) -> MetaOperation:
        try:
            return self._nodes[meta_id]
        except KeyError:
            raise MissingNodeError(f"no meta-operation {meta_id!r} in network") from None

    def pred(self, meta_id: str) -> tuple[str, ...]:
        self[meta_id]
        return tuple(self._preds[meta_id])

    def succ(self, meta_id: str) -> tuple[str, ...]:
        self[meta_id]
        return tuple(dst for src, dst in self._edges if src == meta_id)

    def label(self, src: str, dst: str) -> frozenset[str]:
        try:
            return self._edges[(src, dst)]
        except KeyError:
            raise MissingEdgeError(f"no edge {src!r} -> {dst!r}") from None

    def input(self, meta_id: str) -> frozenset[str]:
        return self[meta_id].inputs

    def output(self, meta_id: str) -> frozenset[str]:
        return self[meta_id].outputs

    def suppliers(self, params: Iterable[str]) -> tuple[str, ...]:
        params = frozenset(params)
        return tuple(n for n in self._order if not self._nodes[n].outputs.isdisjoint(params))

    def subnetwork(self, keep: Iterable[str]) -> MetaNetwork:
        """Induced sub-network on ``keep``; edge labels are carried over unchanged."""
        keep = set(keep)
        nodes = [self._nodes[n] for n in self._order if n in keep]
        edges = {e: lab for e, lab in self._edges.items() if e[0] in keep and e[1] in keep}
        return MetaNetwork(nodes, edges)

    def with_nodes(self, replacements: Iterable[MetaOperation]) -> MetaNetwork:
        """Same structure with some meta-operations swapped for updated versions."""
        nodes = dict(self._nodes)
        for m in replacements:
            self[m.id]
            nodes[m.id] = m
        return MetaNetwork([nodes[n] for n in self._order], self._edges)

    def to_dict(self) -> dict:
        return {
            "nodes": [m.to_dict() for m in self.nodes],
            "edges": [{"from": s, "to": d, "label": sorted(lab)} for (s, d), lab in self._edges.items()],
        }

    @classmethod
    def from_dict(cls, data: dict, registry: Registry) -> MetaNetwork:
        nodes = []
        for nd in data["nodes"]:
            members = tuple(registry[i] for i in nd["members"])
            nodes.append(MetaOperation(nd["id"], nd["community"], members, frozenset(nd["inputs"]),
                                       frozenset(nd["outputs"]), nd.get("refined", False)))
        edges = {(e["from"], e["to"]): frozenset(e["label"]) for e in data["edges"]}
        return cls(nodes, edges)

    def __eq__(self, other):
        if not isinstance(other, MetaNetwork):
            return NotImplemented
        return self.nodes == other.nodes and self._edges == other._edges

    def __repr__(self):
        return f"{type(self).__name__}(nodes={list(self._order)}, edges={len(self._edges)})"


# The full meta-layer is just a MetaNetwork built from every community.
InteractionNetwork = MetaNetwork


def build_meta_operations(registry: Registry, communities: list[Community]) -> list[MetaOperation]:
    metas = []
    for i, community in enumerate(communities, start=1):
        members = [registry[o] for o in community.members]
        metas.append(MetaOperation.from_members(f"m{i}", community.id, members))
    return metas


def build_interaction_network(metaops: list[MetaOperation]) -> InteractionNetwork:
    edges = {}
    for mi in metaops:
        for mj in metaops:
            if mi.id == mj.id:
                continue
            shared = mi.outputs & mj.inputs
            if shared:
                edges[(mi.id, mj.id)] = shared
    return MetaNetwork(metaops, edges)


def suppliers(params: Iterable[str], network: MetaNetwork) -> tuple[str, ...]:
    return network.suppliers(params)


def pred(meta_id: str, network: MetaNetwork) -> tuple[str, ...]:
    return network.pred(meta_id)


def label(network: MetaNetwork, src: str, dst: str) -> frozenset[str]:
    return network.label(src, dst)
