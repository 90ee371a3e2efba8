"""Phase one: backward search for a meta-composition, then refinement.

``find_meta_composition`` walks the interaction network backwards from the
goal suppliers. A candidate path is accepted (all its nodes join the
composition) when its head consumes a known parameter or the head is
already part of the composition. A head that was not yet in the
composition is expanded towards predecessors offering at least one unknown
parameter, never revisiting a node of the same path.

``refine_meta_composition`` prunes the result to meta-operations that have
an invocable member, dropping members that can never be invoked.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .metalayer import MetaNetwork
from .registry import Request


@dataclass
class SearchStats:
    popped: int = 0
    enqueued: int = 0
    longest_path: int = 0


@dataclass(frozen=True)
class MetaComposition:
    network: MetaNetwork
    request: Request
    refined: bool = False
    # meta id -> ids of members dropped by refinement
    dropped: dict = field(default_factory=dict)
    # meta ids removed never proven instantiable
    removed: tuple[str, ...] = ()
    # meta ids in the order refinement proved them instantiable
    order: tuple[str, ...] = ()

    def rank(self, meta_id: str) -> int:
        return self.order.index(meta_id)

    @property
    def node_ids(self) -> tuple[str, ...]:
        return self.network.node_ids

    def __contains__(self, meta_id: str) -> bool:
        return meta_id in self.network

    def __len__(self) -> int:
        return len(self.network)

    def to_dict(self, annotate: bool = False) -> dict:
        data = {"request": self.request.to_dict(), "refined": self.refined, **self.network.to_dict()}
        if annotate:
            data["order"] = list(self.order)
            data["removed"] = list(self.removed)
            data["dropped"] = {k: list(v) for k, v in sorted(self.dropped.items())}
        return data


def goal_supplied(network: MetaNetwork, goal: frozenset[str]) -> bool:
    supplied = frozenset().union(*(network.output(m) for m in network.suppliers(goal)))
    return goal <= supplied


def _reachable_from_known(network: MetaNetwork, known: frozenset[str]) -> set[str]:
    """Nodes reachable from a known-input node along edges that carry an unknown parameter.

    Only such nodes can ever head an accepted path, so nothing else needs
    to be explored.
    """
    seen = {m for m in network.node_ids if not network.input(m).isdisjoint(known)}
    stack = list(seen)
    while stack:
        m = stack.pop()
        for s in network.succ(m):
            if s not in seen and network.label(m, s) - known:
                seen.add(s)
                stack.append(s)
    return seen


def find_meta_composition(request: Request, network: MetaNetwork, *, queue: str = "fifo",
                          stats: SearchStats | None = None) -> MetaComposition | None:
    """Return the meta-composition fitting ``request``, or None when infeasible."""
    if queue not in ("fifo", "lifo"):
        raise ValueError(f"queue must be 'fifo' or 'lifo', got {queue!r}")
    known, goal = request.known, request.goal
    stats = stats if stats is not None else SearchStats()

    live = _reachable_from_known(network, known)
    pending: deque[tuple[str, ...]] = deque((m,) for m in network.suppliers(goal) if m in live)
    stats.enqueued += len(pending)
    selected: dict[str, None] = {}
    pop = pending.popleft if queue == "fifo" else pending.pop

    while pending:
        path = pop()
        stats.popped += 1
        stats.longest_path = max(stats.longest_path, len(path))
        head = path[0]
        already = head in selected
        if not network.input(head).isdisjoint(known) or already:
            selected.update(dict.fromkeys(path))
        if already:
            continue
        for m in network.pred(head):
            if m in live and network.label(m, head) - known and m not in path:
                pending.append((m,) + path)
                stats.enqueued += 1

    composition = network.subnetwork(selected)
    if not goal_supplied(composition, goal):
        return None
    return MetaComposition(composition, request)


def refine_meta_composition(c: MetaComposition) -> MetaComposition | None:
    """Keep only instantiable meta-operations and invocable members.

    Returns None if the goal is no longer supplied afterwards.
    """
    net = c.network
    known = c.request.known
    members = {m.id: list(m.members) for m in net.nodes}
    dropped: dict[str, list[str]] = {m: [] for m in net.node_ids}
    unproven = list(net.node_ids)
    order: list[str] = []
    changed = True
    while unproven and changed:
        changed = False
        for m in list(unproven):
            from_proven: set[str] = set()
            from_unproven: set[str] = set()
            for p in net.pred(m):
                (from_unproven if p in unproven else from_proven).update(net.label(p, m))
            for o in list(members[m]):
                if o.inputs <= known | from_proven:
                    if m in unproven:
                        unproven.remove(m)
                        order.append(m)
                        changed = True
                elif not o.inputs <= known | from_proven | from_unproven:
                    members[m].remove(o)
                    dropped[m].append(o.id)
                    changed = True

    survivors = [m for m in net.node_ids if m not in unproven]
    pruned = net.subnetwork(survivors)
    # Members justified only by a removed predecessor are not invocable.
    for m in survivors:
        available = set(known)
        for p in pruned.pred(m):
            available |= pruned.label(p, m)
        for o in list(members[m]):
            if not o.inputs <= available:
                members[m].remove(o)
                dropped[m].append(o.id)

    updated = [pruned[m].without(dropped[m]) for m in survivors]
    pruned = pruned.with_nodes(updated)
    if not goal_supplied(pruned, c.request.goal):
        return None
    return MetaComposition(
        pruned,
        c.request,
        refined=True,
        dropped={**{k: tuple(v) for k, v in c.dropped.items()},
                 **{k: tuple(v) for k, v in dropped.items() if v}},
        removed=c.removed + tuple(unproven),
        order=tuple(order),
    )
