"""Phase two: lazy instantiation of a refined meta-composition.

The cursor keeps one selector for the goal cover and, per meta-operation, a
selected instance (member operation) and a selected input cover (set of
predecessors feeding that instance). Each ``next_composition`` call moves
the selectors forward like an odometer and reads off the operation
sequence for the new configuration. Input covers only draw on predecessors
that refinement proved instantiable earlier, so every configuration is
executable when its operations are listed in that order.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterator, Sequence

from .compose import MetaComposition
from .registry import OperationDescriptor

STATE_VERSION = 1


class CursorStateError(ValueError):
    """Serialized cursor state does not fit the meta-composition."""


@dataclass
class CoverEnumerator:
    """Irredundant covers of ``target`` by candidate contributions.

    Covers come out by size, then lexicographically by candidate position.
    An empty target has exactly one cover, the empty one.
    """

    target: frozenset[str]
    candidates: Sequence[tuple[Hashable, frozenset[str]]]
    position: int | None = None

    def __post_init__(self):
        self.target = frozenset(self.target)
        self.covers = _irredundant_covers(self.target, self.candidates)

    def current(self) -> tuple | None:
        return None if self.position is None else self.covers[self.position]

    def advance(self) -> tuple | None:
        nxt = 0 if self.position is None else self.position + 1
        self.position = nxt if nxt < len(self.covers) else None
        return self.current()

    def __iter__(self):
        return iter(self.covers)

    def __len__(self):
        return len(self.covers)


def _irredundant_covers(target, candidates):
    if not target:
        return [()]
    useful = [(key, frozenset(contrib) & target) for key, contrib in candidates]
    useful = [(key, contrib) for key, contrib in useful if contrib]
    if frozenset().union(*(c for _, c in useful)) < target:
        return []
    covers = []
    # Every member of an irredundant cover owns at least one target element.
    for size in range(1, min(len(target), len(useful)) + 1):
        for combo in combinations(useful, size):
            contribs = [c for _, c in combo]
            if frozenset().union(*contribs) != target:
                continue
            irredundant = all(
                frozenset().union(*(c for j, c in enumerate(contribs) if j != i)) != target
                for i in range(size)
            )
            if irredundant:
                covers.append(tuple(key for key, _ in combo))
    return covers


def enumerate_goal_covers(refined: MetaComposition, goal=None) -> CoverEnumerator:
    net = refined.network
    goal = frozenset(refined.request.goal if goal is None else goal)
    return CoverEnumerator(goal, [(m, net.output(m)) for m in net.suppliers(goal)])


def enumerate_in_covers(o: OperationDescriptor, meta_id: str, refined: MetaComposition, known=None) -> CoverEnumerator:
    """Input covers of instance ``o`` of ``meta_id``.

    Candidates are the predecessors that refinement proved instantiable
    before ``meta_id``; this keeps every selected dependency chain acyclic.
    """
    net = refined.network
    known = refined.request.known if known is None else frozenset(known)
    rank = refined.rank(meta_id)
    candidates = [(p, net.label(p, meta_id)) for p in net.pred(meta_id) if refined.rank(p) < rank]
    return CoverEnumerator(o.inputs - known, candidates)


def _executable(seq, instances: dict[str, OperationDescriptor], known, goal) -> bool:
    available = set(known)
    produced: set[str] = set()
    for op_id in seq:
        o = instances[op_id]
        if not o.inputs <= available:
            return False
        available |= o.outputs
        produced |= o.outputs
    return goal <= produced and len(set(seq)) == len(seq)


@dataclass
class _Decision:
    meta: str
    instance: int
    cover: int
    covers: list[tuple[str, ...]]


class InstantiationCursor:
    """Resumable enumerator of concrete compositions.

    A configuration is a goal cover plus, for every meta-operation it
    transitively demands, an instance and an input cover. Demanded
    meta-operations are decided from the highest refinement rank down, so a
    meta-operation is decided only once everything that could demand it has
    been. An input cover only has to supply what the already-demanded
    lower-ranked predecessors do not.

    Advancing works like an odometer over the decision stack: the most
    recent decision moves first (next input cover, then next instance), and
    every later decision is re-initialized. When the stack is exhausted the
    next goal cover is selected.

    Not thread-safe; use one cursor per consumer.
    """

    def __init__(self, refined: MetaComposition):
        if not refined.refined:
            raise ValueError("instantiation needs a refined meta-composition")
        self.composition = refined
        self._net = refined.network
        self._known = refined.request.known
        self._goal = refined.request.goal
        self._rank = {m: i for i, m in enumerate(refined.order)}
        self._ops = {o.id: o for m in self._net.nodes for o in m.members}
        self._goal_covers = enumerate_goal_covers(refined)
        self._stack: list[_Decision] = []
        self._emitted: list[tuple[str, ...]] = []
        self._seen: set[tuple[str, ...]] = set()
        self.exhausted = False
        self.max_depth = 0

    # selectors

    def get_goal_cover(self) -> tuple[str, ...] | None:
        return self._goal_covers.current()

    def _decision(self, m: str) -> _Decision | None:
        for d in self._stack:
            if d.meta == m:
                return d
        return None

    def get_instance(self, m: str) -> OperationDescriptor | None:
        d = self._decision(m)
        return None if d is None else self._net[m].members[d.instance]

    def get_in_cover(self, m: str) -> tuple[str, ...] | None:
        d = self._decision(m)
        return None if d is None else d.covers[d.cover]

    def _demand(self, upto: int | None = None) -> set[str]:
        demand = set(self.get_goal_cover() or ())
        for d in self._stack[:upto]:
            demand.update(d.covers[d.cover])
        return demand

    def _covers(self, m: str, idx: int, demand: set[str]) -> list[tuple[str, ...]]:
        o = self._net[m].members[idx]
        rank = self._rank[m]
        lower = [p for p in self._net.pred(m) if self._rank[p] < rank]
        supplied = frozenset().union(*(self._net.label(p, m) for p in lower if p in demand))
        candidates = [(p, self._net.label(p, m)) for p in lower if p not in demand]
        return _irredundant_covers(o.inputs - self._known - supplied, candidates)

    def _first_setup(self, m: str, demand: set[str], start: int = 0) -> _Decision | None:
        for idx in range(start, len(self._net[m].members)):
            covers = self._covers(m, idx, demand)
            if covers:
                return _Decision(m, idx, 0, covers)
        return None

    def _pending(self, demand: set[str]) -> str | None:
        decided = {d.meta for d in self._stack}
        todo = [m for m in demand if m not in decided]
        return max(todo, key=self._rank.__getitem__) if todo else None

    def _complete(self) -> None:
        demand = self._demand()
        while (m := self._pending(demand)) is not None:
            d = self._first_setup(m, demand)
            if d is None:
                raise AssertionError(f"meta-operation {m} has no invocable instance")
            self._stack.append(d)
            demand.update(d.covers[0])
        self.max_depth = max(self.max_depth, len(self._stack))

    def next_op_seq(self, m: str) -> bool:
        """Move to the next setup of ``m`` or of anything decided after it.

        True if ``m`` is not set up yet (it will be on the next read) or if
        some setup advanced; False once they are all exhausted, leaving
        ``m`` deselected.
        """
        d = self._decision(m)
        if d is None:
            return True
        floor = self._stack.index(d)
        while len(self._stack) > floor:
            top = self._stack[-1]
            if top.cover + 1 < len(top.covers):
                top.cover += 1
                self._complete()
                return True
            nxt = self._first_setup(top.meta, self._demand(len(self._stack) - 1), top.instance + 1)
            if nxt is not None:
                self._stack[-1] = nxt
                self._complete()
                return True
            self._stack.pop()
        return False

    def get_op_seq(self, m: str) -> list[str]:
        """Operations of the current setup that ``m`` transitively relies on, ending with ``m``'s instance."""
        selected = {d.meta for d in self._stack}
        if m not in selected:
            raise KeyError(f"meta-operation {m!r} is not part of the current setup")
        needed = {m}
        frontier = [m]
        while frontier:
            x = frontier.pop()
            inputs = self.get_instance(x).inputs - self._known
            for p in self._net.pred(x):
                if p in selected and p not in needed and self._rank[p] < self._rank[x] and self._net.label(p, x) & inputs:
                    needed.add(p)
                    frontier.append(p)
        return [self.get_instance(x).id for x in sorted(needed, key=self._rank.__getitem__)]

    # public enumeration

    def _advance(self) -> bool:
        if self.get_goal_cover() is not None and self._stack:
            if self.next_op_seq(self._stack[0].meta):
                return True
        self._stack = []
        if self._goal_covers.advance() is None:
            return False
        self._complete()
        return True

    def _read(self) -> tuple[str, ...]:
        ordered = sorted(self._stack, key=lambda d: self._rank[d.meta])
        return tuple(self._net[d.meta].members[d.instance].id for d in ordered)

    def _order(self, ops: list[str]) -> tuple[str, ...] | None:
        """Invocation order for ``ops``: lowest rank first among the invocable ones."""
        available = set(self._known)
        pending = list(ops)
        order = []
        while pending:
            ready = next((o for o in pending if self._ops[o].inputs <= available), None)
            if ready is None:
                return None
            pending.remove(ready)
            order.append(ready)
            available |= self._ops[ready].outputs
        return tuple(order)

    def _prune(self, seq: tuple[str, ...]) -> tuple[str, ...]:
        """Drop operations the rest of the composition does without, highest rank first."""
        kept = list(seq)
        for op_id in reversed(seq):
            rest = [o for o in kept if o != op_id]
            ordered = self._order(rest)
            if ordered is not None and _executable(ordered, self._ops, self._known, self._goal):
                kept = rest
        return self._order(kept)

    def next_composition(self) -> tuple[str, ...] | None:
        """Next composition, or None once exhausted."""
        while not self.exhausted:
            if not self._advance():
                self.exhausted = True
                break
            seq = self._prune(self._read())
            if seq in self._seen:
                continue
            if not _executable(seq, self._ops, self._known, self._goal):
                raise AssertionError(f"non-executable composition {seq}")
            self._seen.add(seq)
            self._emitted.append(seq)
            return seq
        return None

    def __iter__(self) -> Iterator[tuple[str, ...]]:
        while (seq := self.next_composition()) is not None:
            yield seq

    @property
    def emitted(self) -> tuple[tuple[str, ...], ...]:
        return tuple(self._emitted)

    # persistence

    def to_state(self) -> dict:
        return {
            "version": STATE_VERSION,
            "request": self.composition.request.to_dict(),
            "nodes": {m.id: list(m.member_ids) for m in self._net.nodes},
            "goal_cover": self._goal_covers.position,
            "decisions": [[d.meta, d.instance, d.cover] for d in self._stack],
            "emitted": [list(s) for s in self._emitted],
            "exhausted": self.exhausted,
        }

    @classmethod
    def from_state(cls, refined: MetaComposition, state: dict) -> InstantiationCursor:
        """Rebuild a cursor by replaying the saved selector positions."""
        cursor = cls(refined)
        if state.get("version") != STATE_VERSION:
            raise CursorStateError(f"unsupported cursor state version {state.get('version')!r}")
        if state.get("request") != refined.request.to_dict():
            raise CursorStateError("cursor was saved for a different request")
        shape = {m.id: list(m.member_ids) for m in cursor._net.nodes}
        if state.get("nodes") != shape:
            raise CursorStateError("cursor was saved for a different meta-composition")
        pos = state.get("goal_cover")
        if pos is not None and not (isinstance(pos, int) and 0 <= pos < len(cursor._goal_covers)):
            raise CursorStateError(f"goal cover position {pos!r} out of range")
        cursor._goal_covers.position = pos
        decisions = state.get("decisions", [])
        if pos is None and decisions:
            raise CursorStateError("decisions saved without a goal cover")
        demand = cursor._demand()
        for meta, inst, cover in decisions:
            expected = cursor._pending(demand)
            if meta != expected:
                raise CursorStateError(f"expected a decision for {expected!r}, found {meta!r}")
            if not (isinstance(inst, int) and 0 <= inst < len(cursor._net[meta].members)):
                raise CursorStateError(f"instance position {inst!r} of {meta} out of range")
            covers = cursor._covers(meta, inst, demand)
            if not (isinstance(cover, int) and 0 <= cover < len(covers)):
                raise CursorStateError(f"input cover position {cover!r} of {meta} out of range")
            cursor._stack.append(_Decision(meta, inst, cover, covers))
            demand.update(covers[cover])
        if pos is not None and cursor._pending(demand) is not None:
            raise CursorStateError("saved decisions leave demanded meta-operations unset")
        for seq in state.get("emitted", []):
            seq = tuple(seq)
            if seq not in cursor._seen:
                cursor._seen.add(seq)
                cursor._emitted.append(seq)
        cursor.exhausted = bool(state.get("exhausted", False))
        return cursor


def new_cursor(refined: MetaComposition) -> InstantiationCursor:
    return InstantiationCursor(refined)


def next_composition(cursor: InstantiationCursor) -> tuple[str, ...] | None:
    return cursor.next_composition()
