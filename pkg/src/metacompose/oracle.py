"""Brute-force composition finder over concrete operations.

Ignores communities and meta-operations entirely. Used as ground truth for
the two-phase engine.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .registry import Registry, Request

DEFAULT_MAX_STATES = 200_000


class OracleLimitError(RuntimeError):
    """Search explored more states than allowed."""


@dataclass
class OracleResult:
    feasible: bool
    witnesses: list[tuple[str, ...]] = field(default_factory=list)
    explored: int = 0

    @property
    def witness_sets(self) -> set[frozenset[str]]:
        return {frozenset(w) for w in self.witnesses}


def is_valid_composition(seq: Iterable[str], registry: Registry, request: Request) -> bool:
    seq = list(seq)
    for op_id in seq:
        if op_id not in registry:
            raise KeyError(f"unknown operation {op_id!r}")
    if len(set(seq)) != len(seq):
        return False
    available = set(request.known)
    produced: set[str] = set()
    for op_id in seq:
        o = registry[op_id]
        if not o.inputs <= available:
            return False
        available |= o.outputs
        produced |= o.outputs
    return request.goal <= produced


def closure(registry: Registry, known: Iterable[str], ops: Iterable[str] | None = None) -> tuple[frozenset[str], list[str]]:
    """Forward-chain from ``known``.

    Returns the parameters produced by fired operations (known parameters
    count only if some operation outputs them) and the firing order.
    """
    pool = [registry[i] for i in ops] if ops is not None else list(registry)
    available = set(known)
    produced: set[str] = set()
    order = []
    fired = set()
    changed = True
    while changed:
        changed = False
        for o in pool:
            if o.id not in fired and o.inputs <= available:
                fired.add(o.id)
                order.append(o.id)
                available |= o.outputs
                produced |= o.outputs
                changed = True
    return frozenset(produced), order


def is_feasible(registry: Registry, request: Request) -> bool:
    reachable, _ = closure(registry, request.known)
    return request.goal <= reachable


def _irredundant(ops: frozenset[str], registry: Registry, request: Request) -> bool:
    for drop in ops:
        rest = ops - {drop}
        reachable, order = closure(registry, request.known, sorted(rest))
        if len(order) == len(rest) and request.goal <= reachable:
            return False
    return True


def enumerate_valid_compositions(registry: Registry, request: Request, max_len: int,
                                 max_states: int = DEFAULT_MAX_STATES) -> OracleResult:
    """Irredundant valid operation sets of size <= max_len, each in an executable order.

    Breadth-first over sets of fired operations. Each step fires an operation
    whose inputs are available and which produces at least one parameter no
    earlier operation produced; a state stops growing once every goal
    parameter has been produced.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    start = frozenset()
    seen = {start}
    # state: fired set, firing order, available parameters, produced parameters
    frontier = deque([(start, (), frozenset(request.known), frozenset())])
    witnesses: dict[frozenset[str], tuple[str, ...]] = {}
    explored = 0
    while frontier:
        state, order, available, produced = frontier.popleft()
        explored += 1
        if explored > max_states:
            raise OracleLimitError(f"oracle explored more than {max_states} states")
        if request.goal <= produced:
            if state not in witnesses and _irredundant(state, registry, request):
                witnesses[state] = order
            continue
        if len(state) >= max_len:
            continue
        for o in registry:
            if o.id in state or not o.inputs <= available or o.outputs <= produced:
                continue
            nxt = state | {o.id}
            if nxt in seen:
                continue
            seen.add(nxt)
            frontier.append((nxt, order + (o.id,), available | o.outputs, produced | o.outputs))
    ordered = sorted(witnesses.values(), key=lambda w: (len(w), sorted(w)))
    return OracleResult(bool(ordered), ordered, explored)
