"""Operation registry: loading, validation and request checks.

A registry file is a JSON object::

    {"operations": [{"id": "o1", "service": "s1",
                     "inputs": ["a"], "outputs": ["e"]}, ...]}

Parameter lists are sets; repeating a parameter inside one list is rejected.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Mapping


class RegistryError(ValueError):
    """Malformed or invalid registry content."""


class RequestError(ValueError):
    """A composition request that cannot be attempted at all."""


@dataclass(frozen=True)
class OperationDescriptor:
    id: str
    service: str
    inputs: frozenset[str]
    outputs: frozenset[str]

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise RegistryError(f"operation id must be a non-empty string, got {self.id!r}")
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        if not self.inputs:
            raise RegistryError(f"operation {self.id!r} has no inputs")
        if not self.outputs:
            raise RegistryError(f"operation {self.id!r} has no outputs")
        for p in self.inputs | self.outputs:
            if not isinstance(p, str) or not p:
                raise RegistryError(f"operation {self.id!r} has an invalid parameter {p!r}")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "service": self.service,
            "inputs": sorted(self.inputs),
            "outputs": sorted(self.outputs),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> OperationDescriptor:
        if not isinstance(data, Mapping):
            raise RegistryError(f"operation entry must be an object, got {type(data).__name__}")
        missing = [k for k in ("id", "service", "inputs", "outputs") if k not in data]
        if missing:
            raise RegistryError(f"operation {data.get('id', '?')!r} is missing {', '.join(missing)}")
        op_id = data["id"]
        for key in ("inputs", "outputs"):
            values = data[key]
            if not isinstance(values, list):
                raise RegistryError(f"operation {op_id!r}: {key} must be a list")
            if len(set(values)) != len(values):
                raise RegistryError(f"operation {op_id!r}: duplicate entry in {key}")
        if not isinstance(data["service"], str):
            raise RegistryError(f"operation {op_id!r}: service must be a string")
        return cls(op_id, data["service"], frozenset(data["inputs"]), frozenset(data["outputs"]))


def op(op_id: str, inputs: Iterable[str], outputs: Iterable[str], service: str | None = None) -> OperationDescriptor:
    """Shorthand constructor, mostly for fixtures and tests."""
    return OperationDescriptor(op_id, service if service is not None else op_id, frozenset(inputs), frozenset(outputs))


@dataclass(frozen=True)
class Registry:
    """Immutable, id-ordered collection of operations."""

    operations: tuple[OperationDescriptor, ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        ops = tuple(sorted(self.operations, key=lambda o: o.id))
        index = {}
        for o in ops:
            if o.id in index:
                raise RegistryError(f"duplicate operation id {o.id!r}")
            index[o.id] = o
        object.__setattr__(self, "operations", ops)
        object.__setattr__(self, "_index", index)

    def __iter__(self) -> Iterator[OperationDescriptor]:
        return iter(self.operations)

    def __len__(self) -> int:
        return len(self.operations)

    def __contains__(self, op_id: str) -> bool:
        return op_id in self._index

    def __getitem__(self, op_id: str) -> OperationDescriptor:
        try:
            return self._index[op_id]
        except KeyError:
            raise KeyError(f"unknown operation {op_id!r}") from None

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(o.id for o in self.operations)

    @property
    def vocabulary(self) -> frozenset[str]:
        params: set[str] = set()
        for o in self.operations:
            params |= o.inputs | o.outputs
        return frozenset(params)

    def to_dict(self) -> dict:
        return {"operations": [o.to_dict() for o in self.operations]}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, data: Mapping) -> Registry:
        if not isinstance(data, Mapping) or "operations" not in data:
            raise RegistryError('registry must be an object with an "operations" list')
        entries = data["operations"]
        if not isinstance(entries, list):
            raise RegistryError('"operations" must be a list')
        return cls(tuple(OperationDescriptor.from_dict(e) for e in entries))


def load_registry(source: IO | bytes | str) -> Registry:
    """Parse and validate a registry from a byte stream, bytes or text."""
    raw = source.read() if hasattr(source, "read") else source
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise RegistryError(f"registry is not valid UTF-8: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise RegistryError(f"cannot parse registry JSON: {exc}") from exc
    return Registry.from_dict(data)


@dataclass(frozen=True)
class Request:
    """A composition request: known parameters and goal parameters."""

    known: frozenset[str]
    goal: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "known", frozenset(self.known))
        object.__setattr__(self, "goal", frozenset(self.goal))

    def to_dict(self) -> dict:
        return {"known": sorted(self.known), "goal": sorted(self.goal)}

    @classmethod
    def from_dict(cls, data: Mapping) -> Request:
        return cls(frozenset(data["known"]), frozenset(data["goal"]))


def validate_request(registry: Registry, request: Request) -> list[str]:
    """Return warnings about parameters the registry never mentions.

    Raises RequestError if the goal is empty.
    """
    if not request.goal:
        raise RequestError("goal must not be empty")
    vocab = registry.vocabulary
    warnings = [f"unknown goal parameter {p}" for p in sorted(request.goal - vocab)]
    warnings += [f"unknown known parameter {p}" for p in sorted(request.known - vocab)]
    return warnings
