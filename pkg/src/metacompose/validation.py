from __future__ import annotations

import os
from typing import Iterable, Mapping

from .registry import OperationDescriptor, Registry, Request, load_registry, validate_request


def check_registry(X) -> Registry:
    """Coerce ``X`` into a Registry.

    Accepts a Registry, a path to a registry file, a registry dict, or an
    iterable of OperationDescriptor / operation dicts.
    """
    if isinstance(X, Registry):
        return X
    if isinstance(X, (str, os.PathLike)):
        with open(X, "rb") as fh:
            return load_registry(fh)
    if isinstance(X, Mapping):
        return Registry.from_dict(X)
    ops = []
    for item in X:
        ops.append(item if isinstance(item, OperationDescriptor) else OperationDescriptor.from_dict(item))
    return Registry(tuple(ops))


def parse_params(text: str | Iterable[str] | None) -> frozenset[str]:
    """Comma-separated parameter list (order and whitespace insensitive)."""
    if text is None:
        return frozenset()
    if isinstance(text, str):
        return frozenset(p.strip() for p in text.split(",") if p.strip())
    return frozenset(text)


def check_request(known, goal=None, registry: Registry | None = None) -> tuple[Request, list[str]]:
    """Build a Request from a Request or from two parameter lists, with vocabulary warnings."""
    if isinstance(known, Request):
        request = known
    else:
        request = Request(parse_params(known), parse_params(goal))
    warnings = validate_request(registry if registry is not None else Registry(), request)
    return request, warnings if registry is not None else []
