"""Command line front end.

Every command takes either a registry file or a snapshot written by
``build``. Exit statuses: 0 success, 2 input error, 3 infeasible,
4 nothing left to enumerate on resume.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
from dataclasses import dataclass

from .compose import find_meta_composition, refine_meta_composition
from .export import meta_to_dot, similarity_to_dot
from .instantiate import CursorStateError, InstantiationCursor
from .metalayer import MetaNetwork, build_interaction_network, build_meta_operations
from .oracle import DEFAULT_MAX_STATES, OracleLimitError, enumerate_valid_compositions
from .registry import Registry, RegistryError, RequestError
from .similarity import (Community, SimilarityKind, SimilarityNetwork, WrongKindError, build_similarity_network,
                         common_inputs, communities, maximal_cliques)
from .validation import check_request

SNAPSHOT_FORMAT = "metacompose-snapshot"
SNAPSHOT_VERSION = 1

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_EXHAUSTED = 0, 2, 3, 4


class SnapshotError(ValueError):
    pass


class InputError(Exception):
    """Anything the user can fix by changing arguments or files."""


@dataclass
class Workspace:
    registry: Registry
    similarity: SimilarityNetwork
    communities: list[Community]
    interaction: MetaNetwork

    @classmethod
    def build(cls, registry: Registry, kind: SimilarityKind = SimilarityKind.FULL) -> Workspace:
        full = build_similarity_network(registry)
        comms = communities(full)
        interaction = build_interaction_network(build_meta_operations(registry, comms))
        sim = full if kind is SimilarityKind.FULL else build_similarity_network(registry, kind)
        return cls(registry, sim, comms, interaction)

    def similarity_of(self, kind: SimilarityKind) -> SimilarityNetwork:
        if kind is self.similarity.kind:
            return self.similarity
        return build_similarity_network(self.registry, kind)

    def to_snapshot(self, timestamp: str | None = None) -> dict:
        data = {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "registry_digest": self.registry.digest(),
            "registry": self.registry.to_dict(),
            "similarity": self.similarity.to_dict(),
            "communities": [{"id": c.id, "members": list(c.members)} for c in self.communities],
            "interaction": self.interaction.to_dict(),
        }
        if timestamp is not None:
            data["created"] = timestamp
        return data

    @classmethod
    def from_snapshot(cls, data: dict) -> Workspace:
        if data.get("version") != SNAPSHOT_VERSION:
            raise SnapshotError(f"unsupported snapshot version {data.get('version')!r}")
        try:
            registry = Registry.from_dict(data["registry"])
            if registry.digest() != data["registry_digest"]:
                raise SnapshotError("snapshot registry digest mismatch; rebuild the snapshot")
            return cls(
                registry,
                SimilarityNetwork.from_dict(data["similarity"]),
                [Community(c["id"], tuple(c["members"])) for c in data["communities"]],
                MetaNetwork.from_dict(data["interaction"], registry),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SnapshotError):
                raise
            raise SnapshotError(f"malformed snapshot: {exc!r}") from exc


def _read_json(path: str):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: cannot parse JSON: {exc}") from exc


def load_workspace(path: str, kind: SimilarityKind = SimilarityKind.FULL) -> Workspace:
    """Open a snapshot, or build a workspace on the fly from a registry file."""
    data = _read_json(path)
    if isinstance(data, dict) and data.get("format") == SNAPSHOT_FORMAT:
        return Workspace.from_snapshot(data)
    return Workspace.build(Registry.from_dict(data), kind)


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _emit(args, text_lines: list[str], payload: dict) -> None:
    if args.json:
        if args.timestamp:
            payload = {**payload, "timestamp": _now()}
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _request(args, ws: Workspace):
    request, warnings = check_request(args.known, args.goal, ws.registry)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return request


# commands

def cmd_build(args) -> int:
    data = _read_json(args.registry)
    ws = Workspace.build(Registry.from_dict(data), SimilarityKind(args.kind))
    snapshot = ws.to_snapshot(_now() if args.timestamp else None)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(snapshot, fh, indent=2, sort_keys=True)
            fh.write("\n")
    counts = {
        "operations": len(ws.registry),
        "communities": len(ws.communities),
        "meta-edges": len(ws.interaction.edges),
    }
    _emit(args, [" ".join(f"{k}={v}" for k, v in counts.items())], counts)
    return EXIT_OK


def cmd_communities(args) -> int:
    ws = load_workspace(args.source)
    owner = {o: m.id for m in ws.interaction.nodes for o in m.member_ids}
    lines, rows = [], []
    for c in ws.communities:
        meta = owner[c.members[0]]
        lines.append(f"{c.id} ({meta}): {' '.join(c.members)}")
        rows.append({"id": c.id, "meta": meta, "members": list(c.members)})
    _emit(args, lines, {"communities": rows})
    return EXIT_OK


def cmd_cliques(args) -> int:
    kind = SimilarityKind(args.kind)
    ws = load_workspace(args.source, kind)
    lines, rows = [], []
    for clique in maximal_cliques(ws.similarity_of(kind)):
        members = sorted(clique)
        shared = sorted(common_inputs(ws.registry, members))
        line = "{" + ",".join(members) + "}"
        if shared:
            line += "  shared inputs: " + ",".join(shared)
        lines.append(line)
        rows.append({"members": members, "shared_inputs": shared})
    _emit(args, lines, {"kind": kind.value, "cliques": rows})
    return EXIT_OK


def cmd_export_dot(args) -> int:
    kind = SimilarityKind(args.kind)
    ws = load_workspace(args.source, kind)
    if args.layer == "similarity":
        text = similarity_to_dot(ws.similarity_of(kind), ws.registry)
    elif args.layer == "meta":
        text = meta_to_dot(ws.interaction)
    else:
        if not args.goal:
            raise InputError("--layer composition needs --goal")
        request = _request(args, ws)
        found = find_meta_composition(request, ws.interaction)
        refined = refine_meta_composition(found) if found is not None else None
        if refined is None:
            print("infeasible", file=sys.stderr)
            return EXIT_INFEASIBLE
        text = meta_to_dot(refined, annotate=args.annotate)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_compose(args) -> int:
    if args.max < 1:
        raise InputError("--max must be at least 1")
    ws = load_workspace(args.source)
    request = _request(args, ws)
    found = find_meta_composition(request, ws.interaction)
    refined = refine_meta_composition(found) if found is not None else None
    if refined is None:
        _emit(args, ["infeasible"], {"feasible": False, "compositions": [], "exhausted": True})
        return EXIT_INFEASIBLE

    resumed = bool(args.cursor) and os.path.exists(args.cursor)
    if resumed:
        cursor = InstantiationCursor.from_state(refined, _read_json(args.cursor))
    else:
        cursor = InstantiationCursor(refined)

    produced = []
    while len(produced) < args.max:
        seq = cursor.next_composition()
        if seq is None:
            break
        produced.append(seq)
    exhausted = cursor.exhausted

    if args.cursor:
        with open(args.cursor, "w", encoding="utf-8") as fh:
            json.dump(cursor.to_state(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    lines = [" ".join(seq) for seq in produced]
    if exhausted:
        lines.append("exhausted")
    _emit(args, lines, {"feasible": True, "compositions": [list(s) for s in produced], "exhausted": exhausted})
    if resumed and not produced:
        return EXIT_EXHAUSTED
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    ws = load_workspace(args.source)
    request = _request(args, ws)
    max_len = args.max_len if args.max_len is not None else max(len(ws.registry), 1)
    result = enumerate_valid_compositions(ws.registry, request, max_len, args.max_states)
    n = len(result.witnesses)
    if result.feasible:
        lines = [f"feasible, {n} witness set{'s' if n != 1 else ''}", "first witness: " + " ".join(result.witnesses[0])]
    else:
        lines = ["infeasible"]
    _emit(args, lines, {"feasible": result.feasible, "witnesses": [list(w) for w in result.witnesses],
                        "explored": result.explored})
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--timestamp", action="store_true", help="stamp snapshots and JSON output with the current time")

    request = argparse.ArgumentParser(add_help=False)
    request.add_argument("--known", default="", help="comma-separated known parameters")
    request.add_argument("--goal", default="", help="comma-separated goal parameters")

    kinds = [k.value for k in SimilarityKind]
    p = argparse.ArgumentParser(prog="metacompose", description="Community-based service composition.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("build", parents=[common], help="build a snapshot from a registry")
    s.add_argument("registry")
    s.add_argument("-o", "--out", help="snapshot path")
    s.add_argument("--kind", choices=kinds, default="full", help="similarity relation stored in the snapshot")
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("communities", parents=[common], help="list communities")
    s.add_argument("source", help="snapshot or registry")
    s.set_defaults(func=cmd_communities)

    s = sub.add_parser("cliques", parents=[common], help="list maximal cliques, largest first")
    s.add_argument("source", help="snapshot or registry")
    s.add_argument("--kind", choices=["full", "relation"], default="full")
    s.set_defaults(func=cmd_cliques)

    s = sub.add_parser("export-dot", parents=[common, request], help="write a network as Graphviz DOT")
    s.add_argument("source", help="snapshot or registry")
    s.add_argument("--layer", choices=["similarity", "meta", "composition"], default="meta")
    s.add_argument("--kind", choices=kinds, default="full")
    s.add_argument("--annotate", action="store_true", help="show meta-operations removed by refinement")
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_export_dot)

    s = sub.add_parser("compose", parents=[common, request], help="enumerate compositions for a request")
    s.add_argument("source", help="snapshot or registry")
    s.add_argument("--max", type=int, default=1, help="compositions to print (default 1)")
    s.add_argument("--cursor", help="cursor file; resumes enumeration when it exists")
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("oracle-check", parents=[common, request], help="brute-force feasibility check")
    s.add_argument("source", help="snapshot or registry")
    s.add_argument("--max-len", type=int, default=None, help="longest composition considered")
    s.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    s.set_defaults(func=cmd_oracle_check)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, RegistryError, RequestError, SnapshotError, CursorStateError, WrongKindError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OracleLimitError as exc:
        print(f"error: {exc}; raise --max-states or lower --max-len", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
