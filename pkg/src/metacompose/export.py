"""DOT and JSON renderings of the networks."""
from __future__ import annotations

import json

from .compose import MetaComposition
from .metalayer import MetaNetwork
from .registry import Registry
from .similarity import SimilarityNetwork, SimilarityKind, communities

PALETTE = ("lightblue", "lightpink", "palegreen", "khaki", "plum", "lightsalmon",
           "lightcyan", "wheat", "thistle", "lightgrey")


def _q(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return '"' + escaped + '"'


def _params(params) -> str:
    return ",".join(sorted(params))


def similarity_to_dot(network: SimilarityNetwork, registry: Registry) -> str:
    directed = network.directed
    lines = [f"{'digraph' if directed else 'graph'} {_q(network.kind.value + 'sim')} {{",
             "  node [shape=box, style=filled];"]
    colour = {}
    if network.kind is SimilarityKind.FULL:
        for i, c in enumerate(communities(network)):
            for member in c.members:
                colour[member] = PALETTE[i % len(PALETTE)]
    for n in network.nodes:
        o = registry[n]
        text = f"{n}\nin: {_params(o.inputs)}\nout: {_params(o.outputs)}"
        attrs = f"label={_q(text)}"
        if n in colour:
            attrs += f", fillcolor={colour[n]}"
        lines.append(f"  {_q(n)} [{attrs}];")
    arrow = "->" if directed else "--"
    for u, v in network.edges:
        lines.append(f"  {_q(u)} {arrow} {_q(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def meta_to_dot(network: MetaNetwork | MetaComposition, annotate: bool = False) -> str:
    removed = ()
    if isinstance(network, MetaComposition):
        removed = network.removed if annotate else ()
        network = network.network
    lines = ["digraph meta {", "  node [shape=box, style=rounded];"]
    for m in network.nodes:
        text = f"{m.display_name}\n{{{_params(m.member_ids)}}}"
        lines.append(f"  {_q(m.id)} [label={_q(text)}];")
    for m in removed:
        lines.append(f"  {_q(m)} [label={_q(m)}, color=gray, fontcolor=gray, style=dashed];")
    for (s, d), lab in network.edges.items():
        lines.append(f"  {_q(s)} -> {_q(d)} [label={_q(_params(lab))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(obj, **kwargs) -> str:
    data = obj.to_dict(**kwargs) if hasattr(obj, "to_dict") else obj
    return json.dumps(data, indent=2, sort_keys=True)
