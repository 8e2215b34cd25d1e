"""Canonical block documents, report documents and DOT export.

Documents are single-line JSON with a fixed key order, sorted edge lists and
no floating point, so equal blocks serialize to equal bytes.
"""

from __future__ import annotations

import json
import math
from typing import Any

from blockforge.construct import Block, BlockParams, BlockParamsError
from blockforge.graph import Graph, GraphInputError, VertexRole

FORMAT_VERSION = 1

BLOCK_KEYS = (
    "format_version",
    "ell",
    "m",
    "variant",
    "tree_depth",
    "vertex_count",
    "roles",
    "edges",
    "root",
    "S",
    "T",
)


class DocumentError(ValueError):
    """Raised when a document fails validation."""


def dumps(doc: dict) -> str:
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=True, allow_nan=False) + "\n"


def serialize(block: Block) -> str:
    p = block.params
    g = block.graph
    doc = {
        "format_version": FORMAT_VERSION,
        "ell": p.ell,
        "m": p.m,
        "variant": p.variant,
        "tree_depth": p.tree_depth,
        "vertex_count": g.vertex_count,
        "roles": [r.to_list() for r in g.roles],
        "edges": [list(e) for e in g.edges()],
        "root": block.root,
        "S": list(block.S),
        "T": list(block.T),
    }
    return dumps(doc)


def _int(doc: dict, key: str) -> int:
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise DocumentError(f"field {key!r} must be an integer")
    return v


def _int_list(doc: dict, key: str) -> list[int]:
    v = doc.get(key)
    if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        raise DocumentError(f"field {key!r} must be a list of integers")
    return v


def parse(text: str) -> Block:
    """Inverse of :func:`serialize`; rejects anything that is not a valid block."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not a JSON document: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError("block document must be a JSON object")
    missing = [k for k in BLOCK_KEYS if k not in doc]
    if missing:
        raise DocumentError(f"missing fields: {', '.join(missing)}")
    extra = sorted(set(doc) - set(BLOCK_KEYS))
    if extra:
        raise DocumentError(f"unknown fields: {', '.join(extra)}")
    if _int(doc, "format_version") != FORMAT_VERSION:
        raise DocumentError(f"unsupported format_version {doc['format_version']}")
    n = _int(doc, "vertex_count")
    roles_raw = doc["roles"]
    if not isinstance(roles_raw, list) or len(roles_raw) != n:
        raise DocumentError("roles must list one role per vertex")
    edges_raw = doc["edges"]
    if not isinstance(edges_raw, list):
        raise DocumentError("edges must be a list")
    edges = []
    prev = None
    for e in edges_raw:
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise DocumentError(f"bad edge entry {e!r}")
        u, v = e
        if not (0 <= u < n and 0 <= v < n):
            raise DocumentError(f"dangling edge {e!r}")
        if u >= v:
            raise DocumentError(f"asymmetric or non-canonical edge {e!r}")
        if prev is not None and (u, v) <= prev:
            raise DocumentError(f"edges not strictly sorted at {e!r}")
        prev = (u, v)
        edges.append((u, v))
    try:
        roles = [VertexRole.from_list(r) for r in roles_raw]
        params = BlockParams(_int(doc, "ell"), _int(doc, "m"), doc["variant"], _int(doc, "tree_depth"))
        graph = Graph.from_edges(n, edges, roles)
        return Block(graph, _int(doc, "root"), tuple(_int_list(doc, "S")), tuple(_int_list(doc, "T")), params)
    except (GraphInputError, BlockParamsError) as exc:
        raise DocumentError(str(exc)) from exc


def encode_distance(d: float) -> Any:
    """Distances go into documents as integers, or the string ``"inf"``."""
    if d == math.inf:
        return "inf"
    return int(d)


def decode_distance(raw: Any) -> float:
    if raw == "inf":
        return math.inf
    if isinstance(raw, int) and not isinstance(raw, bool):
        return raw
    raise DocumentError(f"bad distance value {raw!r}")


_ROLE_STYLE = {
    "root": 'shape=doublecircle, style=filled, fillcolor="#e74c3c"',
    "tree_node": 'shape=circle, style=filled, fillcolor="#3498db"',
    "anchor": 'shape=box, style=filled, fillcolor="#2ecc71"',
    "port": 'shape=box, style=filled, fillcolor="#9b59b6"',
    "spine_internal": 'shape=point, color="#7f8c8d"',
    "base_internal": 'shape=point, color="#34495e"',
    "fan_tree_internal": 'shape=point, color="#95a5a6"',
    "pendant_leaf": 'shape=circle, style=filled, fillcolor="#f1c40f"',
    "plain": "shape=circle",
}


def export_dot(block: Block, name: str = "block") -> str:
    """DOT text; shapes and colours follow vertex roles, S/T/root are labelled."""
    g = block.graph
    S, T = set(block.S), set(block.T)
    lines = [f"graph {name} {{", "  node [fontsize=10, width=0.15, height=0.15];", "  edge [color=\"#555555\"];"]
    for v, role in enumerate(g.roles):
        label = "r" if v == block.root else ("S" if v in S else ("T" if v in T else ""))
        style = _ROLE_STYLE[role.tag]
        extra = ""
        if label:
            extra = f', xlabel="{label}"'
            if v in S or v in T:
                extra += ", penwidth=2"
        lines.append(f'  {v} [{style}, label="", tooltip="{role}"{extra}];')
    ranks: dict[str, list[int]] = {}
    for v, role in enumerate(g.roles):
        if role.tag in ("anchor", "port"):
            ranks.setdefault("anchors", []).append(v)
        elif role.tag == "tree_node":
            ranks.setdefault(f"tree{role.params[0]}", []).append(v)
    for key in sorted(ranks):
        members = "; ".join(str(v) for v in ranks[key])
        lines.append(f"  {{ rank=same; {members}; }}")
    for u, v in g.edges():
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
