"""Canonical JSON and canonical forms under relabeling.

A canonical form is the smallest RFC 8785 serialization over all vertex
orderings compatible with a colour refinement of the components. Colours are
computed from isomorphism-invariant data only, so isomorphic inputs explore
the same set of serializations and end on the same minimum.
"""
import logging
from enum import Enum
from itertools import chain, permutations, product
from math import factorial, prod
from typing import Any, Iterator, Optional

import rfc8785
from pydantic import BaseModel

from hyperstack.config import DEFAULT_SETTINGS, Settings
from hyperstack.exceptions import ScaleLimitError
from hyperstack.models import CoverData, CurveGraph, DecoratedInvolution

logger = logging.getLogger("Canonical")

# JSON-primitive types that rfc8785 can serialize directly.
_PASSTHROUGH_TYPES = (bool, int, str, type(None))


def to_jsonable(value: Any) -> Any:
    """Recursively convert models, enums, tuples and sets into JSON primitives."""
    if isinstance(value, Enum):
        return to_jsonable(value.value)
    if isinstance(value, _PASSTHROUGH_TYPES):
        return value
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump(mode="json"))
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted(to_jsonable(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    raise TypeError(f"Cannot serialize {type(value).__name__} to canonical JSON")


def to_canonical_json(value: Any) -> str:
    return rfc8785.dumps(to_jsonable(value)).decode("utf-8")


Edge = tuple[str, str, Any]


def refine_colors(nodes: list[str], labels: dict[str, Any], edges: list[Edge]) -> dict[str, int]:
    """Colour refinement until the partition is equitable.

    ``edges`` are (u, v, label); u == v is a loop.
    """
    def rank(signatures: dict[str, str]) -> dict[str, int]:
        order = sorted(set(signatures.values()))
        return {n: order.index(signatures[n]) for n in nodes}

    colors = rank({n: to_canonical_json(labels[n]) for n in nodes})
    while True:
        entries: dict[str, list] = {n: [] for n in nodes}
        for u, v, label in edges:
            tag = to_canonical_json(label)
            if u == v:
                entries[u].append([-1, tag])
            else:
                entries[u].append([colors[v], tag])
                entries[v].append([colors[u], tag])
        refined = rank({n: to_canonical_json([colors[n], sorted(entries[n])]) for n in nodes})
        if len(set(refined.values())) == len(set(colors.values())):
            return refined
        colors = refined


def compatible_orderings(colors: dict[str, int], limit: int) -> Iterator[list[str]]:
    """All orderings listing the colour classes in order, each class permuted freely."""
    cells = [sorted(n for n in colors if colors[n] == c) for c in sorted(set(colors.values()))]
    count = prod(factorial(len(cell)) for cell in cells)
    if count > limit:
        raise ScaleLimitError(f"{count} orderings exceed the canonical candidate limit {limit}")
    for parts in product(*(permutations(cell) for cell in cells)):
        yield list(chain.from_iterable(parts))


def _graph_labels(graph: CurveGraph) -> tuple[dict[str, list], list[Edge]]:
    labels = {
        v.id: [
            v.geom_genus,
            sum(1 for m in graph.markings if m.vertex == v.id),
            sorted(p.r for p in graph.points if len(p.branches) == 1 and p.vertices[0] == v.id),
        ]
        for v in graph.vertices
    }
    edges = [(p.vertices[0], p.vertices[1], p.r) for p in graph.points if len(p.branches) == 2]
    return labels, edges


def _graph_document(graph: CurveGraph, index: dict[str, int]) -> tuple[dict, dict[str, str]]:
    """Relabelled graph document plus the new id of every old point id."""
    vertices = sorted(graph.vertices, key=lambda v: index[v.id])
    descriptors = sorted(
        ((p.r, sorted(index[w] for w in p.vertices)), p.id) for p in graph.points
    )
    point_ids = {old: f"p{j}" for j, (_, old) in enumerate(descriptors)}
    markings = sorted(index[m.vertex] for m in graph.markings)
    document = {
        "vertices": [{"id": f"v{index[v.id]}", "geom_genus": v.geom_genus} for v in vertices],
        "points": [
            {"id": f"p{j}", "r": r, "branches": [{"vertex": f"v{i}"} for i in idx]}
            for j, ((r, idx), _) in enumerate(descriptors)
        ],
        "markings": [{"id": f"m{k}", "vertex": f"v{i}"} for k, i in enumerate(markings)],
    }
    return document, point_ids


def canonical_graph(graph: CurveGraph, settings: Settings = DEFAULT_SETTINGS) -> str:
    labels, edges = _graph_labels(graph)
    colors = refine_colors(graph.vertex_ids, labels, edges)
    best: Optional[str] = None
    for order in compatible_orderings(colors, settings.canonical_candidate_limit):
        index = {v: i for i, v in enumerate(order)}
        candidate = to_canonical_json(_graph_document(graph, index)[0])
        if best is None or candidate < best:
            best = candidate
    return best


def _involution_document(graph: CurveGraph, inv: DecoratedInvolution, index: dict[str, int]) -> dict:
    def descriptor(point_id: str) -> list:
        point = graph.point(point_id)
        return [point.r, sorted(index[w] for w in point.vertices)]

    orbits = []
    for point in graph.points:
        partner = inv.point_image(point.id)
        if partner == point.id:
            tag = inv.fixed_points.get(point.id)
            key = ["fixed", descriptor(point.id), tag.value if tag else None]
            orbits.append((to_canonical_json(key), [point.id]))
        elif point.id < partner:
            members = sorted([point.id, partner], key=lambda p: to_canonical_json(descriptor(p)))
            key = ["pair", [descriptor(p) for p in members]]
            orbits.append((to_canonical_json(key), members))
    orbits.sort(key=lambda item: item[0])
    point_ids = {}
    for _, members in orbits:
        for old in members:
            point_ids[old] = f"p{len(point_ids)}"

    vertex_id = {v: f"v{i}" for v, i in index.items()}
    ordered_points = sorted(graph.points, key=lambda p: int(point_ids[p.id][1:]))
    return {
        "graph": {
            "vertices": [
                {"id": vertex_id[v.id], "geom_genus": v.geom_genus}
                for v in sorted(graph.vertices, key=lambda v: index[v.id])
            ],
            "points": [
                {"id": point_ids[p.id], "r": p.r,
                 "branches": [{"vertex": f"v{i}"} for i in sorted(index[w] for w in p.vertices)]}
                for p in ordered_points
            ],
            "markings": [
                {"id": f"m{k}", "vertex": f"v{i}"}
                for k, i in enumerate(sorted(index[m.vertex] for m in graph.markings))
            ],
        },
        "involution": {
            "vertex_map": {vertex_id[v]: vertex_id[inv.vertex_image(v)] for v in graph.vertex_ids},
            "point_map": {point_ids[p.id]: point_ids[inv.point_image(p.id)] for p in graph.points},
            "fixed_vertices": {
                vertex_id[v]: data for v, data in inv.fixed_vertices.items() if v in vertex_id
            },
            "fixed_points": {point_ids[p]: tag for p, tag in inv.fixed_points.items() if p in point_ids},
        },
    }


def canonical_graph_with_involution(
    graph: CurveGraph, inv: DecoratedInvolution, settings: Settings = DEFAULT_SETTINGS
) -> str:
    labels, edges = _graph_labels(graph)
    for v in graph.vertex_ids:
        data = inv.fixed_vertices.get(v) if inv.vertex_image(v) == v else None
        labels[v].append(data if data is not None else "moved")
    colors = refine_colors(graph.vertex_ids, labels, edges)
    best: Optional[str] = None
    for order in compatible_orderings(colors, settings.canonical_candidate_limit):
        index = {v: i for i, v in enumerate(order)}
        candidate = to_canonical_json(_involution_document(graph, inv, index))
        if best is None or candidate < best:
            best = candidate
    return best


def _cover_document(data: CoverData, index: dict[str, int]) -> dict:
    descriptors = []
    for node in data.nodes:
        a, b = node.ends
        oa, ob = data.orders_of(node.id)
        if index[a] > index[b]:
            a, b, oa, ob = b, a, ob, oa
        descriptors.append((index[a], index[b], node.stacky, oa, ob))
    descriptors.sort()
    name = {c: f"Z{i}" for c, i in index.items()}
    ordered = sorted(data.components, key=lambda c: index[c])
    return {
        "components": [name[c] for c in ordered],
        "nodes": [
            {"id": f"n{j}", "ends": [f"Z{a}", f"Z{b}"], "stacky": stacky}
            for j, (a, b, stacky, _, _) in enumerate(descriptors)
        ],
        "deg2L": {name[c]: data.deg2L[c] for c in ordered},
        "smooth_orders": {name[c]: sorted(data.smooth_of(c)) for c in ordered if data.smooth_of(c)},
        "node_orders": {f"n{j}": [oa, ob] for j, (_, _, _, oa, ob) in enumerate(descriptors)},
    }


def canonical_cover(data: CoverData, settings: Settings = DEFAULT_SETTINGS) -> str:
    labels = {c: [data.deg2L[c], sorted(data.smooth_of(c))] for c in data.components}
    edges = [
        (n.ends[0], n.ends[1], [n.stacky, sorted(data.orders_of(n.id))]) for n in data.nodes
    ]
    colors = refine_colors(list(data.components), labels, edges)
    best: Optional[str] = None
    for order in compatible_orderings(colors, settings.canonical_candidate_limit):
        index = {c: i for i, c in enumerate(order)}
        candidate = to_canonical_json(_cover_document(data, index))
        if best is None or candidate < best:
            best = candidate
    return best
