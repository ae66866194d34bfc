"""Exhaustive strata enumeration in both presentations.

The graph side lists stable dual graphs carrying a hyperelliptic involution;
the cover side lists valid cyclic-cover data on twisted trees. With both
sides requested the two lists are matched through the cover functors and
any failure to be one-to-one is an error.
"""
import logging
from itertools import product
from typing import Iterator

import networkx as nx
import pandas as pd

from hyperstack.canonical import canonical_cover, canonical_graph
from hyperstack.config import DEFAULT_SETTINGS, Settings
from hyperstack.cover import build_cover, extract_cover_data, validate_cover_data
from hyperstack.exceptions import BijectionError, ScaleLimitError
from hyperstack.involution import find_hyperelliptic_involutions
from hyperstack.models import (
    Branch,
    CoverData,
    CurveGraph,
    DecoratedInvolution,
    EnumerationQuery,
    EnumerationReport,
    EnumerationSide,
    SingularPoint,
    TwistedNode,
    Vertex,
)

logger = logging.getLogger("Enumerator")

STACKY = "stacky"
EDGE_TYPES = (STACKY, (0, 0), (1, 1))

# A point kind is (r, i, j) for a two-branch point on vertices i <= j,
# or (r, i) for a unibranch point on vertex i.
PointKind = tuple


def _delta(r: int) -> int:
    return (r + 1) // 2


def _nonincreasing(length: int, total: int, largest: int) -> Iterator[tuple[int, ...]]:
    """Nonincreasing tuples of ``length`` nonnegative entries bounded by ``largest`` with sum <= ``total``."""
    if length == 0:
        yield ()
        return
    for head in range(min(largest, total), -1, -1):
        for rest in _nonincreasing(length - 1, total - head, head):
            yield (head,) + rest


def _partitions(total: int, largest: int) -> Iterator[tuple[int, ...]]:
    if total == 0:
        yield ()
        return
    for part in range(min(total, largest), 0, -1):
        for rest in _partitions(total - part, part):
            yield (part,) + rest


def _point_kinds(size: int, r: int) -> list[PointKind]:
    kinds = []
    for s in range(1, r + 1):
        if s % 2:
            kinds += [(s, i, j) for i in range(size) for j in range(i, size)]
        else:
            kinds += [(s, i) for i in range(size)]
    return kinds


def _multisets(kinds: list[PointKind], budget: int, start: int = 0) -> Iterator[tuple[PointKind, ...]]:
    """Multisets of point kinds whose delta invariants add up to ``budget``."""
    if budget == 0:
        yield ()
        return
    for index in range(start, len(kinds)):
        cost = _delta(kinds[index][0])
        if cost <= budget:
            for rest in _multisets(kinds, budget - cost, index):
                yield (kinds[index],) + rest


def _stable_shape(genera: tuple[int, ...], points: tuple[PointKind, ...]) -> bool:
    omega = [2 * g - 2 for g in genera]
    for kind in points:
        if len(kind) == 3:
            _, i, j = kind
            omega[i] += _delta(kind[0])
            omega[j] += _delta(kind[0])
        else:
            omega[kind[1]] += kind[0]
    if any(d <= 0 for d in omega):
        return False
    shape = nx.MultiGraph()
    shape.add_nodes_from(range(len(genera)))
    shape.add_edges_from((kind[1], kind[2]) for kind in points if len(kind) == 3)
    return nx.is_connected(shape)


def _graph_from_shape(genera: tuple[int, ...], points: tuple[PointKind, ...]) -> CurveGraph:
    return CurveGraph(
        vertices=[Vertex(id=f"v{i}", geom_genus=g) for i, g in enumerate(genera)],
        points=[
            SingularPoint(id=f"p{k}", r=kind[0], branches=[Branch(vertex=f"v{i}") for i in kind[1:]])
            for k, kind in enumerate(points)
        ],
    )


class StratumEnumerator:
    """Lists every stratum of hyperelliptic A_r-stable curves of a fixed genus."""

    def __init__(self, settings: Settings = DEFAULT_SETTINGS):
        self.settings = settings

    def effective_r(self, query: EnumerationQuery) -> int:
        if query.genus > self.settings.max_genus:
            raise ScaleLimitError(f"Genus {query.genus} exceeds the limit {self.settings.max_genus}")
        r = min(query.r_max, 2 * query.genus + 1)
        if r < query.r_max:
            logger.warning(f"r_max {query.r_max} clamped to {r} for genus {query.genus}")
        if r > self.settings.max_r:
            raise ScaleLimitError(f"r_max {r} exceeds the limit {self.settings.max_r}")
        return r

    def enumerate(self, query: EnumerationQuery) -> EnumerationReport:
        r = self.effective_r(query)
        graphs: dict[str, tuple[CurveGraph, DecoratedInvolution]] = {}
        covers: dict[str, CoverData] = {}
        if query.side in (EnumerationSide.GRAPH, EnumerationSide.BOTH):
            graphs = self.graph_side(query.genus, r)
        if query.side in (EnumerationSide.COVER, EnumerationSide.BOTH):
            covers = self.cover_side(query.genus, r)
        bijection = []
        if query.side == EnumerationSide.BOTH:
            bijection = self.match(graphs, covers, r)
        logger.info(f"Genus {query.genus}, r = {r}: {len(graphs)} graphs, {len(covers)} covers")
        return EnumerationReport(
            query=query,
            effective_r=r,
            graphs=sorted(graphs),
            covers=sorted(covers),
            bijection=bijection,
            census=self.census(graphs, covers),
        )

    def graph_side(self, genus: int, r: int) -> dict[str, tuple[CurveGraph, DecoratedInvolution]]:
        found: dict[str, tuple[CurveGraph, DecoratedInvolution]] = {}
        rejected: set[str] = set()
        # Shapes by number of components, deduplicated by canonical form
        for size in range(1, 2 * genus - 1):
            kinds = _point_kinds(size, r)
            for genera in _nonincreasing(size, genus, genus):
                budget = genus - sum(genera) + size - 1
                for points in _multisets(kinds, budget):
                    if not _stable_shape(genera, points):
                        continue
                    graph = _graph_from_shape(genera, points)
                    form = canonical_graph(graph, self.settings)
                    if form in found or form in rejected:
                        continue
                    involutions = find_hyperelliptic_involutions(graph, self.settings)
                    if involutions:
                        found[form] = (graph, involutions[0])
                    else:
                        rejected.add(form)
        logger.debug(f"Graph side: {len(found)} hyperelliptic, {len(rejected)} without involution")
        return found

    def cover_side(self, genus: int, r: int) -> dict[str, CoverData]:
        found: dict[str, CoverData] = {}
        edge_types = [t for t in EDGE_TYPES if r >= 1 and (t != (1, 1) or r >= 3)]
        # Every labelled tree, filtered by the cover checks
        for size in range(1, 2 * genus - 1):
            trees = [[]] if size == 1 else [sorted(t.edges()) for t in nx.nonisomorphic_trees(size)]
            for edges in trees:
                if edges and not edge_types:
                    continue
                for labels in product(edge_types, repeat=len(edges)):
                    for data in self._covers_on_tree(size, edges, labels, genus, r):
                        if not validate_cover_data(data, genus, r).valid:
                            continue
                        found.setdefault(canonical_cover(data, self.settings), data)
        logger.debug(f"Cover side: {len(found)} cover data")
        return found

    def _covers_on_tree(
        self, size: int, edges: list[tuple[int, int]], labels: tuple, genus: int, r: int
    ) -> Iterator[CoverData]:
        stacky = [0] * size
        attached = [0] * size
        tacnodes = [0] * size
        for (a, b), label in zip(edges, labels):
            for end in (a, b):
                attached[end] += 1
                stacky[end] += label == STACKY
                tacnodes[end] += label == (1, 1)
        target = genus - sum(1 for label in labels if label != STACKY)

        # A genus -1 component has no stacky node and meets at least three others
        def admissible(c: int, g: int) -> bool:
            if g == 0:
                return 2 * attached[c] - stacky[c] >= 3
            if g == -1:
                return stacky[c] == 0 and attached[c] >= 3
            return True

        def assign(c: int, remaining: int) -> Iterator[tuple[int, ...]]:
            if c == size:
                if remaining == 0:
                    yield ()
                return
            for g in range(-1, genus + 1):
                if admissible(c, g):
                    for rest in assign(c + 1, remaining - (g - stacky[c] // 2)):
                        yield (g,) + rest

        components = [f"Z{c}" for c in range(size)]
        nodes = [
            TwistedNode(id=f"n{k}", ends=(f"Z{a}", f"Z{b}"), stacky=label == STACKY)
            for k, ((a, b), label) in enumerate(zip(edges, labels))
        ]
        node_orders = {f"n{k}": (0, 0) if label == STACKY else label for k, label in enumerate(labels)}
        for genera in assign(0, target):
            deg2L = [stacky[c] - 2 - 2 * genera[c] for c in range(size)]
            free = [-deg2L[c] - tacnodes[c] for c in range(size)]
            if min(free) < 0:
                continue
            choices = [list(_partitions(free[c], r + 1)) for c in range(size)]
            for orders in product(*choices):
                yield CoverData(
                    components=components,
                    nodes=nodes,
                    deg2L={components[c]: deg2L[c] for c in range(size)},
                    smooth_orders={components[c]: list(orders[c]) for c in range(size) if orders[c]},
                    node_orders=node_orders,
                )

    def match(
        self,
        graphs: dict[str, tuple[CurveGraph, DecoratedInvolution]],
        covers: dict[str, CoverData],
        r: int,
    ) -> list[tuple[str, str]]:
        """Pairs (cover form, graph form) after checking both round trips."""
        # Graphs to covers
        forward = {}
        for form, (graph, inv) in graphs.items():
            cover_form = canonical_cover(extract_cover_data(graph, inv), self.settings)
            if cover_form not in covers:
                raise BijectionError(f"Graph {form} extracts to a cover outside the cover side")
            if cover_form in forward:
                raise BijectionError(f"Two graphs extract to the cover {cover_form}")
            forward[cover_form] = form
        # Covers to graphs and back
        for cover_form, data in covers.items():
            built = build_cover(data, r)
            graph_form = canonical_graph(built.curve, self.settings)
            if forward.get(cover_form) != graph_form:
                raise BijectionError(f"Cover {cover_form} builds a graph that does not match")
            back = canonical_cover(extract_cover_data(built.curve, built.involution), self.settings)
            if back != cover_form:
                raise BijectionError(f"Cover {cover_form} does not survive the round trip")
        return sorted(forward.items())

    @staticmethod
    def census(graphs: dict, covers: dict) -> list[dict]:
        rows = [
            {"side": "graph", "components": len(g.vertices), "points": len(g.points)}
            for g, _ in graphs.values()
        ] + [
            {"side": "cover", "components": len(c.components), "points": len(c.nodes)}
            for c in covers.values()
        ]
        if not rows:
            return []
        frame = pd.DataFrame(rows)
        counts = frame.groupby(["side", "components", "points"]).size().reset_index(name="count")
        return [
            {"side": row["side"], "components": int(row["components"]),
             "points": int(row["points"]), "count": int(row["count"])}
            for row in counts.to_dict(orient="records")
        ]


def enumerate_strata(query: EnumerationQuery, settings: Settings = DEFAULT_SETTINGS) -> EnumerationReport:
    return StratumEnumerator(settings).enumerate(query)
