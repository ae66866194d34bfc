import logging
from typing import Iterable, Optional

import networkx as nx

from hyperstack.exceptions import (
    DisconnectedGraphError,
    ImproperSubcurveError,
    InvalidCombinationError,
    UnknownVertexError,
)
from hyperstack.local_sing import genus_drop
from hyperstack.models import (
    CheckResult,
    CheckStatus,
    CurveGraph,
    SingularPoint,
    Subcurve,
    ValidationReport,
)

logger = logging.getLogger("CurveGraph")


def point_graph(graph: CurveGraph) -> nx.MultiGraph:
    """Components as nodes, two-branch points as edges keyed by point id."""
    g = nx.MultiGraph()
    g.add_nodes_from(graph.vertex_ids)
    for point in graph.points:
        if len(point.branches) == 2:
            u, v = point.vertices
            g.add_edge(u, v, key=point.id, r=point.r)
    return g


def is_connected(graph: CurveGraph) -> bool:
    return nx.is_connected(point_graph(graph))


def genus_formula(graph: CurveGraph) -> int:
    """1 - chi(O_C); meaningful for disconnected curves too (two disjoint lines give -1)."""
    total = sum(v.geom_genus for v in graph.vertices)
    total += sum(p.sing_type.delta for p in graph.points)
    return total - len(graph.vertices) + 1


def arithmetic_genus(graph: CurveGraph) -> int:
    if not is_connected(graph):
        raise DisconnectedGraphError("Arithmetic genus is only defined here for connected curves")
    return genus_formula(graph)


def branch_conductors(point: SingularPoint) -> list[tuple[str, int]]:
    """(vertex, conductor degree) for every branch incidence of the point."""
    return list(zip(point.vertices, point.sing_type.conductor_degrees))


def omega_degree(graph: CurveGraph, vertex: str, marked: bool = False) -> int:
    """Degree of the dualizing sheaf, optionally twisted by the markings, on a component."""
    v = graph.vertex(vertex)
    if v is None:
        raise UnknownVertexError(f"Unknown vertex {vertex}")
    degree = 2 * v.geom_genus - 2
    for point in graph.points:
        degree += sum(c for w, c in branch_conductors(point) if w == vertex)
    if marked:
        degree += sum(1 for m in graph.markings if m.vertex == vertex)
    return degree


class StabilityChecker:
    """Checks A_r-stability: bounded singularities and ample (marked) dualizing sheaf."""

    def __init__(self, r_max: int):
        self.r_max = r_max

    def evaluate(self, graph: CurveGraph) -> ValidationReport:
        checks = self._check_singularities(graph) + self._check_ampleness(graph)
        report = ValidationReport.from_checks(checks)
        logger.debug(f"Stability with r_max={self.r_max}: {report.valid}")
        return report

    def _check_singularities(self, graph: CurveGraph) -> list[CheckResult]:
        bad = [p for p in graph.points if p.r > self.r_max]
        if not bad:
            return [CheckResult(
                check_name="Singularities", status=CheckStatus.PASS,
                message=f"All points have type at most A_{self.r_max}.",
            )]
        return [
            CheckResult(
                check_name="Singularities", status=CheckStatus.FAIL,
                message=f"Point {p.id} is A_{p.r}, above A_{self.r_max}.",
            )
            for p in bad
        ]

    def _check_ampleness(self, graph: CurveGraph) -> list[CheckResult]:
        failures = []
        for v in graph.vertex_ids:
            degree = omega_degree(graph, v, marked=True)
            if degree <= 0:
                failures.append(CheckResult(
                    check_name="Ampleness", status=CheckStatus.FAIL,
                    message=f"Vertex {v} has omega degree {degree}.",
                ))
        if failures:
            return failures
        return [CheckResult(
            check_name="Ampleness", status=CheckStatus.PASS,
            message="Dualizing sheaf has positive degree on every component.",
        )]


def is_stable(graph: CurveGraph, r_max: int) -> ValidationReport:
    return StabilityChecker(r_max).evaluate(graph)


def separating_points(graph: CurveGraph) -> set[str]:
    """Two-branch points on distinct components whose removal disconnects the curve."""
    base = point_graph(graph)
    separating = set()
    for point in graph.points:
        if len(point.branches) != 2:
            continue
        u, v = point.vertices
        if u == v:
            continue
        g = base.copy()
        g.remove_edge(u, v, key=point.id)
        if not nx.is_connected(g):
            separating.add(point.id)
    return separating


def _check_subcurve(graph: CurveGraph, sub: Subcurve) -> set[str]:
    vertices = set(sub.vertex_subset)
    unknown = vertices - set(graph.vertex_ids)
    if unknown:
        raise UnknownVertexError(f"Unknown vertices {sorted(unknown)}")
    return vertices


def complement(graph: CurveGraph, sub: Subcurve) -> Subcurve:
    vertices = _check_subcurve(graph, sub)
    rest = [v for v in graph.vertex_ids if v not in vertices]
    if not rest:
        raise ImproperSubcurveError("The subcurve is the whole curve")
    return Subcurve(vertex_subset=rest)


def intersection_length(graph: CurveGraph, sub1: Subcurve, sub2: Subcurve) -> int:
    """Length of the scheme-theoretic intersection: A_(2h-1) across the two sides counts h."""
    first = _check_subcurve(graph, sub1)
    second = _check_subcurve(graph, sub2)
    if first & second:
        raise ImproperSubcurveError("Subcurves share a component")
    length = 0
    for point in graph.points:
        if len(point.branches) != 2:
            continue
        u, v = point.vertices
        if (u in first and v in second) or (u in second and v in first):
            length += (point.r + 1) // 2
    return length


def induced_subgraph(graph: CurveGraph, vertices: Iterable[str]) -> CurveGraph:
    """The subcurve on ``vertices`` with the points and markings lying entirely on it."""
    keep = set(vertices)
    return CurveGraph(
        vertices=[v for v in graph.vertices if v.id in keep],
        points=[p for p in graph.points if set(p.vertices) <= keep],
        markings=[m for m in graph.markings if m.vertex in keep],
    )


def subcurve_genus(graph: CurveGraph, sub: Subcurve) -> int:
    return genus_formula(induced_subgraph(graph, _check_subcurve(graph, sub)))


def connected_pieces(graph: CurveGraph) -> list[CurveGraph]:
    """Connected components, ordered by their smallest vertex id."""
    components = sorted(nx.connected_components(point_graph(graph)), key=min)
    return [induced_subgraph(graph, c) for c in components]


def partial_normalization(graph: CurveGraph, point_id: str) -> list[CurveGraph]:
    """Normalize one singular point and split the result into connected pieces."""
    if graph.point(point_id) is None:
        raise UnknownVertexError(f"Unknown point {point_id}")
    rest = graph.model_copy(update={"points": [p for p in graph.points if p.id != point_id]})
    return connected_pieces(rest)


def genus_by_normalization(graph: CurveGraph, order: Optional[list[str]] = None) -> int:
    """Genus obtained by normalizing the points one at a time in ``order``.

    Each step uses the genus drop of the normalized point; when the
    normalization falls apart, its genus is the sum over the pieces.
    """
    if not is_connected(graph):
        raise DisconnectedGraphError("Normalization count needs a connected curve")
    if order is None:
        order = [p.id for p in graph.points]
    if sorted(order) != sorted(p.id for p in graph.points):
        raise InvalidCombinationError("The order must list every singular point exactly once")
    if not order:
        return graph.vertices[0].geom_genus
    first, rest = order[0], order[1:]
    point = graph.point(first)
    pieces = partial_normalization(graph, first)
    total = 0
    for piece in pieces:
        local = {p.id for p in piece.points}
        total += genus_by_normalization(piece, [p for p in rest if p in local])
    return total + genus_drop(point.r, len(pieces) > 1)
