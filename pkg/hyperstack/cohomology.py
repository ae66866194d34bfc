"""Cohomology of line bundles on rational trees and the decompositions built on it.

Sections of a bundle of multidegree d on a tree of lines are tuples of
polynomials, one of degree d(X) per component X, agreeing at every node.
Everything here reduces to exact linear algebra over the rationals.
"""
import logging

import networkx as nx
from sympy import Matrix, Rational

from hyperstack.curve_graph import (
    arithmetic_genus,
    genus_formula,
    induced_subgraph,
    intersection_length,
    is_connected,
    is_stable,
    point_graph,
    separating_points,
)
from hyperstack.exceptions import (
    DecompositionViolationError,
    DisconnectedGraphError,
    InvalidCombinationError,
    NotGenusOneError,
    NotHyperellipticError,
    UnknownVertexError,
)
from hyperstack.involution import quotient
from hyperstack.models import (
    AuditRow,
    BaseLocusMarker,
    CohomologyReport,
    CurveGraph,
    DecoratedInvolution,
    DecompositionKind,
    DecompositionReport,
    FiberCase,
    Genus1Case,
    HomComponentRow,
    HomOmegaReport,
    Marking,
    Subcurve,
    TreeBundle,
    UnramifiednessAudit,
)

logger = logging.getLogger("Cohomology")


# Line bundles on trees

def _node_positions(bundle: TreeBundle) -> dict[str, dict[str, int]]:
    placed = {}
    for c in bundle.components:
        incident = sorted(n.id for n in bundle.nodes if c in n.ends)
        given = (bundle.positions or {}).get(c)
        if given is None:
            placed[c] = {node: i for i, node in enumerate(incident)}
            continue
        missing = [node for node in incident if node not in given]
        if missing:
            raise InvalidCombinationError(f"No position for nodes {missing} on {c}")
        coordinates = [given[node] for node in incident]
        if len(set(coordinates)) != len(coordinates):
            raise InvalidCombinationError(f"Two nodes share a position on {c}")
        placed[c] = {node: given[node] for node in incident}
    return placed


def _gluing_system(bundle: TreeBundle) -> tuple[dict[tuple[str, int], int], list[list[Rational]]]:
    """Coefficient columns per (component, power) and one agreement row per node."""
    columns = {}
    for c in bundle.components:
        for k in range(bundle.multidegree[c] + 1):
            columns[(c, k)] = len(columns)
    placed = _node_positions(bundle)
    rows = []
    for node in bundle.nodes:
        row = [Rational(0)] * len(columns)
        for component, sign in zip(node.ends, (1, -1)):
            x = Rational(placed[component][node.id])
            for k in range(bundle.multidegree[component] + 1):
                row[columns[(component, k)]] += sign * x**k
        rows.append(row)
    return columns, rows


def h0_h1(bundle: TreeBundle) -> CohomologyReport:
    columns, rows = _gluing_system(bundle)
    rank = Matrix(rows).rank() if rows and columns else 0
    h0 = len(columns) - rank
    chi = sum(d + 1 for d in bundle.multidegree.values()) - len(bundle.nodes)
    return CohomologyReport(h0=h0, h1=h0 - chi, chi=chi)


def evaluation_surjective(bundle: TreeBundle, component: str) -> bool:
    """Whether global sections reach every value at a general point of ``component``."""
    if component not in bundle.components:
        raise UnknownVertexError(f"Unknown component {component}")
    if bundle.multidegree[component] < 0:
        return False
    columns, rows = _gluing_system(bundle)
    if rows:
        kernel = Matrix(rows).nullspace()
    else:
        kernel = [Matrix([1 if i == j else 0 for i in range(len(columns))]) for j in range(len(columns))]
    used = list(_node_positions(bundle)[component].values())
    x = Rational(max(used, default=-1) + 1)
    for section in kernel:
        value = sum(section[columns[(component, k)]] * x**k for k in range(bundle.multidegree[component] + 1))
        if value != 0:
            return True
    return False


def integral_canonical_sections(genus: int) -> int:
    """h^0 of the dualizing sheaf of an integral hyperelliptic curve.

    Pushed down to the line it splits as O(g-1) + O(-2).
    """
    parts = (genus - 1, -2)
    return sum(h0_h1(TreeBundle(components=["P"], multidegree={"P": d})).h0 for d in parts)


# Decompositions

def a1_separating_decomposition(graph: CurveGraph) -> DecompositionReport:
    """Cut the curve at every separating A1 point."""
    if not is_connected(graph):
        raise DisconnectedGraphError("Decomposition needs a connected curve")
    joints = sorted(p for p in separating_points(graph) if graph.point(p).r == 1)
    cut = point_graph(graph)
    for point_id in joints:
        u, v = graph.point(point_id).vertices
        cut.remove_edge(u, v, key=point_id)
    pieces = [Subcurve(vertex_subset=sorted(c)) for c in sorted(nx.connected_components(cut), key=min)]
    genera = [genus_formula(induced_subgraph(graph, piece.vertex_subset)) for piece in pieces]
    logger.debug(f"A1 decomposition into {len(pieces)} pieces at {joints}")
    return DecompositionReport(
        kind=DecompositionKind.A1_SEPARATING, pieces=pieces, genera=genera, joints=joints,
    )


def hodge_pieces(graph: CurveGraph) -> list[tuple[Subcurve, int]]:
    """Pieces whose Hodge bundles add up to the Hodge bundle of the curve."""
    report = a1_separating_decomposition(graph)
    if sum(report.genera) != arithmetic_genus(graph):
        raise DecompositionViolationError(
            "hodge", f"piece genera {report.genera} do not add up to {arithmetic_genus(graph)}"
        )
    return list(zip(report.pieces, report.genera))


class ExistDecomposition:
    """Splits a curve along a pair of exchanged rational components.

    The pieces D_i are the connected components of the rest of the curve;
    each clause of the structure result is checked in turn and the first
    failure is raised with its clause label.
    """

    def __init__(self, graph: CurveGraph, inv: DecoratedInvolution, gamma1: str, gamma2: str):
        self.graph = graph
        self.inv = inv
        self.gamma1 = gamma1
        self.gamma2 = gamma2

    def run(self) -> DecompositionReport:
        self._check_precondition()
        graph = self.graph
        first, second = Subcurve(vertex_subset=[self.gamma1]), Subcurve(vertex_subset=[self.gamma2])
        n = intersection_length(graph, first, second)
        # Pieces are the connected components of the complement
        rest = [v for v in graph.vertex_ids if v not in (self.gamma1, self.gamma2)]
        pieces = []
        if rest:
            components = nx.connected_components(point_graph(induced_subgraph(graph, rest)))
            pieces = [Subcurve(vertex_subset=sorted(c)) for c in sorted(components, key=min)]
        m = len(pieces)
        genera = [genus_formula(induced_subgraph(graph, d.vertex_subset)) for d in pieces]

        # Clause checks
        if m + n < 3:
            raise DecompositionViolationError("a", f"m + n = {m + n} is below 3")
        joints = []
        for piece in pieces:
            self._check_invariant(piece)
            self._check_meets_once(piece, first, second)
            joints += self._check_tail(piece)
        covered = {v for d in pieces for v in d.vertex_subset} | {self.gamma1, self.gamma2}
        if covered != set(graph.vertex_ids):
            raise DecompositionViolationError("e", "pieces do not cover the curve")

        # Genus identity
        genus = arithmetic_genus(graph)
        if genus != m + n - 1 + sum(genera):
            raise DecompositionViolationError(
                "identity", f"g = {genus} but m + n - 1 + sum g_i = {m + n - 1 + sum(genera)}"
            )
        return DecompositionReport(
            kind=DecompositionKind.EXIST_DECOMP, pieces=pieces, genera=genera,
            joints=sorted(joints), n=n, m=m, identity_holds=True,
        )

    def _check_precondition(self) -> None:
        for gamma in (self.gamma1, self.gamma2):
            if self.graph.vertex(gamma) is None:
                raise UnknownVertexError(f"Unknown vertex {gamma}")
        if self.gamma1 == self.gamma2 or self.inv.vertex_image(self.gamma1) != self.gamma2:
            raise DecompositionViolationError("precondition", "the two components are not exchanged")
        for gamma in (self.gamma1, self.gamma2):
            if genus_formula(induced_subgraph(self.graph, [gamma])) != 0:
                raise DecompositionViolationError("precondition", f"{gamma} is not a smooth rational curve")

    def _check_invariant(self, piece: Subcurve) -> None:
        vertices = set(piece.vertex_subset)
        if {self.inv.vertex_image(v) for v in vertices} != vertices:
            raise DecompositionViolationError("b", f"{list(piece.vertex_subset)} is not invariant")

    def _check_meets_once(self, piece: Subcurve, first: Subcurve, second: Subcurve) -> None:
        for gamma in (first, second):
            length = intersection_length(self.graph, piece, gamma)
            if length != 1:
                raise DecompositionViolationError(
                    "c", f"{list(piece.vertex_subset)} meets {gamma.vertex_subset[0]} with length {length}"
                )

    def _attachment(self, piece: Subcurve, gamma: str) -> tuple[str, str]:
        vertices = set(piece.vertex_subset)
        for point in self.graph.points:
            ends = point.vertices
            if len(ends) == 2 and gamma in ends and vertices & set(ends):
                return point.id, ends[0] if ends[1] == gamma else ends[1]
        raise DecompositionViolationError("c", f"{list(piece.vertex_subset)} does not meet {gamma}")

    def _check_tail(self, piece: Subcurve) -> list[str]:
        (p1, v1), (p2, v2) = self._attachment(piece, self.gamma1), self._attachment(piece, self.gamma2)
        sub = induced_subgraph(self.graph, piece.vertex_subset)
        marked = sub.model_copy(update={
            "markings": list(sub.markings) + [Marking(id=p1, vertex=v1), Marking(id=p2, vertex=v2)]
        })
        label = list(piece.vertex_subset)
        if not is_connected(sub):
            raise DecompositionViolationError("d", f"{label} is disconnected")
        if genus_formula(sub) < 1:
            raise DecompositionViolationError("d", f"{label} has genus 0")
        r_max = max((p.r for p in self.graph.points), default=0)
        if not is_stable(marked, r_max).valid:
            raise DecompositionViolationError("d", f"{label} is not stable with its two attachment points")
        if self.inv.point_image(p1) != p2:
            raise DecompositionViolationError("d", f"attachment points {p1} and {p2} are not exchanged")
        return [p1, p2]


def exist_decomposition(
    graph: CurveGraph, inv: DecoratedInvolution, gamma1: str, gamma2: str
) -> DecompositionReport:
    return ExistDecomposition(graph, inv, gamma1, gamma2).run()


# Base locus of the canonical system

def pencil_components(graph: CurveGraph) -> list[str]:
    """Single-component rational pieces of the A1 decomposition."""
    report = a1_separating_decomposition(graph)
    if len(report.pieces) < 2:
        return []
    return sorted(
        piece.vertex_subset[0]
        for piece, genus in zip(report.pieces, report.genera)
        if len(piece.vertex_subset) == 1 and genus == 0
    )


def canonical_base_locus(graph: CurveGraph) -> list[BaseLocusMarker]:
    """Separating A1 points (type 1) and rational components attached only through them (type 2)."""
    separating = sorted(p for p in separating_points(graph) if graph.point(p).r == 1)
    joints = set(separating)
    components = []
    for v in graph.vertices:
        if v.geom_genus != 0:
            continue
        incident = [p for p in graph.points if v.id in p.vertices]
        if incident and all(p.id in joints for p in incident):
            components.append(v.id)
    if sorted(components) != pencil_components(graph):
        raise DecompositionViolationError(
            "base locus", f"components {components} disagree with the decomposition"
        )
    return (
        [BaseLocusMarker(kind="point", id=p, type=1) for p in separating]
        + [BaseLocusMarker(kind="vertex", id=v, type=2) for v in sorted(components)]
    )


# Genus one with two markings

def classify_genus1(graph: CurveGraph, p1: str, p2: str) -> Genus1Case:
    """Which of the four shapes a 2-pointed genus-1 curve takes.

    ``p1`` and ``p2`` are marking ids of ``graph``. Naming the same marking
    twice asks for the 1-pointed curve with a doubled point, which is stable
    only when integral, so the answer is then a or INVALID.
    """
    markings = []
    for marking_id in dict.fromkeys((p1, p2)):
        marking = graph.marking(marking_id)
        if marking is None:
            raise UnknownVertexError(f"Unknown marking {marking_id}")
        markings.append(marking)
    genus = arithmetic_genus(graph)
    if genus != 1:
        raise NotGenusOneError(f"Curve has genus {genus}")
    marked = graph.model_copy(update={"markings": markings})
    r_max = max((p.r for p in graph.points), default=0)
    if not is_stable(marked, r_max).valid:
        return Genus1Case.INVALID

    # Integral curves
    if len(graph.vertices) == 1:
        return Genus1Case.A
    if len(markings) == 1 or len(graph.vertices) != 2:
        return Genus1Case.INVALID

    # Two components
    u, v = graph.vertex_ids
    on = (markings[0].vertex, markings[1].vertex)
    between = [p for p in graph.points if sorted(p.vertices) == sorted([u, v])]
    own = {w: genus_formula(induced_subgraph(graph, [w])) for w in (u, v)}

    if len(between) == 1 and between[0].r == 1 and sorted(own.values()) == [0, 1]:
        rational = u if own[u] == 0 else v
        return Genus1Case.B if on == (rational, rational) else Genus1Case.INVALID
    if own[u] == own[v] == 0 and len(between) == len(graph.points) and on[0] != on[1]:
        if len(between) == 2 and all(p.r == 1 for p in between):
            return Genus1Case.C
        if len(between) == 1 and between[0].r == 3:
            return Genus1Case.D
    return Genus1Case.INVALID


# Hom(Omega, L(-D)) on the quotient

def _quotient_data(curve: CurveGraph, inv: DecoratedInvolution):
    report = quotient(curve, inv)
    if not report.is_hyperelliptic:
        raise NotHyperellipticError(f"Quotient has genus {report.quotient_genus}")
    preimage = {c: [v for v in curve.vertex_ids if report.vertex_images[v] == c]
                for c in report.quotient_graph.vertex_ids}
    h = {c: genus_formula(induced_subgraph(curve, vs)) for c, vs in preimage.items()}
    return report, preimage, h


def hom_omega_dimensions(curve: CurveGraph, inv: DecoratedInvolution) -> HomOmegaReport:
    """Component-wise dimensions of Hom(Omega, L(-D)) for the three ways of gluing.

    The glued total is also computed over the pieces of the A1 decomposition,
    counting only the nodes whose preimages lie inside a piece.
    """
    report, preimage, h = _quotient_data(curve, inv)
    q = report.quotient_graph
    case_of = {img.image: img.case for img in report.point_images if img.image is not None}

    rows = []
    for c in q.vertex_ids:
        on_c = [p for p in q.points if c in p.vertices]
        n = len(on_c)
        n_flat = sum(1 for p in on_c if case_of[p.id] in (FiberCase.N1, FiberCase.N2))
        untwisted, glued, twisted = 1 - h[c], 1 - h[c] - n_flat, 1 - h[c] - n
        rows.append(HomComponentRow(
            component=c, h=h[c], n=n, n_flat=n_flat,
            untwisted_degree=untwisted, untwisted_dim=max(0, untwisted + 1),
            glued_degree=glued, glued_dim=max(0, glued + 1),
            twisted_degree=twisted, twisted_dim=max(0, twisted + 1),
        ))

    upstairs = {}
    for img in report.point_images:
        if img.image is not None:
            upstairs.setdefault(img.image, []).append(img.point)
    piecewise = 0
    for piece in a1_separating_decomposition(curve).pieces:
        inside = set(piece.vertex_subset)
        for c in sorted({report.vertex_images[v] for v in inside}):
            internal = sum(
                1 for p in q.points
                if c in p.vertices and all(set(curve.point(u).vertices) <= inside for u in upstairs[p.id])
            )
            piecewise += max(0, 2 - h[c] - internal)

    glued_total = sum(row.glued_dim for row in rows)
    return HomOmegaReport(
        rows=rows,
        untwisted_total=sum(row.untwisted_dim for row in rows),
        glued_total=glued_total,
        twisted_total=sum(row.twisted_dim for row in rows),
        piecewise_glued_total=piecewise,
        routes_agree=piecewise == glued_total,
    )


def unramifiedness_certificate(curve: CurveGraph, inv: DecoratedInvolution) -> UnramifiednessAudit:
    """Certifies that Hom(Omega, L(-D)) vanishes on every quotient component."""
    report, _, h = _quotient_data(curve, inv)
    q = report.quotient_graph
    rows = []
    for c in q.vertex_ids:
        n = sum(1 for p in q.points if c in p.vertices)
        rows.append(AuditRow(component=c, h=h[c], n=n, degree=1 - h[c] - n))
    certified = all(row.degree < 0 for row in rows)
    if not certified:
        logger.warning(f"Certificate fails on {[r.component for r in rows if r.degree >= 0]}")
    return UnramifiednessAudit(certified=certified, rows=rows)
