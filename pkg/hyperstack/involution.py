import logging
from itertools import combinations, product
from typing import Iterator, Optional

from hyperstack.canonical import to_canonical_json
from hyperstack.config import DEFAULT_SETTINGS, Settings
from hyperstack.curve_graph import arithmetic_genus, genus_formula, induced_subgraph, is_connected
from hyperstack.exceptions import (
    InfiniteFixedLocusError,
    InvalidInvolutionError,
    ScaleLimitError,
)
from hyperstack.local_sing import branch_action, classify_involutions, fiber_length, is_applicable, quotient_local
from hyperstack.models import (
    ActionSignature,
    Branch,
    BranchAction,
    CheckResult,
    CheckStatus,
    CurveGraph,
    DecoratedInvolution,
    FiberCase,
    FixedVertexData,
    InvolutionTag,
    PointImage,
    QuotientReport,
    SingularPoint,
    Subcurve,
    ValidationReport,
    Vertex,
    VertexAction,
)

logger = logging.getLogger("InvolutionSearch")


def ramification_count(geom_genus: int, quotient_genus: int) -> int:
    """Fixed points of an involution of a smooth genus-g curve with genus-q quotient."""
    return 2 * geom_genus + 2 - 4 * quotient_genus


def fixed_branch_points(graph: CurveGraph, inv: DecoratedInvolution, vertex_id: str) -> int:
    """Fixed points on the normalization of a component lying over singular points."""
    count = 0
    for point in graph.points:
        tag = inv.fixed_points.get(point.id)
        if tag is None or inv.point_image(point.id) != point.id:
            continue
        on_vertex = point.vertices.count(vertex_id)
        if not on_vertex or not is_applicable(point.r, tag):
            continue
        action = branch_action(point.r, tag)
        if action == BranchAction.UNIBRANCH:
            count += 1
        elif action == BranchAction.FIX:
            count += on_vertex
    return count


def _expected_action(inv: DecoratedInvolution, point: SingularPoint) -> Optional[BranchAction]:
    """Branch action forced by the component map, None when both are possible."""
    if len(point.branches) == 1:
        return BranchAction.UNIBRANCH
    u, w = point.vertices
    if u == w:
        return None
    return BranchAction.SWAP if inv.vertex_image(u) == w else BranchAction.FIX


class InvolutionValidator:
    """Consistency of a decorated involution with the curve graph it acts on."""

    def __init__(self, graph: CurveGraph):
        self.graph = graph

    def validate(self, inv: DecoratedInvolution) -> ValidationReport:
        checks = [
            self._check_map("Vertex map", inv.vertex_map, self.graph.vertex_ids),
            self._check_map("Point map", inv.point_map, [p.id for p in self.graph.points]),
        ]
        if all(c.status == CheckStatus.PASS for c in checks):
            checks += [
                self._check_vertex_genera(inv),
                self._check_decorations(inv),
                self._check_incidence(inv),
                self._check_local_classes(inv),
            ]
        if all(c.status == CheckStatus.PASS for c in checks):
            checks.append(self._check_riemann_hurwitz(inv))
        return ValidationReport.from_checks(checks)

    @staticmethod
    def _result(name: str, problems: list[str], ok: str) -> CheckResult:
        if problems:
            return CheckResult(check_name=name, status=CheckStatus.FAIL, message="; ".join(problems))
        return CheckResult(check_name=name, status=CheckStatus.PASS, message=ok)

    def _check_map(self, name: str, mapping: dict[str, str], ids: list[str]) -> CheckResult:
        known = set(ids)
        problems = [f"unknown id {k}" for k in sorted(set(mapping) | set(mapping.values())) if k not in known]
        if not problems:
            full = {i: mapping.get(i, i) for i in ids}
            problems = [f"{i} -> {full[i]} -> {full[full[i]]}" for i in ids if full[full[i]] != i]
        return self._result(name, problems, "Involutive permutation.")

    def _check_vertex_genera(self, inv: DecoratedInvolution) -> CheckResult:
        problems = []
        for v in self.graph.vertices:
            image = self.graph.vertex(inv.vertex_image(v.id))
            if image.geom_genus != v.geom_genus:
                problems.append(f"{v.id} (genus {v.geom_genus}) exchanged with {image.id} (genus {image.geom_genus})")
        return self._result("Exchanged genera", problems, "Exchanged components have equal genus.")

    def _check_decorations(self, inv: DecoratedInvolution) -> CheckResult:
        problems = []
        for v in self.graph.vertex_ids:
            fixed = inv.vertex_image(v) == v
            if fixed and v not in inv.fixed_vertices:
                problems.append(f"fixed vertex {v} has no decoration")
            if not fixed and v in inv.fixed_vertices:
                problems.append(f"exchanged vertex {v} carries a fixed decoration")
        unknown = set(inv.fixed_vertices) - set(self.graph.vertex_ids)
        problems += [f"decoration for unknown vertex {v}" for v in sorted(unknown)]
        for point_id in sorted(inv.fixed_points):
            point = self.graph.point(point_id)
            if point is None:
                problems.append(f"class for unknown point {point_id}")
            elif inv.point_image(point_id) != point_id:
                problems.append(f"exchanged point {point_id} carries a local class")
        for point in self.graph.points:
            kinds = [self._kind(inv, w) for w in point.vertices]
            if VertexAction.IDENTITY in kinds and inv.point_image(point.id) != point.id:
                problems.append(f"point {point.id} on a pointwise fixed component is moved")
            if inv.point_image(point.id) != point.id:
                continue
            trivial = all(k == VertexAction.IDENTITY for k in kinds)
            if trivial and point.id in inv.fixed_points:
                problems.append(f"point {point.id} lies on pointwise fixed components and takes no class")
            if not trivial and point.id not in inv.fixed_points:
                problems.append(f"fixed point {point.id} has no local class")
        return self._result("Decorations", problems, "Every fixed component and point is decorated.")

    def _kind(self, inv: DecoratedInvolution, vertex_id: str) -> Optional[VertexAction]:
        data = inv.fixed_vertices.get(vertex_id)
        if data is None or inv.vertex_image(vertex_id) != vertex_id:
            return None
        return data.kind

    def _check_incidence(self, inv: DecoratedInvolution) -> CheckResult:
        problems = []
        for point in self.graph.points:
            image = self.graph.point(inv.point_image(point.id))
            if image.r != point.r:
                problems.append(f"{point.id} (A_{point.r}) sent to {image.id} (A_{image.r})")
                continue
            moved = sorted(inv.vertex_image(w) for w in point.vertices)
            if moved != sorted(image.vertices):
                problems.append(f"branches of {point.id} are not carried to the branches of {image.id}")
        return self._result("Incidence", problems, "Points are carried to points compatibly with branches.")

    def _check_local_classes(self, inv: DecoratedInvolution) -> CheckResult:
        problems = []
        for point_id, tag in sorted(inv.fixed_points.items()):
            point = self.graph.point(point_id)
            if point is None:
                continue
            if not is_applicable(point.r, tag):
                problems.append(f"class {tag.value} does not act on A_{point.r} at {point_id}")
                continue
            kinds = {self._kind(inv, w) for w in point.vertices}
            mixed = kinds == {VertexAction.IDENTITY, VertexAction.NONTRIVIAL}
            if mixed and tag != InvolutionTag.C3:
                problems.append(f"{point_id} joins a pointwise fixed component, so its class must be c3")
            if tag == InvolutionTag.C3 and not mixed:
                problems.append(f"class c3 at {point_id} needs exactly one pointwise fixed branch")
            expected = _expected_action(inv, point)
            actual = branch_action(point.r, tag)
            if expected is not None and actual != expected:
                problems.append(f"class {tag.value} at {point_id} acts by {actual.value}, components need {expected.value}")
        return self._result("Local classes", problems, "Local classes are applicable and consistent.")

    def _check_riemann_hurwitz(self, inv: DecoratedInvolution) -> CheckResult:
        problems = []
        for v in self.graph.vertices:
            data = inv.fixed_vertices.get(v.id)
            if data is None or data.kind != VertexAction.NONTRIVIAL:
                continue
            needed = ramification_count(v.geom_genus, data.quotient_genus)
            found = data.smooth_fixed + fixed_branch_points(self.graph, inv, v.id)
            if needed < 0:
                problems.append(f"vertex {v.id} cannot cover a genus-{data.quotient_genus} curve")
            elif found != needed:
                problems.append(f"vertex {v.id} has {found} fixed points, Riemann-Hurwitz needs {needed}")
        return self._result("Riemann-Hurwitz", problems, "Fixed point counts match.")


def validate_involution(graph: CurveGraph, inv: DecoratedInvolution) -> ValidationReport:
    return InvolutionValidator(graph).validate(inv)


def fixed_locus_finite(graph: CurveGraph, inv: DecoratedInvolution) -> bool:
    for v in graph.vertex_ids:
        data = inv.fixed_vertices.get(v)
        if inv.vertex_image(v) == v and data is not None and data.kind == VertexAction.IDENTITY:
            return False
    return InvolutionTag.C3 not in inv.fixed_points.values()


def _fixed_case(point: SingularPoint, tag: InvolutionTag, quotient_r: int) -> Optional[FiberCase]:
    if quotient_r == 0:
        return FiberCase.S2
    if tag == InvolutionTag.C2:
        return FiberCase.N3
    if tag == InvolutionTag.B2 and point.r == 3:
        return FiberCase.N2
    return None


def quotient(graph: CurveGraph, inv: DecoratedInvolution) -> QuotientReport:
    """Dual graph of C/sigma together with the fibre of every singular point."""
    report = validate_involution(graph, inv)
    if not report.valid:
        raise InvalidInvolutionError("Involution is inconsistent with the curve", report.reasons)
    if not fixed_locus_finite(graph, inv):
        raise InfiniteFixedLocusError("The involution fixes a component pointwise")

    orbit = {v: min(v, inv.vertex_image(v)) for v in graph.vertex_ids}
    vertices = []
    for v in graph.vertices:
        if orbit[v.id] != v.id:
            continue
        if inv.vertex_image(v.id) == v.id:
            vertices.append(Vertex(id=v.id, geom_genus=inv.fixed_vertices[v.id].quotient_genus))
        else:
            vertices.append(Vertex(id=v.id, geom_genus=v.geom_genus))

    points, images = [], []
    for point in graph.points:
        partner = inv.point_image(point.id)
        if partner != point.id:
            image_id = min(point.id, partner)
            if image_id == point.id:
                points.append(SingularPoint(
                    id=image_id, r=point.r,
                    branches=[Branch(vertex=orbit[w]) for w in point.vertices],
                ))
            images.append(PointImage(
                point=point.id, image=image_id,
                case=FiberCase.N1 if point.r == 1 else None,
                length=2, quotient_r=point.r,
            ))
            continue
        tag = inv.fixed_points[point.id]
        local = quotient_local(point.r, tag)
        quotient_r = local.quotient_type.r
        image_id = None
        if quotient_r > 0:
            image_id = point.id
            if local.branch_action == BranchAction.FIX:
                branches = [Branch(vertex=orbit[w]) for w in point.vertices]
            else:
                branches = [Branch(vertex=orbit[point.vertices[0]])]
            points.append(SingularPoint(id=point.id, r=quotient_r, branches=branches))
        images.append(PointImage(
            point=point.id, image=image_id, case=_fixed_case(point, tag, quotient_r),
            length=fiber_length(point.r, tag), quotient_r=quotient_r,
        ))

    quotient_graph = CurveGraph(vertices=vertices, points=points)
    connected = is_connected(quotient_graph)
    genus = arithmetic_genus(quotient_graph) if connected else genus_formula(quotient_graph)
    hyperelliptic = connected and genus == 0 and all(p.r == 1 for p in points)
    return QuotientReport(
        quotient_graph=quotient_graph,
        vertex_images=orbit,
        point_images=images,
        quotient_genus=genus,
        is_hyperelliptic=hyperelliptic,
    )


def action_signature(graph: CurveGraph, inv: DecoratedInvolution) -> ActionSignature:
    return ActionSignature(
        vertex_permutation={v: inv.vertex_image(v) for v in sorted(graph.vertex_ids)},
        point_permutation={p: inv.point_image(p) for p in sorted(p.id for p in graph.points)},
    )


def _vertex_involutions(vertices: list[Vertex]) -> Iterator[dict[str, str]]:
    """Involutive permutations of the components preserving geometric genus."""
    if not vertices:
        yield {}
        return
    first, rest = vertices[0], vertices[1:]
    for tail in _vertex_involutions(rest):
        yield {first.id: first.id, **tail}
    for i, other in enumerate(rest):
        if other.geom_genus != first.geom_genus:
            continue
        for tail in _vertex_involutions(rest[:i] + rest[i + 1:]):
            yield {first.id: other.id, other.id: first.id, **tail}


def _point_involutions(points: list[SingularPoint], vertex_map: dict[str, str]) -> Iterator[dict[str, str]]:
    """Involutive permutations of the points compatible with ``vertex_map``."""
    if not points:
        yield {}
        return
    first, rest = points[0], points[1:]
    target = sorted(vertex_map[w] for w in first.vertices)
    if target == sorted(first.vertices):
        for tail in _point_involutions(rest, vertex_map):
            yield {first.id: first.id, **tail}
    for i, other in enumerate(rest):
        if other.r != first.r or sorted(other.vertices) != target:
            continue
        for tail in _point_involutions(rest[:i] + rest[i + 1:], vertex_map):
            yield {first.id: other.id, other.id: first.id, **tail}


class InvolutionSearch:
    """Exhaustive search for hyperelliptic decorated involutions of a curve graph."""

    def __init__(self, settings: Settings = DEFAULT_SETTINGS):
        self.settings = settings

    def search(self, graph: CurveGraph) -> list[DecoratedInvolution]:
        found = []
        examined = 0
        # Candidate maps. Only nodes may be exchanged
        for vertex_map in _vertex_involutions(list(graph.vertices)):
            for point_map in _point_involutions(list(graph.points), vertex_map):
                if any(point_map[p.id] != p.id and p.r > 1 for p in graph.points):
                    continue
                for inv in self._decorations(graph, vertex_map, point_map):
                    examined += 1
                    if examined > self.settings.involution_candidate_limit:
                        raise ScaleLimitError(
                            f"More than {self.settings.involution_candidate_limit} involution candidates"
                        )
                    if quotient(graph, inv).is_hyperelliptic:
                        found.append(inv)
        found.sort(key=to_canonical_json)
        logger.info(f"Examined {examined} candidates, {len(found)} hyperelliptic")
        return found

    def _decorations(
        self, graph: CurveGraph, vertex_map: dict[str, str], point_map: dict[str, str]
    ) -> Iterator[DecoratedInvolution]:
        skeleton = DecoratedInvolution(vertex_map=vertex_map, point_map=point_map)
        fixed_points = [p for p in graph.points if point_map[p.id] == p.id]
        # Local classes with a flat or nodal quotient
        options = []
        for point in fixed_points:
            expected = _expected_action(skeleton, point)
            tags = sorted(
                c.tag for c in classify_involutions(point.r)
                if c.tag != InvolutionTag.C3
                and quotient_local(point.r, c.tag).quotient_type.r <= 1
                and (expected is None or branch_action(point.r, c.tag) == expected)
            )
            if not tags:
                return
            options.append(tags)
        fixed_vertices = [v for v in graph.vertices if vertex_map[v.id] == v.id]
        # Fixed components take the remaining ramification as smooth fixed points
        for choice in product(*options):
            classes = {p.id: tag for p, tag in zip(fixed_points, choice)}
            partial = skeleton.model_copy(update={"fixed_points": classes})
            decorations = {}
            for v in fixed_vertices:
                smooth = ramification_count(v.geom_genus, 0) - fixed_branch_points(graph, partial, v.id)
                if smooth < 0:
                    break
                decorations[v.id] = FixedVertexData(kind=VertexAction.NONTRIVIAL, quotient_genus=0, smooth_fixed=smooth)
            else:
                yield DecoratedInvolution(
                    vertex_map=vertex_map, point_map=point_map,
                    fixed_vertices=decorations, fixed_points=classes,
                )


def find_hyperelliptic_involutions(
    graph: CurveGraph, settings: Settings = DEFAULT_SETTINGS
) -> list[DecoratedInvolution]:
    return InvolutionSearch(settings).search(graph)


def subcurve_meets_image(graph: CurveGraph, inv: DecoratedInvolution, sub: Subcurve) -> bool:
    vertices = set(sub.vertex_subset)
    return bool(vertices & {inv.vertex_image(v) for v in vertices})


def check_subcurves_meet_images(graph: CurveGraph, inv: DecoratedInvolution) -> ValidationReport:
    """Every subcurve of positive genus shares a component with its image."""
    problems = []
    ids = graph.vertex_ids
    for size in range(1, len(ids) + 1):
        for subset in combinations(ids, size):
            if genus_formula(induced_subgraph(graph, subset)) < 1:
                continue
            if not subcurve_meets_image(graph, inv, Subcurve(vertex_subset=subset)):
                problems.append(f"{list(subset)} is disjoint from its image")
    if problems:
        check = CheckResult(check_name="Subcurves", status=CheckStatus.FAIL, message="; ".join(problems))
    else:
        check = CheckResult(
            check_name="Subcurves", status=CheckStatus.PASS,
            message="Every subcurve of positive genus meets its image.",
        )
    return ValidationReport.from_checks([check])
