"""Cyclic double covers of twisted genus-0 trees and their curve-side counterpart.

Cover data (Z, L, i) is stored with the degree of L doubled so that every
quantity stays integral. For a component G with n_G stacky nodes:

    g_G = (n_G - deg2L(G)) / 2 - 1      genus of the preimage of G
    B_G = odd smooth orders + odd node orders + n_G
"""
import logging

from hyperstack.curve_graph import arithmetic_genus, genus_formula, induced_subgraph, is_connected
from hyperstack.exceptions import BijectionError, InvalidCoverDataError, NotHyperellipticError
from hyperstack.involution import quotient, validate_involution
from hyperstack.models import (
    Branch,
    CheckResult,
    CheckStatus,
    CoverData,
    CoverResult,
    CoverValidationReport,
    CurveGraph,
    DecoratedInvolution,
    FiberCase,
    FixedVertexData,
    InvolutionTag,
    SingularPoint,
    TwistedNode,
    Vertex,
    VertexAction,
    tree_problems,
)

logger = logging.getLogger("CoverBuilder")


def incident_nodes(data: CoverData, component: str) -> list[TwistedNode]:
    return [n for n in data.nodes if component in n.ends]


def incident_orders(data: CoverData, component: str) -> list[int]:
    """Vanishing orders of the branch section along the node branches lying on ``component``."""
    orders = []
    for node in incident_nodes(data, component):
        a, b = data.orders_of(node.id)
        orders.append(a if node.ends[0] == component else b)
    return orders


def stacky_count(data: CoverData, component: str) -> int:
    return sum(1 for n in incident_nodes(data, component) if n.stacky)


def attachment_count(data: CoverData, component: str) -> int:
    return len(incident_nodes(data, component))


def component_genus(data: CoverData, component: str) -> int:
    return (stacky_count(data, component) - data.deg2L[component]) // 2 - 1


def branch_count(data: CoverData, component: str) -> int:
    odd_smooth = sum(1 for m in data.smooth_of(component) if m % 2)
    odd_nodes = sum(1 for o in incident_orders(data, component) if o % 2)
    return odd_smooth + odd_nodes + stacky_count(data, component)


def euler_characteristic(data: CoverData) -> int:
    """chi(L): sum of floor(deg L) + 1 over components minus the non-stacky nodes."""
    per_component = sum(data.deg2L[c] // 2 + 1 for c in data.components)
    return per_component - sum(1 for n in data.nodes if not n.stacky)


def structural_problems(data: CoverData) -> list[str]:
    problems = tree_problems(data.components, [n.ends for n in data.nodes])
    for node in data.nodes:
        orders = data.orders_of(node.id)
        if min(orders) < 0:
            problems.append(f"Node {node.id} has negative orders {list(orders)}")
        if node.stacky and orders != (0, 0):
            problems.append(f"(a2) stacky node {node.id} must have orders (0, 0)")
    for component in data.components:
        if any(m < 1 for m in data.smooth_of(component)):
            problems.append(f"Component {component} has a smooth order below 1")
        n = stacky_count(data, component)
        if (data.deg2L[component] - n) % 2:
            problems.append(f"(a1) 2 deg L on {component} must have the parity of its {n} stacky nodes")
            continue
        total = sum(data.smooth_of(component)) + sum(incident_orders(data, component))
        if total != -data.deg2L[component]:
            problems.append(
                f"Degree balance on {component}: orders sum to {total}, expected {-data.deg2L[component]}"
            )
        if component_genus(data, component) < -1:
            problems.append(f"Component {component} has g_G = {component_genus(data, component)} < -1")
        elif branch_count(data, component) % 2:
            problems.append(f"Component {component} has an odd number of branch points")
    return problems


class CoverValidator:
    """Local, genus and stability conditions on cyclic-cover data."""

    def __init__(self, g: int, r: int):
        self.g = g
        self.r = r

    def validate(self, data: CoverData) -> CoverValidationReport:
        structural = structural_problems(data)
        if structural:
            logger.info(f"Cover data rejected structurally: {structural}")
            return CoverValidationReport(valid=False, checks=self.local_checks(data), structural=structural)
        checks = self.local_checks(data) + [
            self._check_genus(data),
            self._check_rational_components(data),
            self._check_disconnected_components(data),
        ]
        return CoverValidationReport.from_checks(checks)

    def local_checks(self, data: CoverData) -> list[CheckResult]:
        return [self._check_smooth_orders(data), self._check_node_orders(data), self._check_nodes_allowed(data)]

    def _check_smooth_orders(self, data: CoverData) -> CheckResult:
        bad = [
            f"order {m} on {c}" for c in data.components for m in data.smooth_of(c) if m > self.r + 1
        ]
        if bad:
            return CheckResult(
                check_name="(b3)", status=CheckStatus.FAIL,
                message=f"(b3) branch divisor has length above r+1 = {self.r + 1}: {', '.join(bad)}",
            )
        return CheckResult(check_name="(b3)", status=CheckStatus.PASS, message="Smooth orders within r+1.")

    def _check_node_orders(self, data: CoverData) -> CheckResult:
        problems = []
        for node in data.nodes:
            if node.stacky:
                continue
            orders = data.orders_of(node.id)
            if orders not in ((0, 0), (1, 1)):
                problems.append(f"node {node.id} has orders {list(orders)}")
            elif orders == (1, 1) and self.r < 3:
                problems.append(f"node {node.id} supports a tacnode but r = {self.r}")
        if problems:
            return CheckResult(check_name="(b2)", status=CheckStatus.FAIL, message="(b2) " + "; ".join(problems))
        return CheckResult(check_name="(b2)", status=CheckStatus.PASS, message="Node orders are (0,0) or (1,1).")

    def _check_nodes_allowed(self, data: CoverData) -> CheckResult:
        if data.nodes and self.r < 1:
            return CheckResult(
                check_name="nodes", status=CheckStatus.FAIL,
                message="Nodal covers need r >= 1.",
            )
        return CheckResult(check_name="nodes", status=CheckStatus.PASS, message="Nodes allowed.")

    def _check_genus(self, data: CoverData) -> CheckResult:
        chi = euler_characteristic(data)
        if chi != -self.g:
            return CheckResult(
                check_name="genus", status=CheckStatus.FAIL,
                message=f"chi(L) = {chi}, expected {-self.g}.",
            )
        return CheckResult(check_name="genus", status=CheckStatus.PASS, message=f"chi(L) = {chi}.")

    def _check_rational_components(self, data: CoverData) -> CheckResult:
        problems = []
        for c in data.components:
            if component_genus(data, c) != 0:
                continue
            m, n = attachment_count(data, c), stacky_count(data, c)
            if 2 * m - n < 3:
                problems.append(f"{c} has 2m - n = {2 * m - n}")
        if problems:
            return CheckResult(check_name="(c1)", status=CheckStatus.FAIL, message="(c1) " + "; ".join(problems))
        return CheckResult(check_name="(c1)", status=CheckStatus.PASS, message="Genus-0 preimages are stable.")

    def _check_disconnected_components(self, data: CoverData) -> CheckResult:
        problems = []
        for c in data.components:
            if component_genus(data, c) != -1:
                continue
            m, n = attachment_count(data, c), stacky_count(data, c)
            if n != 0 or m < 3:
                problems.append(f"{c} has m = {m}, n = {n}")
        if problems:
            return CheckResult(check_name="(c2)", status=CheckStatus.FAIL, message="(c2) " + "; ".join(problems))
        return CheckResult(check_name="(c2)", status=CheckStatus.PASS, message="Split preimages are stable.")


def validate_cover_data(data: CoverData, g: int, r: int) -> CoverValidationReport:
    return CoverValidator(g, r).validate(data)


class CoverBuilder:
    """Builds the double cover C = Spec(O_Z + L) as a curve graph with its deck involution."""

    def __init__(self, r: int):
        self.r = r

    def build(self, data: CoverData) -> CoverResult:
        problems = structural_problems(data)
        if problems:
            raise InvalidCoverDataError("Cover data is structurally invalid", problems)
        local = [c.message for c in CoverValidator(0, self.r).local_checks(data) if c.status == CheckStatus.FAIL]
        if local:
            raise InvalidCoverDataError("Cover data violates a local condition", local)

        split = {c: branch_count(data, c) == 0 for c in data.components}

        def sheet(component: str, sign: str) -> str:
            return f"{component}{sign}" if split[component] else component

        vertices, points = [], []
        vertex_map, point_map = {}, {}
        fixed_points = {}
        smooth_fixed = {c: 0 for c in data.components}

        for c in data.components:
            if split[c]:
                vertices += [Vertex(id=f"{c}+", geom_genus=0), Vertex(id=f"{c}-", geom_genus=0)]
                vertex_map.update({f"{c}+": f"{c}-", f"{c}-": f"{c}+"})
            else:
                vertices.append(Vertex(id=c, geom_genus=branch_count(data, c) // 2 - 1))
                vertex_map[c] = c

        for c in data.components:
            for i, m in enumerate(sorted(data.smooth_of(c))):
                if m == 1:
                    smooth_fixed[c] += 1
                    continue
                point_id = f"{c}.{i}"
                if m % 2:
                    branches = [Branch(vertex=c)]
                    fixed_points[point_id] = InvolutionTag.A
                else:
                    branches = [Branch(vertex=sheet(c, "+")), Branch(vertex=sheet(c, "-"))]
                    fixed_points[point_id] = InvolutionTag.C1 if m == 2 else InvolutionTag.B1
                points.append(SingularPoint(id=point_id, r=m - 1, branches=branches))
                point_map[point_id] = point_id

        for node in data.nodes:
            a, b = node.ends
            if node.stacky or data.orders_of(node.id) == (1, 1):
                r = 1 if node.stacky else 3
                points.append(SingularPoint(id=node.id, r=r, branches=[Branch(vertex=a), Branch(vertex=b)]))
                point_map[node.id] = node.id
                fixed_points[node.id] = InvolutionTag.C2 if node.stacky else InvolutionTag.B2
                continue
            plus, minus = f"{node.id}+", f"{node.id}-"
            for point_id, sign in ((plus, "+"), (minus, "-")):
                points.append(SingularPoint(
                    id=point_id, r=1,
                    branches=[Branch(vertex=sheet(a, sign)), Branch(vertex=sheet(b, sign))],
                ))
            point_map.update({plus: minus, minus: plus})

        curve = CurveGraph(vertices=vertices, points=points)
        involution = DecoratedInvolution(
            vertex_map=vertex_map,
            point_map=point_map,
            fixed_vertices={
                c: FixedVertexData(kind=VertexAction.NONTRIVIAL, quotient_genus=0, smooth_fixed=smooth_fixed[c])
                for c in data.components if not split[c]
            },
            fixed_points=fixed_points,
        )
        report = validate_involution(curve, involution)
        if not report.valid:
            raise InvalidCoverDataError("Deck involution is inconsistent", report.reasons)
        if not is_connected(curve):
            raise InvalidCoverDataError("The double cover is disconnected")
        genus = -euler_characteristic(data)
        if arithmetic_genus(curve) != genus:
            raise InvalidCoverDataError(
                f"Cover has genus {arithmetic_genus(curve)} but chi(L) gives {genus}"
            )
        logger.debug(f"Built cover of genus {genus} with {len(vertices)} components")
        return CoverResult(curve=curve, involution=involution, genus=genus)


def build_cover(data: CoverData, r: int) -> CoverResult:
    return CoverBuilder(r).build(data)


def extract_cover_data(curve: CurveGraph, inv: DecoratedInvolution) -> CoverData:
    """Read (Z, L, i) off the quotient of a hyperelliptic curve graph."""
    report = quotient(curve, inv)
    if not report.is_hyperelliptic:
        raise NotHyperellipticError(
            f"Quotient has genus {report.quotient_genus} and types {[p.r for p in report.quotient_graph.points]}"
        )
    quotient_graph = report.quotient_graph
    components = quotient_graph.vertex_ids
    case_of = {img.image: img.case for img in report.point_images if img.image is not None}

    nodes, node_orders = [], {}
    for point in quotient_graph.points:
        case = case_of[point.id]
        a, b = point.vertices
        nodes.append(TwistedNode(id=point.id, ends=(a, b), stacky=case == FiberCase.N3))
        node_orders[point.id] = (1, 1) if case == FiberCase.N2 else (0, 0)

    smooth = {c: [] for c in components}
    for img in report.point_images:
        if img.case == FiberCase.S2:
            point = curve.point(img.point)
            smooth[report.vertex_images[point.vertices[0]]].append(point.r + 1)
    for v, decoration in inv.fixed_vertices.items():
        if decoration.kind == VertexAction.NONTRIVIAL:
            smooth[report.vertex_images[v]] += [1] * decoration.smooth_fixed

    deg2L = {}
    for c in components:
        preimage = [v for v in curve.vertex_ids if report.vertex_images[v] == c]
        stacky = sum(1 for n in nodes if n.stacky and c in n.ends)
        deg2L[c] = stacky - 2 - 2 * genus_formula(induced_subgraph(curve, preimage))

    data = CoverData(
        components=components,
        nodes=nodes,
        deg2L=deg2L,
        smooth_orders={c: sorted(orders) for c, orders in smooth.items() if orders},
        node_orders=node_orders,
    )
    problems = structural_problems(data)
    if problems:
        raise BijectionError(f"Extracted cover data is inconsistent: {problems}")
    return data
