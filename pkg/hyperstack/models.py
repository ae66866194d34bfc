from enum import Enum
from typing import Literal, Optional, Union

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

INFINITE_COMPONENT = "INFINITE_COMPONENT"


class InvolutionTag(str, Enum):
    """Conjugacy classes of non-trivial involutions of an A_r singularity."""
    A = "a"
    B1 = "b1"
    B2 = "b2"
    B3 = "b3"
    C1 = "c1"
    C2 = "c2"
    C3 = "c3"


class BranchAction(str, Enum):
    """How a local involution acts on the branches of the singularity."""
    UNIBRANCH = "UNIBRANCH"
    SWAP = "SWAP"
    FIX = "FIX"


class FiberCase(str, Enum):
    """Shape of the fibre of the quotient map over a point of a nodal quotient."""
    S1 = "s1"
    S2 = "s2"
    N1 = "n1"
    N2 = "n2"
    N3 = "n3"


class VertexAction(str, Enum):
    IDENTITY = "IDENTITY"
    NONTRIVIAL = "NONTRIVIAL"


class CheckStatus(str, Enum):
    """Possible outcomes of a validation check."""
    PASS = "PASS"
    FAIL = "FAIL"
    WARNING = "WARNING"


class CheckResult(BaseModel):
    """Result of an individual validation check."""
    check_name: str = Field(..., description="Name of the check performed")
    status: CheckStatus = Field(..., description="Outcome of the check")
    message: str = Field(..., description="Detail message explaining the outcome")


class ValidationReport(BaseModel):
    """Aggregate of named checks; valid when none of them failed."""
    valid: bool = Field(..., description="True when no check failed")
    checks: list[CheckResult] = Field(default_factory=list, description="All check results")

    @classmethod
    def from_checks(cls, checks: list[CheckResult]) -> "ValidationReport":
        return cls(valid=all(c.status != CheckStatus.FAIL for c in checks), checks=checks)

    @property
    def reasons(self) -> list[str]:
        return [c.message for c in self.checks if c.status == CheckStatus.FAIL]


# Local singularity theory

class SingularityType(BaseModel):
    """An A_r singularity, y^2 = x^(r+1); A_0 is a smooth point."""
    model_config = ConfigDict(frozen=True)

    r: int = Field(..., ge=0, description="Index of the A_r singularity")

    @property
    def branch_count(self) -> int:
        return 1 if self.r % 2 == 0 else 2

    @property
    def delta(self) -> int:
        return (self.r + 1) // 2

    @property
    def conductor_degrees(self) -> list[int]:
        if self.r % 2 == 0:
            return [self.r]
        return [(self.r + 1) // 2, (self.r + 1) // 2]


class InvolutionClass(BaseModel):
    """A local involution class attached to the singularity index it acts on."""
    model_config = ConfigDict(frozen=True)

    tag: InvolutionTag = Field(..., description="Class label")
    r: int = Field(..., ge=0, description="Index of the singularity")


class LocalQuotient(BaseModel):
    """Invariant subalgebra data of a local involution."""
    model_config = ConfigDict(frozen=True)

    quotient_type: SingularityType = Field(..., description="Singularity of the quotient")
    flat: bool = Field(..., description="Whether the ring is flat over the invariants")
    fixed_length: Union[int, Literal["INFINITE_COMPONENT"]] = Field(
        ..., description="Length of the fixed locus, or INFINITE_COMPONENT"
    )
    fixed_is_cartier: bool = Field(..., description="Whether the fixed locus is a Cartier divisor")
    branch_action: BranchAction = Field(..., description="Action on the branches")


# Curve graphs

class Vertex(BaseModel):
    """An irreducible component, decorated with the genus of its normalization."""
    model_config = ConfigDict(frozen=True)

    id: str = Field(..., description="Component id")
    geom_genus: int = Field(0, ge=0, description="Geometric genus of the component")


class Branch(BaseModel):
    model_config = ConfigDict(frozen=True)

    vertex: str = Field(..., description="Component carrying this branch")


class SingularPoint(BaseModel):
    """An A_r point (r >= 1) with one branch incidence per analytic branch."""
    model_config = ConfigDict(frozen=True)

    id: str = Field(..., description="Point id")
    r: int = Field(..., ge=1, description="Index of the singularity")
    branches: list[Branch] = Field(..., description="Branch incidences")

    @model_validator(mode="after")
    def check_branch_count(self) -> "SingularPoint":
        expected = SingularityType(r=self.r).branch_count
        if len(self.branches) != expected:
            raise ValueError(
                f"Point {self.id} of type A_{self.r} needs {expected} branch(es), got {len(self.branches)}"
            )
        return self

    @property
    def sing_type(self) -> SingularityType:
        return SingularityType(r=self.r)

    @property
    def vertices(self) -> list[str]:
        return [b.vertex for b in self.branches]


class Marking(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str = Field(..., description="Marking id")
    vertex: str = Field(..., description="Component carrying the smooth marked point")


class CurveGraph(BaseModel):
    """Decorated dual graph of an A_r-prestable pointed curve."""
    model_config = ConfigDict(frozen=True)

    vertices: list[Vertex] = Field(..., min_length=1, description="Irreducible components")
    points: list[SingularPoint] = Field(default_factory=list, description="Singular points")
    markings: list[Marking] = Field(default_factory=list, description="Smooth marked points")

    @model_validator(mode="after")
    def check_references(self) -> "CurveGraph":
        vertex_ids = [v.id for v in self.vertices]
        if len(set(vertex_ids)) != len(vertex_ids):
            raise ValueError("Vertex ids must be unique")
        point_ids = [p.id for p in self.points]
        if len(set(point_ids)) != len(point_ids):
            raise ValueError("Point ids must be unique")
        marking_ids = [m.id for m in self.markings]
        if len(set(marking_ids)) != len(marking_ids):
            raise ValueError("Marking ids must be unique")
        known = set(vertex_ids)
        for point in self.points:
            missing = [v for v in point.vertices if v not in known]
            if missing:
                raise ValueError(f"Point {point.id} references unknown vertices {missing}")
        for marking in self.markings:
            if marking.vertex not in known:
                raise ValueError(f"Marking {marking.id} references unknown vertex {marking.vertex}")
        return self

    @property
    def vertex_ids(self) -> list[str]:
        return [v.id for v in self.vertices]

    def vertex(self, vertex_id: str) -> Optional[Vertex]:
        return next((v for v in self.vertices if v.id == vertex_id), None)

    def point(self, point_id: str) -> Optional[SingularPoint]:
        return next((p for p in self.points if p.id == point_id), None)

    def marking(self, marking_id: str) -> Optional[Marking]:
        return next((m for m in self.markings if m.id == marking_id), None)


class Subcurve(BaseModel):
    """A union of irreducible components, given by their vertex ids."""
    model_config = ConfigDict(frozen=True)

    vertex_subset: tuple[str, ...] = Field(..., min_length=1, description="Sorted vertex ids")

    @field_validator("vertex_subset", mode="before")
    @classmethod
    def normalize(cls, v):
        return tuple(sorted(set(v)))


# Involutions and quotients

class FixedVertexData(BaseModel):
    """Decoration of a component mapped to itself."""
    model_config = ConfigDict(frozen=True)

    kind: VertexAction = Field(..., description="IDENTITY or NONTRIVIAL action on the component")
    quotient_genus: int = Field(0, ge=0, description="Genus of the quotient of the normalization")
    smooth_fixed: int = Field(0, ge=0, description="Fixed points away from the singular points")


class DecoratedInvolution(BaseModel):
    """An order <= 2 symmetry of a curve graph with the local data fixing its quotient.

    Ids missing from ``vertex_map`` or ``point_map`` are taken to be fixed.
    """
    model_config = ConfigDict(frozen=True)

    vertex_map: dict[str, str] = Field(default_factory=dict, description="Action on components")
    point_map: dict[str, str] = Field(default_factory=dict, description="Action on singular points")
    fixed_vertices: dict[str, FixedVertexData] = Field(
        default_factory=dict, description="Decorations of the fixed components"
    )
    fixed_points: dict[str, InvolutionTag] = Field(
        default_factory=dict, description="Local class at each non-trivially fixed point"
    )

    def vertex_image(self, vertex_id: str) -> str:
        return self.vertex_map.get(vertex_id, vertex_id)

    def point_image(self, point_id: str) -> str:
        return self.point_map.get(point_id, point_id)


class PointImage(BaseModel):
    """Where an upstairs singular point lands in the quotient."""
    point: str = Field(..., description="Upstairs point id")
    image: Optional[str] = Field(None, description="Quotient point id, None over a smooth point")
    case: Optional[FiberCase] = Field(None, description="Fibre shape when the image is nodal or smooth")
    length: Optional[int] = Field(None, description="Length of the fibre over the image")
    quotient_r: int = Field(..., ge=0, description="Singularity index of the image")


class QuotientReport(BaseModel):
    quotient_graph: CurveGraph = Field(..., description="Dual graph of the quotient curve")
    vertex_images: dict[str, str] = Field(..., description="Component orbit representatives")
    point_images: list[PointImage] = Field(..., description="Fibre data for every singular point")
    quotient_genus: int = Field(..., description="Arithmetic genus of the quotient")
    is_hyperelliptic: bool = Field(..., description="Quotient is a connected nodal genus-0 curve")


class ActionSignature(BaseModel):
    """Permutations induced on components and on singular points."""
    model_config = ConfigDict(frozen=True)

    vertex_permutation: dict[str, str] = Field(..., description="Full action on components")
    point_permutation: dict[str, str] = Field(..., description="Full action on singular points")


# Cyclic-cover data

def tree_problems(components: list[str], ends: list[tuple[str, str]]) -> list[str]:
    """Reasons why the given components and node ends do not form a tree."""
    problems = []
    if len(set(components)) != len(components):
        problems.append("Component ids must be unique")
    known = set(components)
    graph = nx.MultiGraph()
    graph.add_nodes_from(components)
    for a, b in ends:
        if a not in known or b not in known:
            problems.append(f"Node ends ({a}, {b}) reference unknown components")
            continue
        if a == b:
            problems.append(f"Self-node on component {a}")
        graph.add_edge(a, b)
    if problems:
        return problems
    if components and not nx.is_connected(graph):
        problems.append("Components are not connected by the nodes")
    elif graph.number_of_edges() != len(components) - 1:
        problems.append("Nodes form a cycle")
    return problems


class TreeNode(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str = Field(..., description="Node id")
    ends: tuple[str, str] = Field(..., description="The two components meeting at the node")


class TwistedNode(TreeNode):
    stacky: bool = Field(False, description="Node carries a mu_2 stabilizer")


class TwistedTree(BaseModel):
    """A twisted genus-0 curve: rational components glued along a tree of nodes."""
    model_config = ConfigDict(frozen=True)

    components: list[str] = Field(..., min_length=1, description="Rational components")
    nodes: list[TwistedNode] = Field(default_factory=list, description="Nodes between components")

    @model_validator(mode="after")
    def check_tree(self) -> "TwistedTree":
        problems = tree_problems(self.components, [n.ends for n in self.nodes])
        if problems:
            raise ValueError("; ".join(problems))
        return self


class CoverData(BaseModel):
    """The triplet (Z, L, i) with degrees of L stored doubled.

    Only references are checked here; tree shape and degree conditions are
    reported by the cover validator.
    """
    model_config = ConfigDict(frozen=True)

    components: list[str] = Field(..., min_length=1, description="Rational components of Z")
    nodes: list[TwistedNode] = Field(default_factory=list, description="Nodes of Z")
    deg2L: dict[str, int] = Field(..., description="Twice the degree of L on each component")
    smooth_orders: dict[str, list[int]] = Field(
        default_factory=dict, description="Vanishing orders of the branch section at smooth points"
    )
    node_orders: dict[str, tuple[int, int]] = Field(
        default_factory=dict, description="Vanishing orders along the two node branches, in ends order"
    )

    @model_validator(mode="after")
    def check_keys(self) -> "CoverData":
        known = set(self.components)
        if set(self.deg2L) != known:
            raise ValueError("deg2L must give a value for every component and nothing else")
        unknown = set(self.smooth_orders) - known
        if unknown:
            raise ValueError(f"smooth_orders references unknown components {sorted(unknown)}")
        node_ids = {n.id for n in self.nodes}
        if len(node_ids) != len(self.nodes):
            raise ValueError("Node ids must be unique")
        unknown = set(self.node_orders) - node_ids
        if unknown:
            raise ValueError(f"node_orders references unknown nodes {sorted(unknown)}")
        return self

    def orders_of(self, node_id: str) -> tuple[int, int]:
        return self.node_orders.get(node_id, (0, 0))

    def smooth_of(self, component: str) -> list[int]:
        return self.smooth_orders.get(component, [])


class CoverResult(BaseModel):
    curve: CurveGraph = Field(..., description="Upstairs curve")
    involution: DecoratedInvolution = Field(..., description="Deck involution")
    genus: int = Field(..., description="Arithmetic genus of the curve")


class CoverValidationReport(ValidationReport):
    structural: list[str] = Field(default_factory=list, description="Structural problems of the data")

    @property
    def reasons(self) -> list[str]:
        return self.structural + super().reasons


# Cohomology and decompositions

class TreeBundle(BaseModel):
    """A line bundle on a tree of smooth rational curves, given by its multidegree.

    ``positions`` optionally places each node on each of its components:
    ``positions[component][node] = coordinate``.
    """
    model_config = ConfigDict(frozen=True)

    components: list[str] = Field(..., min_length=1, description="Rational components")
    nodes: list[TreeNode] = Field(default_factory=list, description="Nodes between components")
    multidegree: dict[str, int] = Field(..., description="Degree on each component")
    positions: Optional[dict[str, dict[str, int]]] = Field(
        None, description="Affine coordinates of the nodes on each component"
    )

    @model_validator(mode="after")
    def check_tree(self) -> "TreeBundle":
        problems = tree_problems(self.components, [n.ends for n in self.nodes])
        if problems:
            raise ValueError("; ".join(problems))
        if set(self.multidegree) != set(self.components):
            raise ValueError("multidegree must give a degree for every component")
        return self


class CohomologyReport(BaseModel):
    h0: int = Field(..., ge=0)
    h1: int = Field(..., ge=0)
    chi: int


class DecompositionKind(str, Enum):
    A1_SEPARATING = "A1_SEPARATING"
    EXIST_DECOMP = "EXIST_DECOMP"


class DecompositionReport(BaseModel):
    kind: DecompositionKind = Field(..., description="Which decomposition was computed")
    pieces: list[Subcurve] = Field(..., description="Pieces of the decomposition")
    genera: list[int] = Field(..., description="Arithmetic genus of each piece")
    joints: list[str] = Field(default_factory=list, description="Points where pieces are glued")
    n: Optional[int] = Field(None, description="Length of the intersection of the exchanged pair")
    m: Optional[int] = Field(None, description="Number of invariant tails")
    identity_holds: Optional[bool] = Field(None, description="Genus identity check")


class BaseLocusMarker(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["point", "vertex"]
    id: str
    type: Literal[1, 2]


class Genus1Case(str, Enum):
    A = "a"
    B = "b"
    C = "c"
    D = "d"
    INVALID = "INVALID"


class HomComponentRow(BaseModel):
    """Degrees and dimensions of Hom(Omega, L(-D)) on one quotient component."""
    component: str
    h: int = Field(..., description="Arithmetic genus of the preimage subcurve")
    n: int = Field(..., description="Nodes of the quotient on the component")
    n_flat: int = Field(..., description="Nodes over which the quotient map is flat")
    untwisted_degree: int
    untwisted_dim: int
    glued_degree: int
    glued_dim: int
    twisted_degree: int
    twisted_dim: int


class HomOmegaReport(BaseModel):
    rows: list[HomComponentRow]
    untwisted_total: int
    glued_total: int
    twisted_total: int
    piecewise_glued_total: int = Field(..., description="Glued total computed piece by piece")
    routes_agree: bool


class AuditRow(BaseModel):
    component: str
    h: int
    n: int
    degree: int = Field(..., description="Degree of Omega dual twisted by L(-D)")


class UnramifiednessAudit(BaseModel):
    certified: bool
    rows: list[AuditRow]


# Enumeration

class EnumerationSide(str, Enum):
    GRAPH = "graph"
    COVER = "cover"
    BOTH = "both"


class EnumerationQuery(BaseModel):
    model_config = ConfigDict(frozen=True)

    genus: int = Field(..., ge=2, description="Arithmetic genus")
    r_max: int = Field(..., ge=0, description="Largest singularity index allowed")
    side: EnumerationSide = Field(EnumerationSide.BOTH, description="Which presentation to enumerate")


class EnumerationReport(BaseModel):
    query: EnumerationQuery
    effective_r: int = Field(..., description="r_max after clamping to 2g+1")
    graphs: list[str] = Field(default_factory=list, description="Canonical forms of curve graphs")
    covers: list[str] = Field(default_factory=list, description="Canonical forms of cover data")
    bijection: list[tuple[str, str]] = Field(
        default_factory=list, description="Matching (cover, graph) canonical forms"
    )
    census: list[dict] = Field(default_factory=list, description="Counts per shape")
