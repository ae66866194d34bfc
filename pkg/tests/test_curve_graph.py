import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from conftest import make_graph
from hyperstack.curve_graph import (
    arithmetic_genus,
    complement,
    genus_by_normalization,
    genus_formula,
    intersection_length,
    is_stable,
    omega_degree,
    partial_normalization,
    separating_points,
    subcurve_genus,
)
from hyperstack.exceptions import (
    DisconnectedGraphError,
    ImproperSubcurveError,
    InvalidCombinationError,
    UnknownVertexError,
)
from hyperstack.models import Subcurve


@st.composite
def connected_graphs(draw, max_size=5, tree_r=(1, 3, 5)):
    """Random connected graphs: a spanning tree of odd points plus extra points."""
    size = draw(st.integers(1, max_size))
    vertices = {f"v{i}": draw(st.integers(0, 2)) for i in range(size)}
    points = []
    for i in range(1, size):
        parent = draw(st.integers(0, i - 1))
        r = draw(st.sampled_from(tree_r))
        points.append((f"t{i}", r, [f"v{parent}", f"v{i}"]))
    for j in range(draw(st.integers(0, 4))):
        r = draw(st.integers(1, 9))
        first = draw(st.integers(0, size - 1))
        if r % 2:
            ends = [f"v{first}", f"v{draw(st.integers(0, size - 1))}"]
        else:
            ends = [f"v{first}"]
        points.append((f"x{j}", r, ends))
    return make_graph(vertices, points)


def test_genus_of_reference_curves(two_elliptic_tails, banana4, node_and_tacnode):
    assert arithmetic_genus(two_elliptic_tails) == 2
    assert arithmetic_genus(banana4) == 3
    assert arithmetic_genus(node_and_tacnode) == 2


def test_cuspidal_and_nodal_rational_curves():
    assert arithmetic_genus(make_graph({"c": 0}, [("k", 2, ["c"])])) == 1
    assert arithmetic_genus(make_graph({"c": 0}, [("n", 1, ["c", "c"])])) == 1
    assert arithmetic_genus(make_graph({"c": 1}, [("t", 3, ["c", "c"]), ("k", 4, ["c"])])) == 5


def test_disconnected_graph_has_no_genus():
    lines = make_graph({"a": 0, "b": 0})
    with pytest.raises(DisconnectedGraphError):
        arithmetic_genus(lines)
    assert genus_formula(lines) == -1


@given(connected_graphs(), st.randoms())
@settings(max_examples=200, deadline=None)
def test_genus_matches_normalization(graph, rnd):
    order = [p.id for p in graph.points]
    rnd.shuffle(order)
    assert genus_by_normalization(graph, order) == arithmetic_genus(graph)


@given(connected_graphs())
@settings(max_examples=200, deadline=None)
def test_omega_degrees_add_up(graph):
    total = sum(omega_degree(graph, v) for v in graph.vertex_ids)
    assert total == 2 * arithmetic_genus(graph) - 2


@pytest.mark.slow
@given(connected_graphs(max_size=8, tree_r=(1, 3, 5, 7, 9)), st.randoms())
@settings(max_examples=10_000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_genus_and_omega_degrees_on_large_graphs(graph, rnd):
    order = [p.id for p in graph.points]
    rnd.shuffle(order)
    genus = arithmetic_genus(graph)
    assert genus_by_normalization(graph, order) == genus
    assert sum(omega_degree(graph, v) for v in graph.vertex_ids) == 2 * genus - 2


@given(connected_graphs())
@settings(max_examples=100, deadline=None)
def test_separating_points_are_odd(graph):
    for point_id in separating_points(graph):
        assert graph.point(point_id).r % 2 == 1


@given(connected_graphs())
@settings(max_examples=100, deadline=None)
def test_stability_saturates(graph):
    g = arithmetic_genus(graph)
    top = is_stable(graph, 2 * g + 1).valid
    assert is_stable(graph, 2 * g + 10).valid == top


def test_normalization_order_must_be_complete(two_elliptic_tails):
    with pytest.raises(InvalidCombinationError):
        genus_by_normalization(two_elliptic_tails, [])


def test_omega_degree(two_elliptic_tails):
    assert omega_degree(two_elliptic_tails, "v1") == 1
    marked = make_graph({"v1": 1, "v2": 1}, [("p", 1, ["v1", "v2"])], [("m", "v1")])
    assert omega_degree(marked, "v1", marked=True) == 2
    assert omega_degree(make_graph({"c": 0}, [("k", 4, ["c"])]), "c") == 2
    with pytest.raises(UnknownVertexError):
        omega_degree(two_elliptic_tails, "nope")


def test_stability(two_elliptic_tails, node_and_tacnode):
    assert is_stable(two_elliptic_tails, 1).valid
    report = is_stable(node_and_tacnode, 1)
    assert not report.valid
    assert any("A_3" in reason for reason in report.reasons)
    assert is_stable(node_and_tacnode, 3).valid


def test_rational_tail_is_unstable():
    graph = make_graph({"e": 1, "r": 0}, [("p", 1, ["e", "r"])])
    report = is_stable(graph, 5)
    assert not report.valid
    assert any("Vertex r" in reason for reason in report.reasons)


def test_separating_points(two_elliptic_tails, banana4, three_tails):
    assert separating_points(two_elliptic_tails) == {"p"}
    assert separating_points(banana4) == set()
    assert separating_points(three_tails) == {"q1", "q2", "q3"}


def test_subcurves(three_tails):
    tails = Subcurve(vertex_subset=["t1", "t2", "t3"])
    assert complement(three_tails, tails).vertex_subset == ("c",)
    assert intersection_length(three_tails, tails, Subcurve(vertex_subset=["c"])) == 3
    assert subcurve_genus(three_tails, tails) == 1
    with pytest.raises(ImproperSubcurveError):
        complement(three_tails, Subcurve(vertex_subset=["c", "t1", "t2", "t3"]))
    with pytest.raises(ImproperSubcurveError):
        intersection_length(three_tails, tails, Subcurve(vertex_subset=["t1"]))
    with pytest.raises(ValidationError):
        Subcurve(vertex_subset=[])


def test_tacnode_intersection_length(node_and_tacnode):
    u, w = Subcurve(vertex_subset=["u"]), Subcurve(vertex_subset=["w"])
    assert intersection_length(node_and_tacnode, u, w) == 3


def test_partial_normalization(two_elliptic_tails, banana4):
    pieces = partial_normalization(two_elliptic_tails, "p")
    assert [p.vertex_ids for p in pieces] == [["v1"], ["v2"]]
    assert len(partial_normalization(banana4, "q0")) == 1


def test_graph_validation():
    with pytest.raises(ValidationError):
        make_graph({"a": 0}, [("p", 2, ["a", "a"])])
    with pytest.raises(ValidationError):
        make_graph({"a": 0}, [("p", 1, ["a", "b"])])
    with pytest.raises(ValidationError):
        make_graph({"a": 0, "b": 0}, [("a", 1, ["a", "b"]), ("a", 1, ["a", "b"])])
