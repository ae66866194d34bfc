import pytest

from hyperstack.models import CoverData, CurveGraph, DecoratedInvolution


def make_graph(vertices, points=(), markings=()):
    """Shorthand: vertices as {id: genus}, points as (id, r, [vertex, ...])."""
    return CurveGraph.model_validate({
        "vertices": [{"id": v, "geom_genus": g} for v, g in vertices.items()],
        "points": [
            {"id": p, "r": r, "branches": [{"vertex": w} for w in ends]} for p, r, ends in points
        ],
        "markings": [{"id": m, "vertex": w} for m, w in markings],
    })


def nontrivial(smooth_fixed: int) -> dict:
    return {"kind": "NONTRIVIAL", "quotient_genus": 0, "smooth_fixed": smooth_fixed}


@pytest.fixture
def two_elliptic_tails():
    return make_graph({"v1": 1, "v2": 1}, [("p", 1, ["v1", "v2"])])


@pytest.fixture
def two_tails_involution():
    return DecoratedInvolution.model_validate({
        "vertex_map": {"v1": "v1", "v2": "v2"},
        "point_map": {"p": "p"},
        "fixed_vertices": {"v1": nontrivial(3), "v2": nontrivial(3)},
        "fixed_points": {"p": "c2"},
    })


@pytest.fixture
def banana3():
    return make_graph({"u": 0, "w": 0}, [(f"q{i}", 1, ["u", "w"]) for i in range(3)])


@pytest.fixture
def banana3_involution():
    return DecoratedInvolution.model_validate({
        "vertex_map": {"u": "w", "w": "u"},
        "fixed_points": {f"q{i}": "c1" for i in range(3)},
    })


@pytest.fixture
def banana4():
    return make_graph({"u": 0, "w": 0}, [(f"q{i}", 1, ["u", "w"]) for i in range(4)])


@pytest.fixture
def banana4_involution():
    return DecoratedInvolution.model_validate({
        "vertex_map": {"u": "w", "w": "u"},
        "fixed_points": {f"q{i}": "c1" for i in range(4)},
    })


@pytest.fixture
def smooth_genus2():
    return make_graph({"c": 2})


@pytest.fixture
def smooth_genus3():
    return make_graph({"c": 3})


@pytest.fixture
def node_and_tacnode():
    """Two lines meeting in a node and a tacnode: genus 2."""
    return make_graph({"u": 0, "w": 0}, [("n", 1, ["u", "w"]), ("t", 3, ["u", "w"])])


@pytest.fixture
def three_tails():
    return make_graph(
        {"c": 0, "t1": 1, "t2": 1, "t3": 1},
        [(f"q{i}", 1, ["c", f"t{i}"]) for i in (1, 2, 3)],
    )


@pytest.fixture
def two_bridges():
    """Exchanged lines joined by a node, with two elliptic tails bridging them: genus 4."""
    return make_graph(
        {"g1": 0, "g2": 0, "d1": 1, "d2": 1},
        [
            ("q", 1, ["g1", "g2"]),
            ("a1", 1, ["g1", "d1"]), ("b1", 1, ["g2", "d1"]),
            ("a2", 1, ["g1", "d2"]), ("b2", 1, ["g2", "d2"]),
        ],
    )


@pytest.fixture
def two_bridges_involution():
    return DecoratedInvolution.model_validate({
        "vertex_map": {"g1": "g2", "g2": "g1", "d1": "d1", "d2": "d2"},
        "point_map": {"q": "q", "a1": "b1", "b1": "a1", "a2": "b2", "b2": "a2"},
        "fixed_vertices": {"d1": nontrivial(4), "d2": nontrivial(4)},
        "fixed_points": {"q": "c1"},
    })


@pytest.fixture
def pgl2_generic_cover():
    return CoverData.model_validate({
        "components": ["Z"], "deg2L": {"Z": -8}, "smooth_orders": {"Z": [2, 2, 2, 2]},
    })


@pytest.fixture
def pgl2_special_cover():
    return CoverData.model_validate({
        "components": ["Z"], "deg2L": {"Z": -8}, "smooth_orders": {"Z": [4, 2, 2]},
    })


@pytest.fixture
def stacky_cover():
    """Two lines glued at a stacky node; builds the two elliptic tails."""
    return CoverData.model_validate({
        "components": ["X", "Y"],
        "nodes": [{"id": "n", "ends": ["X", "Y"], "stacky": True}],
        "deg2L": {"X": -3, "Y": -3},
        "smooth_orders": {"X": [1, 1, 1], "Y": [1, 1, 1]},
        "node_orders": {"n": [0, 0]},
    })


@pytest.fixture
def tacnode_cover():
    return CoverData.model_validate({
        "components": ["X", "Y"],
        "nodes": [{"id": "n", "ends": ["X", "Y"], "stacky": False}],
        "deg2L": {"X": -4, "Y": -4},
        "smooth_orders": {"X": [1, 1, 1], "Y": [1, 1, 1]},
        "node_orders": {"n": [1, 1]},
    })
