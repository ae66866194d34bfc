import pytest

from hyperstack.canonical import canonical_cover, canonical_graph
from hyperstack.cover import (
    branch_count,
    build_cover,
    component_genus,
    euler_characteristic,
    extract_cover_data,
    validate_cover_data,
)
from hyperstack.curve_graph import arithmetic_genus, is_stable
from hyperstack.exceptions import InvalidCoverDataError, NotHyperellipticError
from hyperstack.involution import find_hyperelliptic_involutions, validate_involution
from hyperstack.models import CoverData, DecoratedInvolution


def single_line(deg2L, orders):
    return CoverData.model_validate({
        "components": ["Z"], "deg2L": {"Z": deg2L}, "smooth_orders": {"Z": orders},
    })


@pytest.mark.parametrize("g", [2, 3, 4])
def test_smooth_hyperelliptic_curves(g):
    data = single_line(-2 * g - 2, [1] * (2 * g + 2))
    for r in (0, 1, 5):
        assert validate_cover_data(data, g, r).valid
    assert euler_characteristic(data) == -g
    result = build_cover(data, 0)
    assert result.genus == g
    assert result.curve.vertices[0].geom_genus == g
    assert result.curve.points == []


def test_euler_characteristic(stacky_cover, tacnode_cover, pgl2_generic_cover):
    assert euler_characteristic(stacky_cover) == -2
    assert euler_characteristic(tacnode_cover) == -3
    assert euler_characteristic(pgl2_generic_cover) == -3


def test_order_above_r_plus_one_fails_b3():
    data = single_line(-8, [3, 1, 1, 1, 1, 1])
    report = validate_cover_data(data, 3, 1)
    assert not report.valid
    assert any(reason.startswith("(b3)") for reason in report.reasons)
    assert validate_cover_data(data, 3, 2).valid


def test_rational_component_with_one_node_fails_c1():
    data = CoverData.model_validate({
        "components": ["X", "Y"],
        "nodes": [{"id": "n", "ends": ["X", "Y"]}],
        "deg2L": {"X": -2, "Y": -6},
        "smooth_orders": {"X": [1, 1], "Y": [1, 1, 1, 1, 1, 1]},
    })
    assert component_genus(data, "X") == 0
    report = validate_cover_data(data, 3, 1)
    assert not report.valid
    assert any(reason.startswith("(c1)") for reason in report.reasons)
    assert not is_stable(build_cover(data, 1).curve, 1).valid


def test_structural_problems_are_reported():
    data = single_line(-7, [1] * 7)
    report = validate_cover_data(data, 3, 3)
    assert not report.valid
    assert report.structural
    unbalanced = single_line(-8, [1, 1])
    assert any("balance" in s for s in validate_cover_data(unbalanced, 3, 3).structural)


def test_tacnode_needs_r3(tacnode_cover):
    assert validate_cover_data(tacnode_cover, 3, 3).valid
    report = validate_cover_data(tacnode_cover, 3, 1)
    assert any(reason.startswith("(b2)") for reason in report.reasons)
    with pytest.raises(InvalidCoverDataError):
        build_cover(tacnode_cover, 1)


def test_stacky_cover_builds_two_elliptic_tails(stacky_cover, two_elliptic_tails):
    assert validate_cover_data(stacky_cover, 2, 1).valid
    assert branch_count(stacky_cover, "X") == 4
    result = build_cover(stacky_cover, 1)
    assert result.genus == 2
    assert canonical_graph(result.curve) == canonical_graph(two_elliptic_tails)
    assert validate_involution(result.curve, result.involution).valid


def test_tacnode_cover(tacnode_cover):
    result = build_cover(tacnode_cover, 3)
    assert result.genus == 3
    assert sorted(v.geom_genus for v in result.curve.vertices) == [1, 1]
    [point] = result.curve.points
    assert point.r == 3


def test_generic_pgl2_member_is_the_banana(pgl2_generic_cover, banana4):
    result = build_cover(pgl2_generic_cover, 1)
    assert result.genus == 3
    assert [p.r for p in result.curve.points] == [1, 1, 1, 1]
    assert canonical_graph(result.curve) == canonical_graph(banana4)


def test_special_pgl2_member(pgl2_special_cover):
    assert not validate_cover_data(pgl2_special_cover, 3, 1).valid
    result = build_cover(pgl2_special_cover, 3)
    assert result.genus == 3
    assert sorted(p.r for p in result.curve.points) == [1, 1, 3]
    assert is_stable(result.curve, 3).valid


def test_node_and_tacnode_cover(node_and_tacnode):
    [inv] = find_hyperelliptic_involutions(node_and_tacnode)
    data = extract_cover_data(node_and_tacnode, inv)
    assert data.deg2L == {"u": -6}
    assert data.smooth_orders == {"u": [2, 4]}


@pytest.mark.parametrize("fixture", ["stacky_cover", "tacnode_cover", "pgl2_generic_cover", "pgl2_special_cover"])
def test_round_trip_from_covers(fixture, request):
    data = request.getfixturevalue(fixture)
    result = build_cover(data, 3)
    assert arithmetic_genus(result.curve) == -euler_characteristic(data)
    back = extract_cover_data(result.curve, result.involution)
    assert canonical_cover(back) == canonical_cover(data)


def test_round_trip_from_curves(two_elliptic_tails, two_tails_involution, banana4, banana4_involution):
    for curve, inv in ((two_elliptic_tails, two_tails_involution), (banana4, banana4_involution)):
        data = extract_cover_data(curve, inv)
        rebuilt = build_cover(data, 1)
        assert canonical_graph(rebuilt.curve) == canonical_graph(curve)


def test_extracted_two_tails_data(two_elliptic_tails, two_tails_involution):
    data = extract_cover_data(two_elliptic_tails, two_tails_involution)
    [node] = data.nodes
    assert node.stacky
    assert data.deg2L == {"v1": -3, "v2": -3}
    assert data.smooth_orders == {"v1": [1, 1, 1], "v2": [1, 1, 1]}


def test_extraction_needs_a_hyperelliptic_quotient(banana4):
    inv = DecoratedInvolution.model_validate({
        "point_map": {"q0": "q1", "q1": "q0", "q2": "q3", "q3": "q2"},
        "fixed_vertices": {
            v: {"kind": "NONTRIVIAL", "quotient_genus": 0, "smooth_fixed": 2} for v in ("u", "w")
        },
    })
    with pytest.raises(NotHyperellipticError):
        extract_cover_data(banana4, inv)


def test_disconnected_split_cover_is_rejected():
    data = single_line(0, [])
    with pytest.raises(InvalidCoverDataError):
        build_cover(data, 1)

