import pytest

from hyperstack.exceptions import ClassNotApplicableError, InvalidCombinationError
from hyperstack.local_sing import (
    branch_action,
    classify_involutions,
    fiber_length,
    genus_drop,
    quotient_local,
    singularity,
)
from hyperstack.models import INFINITE_COMPONENT, BranchAction, InvolutionTag


def tags(r):
    return {c.tag for c in classify_involutions(r)}


def test_classes_per_singularity():
    assert tags(0) == {InvolutionTag.A}
    assert tags(2) == {InvolutionTag.A}
    assert tags(1) == {InvolutionTag.C1, InvolutionTag.C2, InvolutionTag.C3}
    assert tags(5) == {InvolutionTag.B1, InvolutionTag.B2, InvolutionTag.B3}


def test_singularity_invariants():
    assert singularity(0).conductor_degrees == [0]
    assert singularity(4).branch_count == 1
    assert singularity(4).delta == 2
    assert singularity(5).conductor_degrees == [3, 3]
    for r in range(10):
        s = singularity(r)
        assert sum(s.conductor_degrees) == 2 * s.delta


@pytest.mark.parametrize("r, tag, expected", [
    (4, "a", (0, True, 5, True)),
    (5, "b1", (0, True, 6, True)),
    (5, "b2", (2, True, 2, True)),
    (5, "b3", (3, False, 1, False)),
    (1, "c1", (0, True, 2, True)),
    (1, "c2", (1, False, 1, False)),
    (1, "c3", (1, True, INFINITE_COMPONENT, False)),
])
def test_quotient_table(r, tag, expected):
    row = quotient_local(r, tag)
    assert (row.quotient_type.r, row.flat, row.fixed_length, row.fixed_is_cartier) == expected


def test_smooth_point_quotient():
    row = quotient_local(0, "a")
    assert (row.quotient_type.r, row.flat, row.fixed_length, row.fixed_is_cartier) == (0, True, 1, True)


def test_b_rows_are_distinct():
    for r in (3, 5, 7, 9):
        rows = [quotient_local(r, t).model_dump_json() for t in ("b1", "b2", "b3")]
        assert len(set(rows)) == 3


def test_c2_and_c3_share_quotient_type():
    assert quotient_local(1, "c2").quotient_type == quotient_local(1, "c3").quotient_type
    assert quotient_local(1, "c2").fixed_length != quotient_local(1, "c3").fixed_length


def test_quotient_never_worse():
    for r in range(10):
        for c in classify_involutions(r):
            assert quotient_local(r, c.tag).quotient_type.r <= r


def test_not_applicable():
    with pytest.raises(ClassNotApplicableError):
        quotient_local(2, "c1")
    with pytest.raises(ClassNotApplicableError):
        quotient_local(1, "b1")
    with pytest.raises(ClassNotApplicableError):
        quotient_local(3, "a")


def test_branch_action_parity():
    assert branch_action(3, "b2") == BranchAction.FIX
    assert branch_action(3, "b3") == BranchAction.SWAP
    assert branch_action(5, "b2") == BranchAction.SWAP
    assert branch_action(5, "b3") == BranchAction.FIX
    for r in (1, 3, 5, 7, 9):
        for c in classify_involutions(r):
            action = branch_action(r, c.tag)
            quotient_r = quotient_local(r, c.tag).quotient_type.r
            if action == BranchAction.FIX:
                assert quotient_r % 2 == 1
            if action == BranchAction.SWAP:
                assert quotient_r % 2 == 0


def test_fiber_lengths():
    assert fiber_length(1, "c2") == 3
    assert fiber_length(1, "c1") == 2
    assert fiber_length(3, "b2") == 2
    assert fiber_length(1, "c3") is None


@pytest.mark.parametrize("r", [1, 3, 5, 7, 9])
def test_only_c2_has_fibre_length_three(r):
    lengths = {c.tag: fiber_length(r, c.tag) for c in classify_involutions(r)}
    assert [tag for tag, length in lengths.items() if length == 3] == ([InvolutionTag.C2] if r == 1 else [])
    if r > 1:
        assert lengths[InvolutionTag.B3] is None


def test_genus_drop():
    assert genus_drop(2, False) == 1
    assert genus_drop(1, False) == 1
    assert genus_drop(1, True) == 0
    assert genus_drop(3, True) == 1
    assert genus_drop(3, False) == 2
    for r in range(1, 10):
        assert genus_drop(r, False) == singularity(r).delta
    with pytest.raises(InvalidCombinationError):
        genus_drop(4, True)
