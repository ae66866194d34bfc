"""Local theory of A_r singularities: invariants, involution classes and their quotients.

Everything here is a table lookup. The classes are the normal forms of
involutions of k[[x,y]]/(y^2 - x^(r+1)) up to conjugation:

* r even: only (a), y -> -y;
* r = 2k-1 >= 3: (b1) y -> -y, and two further classes (b2), (b3) that are
  told apart by their quotient, A_(k-1) flat versus A_k non-flat;
* r = 1: (c1) exchanging the branches, (c2) fixing both branches,
  (c3) fixing one branch pointwise.
"""
from typing import Optional

from hyperstack.exceptions import ClassNotApplicableError, InvalidCombinationError
from hyperstack.models import (
    INFINITE_COMPONENT,
    BranchAction,
    InvolutionClass,
    InvolutionTag,
    LocalQuotient,
    SingularityType,
)

B_TAGS = (InvolutionTag.B1, InvolutionTag.B2, InvolutionTag.B3)
C_TAGS = (InvolutionTag.C1, InvolutionTag.C2, InvolutionTag.C3)


def singularity(r: int) -> SingularityType:
    return SingularityType(r=r)


def classify_involutions(r: int) -> set[InvolutionClass]:
    """All involution classes acting on A_r. A smooth point only has the class (a)."""
    singularity(r)
    if r % 2 == 0:
        tags = (InvolutionTag.A,)
    elif r == 1:
        tags = C_TAGS
    else:
        tags = B_TAGS
    return {InvolutionClass(tag=tag, r=r) for tag in tags}


def is_applicable(r: int, tag: InvolutionTag) -> bool:
    return InvolutionClass(tag=InvolutionTag(tag), r=r) in classify_involutions(r)


def _require(r: int, tag: InvolutionTag) -> InvolutionTag:
    tag = InvolutionTag(tag)
    if not is_applicable(r, tag):
        raise ClassNotApplicableError(f"Class {tag.value} does not act on A_{r}")
    return tag


def branch_action(r: int, tag: InvolutionTag) -> BranchAction:
    """Whether the class swaps or fixes the two branches of an odd singularity."""
    tag = _require(r, tag)
    if tag == InvolutionTag.A:
        return BranchAction.UNIBRANCH
    if tag in (InvolutionTag.B1, InvolutionTag.C1):
        return BranchAction.SWAP
    if tag in (InvolutionTag.C2, InvolutionTag.C3):
        return BranchAction.FIX
    k = (r + 1) // 2
    if tag == InvolutionTag.B2:
        return BranchAction.FIX if k % 2 == 0 else BranchAction.SWAP
    return BranchAction.FIX if k % 2 == 1 else BranchAction.SWAP


def quotient_local(r: int, tag: InvolutionTag) -> LocalQuotient:
    """Row of the invariant-subalgebra table for the class ``tag`` acting on A_r."""
    tag = _require(r, tag)
    action = branch_action(r, tag)
    if tag == InvolutionTag.A:
        return LocalQuotient(
            quotient_type=singularity(0), flat=True, fixed_length=r + 1,
            fixed_is_cartier=True, branch_action=action,
        )
    if tag == InvolutionTag.B1:
        return LocalQuotient(
            quotient_type=singularity(0), flat=True, fixed_length=r + 1,
            fixed_is_cartier=True, branch_action=action,
        )
    if tag == InvolutionTag.C1:
        return LocalQuotient(
            quotient_type=singularity(0), flat=True, fixed_length=2,
            fixed_is_cartier=True, branch_action=action,
        )
    k = (r + 1) // 2
    if tag == InvolutionTag.B2:
        return LocalQuotient(
            quotient_type=singularity(k - 1), flat=True, fixed_length=2,
            fixed_is_cartier=True, branch_action=action,
        )
    if tag == InvolutionTag.B3:
        return LocalQuotient(
            quotient_type=singularity(k), flat=False, fixed_length=1,
            fixed_is_cartier=False, branch_action=action,
        )
    if tag == InvolutionTag.C2:
        return LocalQuotient(
            quotient_type=singularity(1), flat=False, fixed_length=1,
            fixed_is_cartier=False, branch_action=action,
        )
    # c3 fixes a whole branch, so the fixed locus is a component
    return LocalQuotient(
        quotient_type=singularity(1), flat=True, fixed_length=INFINITE_COMPONENT,
        fixed_is_cartier=False, branch_action=action,
    )


def fiber_length(r: int, tag: InvolutionTag) -> Optional[int]:
    """Length of the fibre of the local quotient map over the image point.

    A flat double cover has fibres of length 2. Over the node of a c2 quotient
    the fibre needs the three generators 1, x, y and has length 3. The other
    non-flat class, b3, has an A_k image that is neither a node nor smooth, so
    its fibre is not tracked and the result is None, as it is for c3.
    """
    local = quotient_local(r, tag)
    if local.fixed_length == INFINITE_COMPONENT:
        return None
    if local.flat:
        return 2
    return 3 if InvolutionTag(tag) == InvolutionTag.C2 else None


def genus_drop(r: int, separating: bool) -> int:
    """Genus lost by normalizing one A_r point."""
    singularity(r)
    h, odd = divmod(r, 2)
    if not odd:
        if separating:
            raise InvalidCombinationError(f"A_{r} is unibranch and cannot separate")
        return h
    return h if separating else h + 1
