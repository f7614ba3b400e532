import numpy as np
import pytest
from sympy.combinatorics.named_groups import AlternatingGroup, DihedralGroup, SymmetricGroup

from brnr.base import ActionNotHomomorphic, NoIdentity, NotAPermutation, NotAssociative, NotNormal, OrderLimitExceeded
from brnr.catalog import (
    abelian_group,
    alternating_group,
    dihedral_group,
    heisenberg_group,
    named_group,
    quaternion_group,
    semidihedral_group,
    symmetric_group,
)
from brnr.groups import (
    SubgroupKind,
    abelian_decomposition,
    abelian_invariants,
    action_from_generators,
    all_subgroups,
    classify_subgroup,
    conjugacy_classes,
    cyclic_group,
    direct_product,
    group_from_permutations,
    group_from_table,
    quotient_by_normal,
    semidirect_product,
    subgroups_up_to_conjugacy,
    verify_group,
)

# smallest loop that is not a group
LOOP_5 = [
    [0, 1, 2, 3, 4],
    [1, 0, 3, 4, 2],
    [2, 4, 0, 1, 3],
    [3, 2, 4, 0, 1],
    [4, 3, 1, 2, 0],
]


def test_table_with_identity_elsewhere_is_relabelled():
    G = group_from_table([[1, 0], [0, 1]])
    assert G.order == 2
    assert list(G.table[0]) == [0, 1]


def test_table_without_identity_is_rejected():
    with pytest.raises(NoIdentity):
        group_from_table([[0, 0], [0, 0]])


def test_non_associative_loop_is_rejected():
    with pytest.raises(NotAssociative) as info:
        group_from_table(LOOP_5)
    assert len(info.value.witness["triple"]) == 3


def test_permutation_generators_must_be_bijections():
    with pytest.raises(NotAPermutation):
        group_from_permutations(3, [[0, 0, 1]])


def test_permutation_closure_respects_order_cap():
    with pytest.raises(OrderLimitExceeded):
        group_from_permutations(5, [[1, 0, 2, 3, 4], [1, 2, 3, 4, 0]], max_order=50)


@pytest.mark.parametrize(
    "ours, theirs",
    [
        (symmetric_group(4), SymmetricGroup(4)),
        (alternating_group(4), AlternatingGroup(4)),
        (dihedral_group(4), DihedralGroup(4)),
        (dihedral_group(6), DihedralGroup(6)),
    ],
)
def test_named_groups_match_sympy(ours, theirs):
    assert ours.order == theirs.order()
    assert ours.is_abelian == theirs.is_abelian
    assert len(conjugacy_classes(ours)) == len(theirs.conjugacy_classes())


@pytest.mark.parametrize("G", [dihedral_group(5), quaternion_group(8), semidihedral_group(16), heisenberg_group(3)])
def test_builders_produce_groups(G):
    verify_group(G)


def test_quaternion_group_has_one_involution():
    Q8 = quaternion_group(8)
    assert not Q8.is_abelian
    assert Q8.exponent == 4
    assert int(np.count_nonzero(Q8.element_orders == 2)) == 1


def test_heisenberg_group_has_exponent_p():
    H = heisenberg_group(3)
    assert H.order == 27
    assert H.exponent == 3
    assert not H.is_abelian


def test_named_group_lookup():
    assert named_group("Z2xZ4").order == 8
    assert named_group("M27").order == 27
    assert named_group("1").order == 1


def test_direct_product_indexing():
    P = direct_product(cyclic_group(2), cyclic_group(3))
    assert P.order == 6
    assert P.is_abelian
    # (1, 0)·(0, 1) = (1, 1) sits at 1 + 2·1
    assert P.mul(1, 2) == 3


def test_semidirect_product_projection_and_section():
    F = cyclic_group(3)
    gamma = cyclic_group(2)
    E, embedding, projection, section = semidirect_product(F, gamma, [[0, 1, 2], [0, 2, 1]])
    assert E.order == 6 and not E.is_abelian
    assert projection.kernel().members == embedding.image().members
    assert all(projection(section(g)) == g for g in range(2))


def test_action_from_generators_rejects_relations():
    F = cyclic_group(3)
    gamma = cyclic_group(3)
    # inversion has order 2, so it cannot be the image of a generator of order 3
    with pytest.raises(ActionNotHomomorphic):
        action_from_generators(F, gamma, [[0, 2, 1]])


def test_subgroup_counts(s3, d4):
    assert len(all_subgroups(s3)) == 6
    assert len(all_subgroups(d4)) == 10
    assert len(all_subgroups(quaternion_group(8))) == 6
    assert [len(S.members) for S, _ in subgroups_up_to_conjugacy(s3)] == [1, 2, 3, 6]


def test_quotient_by_non_normal_subgroup_fails(s3):
    involution = next(g for g in range(6) if s3.element_order(g) == 2)
    with pytest.raises(NotNormal):
        quotient_by_normal(s3, s3.subgroup([0, involution]))


def test_quotient_of_s3_by_a3(s3):
    A3 = s3.subgroup(s3.generate([next(g for g in range(6) if s3.element_order(g) == 3)]))
    Q, projection = quotient_by_normal(s3, A3)
    assert Q.order == 2
    assert projection.kernel().members == A3.members


def test_abelian_invariants_and_basis():
    assert abelian_invariants(abelian_group((2, 4))) == (2, 4)
    assert abelian_invariants(abelian_group((2, 3))) == (6,)
    assert abelian_invariants(cyclic_group(1)) == ()
    decomposition = abelian_decomposition(abelian_group((2, 2, 4)))
    assert decomposition.factors == (2, 2, 4)
    for g in range(16):
        assert decomposition.element(decomposition.coords[g]) == g


def test_classify_subgroup(klein):
    assert classify_subgroup(cyclic_group(1)) is SubgroupKind.TRIVIAL
    assert classify_subgroup(cyclic_group(4)) is SubgroupKind.CYCLIC
    assert classify_subgroup(klein) is SubgroupKind.BICYCLIC
    assert classify_subgroup(abelian_group((2, 2, 2))) is SubgroupKind.HIGHER_RANK
    assert classify_subgroup(quaternion_group(8)) is SubgroupKind.NONABELIAN
    assert SubgroupKind.BICYCLIC.fits("bic") and not SubgroupKind.BICYCLIC.fits("cyc")


def test_canonical_hash_depends_on_table_only():
    assert cyclic_group(4).canonical_hash == cyclic_group(4).canonical_hash
    assert cyclic_group(4).canonical_hash != abelian_group((2, 2)).canonical_hash
