import numpy as np
import pytest

from brnr.abelian import AbelianSubgroup, cokernel, hom_kernel, odd_part, two_power_multiple
from brnr.base import CharacterNotMultiplicative, ExponentMismatch, ModuleMismatch, NonUnitValue, NotAHomomorphism
from brnr.catalog import abelian_group, gamma_group
from brnr.groups import cyclic_group, quotient_by_normal
from brnr.modules import (
    GModule,
    character_from_generators,
    descend_module,
    dual_module,
    mu_module,
    pull_back_module,
    trivial_module,
    underlying_group,
)


def test_mu_module_with_character():
    gamma = cyclic_group(2)
    M = mu_module(3, gamma, [1, 2])
    assert M.factors == (3,)
    assert M.act(1, [1]).tolist() == [2]
    assert not M.is_trivial_action


def test_module_elements_follow_the_action():
    M = mu_module(3, cyclic_group(2), [1, 2])
    x = M.element([4])
    assert x.coords == (1,)
    assert x.act(1).coords == (2,)
    assert (x + x.act(1)).is_zero()
    assert (x - x).coords == M.zero().coords
    assert x.scale(5).coords == (2,)


def test_character_values_must_be_units():
    with pytest.raises(NonUnitValue):
        mu_module(4, cyclic_group(2), [1, 2])


def test_character_must_be_multiplicative():
    with pytest.raises(CharacterNotMultiplicative):
        mu_module(3, cyclic_group(3), [1, 2, 2])


def test_character_from_generators():
    gamma = gamma_group("Z4")
    chi = character_from_generators(gamma, 5, [2])
    assert chi.tolist() == [1, 2, 4, 3]
    with pytest.raises(CharacterNotMultiplicative):
        # 2 has order 4 mod 5, not 2
        character_from_generators(cyclic_group(2), 5, [2])


def test_action_must_respect_identity():
    G = cyclic_group(2)
    with pytest.raises(NotAHomomorphism):
        GModule(G, (3,), [[[2]], [[2]]])


def test_pull_back_and_descend_are_inverse():
    E = cyclic_group(4)
    Q, projection = quotient_by_normal(E, E.subgroup([0, 2]))
    base = mu_module(3, Q, [1, 2])
    M = pull_back_module(base, projection)
    assert M.action[:, 0, 0].tolist() == [1, 2, 1, 2]
    assert descend_module(M, projection).same_as(base)


def test_descend_needs_trivial_kernel_action():
    E = cyclic_group(4)
    Q, projection = quotient_by_normal(E, E.subgroup([0, 2]))
    M = mu_module(5, E, [1, 2, 4, 3])
    with pytest.raises(ModuleMismatch):
        descend_module(M, projection)


def test_dual_module_of_cyclic_group():
    gamma = cyclic_group(2)
    A = cyclic_group(3)
    inversion = [[0, 1, 2], [0, 2, 1]]
    dual = dual_module(A, 3, gamma, inversion)
    # Hom(Z/3, μ_3) with γ acting through the inverse of inversion
    assert dual.factors == (3,)
    assert dual.action[1, 0, 0] == 2
    twisted = dual_module(A, 3, gamma, inversion, [1, 2])
    assert twisted.is_trivial_action


def _fixed_points(M, g):
    elements = M.elements()
    images = np.einsum("ij,nj->ni", M.action[g], elements) % np.asarray(M.factors)
    return int(np.all(images == elements, axis=1).sum())


@pytest.mark.parametrize(
    "factors, matrices, character",
    [
        ((4,), [[[1]], [[3]]], None),
        ((2, 2), [[[1, 0], [0, 1]], [[0, 1], [1, 0]]], None),
        ((3,), [[[1]], [[1]]], [1, 2]),
    ],
)
def test_double_dual_recovers_the_module(factors, matrices, character):
    gamma = cyclic_group(2)
    M = GModule(gamma, factors, matrices)
    n = M.exponent
    A, action = underlying_group(M)
    dual = dual_module(A, n, gamma, action, character)
    B, dual_action = underlying_group(dual)
    double = dual_module(B, n, gamma, dual_action, character)
    assert double.structure == M.structure
    assert [_fixed_points(double, g) for g in range(2)] == [_fixed_points(M, g) for g in range(2)]


def test_dual_module_needs_exponent_to_divide_n():
    with pytest.raises(ExponentMismatch):
        dual_module(cyclic_group(4), 2, cyclic_group(1), [[0, 1, 2, 3]])


def test_module_structure_and_elements():
    M = trivial_module(abelian_group((2,)), (2, 4))
    assert M.order == 8
    assert M.structure == (2, 4)
    assert M.elements().shape == (8, 2)
    assert M.index_of([1, 3]) == 1 + 2 * 3


def test_abelian_subgroup_arithmetic():
    whole = AbelianSubgroup.whole((2, 4))
    doubled = whole.scale(2)
    assert doubled.invariant_factors == (2,)
    assert doubled.contains([0, 2])
    assert not doubled.contains([1, 0])
    assert doubled.is_subgroup_of(whole)
    left = AbelianSubgroup((2, 4), [[1, 0]])
    right = AbelianSubgroup((2, 4), [[1, 2]])
    assert left.intersect(right).is_zero()
    assert (left + right).order == 4
    assert len(whole.elements()) == 8


def test_odd_part():
    A = AbelianSubgroup.whole((6, 12))
    assert odd_part(A).invariant_factors == (3, 3)
    assert two_power_multiple((4,)).is_zero()


def test_hom_kernel():
    # Z/4 -> Z/2, 1 -> 1
    kernel = hom_kernel((4,), [[1]], (2,))
    assert kernel.invariant_factors == (2,)
    assert kernel.contains([2])


def test_cokernel():
    quotient = cokernel((4, 2), [[2, 1]])
    assert quotient.order == 4
    assert quotient.project([2, 1]) == tuple(0 for _ in quotient.quotient_factors)


def test_abelian_subgroup_equality_ignores_generators():
    assert AbelianSubgroup((6,), [[2]]) == AbelianSubgroup((6,), [[4]])
    assert AbelianSubgroup((6,), [[2]]) != AbelianSubgroup((6,), [[3]])
    assert AbelianSubgroup.zero((6,)).is_zero()
