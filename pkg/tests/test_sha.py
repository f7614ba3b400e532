import pytest

from brnr.base import EssentiallyRealUnsupported, ModuleMismatch, NotExact, SizeLimitExceeded
from brnr.catalog import CatalogSpec, abelian_group, catalog, gamma_group, named_group
from brnr.cohomology import cohomology_group, inflate_class, restrict_class
from brnr.config import configure, settings
from brnr.gerbe import (
    ProcyclicPair,
    enumerate_family,
    gerb_from_explicit,
    gerb_from_split,
    oracle_vanishes,
    procyclic_restriction,
    stabilized_group,
)
from brnr.groups import cyclic_group, quotient_by_normal
from brnr.modules import mu_module, pull_back_module, restrict_module, trivial_module
from brnr.sha import (
    FORMULAS,
    abelian_triviality_check,
    constant_classes,
    descend_class,
    normalized_subgroup,
    section_kernel,
    sha1_cyc,
    sha2,
    sylow_localization,
    unramified_brauer,
)


def mu(g, n, character=None):
    return pull_back_module(mu_module(n, g.gamma, character), g.pi)


def test_explicit_gerb_without_section(cyclic4_gerb):
    assert not cyclic4_gerb.split
    assert cyclic4_gerb.F.order == 2


def test_explicit_gerb_kernel_must_match():
    E = cyclic_group(4)
    Q, projection = quotient_by_normal(E, E.subgroup([0, 2]))
    with pytest.raises(NotExact):
        gerb_from_explicit(E, E.subgroup([0]), projection)


def test_procyclic_pairs_up_to_conjugacy(klein_gerb):
    assert len(enumerate_family(klein_gerb, "ab", "0")) == 2
    assert len(enumerate_family(klein_gerb, "ab", "scyc")) == 8
    assert len(enumerate_family(klein_gerb, "cyc", "scyc")) == 8


def test_non_split_gerb_has_primary_obstruction(cyclic4_gerb):
    M = mu(cyclic4_gerb, 2)
    H = cohomology_group(cyclic4_gerb.E, M, 2)
    assert H.invariant_factors == (2,)
    (alpha,) = H.generator_classes()
    obstruction = procyclic_restriction(alpha, ProcyclicPair(cyclic4_gerb.F, 0))
    assert not obstruction.primary.is_zero()
    assert not obstruction.vanishes
    assert sha2(cyclic4_gerb, M, "ab", "scyc").kernel.is_zero()


def test_procyclic_generator_kills_everything(cyclic4_gerb):
    M = mu(cyclic4_gerb, 2)
    (alpha,) = cohomology_group(cyclic4_gerb.E, M, 2).generator_classes()
    # A trivial, e a generator of E: the restriction lands in H²(Ẑ) = 0
    assert procyclic_restriction(alpha, ProcyclicPair(cyclic4_gerb.E.trivial(), 1)).vanishes


def test_secondary_obstruction_ignores_the_trivializing_cochain(klein_gerb):
    M = mu(klein_gerb, 2)
    H = cohomology_group(klein_gerb.E, M, 2)
    for pair in enumerate_family(klein_gerb, "ab", "scyc"):
        H1 = cohomology_group(pair.A.group, restrict_module(M, pair.A), 1)
        for alpha in H.generator_classes():
            plain = procyclic_restriction(alpha, pair)
            if not plain.primary.is_zero():
                continue
            for offset in H1.basis:
                assert procyclic_restriction(alpha, pair, offset).secondary == plain.secondary


def test_oracle_agrees_on_small_gerbs(klein_gerb, cyclic4_gerb):
    for g in (klein_gerb, cyclic4_gerb):
        M = mu(g, 2)
        H = cohomology_group(g.E, M, 2)
        for pair in enumerate_family(g, "ab", "scyc"):
            for alpha in H.generator_classes():
                assert procyclic_restriction(alpha, pair).vanishes == oracle_vanishes(alpha, pair, 2)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_oracle_matches_inflation_to_the_stabilized_group(klein_gerb, cyclic4_gerb, inversion_gerb, k):
    cases = [(klein_gerb, 2, None), (cyclic4_gerb, 4, None), (inversion_gerb, 3, [1, 2])]
    for g, n, character in cases:
        M = mu(g, n, character)
        H = cohomology_group(g.E, M, 2)
        for pair in enumerate_family(g, "ab", "scyc"):
            for alpha in H.generator_classes():
                B, D, projection = stabilized_group(pair, k)
                inflated = inflate_class(restrict_class(alpha, B), projection)
                assert oracle_vanishes(alpha, pair, k) == inflated.is_zero()


def test_oracle_respects_cochain_cap(klein_gerb, monkeypatch):
    M = mu(klein_gerb, 2)
    (alpha, *_) = cohomology_group(klein_gerb.E, M, 2).generator_classes()
    pair = enumerate_family(klein_gerb, "ab", "scyc")[-1]
    monkeypatch.setattr(settings, "cochain_cap", 10)
    with pytest.raises(SizeLimitExceeded):
        oracle_vanishes(alpha, pair, 4)


def test_unramified_formulas_agree_for_s3(s3_geometric):
    g, M = s3_geometric
    report = unramified_brauer(g, M)
    assert report.agree
    assert set(report.per_formula) == set(FORMULAS)
    assert report.kernel.is_zero()
    assert report.to_json()["agree"] is True


def test_zero_ambient_h2_gives_zero_kernels():
    F, gamma = cyclic_group(3), gamma_group("1")
    g = gerb_from_split(F, gamma, [list(range(3))])
    M = mu(g, 2)
    assert cohomology_group(g.E, M, 2).rank == 0
    report = unramified_brauer(g, M)
    assert report.agree
    assert all(kernel.is_zero() for kernel in report.per_formula.values())
    assert constant_classes(g, M).is_zero()
    assert normalized_subgroup(g, M, report.kernel).is_zero()


def test_bogomolov_multiplier_of_abelian_group_vanishes():
    F, gamma = abelian_group((2, 2)), gamma_group("1")
    g = gerb_from_split(F, gamma, [list(range(4))])
    assert sha2(g, mu(g, 2), "ab", "0").kernel.is_zero()


def test_essentially_real_needs_odd_part(klein_gerb):
    g = klein_gerb.flagged(True)
    M = mu(g, 2)
    with pytest.raises(EssentiallyRealUnsupported):
        unramified_brauer(g, M)
    report = unramified_brauer(g, M, odd_part_only=True)
    assert report.odd_part_only
    # only 2-torsion here, so the odd part is zero
    assert report.kernel.is_zero()


def test_workers_do_not_change_results(klein_gerb):
    M = mu(klein_gerb, 2)
    serial = sha2(klein_gerb, M, "ab", "scyc", workers=1)
    parallel = sha2(klein_gerb, M, "ab", "scyc", workers=4)
    assert serial.to_json() == parallel.to_json()


def test_split_gerb_decomposes_into_constant_and_section_kernel(klein_gerb):
    M = mu(klein_gerb, 2)
    H = cohomology_group(klein_gerb.E, M, 2)
    constant = constant_classes(klein_gerb, M)
    kernel = section_kernel(klein_gerb, M)
    assert constant.intersect(kernel).is_zero()
    assert (constant + kernel).order == H.order


def test_normalized_unramified_classes(inversion_gerb):
    M = mu(inversion_gerb, 3, [1, 2])
    kernel = unramified_brauer(inversion_gerb, M).kernel
    assert normalized_subgroup(inversion_gerb, M, kernel).is_zero()


def test_abelian_criterion(klein_gerb):
    report = abelian_triviality_check(klein_gerb, mu(klein_gerb, 2), 2)
    assert report.hypotheses_hold
    assert report.conclusion_holds
    assert report.split


def test_sha1_cyc_vanishes_for_cyclic_and_klein_groups():
    assert sha1_cyc(cyclic_group(2), trivial_module(cyclic_group(2), (2,))).is_zero()
    klein = abelian_group((2, 2))
    assert sha1_cyc(klein, trivial_module(klein, (2,))).is_zero()


def test_sylow_localization(inversion_gerb):
    report = sylow_localization(inversion_gerb, mu(inversion_gerb, 3, [1, 2]), 3)
    assert report.injective
    assert report.lands_in_kernel


def test_configure_overrides_and_ignores_none():
    before = settings.workers
    configure(workers=None)
    assert settings.workers == before


def test_descend_class_through_split_quotient(klein):
    Q, q = quotient_by_normal(klein, klein.subgroup([0, 1]))
    M = trivial_module(Q, (2,))
    (beta,) = cohomology_group(Q, M, 2).generator_classes()
    alpha = inflate_class(beta, q)
    assert not alpha.is_zero()
    descended = descend_class(alpha, q, M)
    assert descended is not None
    assert inflate_class(descended, q).coords == alpha.coords


def test_descend_class_fails_for_the_doubling_extension():
    # inflation H²(Z/2, Z/2) -> H²(Z/4, Z/2) is multiplication by 2
    E = cyclic_group(4)
    Q, q = quotient_by_normal(E, E.subgroup([0, 2]))
    M = trivial_module(Q, (2,))
    H2 = cohomology_group(E, pull_back_module(M, q), 2)
    (alpha,) = H2.generator_classes()
    assert descend_class(alpha, q, M) is None
    assert descend_class(H2.zero(), q, M).is_zero()


def test_descend_class_checks_the_module(klein):
    Q, q = quotient_by_normal(klein, klein.subgroup([0, 1]))
    alpha = cohomology_group(klein, trivial_module(klein, (2,)), 2).zero()
    with pytest.raises(ModuleMismatch):
        descend_class(alpha, q, trivial_module(Q, (3,)))


def test_descend_class_with_zero_h2():
    E = cyclic_group(3)
    Q, q = quotient_by_normal(E, E.subgroup([0, 1, 2]))
    M = trivial_module(Q, (2,))
    alpha = cohomology_group(E, pull_back_module(M, q), 2).zero()
    assert alpha.parent.rank == 0
    assert descend_class(alpha, q, M).is_zero()


def test_sha_families_are_nested(klein_gerb, inversion_gerb, cyclic4_gerb, s3_geometric):
    cases = [(klein_gerb, mu(klein_gerb, 2)), (inversion_gerb, mu(inversion_gerb, 3, [1, 2])), s3_geometric]
    cases.append((cyclic4_gerb, mu(cyclic4_gerb, 4)))
    for g, M in cases:
        kernels = {(x, y): sha2(g, M, x, y).kernel for x in ("ab", "bic", "cyc") for y in ("scyc", "0")}
        for y in ("scyc", "0"):
            assert kernels["ab", y].is_subgroup_of(kernels["bic", y])
            assert kernels["bic", y].is_subgroup_of(kernels["cyc", y])
        for x in ("ab", "bic", "cyc"):
            assert kernels[x, "scyc"].is_subgroup_of(kernels[x, "0"])


@pytest.mark.parametrize("name, n", [("D4", 4), ("Q8", 4), ("A4", 6), ("S4", 12), ("Heis3", 3)])
def test_bogomolov_multiplier_of_nonabelian_groups_vanishes(name, n):
    F, gamma = named_group(name), gamma_group("1")
    g = gerb_from_split(F, gamma, [list(range(F.order))])
    assert sha2(g, mu(g, n), "ab", "0").kernel.is_zero()


def test_formulas_coincide_on_non_split_extensions():
    spec = CatalogSpec(families=["extensions"], max_order=16, max_f_order=8, gammas=["Z2", "Z4"], n_values=[2, 4], max_characters=1)
    entries = [entry for entry in catalog(spec) if not entry.gerb.split]
    assert entries
    for entry in entries:
        report = unramified_brauer(entry.gerb, entry.module)
        assert report.agree, entry.name
