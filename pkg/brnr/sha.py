"""Sha² kernels of restriction to subgroup families, and what is computed from them."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from sympy import factorint

from .abelian import AbelianSubgroup, hom_kernel, two_power_multiple
from .base import (
    EssentiallyRealUnsupported,
    ExponentMismatch,
    ModuleMismatch,
    NoSection,
    NotAbelian,
)
from .cohomology import CohomologyGroup, cohomology_group, inflate_class, restrict_class
from .config import settings
from .gerbe import Gerb, ProcyclicPair, enumerate_family, evaluate_along, procyclic_restriction
from .groups import GroupHom, Subgroup, all_subgroups, quotient_by_normal, subgroups_up_to_conjugacy
from .modules import GModule, descend_module, pull_back_module, restrict_module

logger = logging.getLogger(__name__)

FORMULAS = ("ab,scyc", "cyc,scyc & ab,0", "bic,scyc", "cyc,scyc & bic,0")


@dataclass(frozen=True, eq=False)
class ShaReport:
    family: str
    ambient: CohomologyGroup
    kernel: AbelianSubgroup
    members: int = 0
    per_formula: dict[str, AbelianSubgroup] = field(default_factory=dict)
    agree: bool = True
    odd_part_only: bool = False

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "ambient": list(self.ambient.invariant_factors),
            "kernel": self.kernel.to_json(),
            "members": self.members,
            "per_formula": {k: v.to_json() for k, v in sorted(self.per_formula.items())},
            "agree": self.agree,
            "odd_part_only": self.odd_part_only,
        }


def _check_module(g: Gerb, M: GModule):
    if not M.group.same_as(g.E):
        raise ModuleMismatch("coefficient module does not live on the gerb's group")


def restriction_kernel(H: CohomologyGroup, A: Subgroup) -> AbelianSubgroup:
    """Kernel of H^i(E, M) -> H^i(A, M)."""
    target = cohomology_group(A.group, restrict_module(H.module, A), H.degree)
    images = [restrict_class(c, A).coords for c in H.generator_classes()]
    return hom_kernel(H.invariant_factors, np.asarray(images, dtype=np.int64).reshape(H.rank, target.rank), target.invariant_factors)


def procyclic_kernel(H: CohomologyGroup, pair: ProcyclicPair, primary: AbelianSubgroup | None = None) -> AbelianSubgroup:
    """Classes whose restriction to A ⋊ Ẑ vanishes."""
    primary = primary if primary is not None else restriction_kernel(H, pair.A)
    basis = primary.basis
    if not len(basis):
        return primary
    orders = [primary.element_order(v) for v in basis]
    obstructions = [procyclic_restriction(H.element(v), pair) for v in basis]
    quotient = obstructions[0].coinvariants
    images = np.asarray([o.secondary for o in obstructions], dtype=np.int64).reshape(len(basis), len(quotient.quotient_factors))
    secondary = hom_kernel(orders, images, quotient.quotient_factors)
    return AbelianSubgroup(H.invariant_factors, secondary.generators.dot(basis))


def _intersect_all(factors, kernels) -> AbelianSubgroup:
    return reduce(lambda a, b: a.intersect(b), kernels, AbelianSubgroup.whole(factors))


def sha2(g: Gerb, M: GModule, x: str, y: str, workers: int | None = None) -> ShaReport:
    """Sha²_{x,y}: classes restricting to zero on every member of the family."""
    _check_module(g, M)
    H = cohomology_group(g.E, M, 2)
    members = enumerate_family(g, x, y)
    workers = workers or settings.workers
    if y == "0":
        task = lambda A: restriction_kernel(H, A)  # noqa: E731
    else:
        primaries: dict[tuple[int, ...], AbelianSubgroup] = {}
        for pair in members:
            if pair.A.members not in primaries:
                primaries[pair.A.members] = restriction_kernel(H, pair.A)
        task = lambda pair: procyclic_kernel(H, pair, primaries[pair.A.members])  # noqa: E731
    if workers > 1 and len(members) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            kernels = list(pool.map(task, members))
    else:
        kernels = [task(m) for m in members]
    kernel = _intersect_all(H.invariant_factors, kernels)
    logger.info(f"Sha2 {x},{y}: {len(members)} members, kernel {list(kernel.invariant_factors)}")
    return ShaReport(family=f"{x},{y}", ambient=H, kernel=kernel, members=len(members))


def unramified_brauer(g: Gerb, M: GModule, odd_part_only: bool = False, workers: int | None = None) -> ShaReport:
    """The four expressions for the unramified classes, and whether they coincide."""
    if g.essentially_real and not odd_part_only:
        raise EssentiallyRealUnsupported("essentially real field: request the odd part only")
    reports = {
        (x, y): sha2(g, M, x, y, workers)
        for x, y in (("ab", "scyc"), ("cyc", "scyc"), ("ab", "0"), ("bic", "scyc"), ("bic", "0"))
    }
    kernels = {key: report.kernel for key, report in reports.items()}
    formulas = {
        "ab,scyc": kernels["ab", "scyc"],
        "cyc,scyc & ab,0": kernels["cyc", "scyc"].intersect(kernels["ab", "0"]),
        "bic,scyc": kernels["bic", "scyc"],
        "cyc,scyc & bic,0": kernels["cyc", "scyc"].intersect(kernels["bic", "0"]),
    }
    H = reports["ab", "scyc"].ambient
    if odd_part_only:
        odd = two_power_multiple(H.invariant_factors)
        formulas = {key: value.intersect(odd) for key, value in formulas.items()}
    first = formulas[FORMULAS[0]]
    agree = all(first == formulas[key] for key in FORMULAS[1:])
    if not agree:
        logger.warning(f"Unramified formulas disagree on {g!r}")
    return ShaReport(
        family="unramified",
        ambient=H,
        kernel=first,
        members=sum(r.members for r in reports.values()),
        per_formula=formulas,
        agree=agree,
        odd_part_only=odd_part_only,
    )


def base_module(g: Gerb, M: GModule) -> GModule:
    return descend_module(M, g.pi)


def constant_classes(g: Gerb, M: GModule) -> AbelianSubgroup:
    """Image of inflation H²(Γ, M) -> H²(E, M)."""
    _check_module(g, M)
    H = cohomology_group(g.E, M, 2)
    base = cohomology_group(g.gamma, base_module(g, M), 2)
    images = [inflate_class(b, g.pi, M).coords for b in base.generator_classes()]
    return AbelianSubgroup(H.invariant_factors, np.asarray(images, dtype=np.int64).reshape(len(images), H.rank))


def section_kernel(g: Gerb, M: GModule) -> AbelianSubgroup:
    """Kernel of restriction along the section."""
    if g.section is None:
        raise NoSection("gerb has no section")
    H = cohomology_group(g.E, M, 2)
    module = pull_back_module(M, g.section)
    target = cohomology_group(g.gamma, module, 2)
    images = [evaluate_along(c, g.section, module).coords for c in H.generator_classes()]
    return hom_kernel(H.invariant_factors, np.asarray(images, dtype=np.int64).reshape(H.rank, target.rank), target.invariant_factors)


def normalized_subgroup(g: Gerb, M: GModule, S: AbelianSubgroup) -> AbelianSubgroup:
    return S.intersect(section_kernel(g, M))


def _is_cyclic(G) -> bool:
    return bool((G.element_orders == G.order).any())


@dataclass(frozen=True)
class TrivialityReport:
    hypotheses_hold: bool
    conclusion_holds: bool
    split: bool
    quotients: dict[int, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "hypotheses_hold": self.hypotheses_hold,
            "conclusion_holds": self.conclusion_holds,
            "split": self.split,
            "quotients": {str(p): q for p, q in sorted(self.quotients.items())},
        }


def action_stabilizer(g: Gerb) -> Subgroup:
    """Elements of Γ acting trivially on F by conjugation (F abelian)."""
    action = g.conjugation_action()
    members = np.asarray(g.F.members, dtype=np.int64)
    return g.gamma.subgroup(np.flatnonzero((action == members[None, :]).all(axis=1)))


def abelian_triviality_check(
    g: Gerb, M: GModule, n: int, stabilizer: Subgroup | None = None, workers: int | None = None
) -> TrivialityReport:
    """For F abelian: if every Γ/(Stab ∩ ker χ mod p^r) is cyclic, unramified classes are constant."""
    if not g.F.group.is_abelian:
        raise NotAbelian("F is not abelian")
    exponent = g.F.group.exponent
    if n % exponent:
        raise ExponentMismatch("exponent of F must divide n", exponent=exponent, n=n)
    base = base_module(g, M)
    chi = base.action[:, 0, 0]
    stabilizer = stabilizer if stabilizer is not None else action_stabilizer(g)
    stab = np.zeros(g.gamma.order, dtype=bool)
    stab[list(stabilizer.members)] = True
    quotients = {}
    holds = True
    for p, r in factorint(exponent).items():
        q = p**r
        kernel = g.gamma.subgroup(np.flatnonzero(stab & (chi % q == 1)))
        Q, _ = quotient_by_normal(g.gamma, kernel)
        quotients[int(q)] = Q.order
        holds &= _is_cyclic(Q)
    kernel = unramified_brauer(g, M, workers=workers).kernel
    if g.split:
        conclusion = normalized_subgroup(g, M, kernel).is_zero()
    else:
        conclusion = kernel.is_subgroup_of(constant_classes(g, M))
    if holds and not conclusion:
        logger.warning(f"Abelian criterion hypotheses hold but unramified classes are not constant on {g!r}")
    return TrivialityReport(holds, conclusion, g.split, quotients)


def descend_class(alpha, q: GroupHom, module: GModule):
    """β on q.target with inflate(β) = α, or None."""
    if not alpha.parent.module.same_as(pull_back_module(module, q)):
        raise ModuleMismatch("class module is not the pull-back")
    base = cohomology_group(q.target, module, alpha.parent.degree)
    images = [inflate_class(b, q).coords for b in base.generator_classes()]
    rows = np.asarray(images, dtype=np.int64).reshape(len(images), alpha.parent.rank)
    image = AbelianSubgroup(alpha.parent.invariant_factors, rows)
    y = image.combination(alpha.coords)
    if y is None:
        return None
    return base.element(y[: base.rank])


def sha1_cyc(gamma, M: GModule) -> AbelianSubgroup:
    """Classes of H¹(Γ, M) vanishing on every cyclic subgroup."""
    H1 = cohomology_group(gamma, M, 1)
    kernels = [
        restriction_kernel(H1, C)
        for C, _ in subgroups_up_to_conjugacy(gamma)
        if C.order > 1 and _is_cyclic(C.group)
    ]
    return _intersect_all(H1.invariant_factors, kernels)


@dataclass(frozen=True)
class LocalizationReport:
    prime: int
    injective: bool
    lands_in_kernel: bool

    def to_json(self) -> dict:
        return {"prime": self.prime, "injective": self.injective, "lands_in_kernel": self.lands_in_kernel}


def sylow_subgerb(g: Gerb, p: int) -> tuple[Gerb, Subgroup]:
    """π⁻¹(Γ_p) for a Sylow p-subgroup Γ_p, of index prime to p in E."""
    p_part = 1
    while g.gamma.order % (p_part * p) == 0:
        p_part *= p
    sylow = next(g.gamma.subgroup(m) for m in all_subgroups(g.gamma) if len(m) == p_part)
    preimage = g.E.subgroup(np.flatnonzero(np.isin(g.pi.array, list(sylow.members))))
    E_p = preimage.group
    F_p = E_p.subgroup(preimage.local_index[list(g.F.members)])
    pi_p = GroupHom(E_p, sylow.group, tuple(int(sylow.local_index[g.pi(m)]) for m in preimage.members))
    section = None
    if g.section is not None:
        section = GroupHom(sylow.group, E_p, tuple(int(preimage.local_index[g.section(m)]) for m in sylow.members))
    return Gerb(E_p, F_p, sylow.group, pi_p, section, g.essentially_real), preimage


def sylow_localization(g: Gerb, M: GModule, p: int, workers: int | None = None) -> LocalizationReport:
    """The p-part of the unramified kernel injects into that of the Sylow subgerb."""
    kernel = unramified_brauer(g, M, workers=workers).kernel
    sub, preimage = sylow_subgerb(g, p)
    sub_kernel = unramified_brauer(sub, restrict_module(M, preimage), workers=workers).kernel
    e = kernel.modulus
    prime_to_p = e
    while prime_to_p % p == 0:
        prime_to_p //= p
    p_part = kernel.scale(prime_to_p)
    H = cohomology_group(g.E, M, 2)
    basis = p_part.basis
    images = np.asarray([restrict_class(H.element(v), preimage).coords for v in basis], dtype=np.int64)
    images = images.reshape(len(basis), len(sub_kernel.factors))
    lands = all(sub_kernel.contains(v) for v in images)
    orders = [p_part.element_order(v) for v in basis]
    injective = True
    if len(basis):
        lost = hom_kernel(orders, images, sub_kernel.factors)
        injective = AbelianSubgroup(H.invariant_factors, lost.generators.dot(basis)).is_zero()
    return LocalizationReport(int(p), bool(injective), bool(lands))
