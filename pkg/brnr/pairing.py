"""Sections of split gerbs and the evaluation of classes at them."""

import logging
from dataclasses import dataclass, field
from math import gcd

import numpy as np
from sympy import factorint

from .abelian import AbelianSubgroup, hom_kernel
from .base import HypothesesViolated, InconsistentParameters, ModuleMismatch, NoSection
from .cohomology import Cochain, CohomologyClass, cohomology_group, restrict_class
from .gerbe import Gerb, evaluate_along, gerb_from_split, iter_sections
from .groups import FiniteGroup, GroupHom, cyclic_group, semidirect_product
from .modules import GModule, induced_module, mu_module, pull_back_module, restrict_module
from .sha import restriction_kernel, section_kernel

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Section:
    hom: GroupHom
    pi: GroupHom

    def __post_init__(self):
        if any(self.pi(self.hom(g)) != g for g in range(self.hom.source.order)):
            raise NoSection("homomorphism is not a section of the projection")

    @property
    def images(self) -> tuple[int, ...]:
        return self.hom.images

    def conjugate(self, f: int) -> "Section":
        E = self.hom.target
        images = E.table[E.table[f, self.hom.array], E.inverses[f]]
        return Section(GroupHom(self.hom.source, E, tuple(int(x) for x in images)), self.pi)

    def to_json(self) -> list[int]:
        return list(self.images)


@dataclass(frozen=True, eq=False)
class SectionClass:
    orbit: tuple[Section, ...]
    representative: Section

    def to_json(self) -> dict:
        return {"representative": self.representative.to_json(), "size": len(self.orbit)}


def enumerate_sections(g: Gerb) -> list[Section]:
    if not g.split:
        raise NoSection("gerb has no section")
    homs = sorted(iter_sections(g.E, g.pi, g.gamma), key=lambda h: h.images)
    return [Section(h, g.pi) for h in homs]


def h1_orbits(sections: list[Section], g: Gerb) -> list[SectionClass]:
    """Sections up to conjugation by F, in order of first appearance."""
    by_images = {s.images: s for s in sections}
    assigned: set[tuple[int, ...]] = set()
    classes = []
    for s in sections:
        if s.images in assigned:
            continue
        orbit_images = sorted({s.conjugate(f).images for f in g.F.members})
        assigned.update(orbit_images)
        orbit = tuple(by_images[images] for images in orbit_images if images in by_images)
        classes.append(SectionClass(orbit, s))
    return classes


def evaluate_class(alpha: CohomologyClass, s: Section) -> CohomologyClass:
    """alpha restricted along the section, a class of H^i(Γ, M)."""
    M = alpha.parent.module
    base = pull_back_module(M, s.hom)
    if not pull_back_module(base, s.pi).same_as(M):
        raise ModuleMismatch("module on E is not pulled back from Γ")
    return evaluate_along(alpha, s.hom, base)


@dataclass(frozen=True, eq=False)
class LocalGaloisModel:
    kind: str
    gamma: FiniteGroup
    n: int
    character: np.ndarray
    sigma: int
    tau: int = 0
    p: int | None = None
    q: int | None = None
    a: int = 1
    b: int = 1

    @property
    def module(self) -> GModule:
        return mu_module(self.n, self.gamma, self.character)

    def to_json(self) -> dict:
        data = {"kind": self.kind, "n": self.n, "order": self.gamma.order}
        if self.kind == "tame":
            data.update(p=self.p, q=self.q, a=self.a, b=self.b)
        return data


def tame_local_model(q: int, a: int, b: int, n: int, p: int | None = None) -> LocalGaloisModel:
    """⟨σ, τ | στσ⁻¹ = τ^q, σ^a, τ^b⟩ with σ acting on μ_n by q and τ trivially."""
    if q < 2 or a < 1 or b < 1 or n < 2:
        raise InconsistentParameters("q, n must be at least 2 and a, b at least 1", q=q, a=a, b=b, n=n)
    primes = factorint(q)
    if len(primes) != 1 or (p is not None and p not in primes):
        raise InconsistentParameters("q must be a power of the residue characteristic", q=q, p=p)
    p = next(iter(primes))
    if (q**a - 1) % b:
        raise InconsistentParameters("b must divide q^a - 1", q=q, a=a, b=b)
    if gcd(n, p) != 1:
        raise InconsistentParameters("n must be prime to the residue characteristic", n=n, p=p)
    if (q**a - 1) % n:
        raise InconsistentParameters("σ^a must act trivially on μ_n", q=q, a=a, n=n)
    tau_group, sigma_group = cyclic_group(b), cyclic_group(a)
    action = [[(i * pow(q, j, b)) % b for i in range(b)] for j in range(a)]
    gamma, _, _, _ = semidirect_product(tau_group, sigma_group, action)
    # element i + b·j is τ^i σ^j
    character = np.array([pow(q, idx // b, n) for idx in range(a * b)], dtype=np.int64)
    return LocalGaloisModel(
        "tame", gamma, n, character, sigma=b if a > 1 else 0, tau=1 if b > 1 else 0, p=p, q=q, a=a, b=b
    )


def real_model(n: int) -> LocalGaloisModel:
    """Γ = Z/2 with complex conjugation inverting μ_n."""
    if n < 2:
        raise InconsistentParameters("n must be at least 2", n=n)
    return LocalGaloisModel("real", cyclic_group(2), n, np.array([1, (n - 1) % n], dtype=np.int64), sigma=1)


def _power(perm: np.ndarray, k: int) -> np.ndarray:
    result = np.arange(perm.size)
    for _ in range(k):
        result = perm[result]
    return result


def model_gerb(model: LocalGaloisModel, F: FiniteGroup, sigma_action, tau_action=None) -> Gerb:
    """Split gerb F ⋊ Γ for the model, σ and τ acting by the given automorphisms of F."""
    sigma_action = np.asarray(sigma_action, dtype=np.int64)
    tau_action = np.arange(F.order) if tau_action is None else np.asarray(tau_action, dtype=np.int64)
    if model.kind == "real":
        action = [np.arange(F.order), sigma_action]
    else:
        action = [
            _power(tau_action, idx % model.b)[_power(sigma_action, idx // model.b)]
            for idx in range(model.gamma.order)
        ]
    return gerb_from_split(F, model.gamma, action, essentially_real=model.kind == "real")


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    classes_tested: list[tuple[int, ...]]
    section_classes: list[list[int]]
    values: list[list[tuple[int, ...]]] = field(default_factory=list)

    @property
    def constant(self) -> bool:
        return all(len(set(row)) <= 1 for row in self.values)

    @property
    def all_zero(self) -> bool:
        return all(not any(v) for row in self.values for v in row)

    def to_json(self) -> dict:
        return {
            "classes_tested": [list(c) for c in self.classes_tested],
            "section_classes": self.section_classes,
            "values": [[list(v) for v in row] for row in self.values],
            "constant": self.constant,
            "all_zero": self.all_zero,
        }


def check_tame_hypotheses(g: Gerb, model: LocalGaloisModel) -> list[str]:
    problems = []
    if model.kind != "tame":
        return problems
    if gcd(g.F.order, model.p) != 1:
        problems.append(f"|F| = {g.F.order} is divisible by the residue characteristic {model.p}")
    action = g.conjugation_action()
    if not np.array_equal(action[model.tau], np.asarray(g.F.members)):
        problems.append("inertia acts nontrivially on F")
    return problems


def constancy_check(
    g: Gerb, model: LocalGaloisModel, S: AbelianSubgroup, M: GModule, bypass: bool = False
) -> EvaluationReport:
    """Evaluates the basis of S at every section class."""
    if not g.gamma.same_as(model.gamma):
        raise HypothesesViolated("gerb is not over the model's Galois group")
    problems = check_tame_hypotheses(g, model)
    if problems:
        if not bypass:
            raise HypothesesViolated("; ".join(problems))
        logger.warning(f"Evaluating despite violated hypotheses: {'; '.join(problems)}")
    H = cohomology_group(g.E, M, 2)
    classes = h1_orbits(enumerate_sections(g), g)
    tested = [tuple(int(x) for x in v) for v in S.basis]
    values = [[evaluate_class(H.element(v), c.representative).coords for c in classes] for v in tested]
    return EvaluationReport(tested, [c.representative.to_json() for c in classes], values)


def real_unramified_kernel(g: Gerb, M: GModule, sigma: int = 1) -> AbelianSubgroup:
    """Normalized classes vanishing on every C⟨s(σ)⟩ with C ⊆ F cyclic and σ-stable."""
    if g.section is None:
        raise NoSection("gerb has no section")
    E = g.E
    H = cohomology_group(E, M, 2)
    s_sigma = g.section(sigma)
    kernel = section_kernel(g, M)
    seen = set()
    for f in g.F.members:
        C = E.generate([f])
        if C in seen or E.conjugate_set(s_sigma, C) != C:
            continue
        seen.add(C)
        D = E.subgroup(E.generate(list(C) + [s_sigma]))
        kernel = kernel.intersect(restriction_kernel(H, D))
    return kernel


@dataclass(frozen=True)
class ShapiroReport:
    induced: tuple[int, ...]
    base: tuple[int, ...]
    bijective: bool

    @property
    def holds(self) -> bool:
        return self.induced == self.base and self.bijective

    def to_json(self) -> dict:
        return {"induced": list(self.induced), "base": list(self.base), "bijective": self.bijective, "holds": self.holds}


def shapiro_check(g: Gerb, M: GModule) -> ShapiroReport:
    """H²(E, Ind_{s(Γ)}^E M) against H²(Γ, M) through restriction and the identity coset."""
    if g.section is None:
        raise NoSection("gerb has no section")
    E = g.E
    S = E.subgroup(g.section.images)
    M_S = restrict_module(M, S)
    induced = induced_module(M_S, S)
    H_ind = cohomology_group(E, induced, 2)
    base_module = pull_back_module(M, g.section)
    H_base = cohomology_group(g.gamma, base_module, 2)
    to_S = GroupHom(g.gamma, S.group, tuple(int(S.local_index[x]) for x in g.section.images))
    r = M.rank
    images = []
    for alpha in H_ind.generator_classes():
        restricted = restrict_class(alpha, S).representative.full_table()
        component = Cochain.from_full_table(S.group, M_S, restricted[..., :r])
        class_S = cohomology_group(S.group, M_S, 2).class_of(component)
        images.append(evaluate_along(class_S, to_S, base_module).coords)
    images = np.asarray(images, dtype=np.int64).reshape(H_ind.rank, H_base.rank)
    kernel = hom_kernel(H_ind.invariant_factors, images, H_base.invariant_factors)
    image = AbelianSubgroup(H_base.invariant_factors, images)
    bijective = kernel.is_zero() and image.order == H_base.order
    return ShapiroReport(H_ind.invariant_factors, H_base.invariant_factors, bool(bijective))
