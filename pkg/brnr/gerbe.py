"""Finite gerbs 1 -> F -> E -> Γ -> 1 and the subgroup families restricted to."""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .abelian import Cokernel, cokernel
from .base import BrnrError, ModuleMismatch, NotExact, NotSurjective, OrderLimitExceeded, SizeLimitExceeded
from .cohomology import (
    Cochain,
    CohomologyClass,
    cohomology_group,
    pull_back_cochain,
    restrict_class,
)
from .config import settings
from .groups import (
    FiniteGroup,
    GroupHom,
    Subgroup,
    all_subgroups,
    classify_subgroup,
    cyclic_group,
    direct_product,
    extend_to_hom,
    normalizer,
    semidirect_product,
)
from .modules import GModule, restrict_module
from .snf import is_solvable_mod

logger = logging.getLogger(__name__)

FAMILY_TYPES = ("ab", "bic", "cyc")
PROJECTION_TYPES = ("scyc", "0")


@dataclass(frozen=True, eq=False)
class Gerb:
    E: FiniteGroup
    F: Subgroup
    gamma: FiniteGroup
    pi: GroupHom
    section: GroupHom | None = None
    essentially_real: bool = False
    name: str | None = field(default=None, compare=False)

    def __repr__(self):
        kind = "split" if self.split else "non-split"
        return f"<Gerb {kind} |F|={self.F.order} |Γ|={self.gamma.order}>"

    @property
    def split(self) -> bool:
        return self.section is not None

    def flagged(self, essentially_real: bool) -> "Gerb":
        return Gerb(self.E, self.F, self.gamma, self.pi, self.section, essentially_real, self.name)

    def conjugation_action(self) -> np.ndarray:
        """Γ acting on F through conjugation by lifts; F-indices in E-numbering."""
        lifts = np.full(self.gamma.order, -1, dtype=np.int64)
        for g, q in enumerate(self.pi.images):
            if lifts[q] < 0:
                lifts[q] = g
        members = np.asarray(self.F.members, dtype=np.int64)
        E = self.E
        return np.stack([E.table[E.table[lift, members], E.inverses[lift]] for lift in lifts])


def gerb_from_split(F: FiniteGroup, gamma: FiniteGroup, action, essentially_real: bool = False) -> Gerb:
    E, embedding, projection, section = semidirect_product(F, gamma, action)
    return Gerb(E, embedding.image(), gamma, projection, section, essentially_real)


def iter_sections(E: FiniteGroup, pi: GroupHom, gamma: FiniteGroup, cap: int | None = None) -> Iterator[GroupHom]:
    """Homomorphic sections of pi, by lifting the generators of Γ in every way."""
    cap = cap or settings.section_cap
    fibers = [np.flatnonzero(pi.array == s).tolist() for s in gamma.generators]
    search = int(np.prod([len(f) for f in fibers], dtype=object))
    if search > cap:
        raise OrderLimitExceeded("section search too large", size=search, cap=cap)
    for lifts in itertools.product(*fibers):
        hom = extend_to_hom(gamma, E, lifts)
        if hom is not None:
            yield hom


def gerb_from_explicit(E: FiniteGroup, F: Subgroup, pi: GroupHom, essentially_real: bool = False) -> Gerb:
    pi.validate()
    if not pi.is_surjective():
        raise NotSurjective("projection is not surjective")
    kernel = pi.kernel()
    if kernel.members != F.members:
        raise NotExact("kernel of the projection differs from F", kernel=kernel.order, F=F.order)
    try:
        section = next(iter_sections(E, pi, pi.target), None)
    except OrderLimitExceeded as e:
        logger.warning(f"Skipping section search: {e}")
        section = None
    return Gerb(E, F, pi.target, pi, section, essentially_real)


@dataclass(frozen=True)
class ProcyclicPair:
    """A ⊆ F with e ∈ N_E(A): models A ⋊ Ẑ with the generator mapping to e."""

    A: Subgroup
    e: int

    def __post_init__(self):
        if self.A.parent.conjugate_set(self.e, self.A.members) != self.A.members:
            raise BrnrError("element does not normalize the subgroup", element=self.e)

    def to_json(self) -> dict:
        return {"A": list(self.A.members), "e": self.e}


def _family_subgroups(g: Gerb, x: str) -> list[Subgroup]:
    if x not in FAMILY_TYPES:
        raise ValueError(f"Unknown family type {x!r}")
    if g.E.order > settings.subgroup_cap:
        raise OrderLimitExceeded("gerb too large for family enumeration", order=g.E.order, cap=settings.subgroup_cap)
    F_members = np.asarray(g.F.members, dtype=np.int64)
    seen: set[tuple[int, ...]] = set()
    reps = []
    for local in all_subgroups(g.F.group):
        members = tuple(sorted(int(m) for m in F_members[list(local)]))
        if members in seen:
            continue
        orbit = {g.E.conjugate_set(c, members) for c in range(g.E.order)}
        seen.update(orbit)
        rep = Subgroup(g.E, min(orbit))
        if classify_subgroup(rep).fits(x):
            reps.append(rep)
    reps.sort(key=lambda H: (H.order, H.members))
    return reps


def enumerate_family(g: Gerb, x: str, y: str) -> list:
    """Family members: subgroups (y = "0") or procyclic pairs (y = "scyc"), up to E-conjugacy."""
    if y not in PROJECTION_TYPES:
        raise ValueError(f"Unknown projection type {y!r}")
    subgroups = _family_subgroups(g, x)
    if y == "0":
        return subgroups
    E = g.E
    pairs = []
    for A in subgroups:
        N = normalizer(E, A)
        n_members = np.asarray(N.members, dtype=np.int64)
        seen = np.zeros(E.order, dtype=bool)
        for e in N.members:
            if seen[e]:
                continue
            # N-conjugacy class of e
            orbit = np.unique(E.table[E.table[n_members, e], E.inverses[n_members]])
            seen[orbit] = True
            pairs.append(ProcyclicPair(A, int(orbit.min())))
    logger.debug(f"{len(pairs)} procyclic pairs for family {x}")
    return pairs


@dataclass(frozen=True, eq=False)
class ObstructionPair:
    primary: CohomologyClass
    secondary: tuple[int, ...] | None = None
    coinvariants: Cokernel | None = None

    @property
    def vanishes(self) -> bool:
        return self.primary.is_zero() and self.secondary is not None and not any(self.secondary)

    def to_json(self) -> dict:
        return {
            "primary": list(self.primary.coords),
            "secondary": None if self.secondary is None else list(self.secondary),
            "vanishes": self.vanishes,
        }


def _check_class(alpha: CohomologyClass, E: FiniteGroup):
    if not alpha.parent.group.same_as(E):
        raise ModuleMismatch("class does not live on the gerb's group")


def coinvariants(M: GModule, pair: ProcyclicPair) -> tuple:
    """H¹(A, M) and its quotient by the image of φ - 1, φ(z)(a) = e·z(e⁻¹ae)."""
    A, e = pair.A, pair.e
    E = A.parent
    M_A = restrict_module(M, A)
    H1 = cohomology_group(A.group, M_A, 1)
    twisted = A.local_index[E.table[E.table[E.inverses[e], list(A.members)], e]]
    relations = []
    for z in H1.basis:
        table = z.full_table()
        moved = (np.einsum("ij,nj->ni", M.action[e], table[twisted])) % np.asarray(M.factors, dtype=np.int64)
        image = H1.classify(Cochain.from_full_table(A.group, M_A, moved))
        relations.append(np.subtract(image, np.eye(H1.rank, dtype=np.int64)[len(relations)]))
    quotient = cokernel(H1.invariant_factors, relations)
    return H1, quotient


def secondary_cocycle(alpha: CohomologyClass, pair: ProcyclicPair, u: Cochain) -> Cochain:
    """d_u(a) = e·u(e⁻¹ae) - u(a) - α(e, e⁻¹ae) + α(a, e), given δu = α|_A."""
    A, e = pair.A, pair.e
    E = A.parent
    M = alpha.parent.module
    members = np.asarray(A.members, dtype=np.int64)
    moved = E.table[E.table[E.inverses[e], members], e]
    c = alpha.representative.full_table()
    u_table = u.full_table()
    values = (
        np.einsum("ij,nj->ni", M.action[e], u_table[A.local_index[moved]])
        - u_table
        - c[e, moved]
        + c[members, e]
    )
    return Cochain.from_full_table(A.group, u.module, values)


def procyclic_restriction(alpha: CohomologyClass, pair: ProcyclicPair, offset: Cochain | None = None) -> ObstructionPair:
    """Restriction of alpha to A ⋊ Ẑ as the (primary, secondary) obstruction pair.

    ``offset`` (a 1-cocycle on A) shifts the trivializing cochain; the
    secondary class does not depend on it.
    """
    _check_class(alpha, pair.A.parent)
    if alpha.parent.degree != 2:
        raise ModuleMismatch("procyclic restriction needs a degree-2 class")
    primary = restrict_class(alpha, pair.A)
    if not primary.is_zero():
        return ObstructionPair(primary)
    u = primary.parent.trivialize(primary.representative)
    if offset is not None:
        u = u + offset
    H1, quotient = coinvariants(alpha.parent.module, pair)
    d_u = secondary_cocycle(alpha, pair, u)
    return ObstructionPair(primary, quotient.project(H1.classify(d_u)), quotient)


def _coset_exponents(pair: ProcyclicPair) -> tuple[Subgroup, np.ndarray, int]:
    """A⟨e⟩, the j < m̄ with xA = e^j A for each of its elements, and m̄."""
    A, e = pair.A, pair.e
    E = A.parent
    B = E.subgroup(E.generate(list(A.members) + [e]))
    coset_index = np.full(B.order, -1, dtype=np.int64)
    power, j = 0, 0
    while True:
        members = B.local_index[E.table[power, list(A.members)]]
        if coset_index[members[0]] >= 0:
            break
        coset_index[members] = j
        power, j = E.table[power, e], j + 1
    return B, coset_index, j


def stabilized_group(pair: ProcyclicPair, k: int):
    """D̃_k = {(x, j) ∈ A⟨e⟩ × Z/(m̄k) : xA = e^j A} and its projection onto A⟨e⟩."""
    B, coset_index, m_bar = _coset_exponents(pair)
    C = cyclic_group(m_bar * k)
    P = direct_product(B.group, C)
    idx = np.arange(P.order)
    x, jj = idx % B.order, idx // B.order
    D = P.subgroup(np.flatnonzero(coset_index[x] == jj % m_bar))
    projection = GroupHom(D.group, B.group, tuple(int(v) for v in x[list(D.members)]))
    return B, D, projection


def oracle_vanishes(alpha: CohomologyClass, pair: ProcyclicPair, k: int) -> bool:
    """Whether the inflation of alpha|_{A⟨e⟩} to D̃_k vanishes.

    The inflated cocycle c is a coboundary δu iff u, fixed on generators s, extends by
    u(sg) = s·u(g) + u(s) - c(s, g) to all of D̃_k consistently. u is carried as an
    affine function of its generator values and the leftover relations are solved mod
    the exponent of M.
    """
    E = pair.A.parent
    M = alpha.parent.module
    B, coset_index, m_bar = _coset_exponents(pair)
    cycle = m_bar * k
    x_local, j_of = np.nonzero(np.arange(cycle)[None, :] % m_bar == coset_index[:, None])
    size = len(x_local)
    position = np.full((B.order, cycle), -1, dtype=np.int64)
    position[x_local, j_of] = np.arange(size)
    x_of = np.asarray(B.members, dtype=np.int64)[x_local]

    A_generators = [(pair.A.members[s], 0) for s in pair.A.group.generators]
    generators = sorted({int(position[B.local_index[x], j % cycle]) for x, j in [*A_generators, (pair.e, 1)]} - {0})
    r, t = M.rank, len(generators)
    rows = size * t * r
    if rows > settings.cochain_cap:
        raise SizeLimitExceeded("stabilized group too large", order=size, rows=rows, cap=settings.cochain_cap)
    if r == 0 or t == 0:
        return True

    moduli = np.asarray(M.factors, dtype=np.int64)
    c = alpha.representative.full_table()
    L = np.zeros((size, r, t * r), dtype=np.int64)
    b = np.zeros((size, r), dtype=np.int64)
    known = np.zeros(size, dtype=bool)
    known[0] = True
    for i, s in enumerate(generators):
        L[s, :, i * r : (i + 1) * r] = np.eye(r, dtype=np.int64)
        known[s] = True
    relations, values = [], []
    frontier = np.asarray([0, *generators], dtype=np.int64)
    while frontier.size:
        fresh = []
        for s in generators:
            sx = x_of[s]
            h = position[B.local_index[E.table[sx, x_of[frontier]]], (j_of[s] + j_of[frontier]) % cycle]
            act = M.action[sx]
            Lh = (np.einsum("ij,njk->nik", act, L[frontier]) + L[s]) % moduli[None, :, None]
            bh = (np.einsum("ij,nj->ni", act, b[frontier]) + b[s] - c[sx, x_of[frontier]]) % moduli
            new = np.flatnonzero(~known[h])
            targets, first = np.unique(h[new], return_index=True)
            chosen = new[first]
            L[targets], b[targets] = Lh[chosen], bh[chosen]
            known[targets] = True
            fresh.append(targets)
            rest = np.ones(len(h), dtype=bool)
            rest[chosen] = False
            relations.append((L[h[rest]] - Lh[rest]) % moduli[None, :, None])
            values.append((bh[rest] - b[h[rest]]) % moduli)
        frontier = np.concatenate(fresh)

    e = int(np.lcm.reduce(moduli))
    # row i is read mod d_i; scale it into Z/e
    scale = np.tile(e // moduli, sum(len(v) for v in values))
    matrix = np.concatenate(relations).reshape(-1, t * r) * scale[:, None]
    rhs = np.concatenate(values).reshape(-1) * scale
    return is_solvable_mod(matrix, rhs, e)


def evaluate_along(alpha: CohomologyClass, hom: GroupHom, module: GModule | None = None) -> CohomologyClass:
    """alpha pulled back along a homomorphism into its group."""
    cochain = pull_back_cochain(alpha.representative, hom, module)
    return cohomology_group(hom.source, cochain.module, alpha.parent.degree).class_of(cochain)
