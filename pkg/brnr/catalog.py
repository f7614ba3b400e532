"""Built-in families of finite gerbs for batch scans and the verification suites."""

import itertools
import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Iterator, Literal

import numpy as np
from pydantic import BaseModel, Field

from .base import ActionNotHomomorphic, BrnrError, CharacterNotMultiplicative
from .config import settings
from .gerbe import Gerb, gerb_from_explicit, gerb_from_split
from .groups import (
    FiniteGroup,
    abelian_invariants,
    action_from_generators,
    all_subgroups,
    cyclic_group,
    direct_product,
    extend_to_hom,
    group_from_permutations,
    quotient_by_normal,
)
from .modules import GModule, character_from_generators, mu_module, pull_back_module

logger = logging.getLogger(__name__)

FAMILIES = (
    "abelian",
    "dihedral",
    "quaternion",
    "symmetric",
    "alternating",
    "extraspecial",
    "extensions",
    "central64",
)
GAMMAS = ("1", "Z2", "Z3", "Z4", "Z2xZ2", "S3")


def metacyclic_group(m: int, k: int, t: int, s: int = 0, name: str | None = None) -> FiniteGroup:
    """⟨x, y | x^m, y^k = x^s, y x y⁻¹ = x^t⟩, element x^i y^j indexed i + m·j."""
    if pow(t, k, m) != 1 % m or (t * s - s) % m:
        raise BrnrError("parameters do not define a metacyclic group", m=m, k=k, t=t, s=s)
    order = m * k
    idx = np.arange(order)
    i, j = idx % m, idx // m
    twist = np.array([pow(t, int(v), m) for v in range(k)], dtype=np.int64)
    wraps = (j[:, None] + j[None, :]) >= k
    left = i[:, None] + twist[j][:, None] * i[None, :] + s * wraps
    table = left % m + m * ((j[:, None] + j[None, :]) % k)
    return FiniteGroup(order, table=table, name=name)


def abelian_group(factors) -> FiniteGroup:
    G = cyclic_group(1)
    for f in factors:
        G = direct_product(G, cyclic_group(f))
    G.name = "x".join(f"Z{f}" for f in factors) or "1"
    return G


def dihedral_group(m: int) -> FiniteGroup:
    """Symmetries of the m-gon, order 2m."""
    return metacyclic_group(m, 2, m - 1, name=f"D{m}")


def quaternion_group(order: int) -> FiniteGroup:
    m = order // 4
    return metacyclic_group(2 * m, 2, 2 * m - 1, m, name=f"Q{order}")


def semidihedral_group(order: int) -> FiniteGroup:
    m = order // 2
    return metacyclic_group(m, 2, m // 2 - 1, name=f"SD{order}")


def symmetric_group(degree: int) -> FiniteGroup:
    swap = [1, 0] + list(range(2, degree))
    cycle = list(range(1, degree)) + [0]
    return group_from_permutations(degree, [swap, cycle], name=f"S{degree}")


def alternating_group(degree: int) -> FiniteGroup:
    gens = [[1, 2, 0] + list(range(3, degree))]
    if degree > 3:
        gens.append([0, 2, 3, 1] + list(range(4, degree)))
    return group_from_permutations(degree, gens, name=f"A{degree}")


def heisenberg_group(p: int) -> FiniteGroup:
    """Unitriangular 3×3 matrices over F_p, (a, b, c) indexed a + p·b + p²·c."""
    idx = np.arange(p**3)
    a, b, c = idx % p, (idx // p) % p, idx // (p * p)
    na = (a[:, None] + a[None, :]) % p
    nb = (b[:, None] + b[None, :]) % p
    nc = (c[:, None] + c[None, :] + a[:, None] * b[None, :]) % p
    return FiniteGroup(p**3, table=na + p * nb + p * p * nc, name=f"Heis{p}")


_NAMED = [
    (re.compile(r"Z(\d+)(?:xZ\d+)*"), lambda m, name: abelian_group([int(f) for f in name[1:].split("xZ")])),
    (re.compile(r"D(\d+)"), lambda m, name: dihedral_group(int(m.group(1)))),
    (re.compile(r"Q(\d+)"), lambda m, name: quaternion_group(int(m.group(1)))),
    (re.compile(r"SD(\d+)"), lambda m, name: semidihedral_group(int(m.group(1)))),
    (re.compile(r"S(\d)"), lambda m, name: symmetric_group(int(m.group(1)))),
    (re.compile(r"A(\d)"), lambda m, name: alternating_group(int(m.group(1)))),
    (re.compile(r"Heis(\d+)"), lambda m, name: heisenberg_group(int(m.group(1)))),
    (re.compile(r"M27"), lambda m, name: metacyclic_group(9, 3, 4, name="M27")),
]


def named_group(name: str) -> FiniteGroup:
    """Z4, Z2xZ4, D4 (order 8), Q8, SD16, S3, A4, Heis3, M27 or 1."""
    if name == "1":
        return gamma_group("1")
    for pattern, build in _NAMED:
        match = pattern.fullmatch(name)
        if match:
            G = build(match, name)
            G.name = name
            return G
    raise BrnrError(f"unknown group name {name!r}")


def gamma_group(name: str) -> FiniteGroup:
    builders = {
        "1": lambda: cyclic_group(1),
        "Z2": lambda: cyclic_group(2),
        "Z3": lambda: cyclic_group(3),
        "Z4": lambda: cyclic_group(4),
        "Z2xZ2": lambda: abelian_group((2, 2)),
        "S3": lambda: dihedral_group(3),
    }
    if name not in builders:
        raise BrnrError(f"unknown Galois group {name!r}", choices=list(GAMMAS))
    gamma = builders[name]()
    gamma.name = name
    return gamma


def identify_gamma(Q: FiniteGroup) -> str | None:
    """The name of Q among the Galois group choices, if it is one."""
    if Q.order == 1:
        return "1"
    if not Q.is_abelian:
        return "S3" if Q.order == 6 else None
    return {(2,): "Z2", (3,): "Z3", (4,): "Z4", (2, 2): "Z2xZ2"}.get(abelian_invariants(Q))


def _abelian_factor_lists(bound: int) -> list[tuple[int, ...]]:
    """Invariant factor sequences d_1 | d_2 | ... with product ≤ bound."""
    found = []

    def extend(prefix: tuple[int, ...], product: int):
        if prefix:
            found.append(prefix)
        start = prefix[-1] if prefix else 2
        for d in range(start, bound // product + 1):
            if prefix and d % prefix[-1]:
                continue
            extend(prefix + (d,), product * d)

    extend((), 1)
    return sorted(found, key=lambda f: (int(np.prod(f)), f))


def family_groups(family: str, bound: int) -> list[FiniteGroup]:
    """Groups F of the family with |F| ≤ bound."""
    if family == "abelian":
        return [abelian_group(f) for f in _abelian_factor_lists(bound)]
    if family == "dihedral":
        return [dihedral_group(m) for m in range(3, bound // 2 + 1)]
    if family == "quaternion":
        groups = [quaternion_group(2**k) for k in range(3, 6) if 2**k <= bound]
        return groups + [semidihedral_group(2**k) for k in range(4, 6) if 2**k <= bound]
    if family == "symmetric":
        return [symmetric_group(d) for d in (3, 4) if [6, 24][d - 3] <= bound]
    if family == "alternating":
        return [alternating_group(4)] if bound >= 12 else []
    if family == "extraspecial":
        groups = [dihedral_group(4), quaternion_group(8)] if bound >= 8 else []
        if bound >= 27:
            groups += [heisenberg_group(3), metacyclic_group(9, 3, 4, name="M27")]
        return groups
    if family == "central64":
        if bound < 64:
            return []
        products = [
            (dihedral_group(4), abelian_group((8,))),
            (quaternion_group(8), abelian_group((8,))),
            (dihedral_group(4), quaternion_group(8)),
            (quaternion_group(8), quaternion_group(8)),
            (dihedral_group(4), dihedral_group(4)),
        ]
        groups = []
        for A, B in products:
            G = direct_product(A, B)
            G.name = f"{A.name}x{B.name}"
            groups.append(G)
        return groups
    if family == "extensions":
        return extension_groups(bound)
    raise BrnrError(f"unknown catalog family {family!r}", choices=list(FAMILIES))


def extension_groups(bound: int) -> list[FiniteGroup]:
    """Candidate total groups E for non-split gerbs."""
    groups = [cyclic_group(n) for n in (4, 8, 9, 16) if n <= bound]
    groups += [abelian_group(f) for f in ((2, 4), (4, 4), (2, 8)) if int(np.prod(f)) <= bound]
    for family in ("quaternion", "extraspecial"):
        groups += family_groups(family, bound)
    for G in groups:
        G.name = G.name or f"Z{G.order}"
    return groups


def automorphisms(F: FiniteGroup) -> np.ndarray:
    """Every automorphism of F as a row of images, the identity first."""

    def compute():
        gens = F.generators
        orders = F.element_orders
        candidates = [np.flatnonzero(orders == orders[g]).tolist() for g in gens]
        rows = []
        for images in itertools.product(*candidates):
            hom = extend_to_hom(F, F, images)
            if hom is not None and len(set(hom.images)) == F.order:
                rows.append(hom.images)
        rows.sort()
        logger.debug(f"|Aut({F.name})| = {len(rows)}")
        return np.asarray(rows, dtype=np.int64).reshape(len(rows), F.order)

    return F.memo("automorphisms", compute)


class _AutomorphismTable:
    """Index arithmetic on the rows of ``automorphisms(F)``."""

    def __init__(self, F: FiniteGroup):
        self.rows = automorphisms(F)
        self.inverse_rows = np.argsort(self.rows, axis=1)
        self.index = {row.tobytes(): i for i, row in enumerate(self.rows)}
        self.orders = np.array([self._order(row) for row in self.rows], dtype=np.int64)

    @staticmethod
    def _order(row: np.ndarray) -> int:
        power, k = row, 1
        while not np.array_equal(power, np.arange(row.size)):
            power, k = row[power], k + 1
        return k

    def conjugates(self, a: int) -> np.ndarray:
        """c a c⁻¹ for every automorphism c, as row indices."""
        inner = self.rows[a][self.inverse_rows]
        moved = np.take_along_axis(self.rows, inner, axis=1)
        return np.array([self.index[row.tobytes()] for row in moved], dtype=np.int64)

    def class_representatives(self, candidates: list[int]) -> list[int]:
        seen: set[int] = set()
        reps = []
        for a in candidates:
            if a in seen:
                continue
            reps.append(a)
            seen.update(int(x) for x in self.conjugates(a))
        return reps


def actions(F: FiniteGroup, gamma: FiniteGroup, limit: int | None = None) -> list[np.ndarray]:
    """Actions Γ → Aut(F) up to Aut(F)-conjugacy, the trivial action first."""
    if gamma.order == 1:
        return [np.arange(F.order, dtype=np.int64)[None, :]]
    table = _AutomorphismTable(F)
    gen_orders = [gamma.element_order(g) for g in gamma.generators]
    candidates = [[a for a in range(len(table.rows)) if o % table.orders[a] == 0] for o in gen_orders]
    candidates[0] = table.class_representatives(candidates[0])
    search = int(np.prod([len(c) for c in candidates], dtype=object))
    if search > settings.section_cap:
        logger.warning(f"Action search for {F.name} by {gamma.name} capped: {search} assignments")
        return [np.broadcast_to(np.arange(F.order, dtype=np.int64), (gamma.order, F.order)).copy()]
    seen: set[tuple[int, ...]] = set()
    found = []
    for images in itertools.product(*candidates):
        if images in seen:
            continue
        try:
            act = action_from_generators(F, gamma, [table.rows[a] for a in images])
        except ActionNotHomomorphic:
            continue
        orbit = zip(*(table.conjugates(a) for a in images))
        seen.update(tuple(int(x) for x in t) for t in orbit)
        found.append(act)
        if limit and len(found) >= limit:
            break
    return found


def characters(gamma: FiniteGroup, n: int) -> list[tuple[int, ...]]:
    """Every character Γ → (Z/n)^×, sorted, the trivial one first."""
    units = [u for u in range(1, n) if gcd(u, n) == 1] or [0]
    found = set()
    for values in itertools.product(units, repeat=len(gamma.generators)):
        try:
            chi = character_from_generators(gamma, n, values)
        except CharacterNotMultiplicative:
            continue
        found.add(tuple(int(x) % n for x in chi))
    return sorted(found, key=lambda c: (any(x != 1 % n for x in c), c))


class CatalogSpec(BaseModel):
    """Which families, Galois groups, actions and coefficients a scan covers."""

    families: list[Literal[FAMILIES]] = Field(default_factory=lambda: ["abelian"])
    max_f_order: int = Field(16, ge=1)
    max_order: int = Field(96, ge=1)
    gammas: list[Literal[GAMMAS]] = Field(default_factory=lambda: list(GAMMAS))
    n_values: list[int | Literal["F"]] = Field(default_factory=lambda: [2, 3, 4, 6, "F"])
    max_actions: int | None = Field(None, ge=1)
    max_characters: int | None = Field(None, ge=1)


PRESETS = {
    "small": CatalogSpec(
        families=["abelian", "dihedral", "symmetric"],
        max_f_order=6,
        max_order=24,
        gammas=["1", "Z2"],
        n_values=[2, "F"],
        max_actions=2,
        max_characters=2,
    ),
    "standard": CatalogSpec(
        families=[f for f in FAMILIES if f != "central64"],
        max_f_order=48,
        max_order=96,
    ),
    "central64": CatalogSpec(families=["central64"], max_f_order=64, max_order=64, gammas=["1"], n_values=[2, 4]),
}


def preset(name: str) -> CatalogSpec:
    if name not in PRESETS:
        raise BrnrError(f"unknown catalog {name!r}", choices=sorted(PRESETS))
    return PRESETS[name].model_copy(deep=True)


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    family: str
    gerb: Gerb
    n: int
    character: tuple[int, ...]
    action_index: int = 0
    notes: tuple[str, ...] = field(default=())

    @cached_property
    def base_module(self) -> GModule:
        return mu_module(self.n, self.gerb.gamma, self.character)

    @cached_property
    def module(self) -> GModule:
        return pull_back_module(self.base_module, self.gerb.pi)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "family": self.family,
            "order": self.gerb.E.order,
            "F_order": self.gerb.F.order,
            "gamma": self.gerb.gamma.name,
            "split": self.gerb.split,
            "n": self.n,
            "character": list(self.character),
        }


def _n_values(spec: CatalogSpec, F_order: int) -> list[int]:
    values = {F_order if v == "F" else v for v in spec.n_values}
    return sorted(v for v in values if v >= 2)


def _entries_for(family: str, label: str, gerb: Gerb, spec: CatalogSpec, action_index: int) -> Iterator[CatalogEntry]:
    for n in _n_values(spec, gerb.F.order):
        chars = characters(gerb.gamma, n)
        if spec.max_characters:
            chars = chars[: spec.max_characters]
        for chi in chars:
            name = f"{label} n={n} chi={','.join(map(str, chi))}"
            yield CatalogEntry(name, family, gerb, n, chi, action_index)


def _split_entries(family: str, F: FiniteGroup, spec: CatalogSpec) -> Iterator[CatalogEntry]:
    for gamma_name in spec.gammas:
        gamma = gamma_group(gamma_name)
        if F.order * gamma.order > spec.max_order:
            continue
        for k, act in enumerate(actions(F, gamma, spec.max_actions)):
            gerb = gerb_from_split(F, gamma, act)
            gerb = Gerb(gerb.E, gerb.F, gerb.gamma, gerb.pi, gerb.section, name=f"{F.name}:{gamma_name}#{k}")
            yield from _entries_for(family, gerb.name, gerb, spec, k)


def _nonsplit_entries(E: FiniteGroup, spec: CatalogSpec) -> Iterator[CatalogEntry]:
    if E.order > spec.max_order:
        return
    for members in all_subgroups(E):
        N = E.subgroup(members)
        if N.order == 1 or N.order > spec.max_f_order or not N.is_normal():
            continue
        Q, projection = quotient_by_normal(E, N)
        gamma_name = identify_gamma(Q)
        if gamma_name is None or gamma_name not in spec.gammas or gamma_name == "1":
            continue
        Q.name = gamma_name
        gerb = gerb_from_explicit(E, N, projection)
        if gerb.split:
            continue
        label = f"{E.name}/{N.order}:{gamma_name}"
        gerb = Gerb(gerb.E, gerb.F, gerb.gamma, gerb.pi, None, name=label)
        yield from _entries_for("extensions", label, gerb, spec, 0)


def iter_catalog(spec: CatalogSpec) -> Iterator[CatalogEntry]:
    """Entries in a fixed order: family, then group, then Γ, action, n, character."""
    for family in spec.families:
        if family == "extensions":
            for E in extension_groups(spec.max_order):
                yield from _nonsplit_entries(E, spec)
            continue
        for F in family_groups(family, spec.max_f_order):
            yield from _split_entries(family, F, spec)


def catalog(spec: CatalogSpec | str) -> list[CatalogEntry]:
    spec = preset(spec) if isinstance(spec, str) else spec
    entries = list(iter_catalog(spec))
    logger.info(f"Catalog: {len(entries)} entries over {', '.join(spec.families)}")
    return entries
