"""Finite groups on indexed elements.

Every group stores its elements as indices ``0..order-1`` with ``0`` the
identity. Multiplication is a numpy table; permutation groups build theirs
lazily, once, under a lock.
"""

import hashlib
import itertools
import logging
import threading
from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np
from sympy import factorint

from .base import (
    ActionNotHomomorphic,
    BrnrError,
    NoIdentity,
    NoInverse,
    NotAbelian,
    NotAHomomorphism,
    NotAPermutation,
    NotAssociative,
    NotNormal,
    OrderLimitExceeded,
)
from .config import settings

logger = logging.getLogger(__name__)


class FiniteGroup:
    """A finite group whose elements are the indices ``0..order-1``."""

    def __init__(
        self,
        order: int,
        *,
        table: np.ndarray | None = None,
        product: Callable[[], np.ndarray] | None = None,
        inverses: np.ndarray | None = None,
        name: str | None = None,
    ):
        if table is None and product is None:
            raise ValueError("either a table or a table builder is required")
        self._order = int(order)
        self._table = None if table is None else np.ascontiguousarray(table, dtype=np.int64)
        self._build_table = product
        self._inverses = inverses
        self._lock = threading.Lock()
        self._memo: dict = {}
        self.name = name

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<FiniteGroup{label} order={self._order}>"

    def __len__(self):
        return self._order

    @property
    def order(self) -> int:
        return self._order

    @property
    def table(self) -> np.ndarray:
        if self._table is None:
            with self._lock:
                if self._table is None:
                    logger.debug(f"Building multiplication table of order {self._order}")
                    self._table = np.ascontiguousarray(self._build_table(), dtype=np.int64)
        return self._table

    def memo(self, key, compute):
        """Per-group memo for derived data (subgroup lattices, generators)."""
        if key in self._memo:
            return self._memo[key]
        value = compute()
        with self._lock:
            return self._memo.setdefault(key, value)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    @cached_property
    def inverses(self) -> np.ndarray:
        if self._inverses is not None:
            return np.asarray(self._inverses, dtype=np.int64)
        return np.argmax(self.table == 0, axis=1).astype(np.int64)

    def inv(self, a: int) -> int:
        return int(self.inverses[a])

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.inv(g), -k
        result = 0
        for _ in range(k):
            result = int(self.table[result, g])
        return result

    def conjugate(self, g: int, x: int) -> int:
        """g x g^-1"""
        return int(self.table[self.table[g, x], self.inverses[g]])

    def conjugate_set(self, g: int, members: Sequence[int]) -> tuple[int, ...]:
        members = np.asarray(members, dtype=np.int64)
        image = self.table[self.table[g, members], self.inverses[g]]
        return tuple(int(x) for x in np.sort(image))

    @cached_property
    def element_orders(self) -> np.ndarray:
        orders = np.ones(self._order, dtype=np.int64)
        current = np.arange(self._order)
        base = np.arange(self._order)
        pending = current != 0
        k = 1
        while pending.any():
            k += 1
            current = self.table[current, base]
            done = pending & (current == 0)
            orders[done] = k
            pending &= ~done
        return orders

    def element_order(self, g: int) -> int:
        return int(self.element_orders[g])

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    @cached_property
    def exponent(self) -> int:
        return int(np.lcm.reduce(self.element_orders))

    def generate(self, gens: Iterable[int]) -> tuple[int, ...]:
        """Members of the subgroup generated by ``gens``, sorted."""
        gens = np.unique(np.asarray(list(gens), dtype=np.int64))
        gens = gens[gens != 0]
        members = np.zeros(self._order, dtype=bool)
        members[0] = True
        if gens.size == 0:
            return (0,)
        frontier = np.array([0], dtype=np.int64)
        while frontier.size:
            candidates = np.unique(self.table[np.ix_(frontier, gens)])
            candidates = candidates[~members[candidates]]
            members[candidates] = True
            frontier = candidates
        return tuple(int(x) for x in np.flatnonzero(members))

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """A small generating set, chosen greedily in element order."""
        gens: list[int] = []
        span = np.zeros(self._order, dtype=bool)
        span[0] = True
        for g in range(1, self._order):
            if not span[g]:
                gens.append(g)
                span[list(self.generate(gens))] = True
                if span.all():
                    break
        return tuple(gens)

    @cached_property
    def canonical_hash(self) -> str:
        digest = hashlib.sha256()
        digest.update(str(self._order).encode())
        digest.update(self.table.astype("<i4").tobytes())
        return digest.hexdigest()

    def same_as(self, other: "FiniteGroup") -> bool:
        if self is other:
            return True
        return self._order == other._order and np.array_equal(self.table, other.table)

    def subgroup(self, members: Iterable[int]) -> "Subgroup":
        return Subgroup(self, tuple(sorted({int(m) for m in members})))

    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(range(self._order)))

    def trivial(self) -> "Subgroup":
        return Subgroup(self, (0,))


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    members: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.members, dtype=np.int64)
        if m.size == 0 or m[0] != 0 or np.any(np.diff(m) <= 0):
            raise BrnrError("subgroup members must be sorted, distinct and contain 0")
        if not np.isin(self.parent.table[np.ix_(m, m)], m).all():
            raise BrnrError("subgroup members are not closed under multiplication")

    def __repr__(self):
        return f"<Subgroup order={self.order} of {self.parent!r}>"

    def __contains__(self, g: int) -> bool:
        return bool(self._mask[g])

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    @cached_property
    def _mask(self) -> np.ndarray:
        mask = np.zeros(self.parent.order, dtype=bool)
        mask[list(self.members)] = True
        return mask

    @cached_property
    def local_index(self) -> np.ndarray:
        """Parent index -> position in ``members`` (-1 outside)."""
        local = np.full(self.parent.order, -1, dtype=np.int64)
        local[list(self.members)] = np.arange(self.order)
        return local

    @cached_property
    def group(self) -> FiniteGroup:
        """The subgroup as a standalone group, element i = members[i]."""
        m = np.asarray(self.members, dtype=np.int64)
        table = self.local_index[self.parent.table[np.ix_(m, m)]]
        return FiniteGroup(self.order, table=table)

    @cached_property
    def inclusion(self) -> "GroupHom":
        return GroupHom(self.group, self.parent, self.members)

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        return bool(other._mask[list(self.members)].all())

    def conjugate(self, g: int) -> "Subgroup":
        return Subgroup(self.parent, self.parent.conjugate_set(g, self.members))

    def is_normal(self) -> bool:
        return self.normality_witness() is None

    def normality_witness(self) -> tuple[int, int] | None:
        G = self.parent
        m = np.asarray(self.members, dtype=np.int64)
        for g in range(G.order):
            image = G.table[G.table[g, m], G.inverses[g]]
            outside = ~self._mask[image]
            if outside.any():
                return g, int(m[np.argmax(outside)])
        return None


@dataclass(frozen=True)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    images: tuple[int, ...]

    def __call__(self, g: int) -> int:
        return self.images[g]

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.images, dtype=np.int64)

    def validate(self) -> "GroupHom":
        if len(self.images) != self.source.order:
            raise NotAHomomorphism("image list does not cover the source")
        img = self.array
        if img.size and (img.min() < 0 or img.max() >= self.target.order):
            raise NotAHomomorphism("image out of range")
        lhs = img[self.source.table]
        rhs = self.target.table[np.ix_(img, img)]
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            a, b = (int(x) for x in bad[0])
            raise NotAHomomorphism("images do not respect multiplication", pair=(a, b))
        return self

    def kernel(self) -> Subgroup:
        return Subgroup(self.source, tuple(int(x) for x in np.flatnonzero(self.array == 0)))

    def image(self) -> Subgroup:
        return self.target.subgroup(self.images)

    def is_surjective(self) -> bool:
        return len(set(self.images)) == self.target.order


def verify_group(G: FiniteGroup, exhaustive_limit: int | None = None, samples: int | None = None) -> None:
    """Checks identity, inverses and associativity; raises with a witness."""
    exhaustive_limit = exhaustive_limit or settings.exhaustive_check_order
    samples = samples or settings.sample_triples
    t = G.table
    n = G.order
    ar = np.arange(n)
    if not (np.array_equal(t[0], ar) and np.array_equal(t[:, 0], ar)):
        raise NoIdentity("index 0 is not a two-sided identity")
    for a in range(n):
        row = np.flatnonzero(t[a] == 0)
        if row.size != 1 or t[row[0], a] != 0:
            raise NoInverse("element has no two-sided inverse", element=a)
    if n <= exhaustive_limit:
        for a in range(n):
            lhs = t[t[a]]
            rhs = t[a][t]
            bad = np.argwhere(lhs != rhs)
            if bad.size:
                b, c = (int(x) for x in bad[0])
                raise NotAssociative("(ab)c != a(bc)", triple=(a, b, c))
    else:
        rng = np.random.default_rng(0)
        a, b, c = rng.integers(0, n, size=(3, samples))
        bad = np.flatnonzero(t[t[a, b], c] != t[a, t[b, c]])
        if bad.size:
            i = bad[0]
            raise NotAssociative("(ab)c != a(bc)", triple=(int(a[i]), int(b[i]), int(c[i])))


def group_from_table(table, name: str | None = None) -> FiniteGroup:
    t = np.asarray(table, dtype=np.int64)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise BrnrError("multiplication table must be a non-empty square matrix")
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        raise BrnrError("multiplication table entry out of range")
    ar = np.arange(n)
    candidates = [e for e in range(n) if np.array_equal(t[e], ar) and np.array_equal(t[:, e], ar)]
    if not candidates:
        raise NoIdentity("no element acts as a two-sided identity")
    e = candidates[0]
    if e != 0:
        # relabel so the identity sits at index 0
        perm = ar.copy()
        perm[0], perm[e] = e, 0
        relabelled = np.empty_like(t)
        relabelled[np.ix_(perm, perm)] = perm[t]
        t = relabelled
    G = FiniteGroup(n, table=t, name=name)
    verify_group(G)
    return G


def group_from_permutations(
    degree: int, generators: Sequence[Sequence[int]], max_order: int | None = None, name: str | None = None
) -> FiniteGroup:
    max_order = max_order or settings.max_order
    gens = []
    for i, gen in enumerate(generators):
        arr = np.asarray(gen, dtype=np.int64)
        if arr.shape != (degree,) or not np.array_equal(np.sort(arr), np.arange(degree)):
            raise NotAPermutation("generator is not a bijection", generator=i)
        gens.append(arr)
    identity = np.arange(degree, dtype=np.int64)
    elements = [identity]
    index = {identity.tobytes(): 0}
    queue = deque([0])
    while queue:
        x = elements[queue.popleft()]
        for g in gens:
            y = x[g]
            key = y.tobytes()
            if key not in index:
                index[key] = len(elements)
                elements.append(y)
                queue.append(index[key])
                if len(elements) > max_order:
                    raise OrderLimitExceeded("permutation group too large", cap=max_order)
    perms = np.stack(elements)
    order = len(elements)

    def build_table():
        table = np.empty((order, order), dtype=np.int64)
        for a in range(order):
            products = perms[a][perms]
            table[a] = [index[row.tobytes()] for row in products]
        return table

    inverses = np.array([index[np.argsort(p).tobytes()] for p in perms], dtype=np.int64)
    G = FiniteGroup(order, product=build_table, inverses=inverses, name=name)
    G.permutations = perms
    logger.debug(f"Permutation group of degree {degree} closed at order {order}")
    return G


def cyclic_group(n: int) -> FiniteGroup:
    ar = np.arange(n)
    return FiniteGroup(n, table=(ar[:, None] + ar[None, :]) % n, name=f"Z/{n}")


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """Pairs (g, h) indexed g + |G| h."""
    nG, nH = G.order, H.order
    idx = np.arange(nG * nH)
    g, h = idx % nG, idx // nG
    table = G.table[np.ix_(g, g)] + nG * H.table[np.ix_(h, h)]
    name = f"{G.name}x{H.name}" if G.name and H.name else None
    return FiniteGroup(nG * nH, table=table, name=name)


def extend_to_hom(
    source: FiniteGroup,
    target: FiniteGroup,
    gen_images: Sequence[int],
    generators: Sequence[int] | None = None,
) -> GroupHom | None:
    """The homomorphism sending ``generators`` to ``gen_images``, if one exists."""
    generators = source.generators if generators is None else tuple(generators)
    images = np.full(source.order, -1, dtype=np.int64)
    images[0] = 0
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s, t in zip(generators, gen_images):
            y = source.table[x, s]
            v = target.table[images[x], t]
            if images[y] == -1:
                images[y] = v
                queue.append(int(y))
            elif images[y] != v:
                return None
    if (images < 0).any():
        return None
    return GroupHom(source, target, tuple(int(x) for x in images))


def is_automorphism(F: FiniteGroup, images: Sequence[int]) -> bool:
    img = np.asarray(images, dtype=np.int64)
    if img.shape != (F.order,) or not np.array_equal(np.sort(img), np.arange(F.order)):
        return False
    return bool(np.array_equal(img[F.table], F.table[np.ix_(img, img)]))


def validate_action(F: FiniteGroup, gamma: FiniteGroup, action) -> np.ndarray:
    act = np.asarray(action, dtype=np.int64)
    if act.shape != (gamma.order, F.order):
        raise ActionNotHomomorphic("action must give one automorphism per element of Gamma")
    if not np.array_equal(act[0], np.arange(F.order)):
        raise ActionNotHomomorphic("identity of Gamma must act trivially", pair=(0, 0))
    for g in range(gamma.order):
        if not is_automorphism(F, act[g]):
            raise ActionNotHomomorphic("not an automorphism", element=g)
    for g in range(gamma.order):
        composed = act[g][act]
        bad = np.flatnonzero((act[gamma.table[g]] != composed).any(axis=1))
        if bad.size:
            raise ActionNotHomomorphic("action is not a homomorphism", pair=(g, int(bad[0])))
    return act


def action_from_generators(F: FiniteGroup, gamma: FiniteGroup, automorphisms: Sequence[Sequence[int]]) -> np.ndarray:
    """Full action table from automorphisms assigned to ``gamma.generators``."""
    if len(automorphisms) != len(gamma.generators):
        raise ActionNotHomomorphic("one automorphism per generator of Gamma is required")
    autos = [np.asarray(a, dtype=np.int64) for a in automorphisms]
    for i, a in enumerate(autos):
        if not is_automorphism(F, a):
            raise ActionNotHomomorphic("not an automorphism", generator=i)
    act = np.full((gamma.order, F.order), -1, dtype=np.int64)
    act[0] = np.arange(F.order)
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s, a in zip(gamma.generators, autos):
            y = gamma.table[x, s]
            value = act[x][a]
            if act[y, 0] == -1:
                act[y] = value
                queue.append(int(y))
            elif not np.array_equal(act[y], value):
                raise ActionNotHomomorphic("generator automorphisms violate a relation", pair=(x, int(s)))
    return act


def semidirect_product(F: FiniteGroup, gamma: FiniteGroup, action):
    """F ⋊ Γ with (f, γ)(f', γ') = (f·γ(f'), γγ'), element (f, γ) indexed f + |F| γ.

    Returns the group, the embedding of F, the projection to Γ and the
    canonical section.
    """
    act = validate_action(F, gamma, action)
    nF, nG = F.order, gamma.order
    idx = np.arange(nF * nG)
    f, g = idx % nF, idx // nF
    f_prod = F.table[f[:, None], act[g[:, None], f[None, :]]]
    g_prod = gamma.table[np.ix_(g, g)]
    E = FiniteGroup(nF * nG, table=f_prod + nF * g_prod)
    embedding = GroupHom(F, E, tuple(range(nF)))
    projection = GroupHom(E, gamma, tuple(int(x) for x in g))
    section = GroupHom(gamma, E, tuple(int(nF * x) for x in range(nG)))
    return E, embedding, projection, section


def quotient_by_normal(G: FiniteGroup, N: Subgroup):
    witness = N.normality_witness()
    if witness is not None:
        g, n = witness
        raise NotNormal("subgroup is not normal", conjugator=g, element=n, image=G.conjugate(g, n))
    m = np.asarray(N.members, dtype=np.int64)
    reps = G.table[:, m].min(axis=1)
    coset_reps, coset_of = np.unique(reps, return_inverse=True)
    q_table = coset_of[G.table[np.ix_(coset_reps, coset_reps)]]
    Q = FiniteGroup(len(coset_reps), table=q_table)
    projection = GroupHom(G, Q, tuple(int(x) for x in coset_of))
    return Q, projection


def normalizer(G: FiniteGroup, H: Subgroup) -> Subgroup:
    return G.subgroup(g for g in range(G.order) if G.conjugate_set(g, H.members) == H.members)


def conjugacy_classes(G: FiniteGroup) -> list[tuple[int, ...]]:
    """Conjugacy classes of elements, each sorted, ordered by least member."""
    seen = np.zeros(G.order, dtype=bool)
    classes = []
    ar = np.arange(G.order)
    for x in range(G.order):
        if seen[x]:
            continue
        orbit = np.unique(G.table[G.table[ar, x], G.inverses])
        seen[orbit] = True
        classes.append(tuple(int(y) for y in orbit))
    return classes


_lattice_store = None


def attach_lattice_store(store) -> None:
    """Persists subgroup lattices through ``store`` (see db.cache)."""
    global _lattice_store
    _lattice_store = store


def all_subgroups(G: FiniteGroup, cap: int | None = None) -> list[tuple[int, ...]]:
    """Every subgroup as a sorted member tuple, closed up from cyclic subgroups."""
    cap = cap or settings.subgroup_cap
    if G.order > cap:
        raise OrderLimitExceeded("group too large for subgroup enumeration", order=G.order, cap=cap)

    def compute():
        if _lattice_store is not None:
            stored = _lattice_store.load_subgroups(G.canonical_hash)
            if stored is not None:
                return stored
        cyclic: dict[tuple[int, ...], tuple[int, ...]] = {}
        for g in range(G.order):
            members = G.generate([g])
            cyclic.setdefault(members, (g,))
        found = dict(cyclic)
        layer = list(cyclic)
        cyclic_items = list(cyclic.items())
        while layer:
            next_layer = []
            for H in layer:
                h_set = set(H)
                for C, c_gens in cyclic_items:
                    if h_set.issuperset(C):
                        continue
                    J = G.generate(found[H] + c_gens)
                    if J not in found:
                        found[J] = found[H] + c_gens
                        next_layer.append(J)
            layer = next_layer
        logger.debug(f"{len(found)} subgroups in group of order {G.order}")
        lattice = sorted(found, key=lambda m: (len(m), m))
        if _lattice_store is not None:
            _lattice_store.save_subgroups(G.canonical_hash, lattice)
        return lattice

    return G.memo("subgroups", compute)


def subgroups_up_to_conjugacy(G: FiniteGroup, cap: int | None = None) -> list[tuple[Subgroup, int]]:
    """One representative per conjugacy class with the class size."""
    subs = all_subgroups(G, cap)

    def compute():
        assigned: set[tuple[int, ...]] = set()
        classes = []
        for H in subs:
            if H in assigned:
                continue
            orbit = {G.conjugate_set(g, H) for g in range(G.order)}
            assigned.update(orbit)
            rep = min(orbit)
            classes.append((Subgroup(G, rep), len(orbit)))
        classes.sort(key=lambda item: (item[0].order, item[0].members))
        return classes

    return G.memo("subgroup-classes", compute)


class SubgroupKind(str, Enum):
    TRIVIAL = "trivial"
    CYCLIC = "cyclic"
    BICYCLIC = "bicyclic"
    HIGHER_RANK = "abelian-higher-rank"
    NONABELIAN = "nonabelian"

    def fits(self, family: str) -> bool:
        """Whether a subgroup of this kind belongs to family x ∈ {ab, bic, cyc}."""
        allowed = {
            "cyc": {SubgroupKind.TRIVIAL, SubgroupKind.CYCLIC},
            "bic": {SubgroupKind.TRIVIAL, SubgroupKind.CYCLIC, SubgroupKind.BICYCLIC},
            "ab": {SubgroupKind.TRIVIAL, SubgroupKind.CYCLIC, SubgroupKind.BICYCLIC, SubgroupKind.HIGHER_RANK},
        }
        if family not in allowed:
            raise BrnrError(f"unknown family type {family!r}")
        return self in allowed[family]


def _log(count: int, p: int) -> int:
    k = 0
    while count > 1:
        count //= p
        k += 1
    return k


def abelian_invariants(G: FiniteGroup) -> tuple[int, ...]:
    """Invariant factors d_1 | d_2 | ... of an abelian group (empty if trivial)."""
    if not G.is_abelian:
        raise NotAbelian("group is not abelian", order=G.order)
    orders = G.element_orders
    by_prime: list[list[int]] = []
    for p, e in factorint(G.order).items():
        ranks = [_log(int(np.count_nonzero(p**k % orders == 0)), p) for k in range(e + 1)]
        at_least = [ranks[k] - ranks[k - 1] for k in range(1, e + 1)] + [0]
        powers = []
        for k in range(e, 0, -1):
            powers += [p**k] * (at_least[k - 1] - at_least[k])
        by_prime.append(powers)
    rank = max((len(powers) for powers in by_prime), default=0)
    factors = []
    for i in range(rank):
        d = 1
        for powers in by_prime:
            if i < len(powers):
                d *= powers[i]
        factors.append(d)
    return tuple(sorted(factors))


@dataclass(frozen=True)
class AbelianDecomposition:
    """An explicit isomorphism ⊕ Z/d_i -> A."""

    group: FiniteGroup
    factors: tuple[int, ...]
    basis: tuple[int, ...]
    coords: np.ndarray

    def element(self, vector: Sequence[int]) -> int:
        g = 0
        for b, c, d in zip(self.basis, vector, self.factors):
            g = self.group.table[g, self.group.power(b, int(c) % d)]
        return int(g)


def abelian_decomposition(G: FiniteGroup) -> AbelianDecomposition:
    factors = abelian_invariants(G)
    wanted = list(reversed(factors))
    by_order: dict[int, list[int]] = {}
    for g in range(G.order):
        by_order.setdefault(G.element_order(g), []).append(g)

    def search(i: int, chosen: list[int], span: int) -> list[int] | None:
        if i == len(wanted):
            return chosen
        for g in by_order.get(wanted[i], []):
            if len(G.generate(chosen + [g])) == span * wanted[i]:
                found = search(i + 1, chosen + [g], span * wanted[i])
                if found is not None:
                    return found
        return None

    basis = search(0, [], 1)
    if basis is None:
        raise BrnrError("no basis realises the invariant factors")
    basis = tuple(reversed(basis))
    coords = np.zeros((G.order, len(factors)), dtype=np.int64)
    powers = [[G.power(b, k) for k in range(d)] for b, d in zip(basis, factors)]
    for vector in itertools.product(*(range(d) for d in factors)):
        g = 0
        for k, p in zip(vector, powers):
            g = G.table[g, p[k]]
        coords[g] = vector
    return AbelianDecomposition(G, factors, basis, coords)


def classify_subgroup(H: Subgroup | FiniteGroup) -> SubgroupKind:
    group = H.group if isinstance(H, Subgroup) else H
    if group.order == 1:
        return SubgroupKind.TRIVIAL
    if not group.is_abelian:
        return SubgroupKind.NONABELIAN
    rank = len(abelian_invariants(group))
    if rank == 1:
        return SubgroupKind.CYCLIC
    if rank == 2:
        return SubgroupKind.BICYCLIC
    return SubgroupKind.HIGHER_RANK
