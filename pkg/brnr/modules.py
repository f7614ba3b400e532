"""Finite coefficient modules ⊕ Z/d_i with a group acting by integer matrices."""

import hashlib
import itertools
import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property, reduce
from math import gcd, lcm, prod
from typing import Mapping, Sequence

import numpy as np

from .base import (
    BrnrError,
    CharacterNotMultiplicative,
    ExponentMismatch,
    ModuleMismatch,
    NonUnitValue,
    NotAHomomorphism,
    TargetMismatch,
)
from .groups import FiniteGroup, GroupHom, Subgroup, abelian_decomposition, validate_action
from .snf import SmithNormalForm

logger = logging.getLogger(__name__)

_EXHAUSTIVE_MODULE_CHECK = 64
_SAMPLED_PAIRS = 4096


class GModule:
    """⊕ Z/d_i with ``action[g]`` an r×r matrix; row i is read mod d_i."""

    def __init__(self, group: FiniteGroup, factors: Sequence[int], action, *, validate: bool = True):
        self.group = group
        self.factors = tuple(int(d) for d in factors)
        if any(d < 2 for d in self.factors):
            raise BrnrError("module factors must be at least 2", factors=self.factors)
        r = len(self.factors)
        action = np.asarray(action, dtype=np.int64).reshape(group.order, r, r)
        self.action = action % self._moduli[None, :, None] if r else action
        if validate:
            self.validate()

    def __repr__(self):
        return f"<GModule factors={list(self.factors)} over {self.group!r}>"

    @cached_property
    def _moduli(self) -> np.ndarray:
        return np.asarray(self.factors, dtype=np.int64)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        return prod(self.factors)

    @cached_property
    def exponent(self) -> int:
        return reduce(lcm, self.factors, 1)

    @cached_property
    def structure(self) -> tuple[int, ...]:
        """Invariant factors of the underlying abelian group."""
        if not self.factors:
            return ()
        snf = SmithNormalForm(np.diag(self.factors), track_left=False, track_right=False)
        return tuple(d for d in snf.diagonal if d > 1)

    @cached_property
    def canonical_hash(self) -> str:
        digest = hashlib.sha256()
        digest.update(self.group.canonical_hash.encode())
        digest.update(repr(self.factors).encode())
        digest.update(self.action.astype("<i8").tobytes())
        return digest.hexdigest()

    @cached_property
    def is_trivial_action(self) -> bool:
        return bool(np.array_equal(self.action, np.broadcast_to(self.action[0], self.action.shape)))

    def validate(self) -> "GModule":
        r = self.rank
        if r == 0:
            return self
        d = self._moduli
        # row i, column j: d_j * a_ij must vanish mod d_i
        if ((self.action * d[None, None, :]) % d[None, :, None]).any():
            raise BrnrError("action matrices are not well defined on the factors")
        if not np.array_equal(self.action[0], np.eye(r, dtype=np.int64) % d[:, None]):
            raise NotAHomomorphism("identity does not act trivially")
        n = self.group.order
        if n <= _EXHAUSTIVE_MODULE_CHECK:
            pairs = itertools.product(range(n), repeat=2)
        else:
            rng = np.random.default_rng(0)
            pairs = zip(*rng.integers(0, n, size=(2, _SAMPLED_PAIRS)).tolist())
        for g, h in pairs:
            lhs = self.action[self.group.table[g, h]]
            rhs = (self.action[g] @ self.action[h]) % d[:, None]
            if not np.array_equal(lhs, rhs):
                raise NotAHomomorphism("action is not multiplicative", pair=(int(g), int(h)))
        return self

    def reduce(self, coords) -> np.ndarray:
        return np.asarray(coords, dtype=np.int64) % self._moduli

    def act(self, g: int, coords) -> np.ndarray:
        return (self.action[g] @ np.asarray(coords, dtype=np.int64)) % self._moduli

    def element(self, coords) -> "ModuleElement":
        return ModuleElement(self, tuple(int(c) for c in self.reduce(coords)))

    def zero(self) -> "ModuleElement":
        return ModuleElement(self, (0,) * self.rank)

    def elements(self) -> np.ndarray:
        """All elements as rows, first coordinate varying fastest."""
        if not self.factors:
            return np.zeros((1, 0), dtype=np.int64)
        grids = itertools.product(*(range(d) for d in reversed(self.factors)))
        return np.array([tuple(reversed(v)) for v in grids], dtype=np.int64)

    def index_of(self, coords) -> int:
        index, radix = 0, 1
        for c, d in zip(self.reduce(coords), self.factors):
            index += int(c) * radix
            radix *= d
        return index

    def same_as(self, other: "GModule") -> bool:
        return (
            self.group.same_as(other.group)
            and self.factors == other.factors
            and np.array_equal(self.action, other.action)
        )


@dataclass(frozen=True)
class ModuleElement:
    module: GModule
    coords: tuple[int, ...]

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        return self.module.element(np.add(self.coords, other.coords))

    def __neg__(self) -> "ModuleElement":
        return self.module.element(np.negative(self.coords))

    def __sub__(self, other: "ModuleElement") -> "ModuleElement":
        return self + (-other)

    def scale(self, k: int) -> "ModuleElement":
        return self.module.element(np.multiply(self.coords, k))

    def act(self, g: int) -> "ModuleElement":
        return self.module.element(self.module.act(g, self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)


def trivial_module(G: FiniteGroup, factors: Sequence[int]) -> GModule:
    r = len(factors)
    action = np.broadcast_to(np.eye(r, dtype=np.int64), (G.order, r, r))
    return GModule(G, factors, action, validate=False)


def _character_values(gamma: FiniteGroup, n: int, character) -> np.ndarray:
    if isinstance(character, Mapping):
        values = np.ones(gamma.order, dtype=np.int64)
        for g, c in character.items():
            values[int(g)] = int(c)
    else:
        values = np.asarray(list(character), dtype=np.int64)
        if values.shape != (gamma.order,):
            raise CharacterNotMultiplicative("one character value per element is required")
    return values % n


def mu_module(n: int, gamma: FiniteGroup, character=None) -> GModule:
    """μ_n with γ acting by multiplication with character(γ)."""
    if n < 2:
        raise BrnrError("n must be at least 2", n=n)
    values = np.ones(gamma.order, dtype=np.int64) if character is None else _character_values(gamma, n, character)
    for g, c in enumerate(values):
        if gcd(int(c), n) != 1:
            raise NonUnitValue("character value is not a unit", element=g, value=int(c))
    products = (values[:, None] * values[None, :]) % n
    bad = np.argwhere(values[gamma.table] != products)
    if bad.size:
        g, h = (int(x) for x in bad[0])
        raise CharacterNotMultiplicative("character is not multiplicative", pair=(g, h))
    return GModule(gamma, (n,), values.reshape(-1, 1, 1), validate=False)


def character_from_generators(gamma: FiniteGroup, n: int, values: Sequence[int]) -> np.ndarray:
    """Extends unit values on ``gamma.generators`` to a character."""
    char = np.zeros(gamma.order, dtype=np.int64)
    char[0] = 1
    seen = np.zeros(gamma.order, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s, v in zip(gamma.generators, values):
            y = gamma.table[x, s]
            value = char[x] * int(v) % n
            if not seen[y]:
                char[y], seen[y] = value, True
                queue.append(int(y))
            elif char[y] != value:
                raise CharacterNotMultiplicative("generator values violate a relation", pair=(x, int(s)))
    return char


def pull_back_module(M: GModule, f: GroupHom) -> GModule:
    if not f.target.same_as(M.group):
        raise TargetMismatch("homomorphism does not land in the acting group")
    return GModule(f.source, M.factors, M.action[f.array], validate=False)


def restrict_module(M: GModule, H: Subgroup) -> GModule:
    return GModule(H.group, M.factors, M.action[list(H.members)], validate=False)


def descend_module(M: GModule, f: GroupHom) -> GModule:
    """The module on f.target whose pull-back along surjective f is M."""
    if not f.source.same_as(M.group):
        raise ModuleMismatch("module does not live on the source group")
    r = M.rank
    action = np.zeros((f.target.order, r, r), dtype=np.int64)
    filled = np.zeros(f.target.order, dtype=bool)
    for g, q in enumerate(f.images):
        if not filled[q]:
            action[q], filled[q] = M.action[g], True
        elif not np.array_equal(action[q], M.action[g]):
            raise ModuleMismatch("action does not factor through the quotient", element=g)
    if not filled.all():
        raise ModuleMismatch("homomorphism is not surjective")
    return GModule(f.target, M.factors, action, validate=False)


def left_transversal(G: FiniteGroup, H: Subgroup) -> tuple[np.ndarray, np.ndarray]:
    """Minimal left coset representatives (0 first) and the coset index of every element."""
    members = np.asarray(H.members, dtype=np.int64)
    reps = G.table[:, members].min(axis=1)
    transversal, coset_of = np.unique(reps, return_inverse=True)
    return transversal, coset_of


def induced_module(M: GModule, H: Subgroup) -> GModule:
    """Ind_H^G M with coordinate i·r + k for t_i ⊗ m_k."""
    G = H.parent
    if not H.group.same_as(M.group):
        raise ModuleMismatch("module must live on the subgroup")
    transversal, coset_of = left_transversal(G, H)
    t, r = len(transversal), M.rank
    action = np.zeros((G.order, t * r, t * r), dtype=np.int64)
    for g in range(G.order):
        for i, ti in enumerate(transversal):
            gti = G.table[g, ti]
            j = coset_of[gti]
            h = G.table[G.inverses[transversal[j]], gti]
            action[g, j * r : (j + 1) * r, i * r : (i + 1) * r] = M.action[H.local_index[h]]
    return GModule(G, M.factors * t, action, validate=False)


def underlying_group(M: GModule) -> tuple[FiniteGroup, np.ndarray]:
    """The additive group of M with elements numbered by ``index_of``, and M's action as permutations of it."""
    elements = M.elements()
    radix = np.cumprod((1,) + M.factors[:-1], dtype=np.int64) if M.factors else np.zeros(0, dtype=np.int64)
    moduli = np.asarray(M.factors, dtype=np.int64)
    sums = (elements[:, None, :] + elements[None, :, :]) % moduli
    A = FiniteGroup(len(elements), table=sums @ radix, name=f"M{list(M.factors)}")
    images = np.einsum("gij,nj->gni", M.action, elements) % moduli
    return A, images @ radix


def dual_module(A: FiniteGroup, n: int, gamma: FiniteGroup, action, character=None) -> GModule:
    """Hom(A, Z/n) with (γf)(a) = χ(γ) f(γ⁻¹a).

    The coordinate of f on the basis element a_i of order e_i is f(a_i)/(n/e_i).
    """
    if n % A.exponent:
        raise ExponentMismatch("exponent of A must divide n", exponent=A.exponent, n=n)
    act = validate_action(A, gamma, action)
    chi = mu_module(n, gamma, character).action[:, 0, 0]
    decomposition = abelian_decomposition(A)
    e = decomposition.factors
    r = len(e)
    matrices = np.zeros((gamma.order, r, r), dtype=np.int64)
    for g in range(gamma.order):
        g_inv = gamma.inverses[g]
        for i, a in enumerate(decomposition.basis):
            c = decomposition.coords[act[g_inv][a]]
            for j in range(r):
                value = int(chi[g]) * (n // e[j]) * int(c[j]) % n
                matrices[g, i, j] = value // (n // e[i])
    return GModule(gamma, e, matrices)

