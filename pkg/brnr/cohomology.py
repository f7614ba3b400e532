"""Group cohomology H^i(G, M), i <= 2, on normalized inhomogeneous cochains.

A normalized i-cochain is stored as a flat vector: the i-tuples of
non-identity elements in lexicographic order, each followed by its r module
coordinates. All linear algebra runs over R = Z/e with e the exponent of M,
where M = R^r / diag(d) R^r.
"""

import logging
import threading
from dataclasses import dataclass
from functools import cached_property
from math import gcd, lcm
from typing import Callable, Sequence

import numpy as np

from .base import BrnrError, ModuleMismatch, NotACocycle, NotSurjective, SizeLimitExceeded
from .config import settings
from .groups import FiniteGroup, GroupHom, Subgroup
from .modules import GModule, left_transversal, pull_back_module, restrict_module
from .snf import IntMatrix, LinearSolver, SmithNormalForm, kernel_mod

logger = logging.getLogger(__name__)


def cochain_shape(G: FiniteGroup, M: GModule, degree: int) -> tuple[int, ...]:
    return (G.order - 1,) * degree + (M.rank,)


def cochain_moduli(G: FiniteGroup, M: GModule, degree: int) -> np.ndarray:
    return np.tile(np.asarray(M.factors, dtype=np.int64), (G.order - 1) ** degree)


@dataclass(frozen=True, eq=False)
class Cochain:
    degree: int
    group: FiniteGroup
    module: GModule
    values: np.ndarray

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise BrnrError("cochains are supported in degrees 0, 1 and 2", degree=self.degree)
        moduli = cochain_moduli(self.group, self.module, self.degree)
        values = np.asarray(self.values, dtype=np.int64).reshape(-1)
        if values.shape != moduli.shape:
            raise BrnrError("cochain has the wrong number of values", expected=moduli.size, got=values.size)
        object.__setattr__(self, "values", values % moduli if moduli.size else values)

    def __repr__(self):
        return f"<Cochain degree={self.degree} over {self.group!r}>"

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return self.degree == other.degree and np.array_equal(self.values, other.values)

    __hash__ = None

    def __add__(self, other: "Cochain") -> "Cochain":
        return Cochain(self.degree, self.group, self.module, self.values + other.values)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return Cochain(self.degree, self.group, self.module, self.values - other.values)

    def __neg__(self) -> "Cochain":
        return Cochain(self.degree, self.group, self.module, -self.values)

    def scale(self, k: int) -> "Cochain":
        return Cochain(self.degree, self.group, self.module, self.values * k)

    def is_zero(self) -> bool:
        return not self.values.any()

    @classmethod
    def zero(cls, G: FiniteGroup, M: GModule, degree: int) -> "Cochain":
        return cls(degree, G, M, np.zeros(int(np.prod(cochain_shape(G, M, degree))), dtype=np.int64))

    @classmethod
    def from_full_table(cls, G: FiniteGroup, M: GModule, table) -> "Cochain":
        """From values on all tuples; identity arguments must map to 0."""
        table = np.asarray(table, dtype=np.int64)
        if M.rank:
            table = table % np.asarray(M.factors, dtype=np.int64)
        degree = table.ndim - 1
        if degree == 2:
            if table[0].any() or table[:, 0].any():
                raise BrnrError("cochain is not normalized")
            inner = table[1:, 1:]
        elif degree == 1:
            if table[0].any():
                raise BrnrError("cochain is not normalized")
            inner = table[1:]
        else:
            inner = table
        return cls(degree, G, M, inner.reshape(-1))

    @classmethod
    def from_function(cls, G: FiniteGroup, M: GModule, degree: int, fn: Callable) -> "Cochain":
        table = np.zeros((G.order,) * degree + (M.rank,), dtype=np.int64)
        for args in np.ndindex(*((G.order - 1,) * degree)):
            args = tuple(a + 1 for a in args)
            table[args] = fn(*args)
        return cls.from_full_table(G, M, table)

    def full_table(self) -> np.ndarray:
        """Values on all tuples, zeros wherever an argument is the identity."""
        N, r = self.group.order, self.module.rank
        inner = self.values.reshape(cochain_shape(self.group, self.module, self.degree))
        if self.degree == 0:
            return inner.copy()
        table = np.zeros((N,) * self.degree + (r,), dtype=np.int64)
        table[(slice(1, None),) * self.degree] = inner
        return table

    def value(self, *args: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.full_table()[tuple(args)])

    def to_json(self) -> dict[str, list[int]]:
        table = self.full_table()
        if self.degree == 0:
            return {"()": [int(x) for x in table]}
        result = {}
        for args in np.ndindex(*table.shape[:-1]):
            coords = table[args]
            if coords.any():
                result["(" + ",".join(str(a) for a in args) + ")"] = [int(x) for x in coords]
        return result


def _accumulate(mat: np.ndarray, rows, cols, blocks, r: int):
    """Adds r×r blocks at block positions (rows[i], cols[i])."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        return
    cols = np.asarray(cols, dtype=np.int64)
    a = np.arange(r)
    blocks = np.broadcast_to(blocks, (rows.size, r, r))
    R = np.broadcast_to(rows[:, None, None] * r + a[None, :, None], blocks.shape)
    C = np.broadcast_to(cols[:, None, None] * r + a[None, None, :], blocks.shape)
    np.add.at(mat, (R, C), blocks)


def coboundary_matrix(G: FiniteGroup, M: GModule, degree: int, generator_rows: bool = False) -> IntMatrix:
    """Matrix of δ^degree on normalized cochains, entries mod the exponent of M.

    With ``generator_rows`` the degree-2 matrix keeps only rows whose first
    argument is a generator; a normalized 2-cochain is a cocycle iff those vanish.
    """
    if degree not in (0, 1, 2):
        raise BrnrError("coboundaries are supported in degrees 0, 1 and 2", degree=degree)
    N, r = G.order, M.rank
    size = N ** (degree + 1) * max(r, 1)
    if size > settings.cochain_cap:
        raise SizeLimitExceeded("cochain space too large", size=size, cap=settings.cochain_cap)
    n1 = N - 1
    nonid = np.arange(1, N)
    eye = np.eye(r, dtype=np.int64)
    act = M.action

    def pair(x, y):
        return (x - 1) * n1 + (y - 1)

    if degree == 0:
        mat = np.zeros((n1 * r, r), dtype=np.int64)
        _accumulate(mat, nonid - 1, np.zeros_like(nonid), act[nonid] - eye, r)
    elif degree == 1:
        g, h = (x.ravel() for x in np.meshgrid(nonid, nonid, indexing="ij"))
        rows = pair(g, h)
        mat = np.zeros((n1 * n1 * r, n1 * r), dtype=np.int64)
        _accumulate(mat, rows, h - 1, act[g], r)
        gh = G.table[g, h]
        keep = gh != 0
        _accumulate(mat, rows[keep], gh[keep] - 1, -eye, r)
        _accumulate(mat, rows, g - 1, eye, r)
    else:
        first = np.asarray([s for s in G.generators], dtype=np.int64) if generator_rows else nonid
        s, h, k = (x.ravel() for x in np.meshgrid(first, nonid, nonid, indexing="ij"))
        rows = np.arange(s.size)
        mat = np.zeros((s.size * r, n1 * n1 * r), dtype=np.int64)
        _accumulate(mat, rows, pair(h, k), act[s], r)
        sh = G.table[s, h]
        keep = sh != 0
        _accumulate(mat, rows[keep], pair(sh, k)[keep], -eye, r)
        hk = G.table[h, k]
        keep = hk != 0
        _accumulate(mat, rows[keep], pair(s, hk)[keep], eye, r)
        _accumulate(mat, rows, pair(s, h), -eye, r)
    moduli = tuple(int(d) for d in np.tile(np.asarray(M.factors, dtype=np.int64), mat.shape[0] // r)) if r else ()
    return IntMatrix(mat % max(M.exponent, 1), moduli)


@dataclass(frozen=True, eq=False)
class CohomologyClass:
    parent: "CohomologyGroup"
    coords: tuple[int, ...]
    representative: Cochain

    def __repr__(self):
        return f"<CohomologyClass {list(self.coords)} in H^{self.parent.degree}>"

    def __eq__(self, other):
        if not isinstance(other, CohomologyClass):
            return NotImplemented
        return self.parent is other.parent and self.coords == other.coords

    def __hash__(self):
        return hash((id(self.parent), self.coords))

    def __add__(self, other: "CohomologyClass") -> "CohomologyClass":
        return self.parent.class_of(self.representative + other.representative)

    def __neg__(self) -> "CohomologyClass":
        return self.parent.class_of(-self.representative)

    def __sub__(self, other: "CohomologyClass") -> "CohomologyClass":
        return self + (-other)

    def scale(self, k: int) -> "CohomologyClass":
        return self.parent.class_of(self.representative.scale(k))

    def is_zero(self) -> bool:
        return not any(self.coords)

    @property
    def order(self) -> int:
        return lcm(1, *(f // gcd(c, f) for c, f in zip(self.coords, self.parent.invariant_factors)))


class CohomologyGroup:
    """H^degree(group, module) with a basis of cocycles and a membership solver."""

    def __init__(
        self,
        degree: int,
        group: FiniteGroup,
        module: GModule,
        *,
        invariant_factors: Sequence[int],
        generators: np.ndarray,
        coordinate_rows: np.ndarray,
        cocycle_count: int,
        delta: IntMatrix | None,
        classifier: LinearSolver | None,
        trivializer: LinearSolver | None,
    ):
        self.degree = degree
        self.group = group
        self.module = module
        self.invariant_factors = tuple(int(f) for f in invariant_factors)
        self._generators = generators
        self._coordinate_rows = coordinate_rows
        self._cocycle_count = cocycle_count
        self._delta = delta
        self._classifier = classifier
        self._trivializer = trivializer

    def __repr__(self):
        return f"<H^{self.degree} factors={list(self.invariant_factors)} over {self.group!r}>"

    @property
    def order(self) -> int:
        return int(np.prod(self.invariant_factors, dtype=object))

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @cached_property
    def basis(self) -> tuple[Cochain, ...]:
        return tuple(
            Cochain(self.degree, self.group, self.module, self._generators[:, j])
            for j in range(self._generators.shape[1])
        )

    def zero(self) -> CohomologyClass:
        return CohomologyClass(self, (0,) * self.rank, Cochain.zero(self.group, self.module, self.degree))

    def element(self, coords: Sequence[int]) -> CohomologyClass:
        coords = tuple(int(c) % f for c, f in zip(coords, self.invariant_factors))
        rep = Cochain.zero(self.group, self.module, self.degree)
        for c, b in zip(coords, self.basis):
            rep = rep + b.scale(c)
        return CohomologyClass(self, coords, rep)

    def generator_classes(self) -> list[CohomologyClass]:
        return [self.element(np.eye(self.rank, dtype=np.int64)[j]) for j in range(self.rank)]

    def _check(self, cochain: Cochain):
        if cochain.degree != self.degree:
            raise BrnrError("cochain degree does not match", expected=self.degree, got=cochain.degree)
        if not cochain.module.same_as(self.module):
            raise ModuleMismatch("cochain lives in a different module")

    def is_cocycle(self, cochain: Cochain) -> bool:
        self._check(cochain)
        if self._delta is None:
            return True
        image = self._delta.entries.dot(cochain.values)
        return not (image % np.asarray(self._delta.moduli, dtype=np.int64)).any()

    def classify(self, cochain: Cochain) -> tuple[int, ...]:
        """Coordinates of the class of a cocycle in the basis."""
        if not self.is_cocycle(cochain):
            raise NotACocycle("cochain is not a cocycle", degree=self.degree)
        if not self.invariant_factors:
            return ()
        solution = self._classifier.solve(cochain.values)
        if solution is None:
            raise NotACocycle("cocycle is outside the computed cocycle lattice")
        y = solution[: self._cocycle_count]
        coords = self._coordinate_rows.dot(y)
        return tuple(int(c) % f for c, f in zip(coords, self.invariant_factors))

    def class_of(self, cochain: Cochain) -> CohomologyClass:
        return CohomologyClass(self, self.classify(cochain), cochain)

    def is_coboundary(self, cochain: Cochain) -> bool:
        return not any(self.classify(cochain))

    def trivialize(self, cochain: Cochain) -> Cochain | None:
        """u with δu = cochain, or None when the cocycle is not a coboundary."""
        if not self.is_cocycle(cochain):
            raise NotACocycle("cochain is not a cocycle", degree=self.degree)
        if self.degree == 0:
            return None if cochain.values.any() else cochain
        if self._trivializer is None:
            return Cochain.zero(self.group, self.module, self.degree - 1)
        solution = self._trivializer.solve(cochain.values)
        if solution is None:
            return None
        size = int(np.prod(cochain_shape(self.group, self.module, self.degree - 1)))
        return Cochain(self.degree - 1, self.group, self.module, solution[:size])

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "invariant_factors": list(self.invariant_factors),
            "basis": [b.to_json() for b in self.basis],
        }

    def to_arrays(self) -> tuple[dict[str, np.ndarray], dict]:
        arrays = {"generators": self._generators, "coordinate_rows": self._coordinate_rows}
        if self._delta is not None:
            arrays["delta"] = self._delta.entries
            arrays["delta_moduli"] = np.asarray(self._delta.moduli, dtype=np.int64)
        for name in ("classifier", "trivializer"):
            solver = getattr(self, f"_{name}")
            if solver is not None:
                arrays.update(solver.to_arrays(name))
        meta = {
            "degree": self.degree,
            "invariant_factors": list(self.invariant_factors),
            "cocycle_count": self._cocycle_count,
        }
        return arrays, meta

    @classmethod
    def from_arrays(cls, group: FiniteGroup, module: GModule, arrays, meta: dict) -> "CohomologyGroup":
        e = max(module.exponent, 1)
        delta = None
        if "delta" in arrays:
            delta = IntMatrix(arrays["delta"], tuple(int(d) for d in arrays["delta_moduli"]))
        return cls(
            meta["degree"],
            group,
            module,
            invariant_factors=meta["invariant_factors"],
            generators=arrays["generators"],
            coordinate_rows=arrays["coordinate_rows"],
            cocycle_count=meta["cocycle_count"],
            delta=delta,
            classifier=LinearSolver.from_arrays(arrays, "classifier", e) if "classifier_left" in arrays else None,
            trivializer=LinearSolver.from_arrays(arrays, "trivializer", e) if "trivializer_left" in arrays else None,
        )


def _trivial_group(G: FiniteGroup, M: GModule, degree: int) -> CohomologyGroup:
    size = int(np.prod(cochain_shape(G, M, degree)))
    return CohomologyGroup(
        degree,
        G,
        M,
        invariant_factors=(),
        generators=np.zeros((size, 0), dtype=np.int64),
        coordinate_rows=np.zeros((0, 0), dtype=np.int64),
        cocycle_count=0,
        delta=None,
        classifier=None,
        trivializer=None,
    )


def _compute(G: FiniteGroup, M: GModule, degree: int) -> CohomologyGroup:
    if M.rank == 0 or (degree > 0 and G.order == 1):
        return _trivial_group(G, M, degree)
    e = M.exponent
    moduli = cochain_moduli(G, M, degree)
    delta = coboundary_matrix(G, M, degree, generator_rows=degree == 2)
    row_moduli = np.asarray(delta.moduli, dtype=np.int64)
    cocycles = kernel_mod((delta.entries * (e // row_moduli)[:, None]) % e, e)
    boundaries = np.diag(moduli) % e
    if degree > 0:
        previous = coboundary_matrix(G, M, degree - 1).entries
        boundaries = np.hstack([previous, boundaries])
    k = cocycles.shape[1]
    combined = np.hstack([cocycles, boundaries])
    relations = kernel_mod(combined, e)[:k]
    snf = SmithNormalForm(relations, e, track_right=False, track_left_inverse=True)
    diagonal = snf.diagonal
    kept, factors = [], []
    for j in range(k):
        f = gcd(diagonal[j] if j < len(diagonal) else 0, e)
        if f > 1:
            kept.append(j)
            factors.append(f)
    generators = cocycles.dot(snf.left_inverse[:, kept]) % e if kept else np.zeros((moduli.size, 0), dtype=np.int64)
    generators %= moduli[:, None]
    logger.debug(f"H^{degree} of order-{G.order} group: factors {factors}")
    return CohomologyGroup(
        degree,
        G,
        M,
        invariant_factors=factors,
        generators=generators,
        coordinate_rows=snf.left[kept],
        cocycle_count=k,
        delta=delta,
        classifier=LinearSolver.for_matrix(combined, e),
        trivializer=LinearSolver.for_matrix(boundaries, e) if degree > 0 else None,
    )


_cache: dict[tuple[str, str, int], CohomologyGroup] = {}
_cache_lock = threading.Lock()
_store = None


def attach_store(store) -> None:
    """Persists computed groups through ``store`` (see db.cache)."""
    global _store
    _store = store


def clear_cache() -> None:
    with _cache_lock:
        _cache.clear()


def cohomology_group(G: FiniteGroup, M: GModule, degree: int) -> CohomologyGroup:
    if not M.group.same_as(G):
        raise ModuleMismatch("module does not live on the group")
    key = (G.canonical_hash, M.canonical_hash, degree)
    cached = _cache.get(key)
    if cached is not None:
        return cached
    result = None
    if _store is not None:
        loaded = _store.load_cohomology(key)
        if loaded is not None:
            result = CohomologyGroup.from_arrays(G, M, *loaded)
    if result is None:
        result = _compute(G, M, degree)
        if _store is not None:
            _store.save_cohomology(key, *result.to_arrays())
    with _cache_lock:
        return _cache.setdefault(key, result)


def trivialize(cochain: Cochain) -> Cochain | None:
    return cohomology_group(cochain.group, cochain.module, cochain.degree).trivialize(cochain)


def pull_back_cochain(cochain: Cochain, f: GroupHom, module: GModule | None = None) -> Cochain:
    """The cochain composed with f on every argument."""
    if not f.target.same_as(cochain.group):
        raise ModuleMismatch("homomorphism does not land in the cochain's group")
    module = module if module is not None else pull_back_module(cochain.module, f)
    table = cochain.full_table()
    idx = f.array
    if cochain.degree == 1:
        table = table[idx]
    elif cochain.degree == 2:
        table = table[np.ix_(idx, idx)]
    return Cochain.from_full_table(f.source, module, table)


def restrict_class(alpha: CohomologyClass, H: Subgroup) -> CohomologyClass:
    module = restrict_module(alpha.parent.module, H)
    cochain = pull_back_cochain(alpha.representative, H.inclusion, module)
    return cohomology_group(H.group, module, alpha.parent.degree).class_of(cochain)


def inflate_class(beta: CohomologyClass, p: GroupHom, module: GModule | None = None) -> CohomologyClass:
    if not p.is_surjective():
        raise NotSurjective("inflation needs a surjective homomorphism")
    expected = pull_back_module(beta.parent.module, p)
    if module is not None and not module.same_as(expected):
        raise ModuleMismatch("module on the source is not the pull-back")
    module = module if module is not None else expected
    cochain = pull_back_cochain(beta.representative, p, module)
    return cohomology_group(p.source, module, beta.parent.degree).class_of(cochain)


def right_retraction(G: FiniteGroup, H: Subgroup) -> np.ndarray:
    """ρ with x = ρ(x)·τ(x), τ the minimal representative of Hx; ρ(hx) = hρ(x)."""
    members = np.asarray(H.members, dtype=np.int64)
    tau = G.table[members, :].min(axis=0)
    return G.table[np.arange(G.order), G.inverses[tau]]


def corestrict_class(alpha: CohomologyClass, H: Subgroup, module: GModule) -> CohomologyClass:
    """Transfer of a class on H to H.parent, ``module`` being the module on the parent.

    Uses cor F(g_0..g_q) = Σ_s s·F_H(ρ(s⁻¹g_0), ..., ρ(s⁻¹g_q)) on homogeneous
    cochains, s running over left coset representatives.
    """
    G = H.parent
    if not alpha.parent.group.same_as(H.group):
        raise ModuleMismatch("class does not live on the subgroup")
    if not restrict_module(module, H).same_as(alpha.parent.module):
        raise ModuleMismatch("module on G does not restrict to the class's module")
    rho_local = H.local_index[right_retraction(G, H)]
    transversal, _ = left_transversal(G, H)
    f_H = alpha.representative.full_table()
    act_H = alpha.parent.module.action
    act_G = module.action
    d = np.asarray(module.factors, dtype=np.int64)
    N, degree = G.order, alpha.parent.degree
    H_table, H_inv = H.group.table, H.group.inverses

    if degree == 0:
        total = sum(act_G[s] @ f_H for s in transversal)
        return cohomology_group(G, module, 0).class_of(Cochain(0, G, module, total % d))

    def homogeneous(h_args):
        # F_H(h_0, ..., h_q) = h_0 · f_H(h_0⁻¹h_1, ..., h_{q-1}⁻¹h_q)
        steps = tuple(H_table[H_inv[a], b] for a, b in zip(h_args[:-1], h_args[1:]))
        return np.einsum("nij,nj->ni", act_H[h_args[0]], f_H[steps])

    args = [g.ravel() for g in np.meshgrid(*(np.arange(N),) * degree, indexing="ij")]
    # homogeneous points (1, g_1, g_1 g_2, ...)
    points = [np.zeros_like(args[0])]
    for a in args:
        points.append(G.table[points[-1], a])
    total = np.zeros((args[0].size, module.rank), dtype=np.int64)
    for s in transversal:
        shifted = [rho_local[G.table[G.inverses[s], p]] for p in points]
        total += np.einsum("ij,nj->ni", act_G[s], homogeneous(shifted))
    table = (total % d).reshape((N,) * degree + (module.rank,))
    return cohomology_group(G, module, degree).class_of(Cochain.from_full_table(G, module, table))

