"""Subgroups, kernels and cokernels inside ⊕ Z/f_i.

Elements are coordinate vectors. Computations embed ⊕ Z/f_i into (Z/e)^r,
e = lcm(f), by x_i -> (e/f_i)·x_i and run Smith normal forms mod e.
"""

from dataclasses import dataclass
from functools import cached_property, reduce
from math import gcd, lcm
from typing import Sequence

import numpy as np

from .base import BrnrError
from .snf import LinearSolver, SmithNormalForm, kernel_mod


def _exponent(factors: Sequence[int]) -> int:
    return reduce(lcm, factors, 1)


def _scale(factors: Sequence[int]) -> np.ndarray:
    e = _exponent(factors)
    return np.asarray([e // f for f in factors], dtype=np.int64)


def _rows(vectors, rank: int) -> np.ndarray:
    if rank == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return np.asarray(vectors, dtype=np.int64).reshape(-1, rank)


def _as_matrix(vectors, rank: int) -> np.ndarray:
    """Rows -> r×k matrix of column vectors."""
    return _rows(vectors, rank).T.copy()


@dataclass(frozen=True, eq=False)
class AbelianSubgroup:
    """The subgroup of ⊕ Z/f_i generated by the rows of ``generators``."""

    factors: tuple[int, ...]
    generators: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.factors, dtype=np.int64)
        gens = _rows(self.generators, len(self.factors))
        object.__setattr__(self, "factors", tuple(int(x) for x in self.factors))
        object.__setattr__(self, "generators", gens % f if f.size else gens)

    def __repr__(self):
        return f"<AbelianSubgroup {list(self.invariant_factors)} of {list(self.factors)}>"

    @classmethod
    def whole(cls, factors: Sequence[int]) -> "AbelianSubgroup":
        return cls(tuple(factors), np.eye(len(factors), dtype=np.int64))

    @classmethod
    def zero(cls, factors: Sequence[int]) -> "AbelianSubgroup":
        return cls(tuple(factors), np.zeros((0, len(factors)), dtype=np.int64))

    @property
    def rank(self) -> int:
        return len(self.factors)

    @cached_property
    def modulus(self) -> int:
        return _exponent(self.factors)

    @cached_property
    def _scaled(self) -> np.ndarray:
        """Generators as columns of (Z/e)^r."""
        return (_as_matrix(self.generators, self.rank) * _scale(self.factors)[:, None]) % self.modulus

    @cached_property
    def _snf(self) -> SmithNormalForm:
        return SmithNormalForm(self._scaled, self.modulus, track_left=False)

    @cached_property
    def invariant_factors(self) -> tuple[int, ...]:
        if not self.rank or self.generators.shape[0] == 0:
            return ()
        e = self.modulus
        orders = [e // gcd(t, e) for t in self._snf.diagonal]
        return tuple(sorted(o for o in orders if o > 1))

    @property
    def order(self) -> int:
        return int(np.prod(self.invariant_factors, dtype=object))

    def is_zero(self) -> bool:
        return self.order == 1

    @cached_property
    def basis(self) -> np.ndarray:
        """Reduced generators (rows), one per nontrivial invariant factor."""
        if not self.invariant_factors:
            return np.zeros((0, self.rank), dtype=np.int64)
        e = self.modulus
        columns = (self._scaled.dot(self._snf.right) % e).T
        rows = [c // _scale(self.factors) for c in columns if c.any()]
        rows.sort(key=lambda v: (self.element_order(v), tuple(v)))
        return np.asarray(rows, dtype=np.int64).reshape(len(rows), self.rank)

    def element_order(self, vector) -> int:
        return lcm(1, *(f // gcd(int(c), f) for c, f in zip(vector, self.factors)))

    @cached_property
    def _membership(self) -> LinearSolver:
        return LinearSolver.for_matrix(self._scaled, self.modulus)

    def contains(self, vector) -> bool:
        if self.generators.shape[0] == 0:
            return not (np.asarray(vector) % np.asarray(self.factors)).any()
        target = (np.asarray(vector, dtype=np.int64) * _scale(self.factors)) % self.modulus
        return self._membership.solve(target) is not None

    def combination(self, vector) -> np.ndarray | None:
        """Coefficients y with Σ y_j generators_j = vector, or None."""
        if self.generators.shape[0] == 0:
            return np.zeros(0, dtype=np.int64) if self.contains(vector) else None
        target = (np.asarray(vector, dtype=np.int64) * _scale(self.factors)) % self.modulus
        return self._membership.solve(target)

    def _compatible(self, other: "AbelianSubgroup"):
        if self.factors != other.factors:
            raise BrnrError("subgroups live in different ambient groups")

    def __add__(self, other: "AbelianSubgroup") -> "AbelianSubgroup":
        self._compatible(other)
        return AbelianSubgroup(self.factors, np.vstack([self.generators, other.generators]))

    def is_subgroup_of(self, other: "AbelianSubgroup") -> bool:
        self._compatible(other)
        return all(other.contains(v) for v in self.generators)

    def __eq__(self, other):
        if not isinstance(other, AbelianSubgroup):
            return NotImplemented
        return self.factors == other.factors and self.is_subgroup_of(other) and other.is_subgroup_of(self)

    __hash__ = None

    def intersect(self, other: "AbelianSubgroup") -> "AbelianSubgroup":
        self._compatible(other)
        if self.generators.shape[0] == 0 or other.generators.shape[0] == 0:
            return AbelianSubgroup.zero(self.factors)
        e = self.modulus
        k = self.generators.shape[0]
        kernel = kernel_mod(np.hstack([self._scaled, (-other._scaled) % e]), e)
        y = kernel[:k]
        return AbelianSubgroup(self.factors, (self.generators.T.dot(y) % e).T)

    def scale(self, k: int) -> "AbelianSubgroup":
        return AbelianSubgroup(self.factors, self.generators * k)

    def map(self, images) -> np.ndarray:
        """Images of the basis under a hom given by per-coordinate image rows."""
        return np.asarray(self.basis, dtype=np.int64).dot(np.asarray(images, dtype=np.int64))

    def elements(self) -> list[tuple[int, ...]]:
        """All elements, for small groups only."""
        found = {tuple([0] * self.rank)}
        frontier = list(found)
        f = np.asarray(self.factors, dtype=np.int64)
        while frontier:
            new = []
            for x in frontier:
                for g in self.generators:
                    y = tuple(int(v) for v in (np.asarray(x) + g) % f)
                    if y not in found:
                        found.add(y)
                        new.append(y)
            frontier = new
        return sorted(found)

    def to_json(self) -> dict:
        return {
            "invariant_factors": list(self.invariant_factors),
            "generators": [[int(x) for x in row] for row in self.basis],
        }


def hom_kernel(source_factors: Sequence[int], images, target_factors: Sequence[int]) -> AbelianSubgroup:
    """Kernel of ⊕ Z/a_j -> ⊕ Z/b_i, row j of ``images`` the image of e_j."""
    a = tuple(int(x) for x in source_factors)
    b = tuple(int(x) for x in target_factors)
    if not a:
        return AbelianSubgroup.zero(a)
    if not b:
        return AbelianSubgroup.whole(a)
    e = _exponent(a + b)
    phi = np.asarray(images, dtype=np.int64).reshape(len(a), len(b)).T
    scaled = (phi * np.asarray([e // x for x in b], dtype=np.int64)[:, None]) % e
    kernel = kernel_mod(scaled, e)
    return AbelianSubgroup(a, kernel.T)


@dataclass(frozen=True, eq=False)
class Cokernel:
    """(⊕ Z/f_i) / relations, with coordinates on the quotient."""

    factors: tuple[int, ...]
    quotient_factors: tuple[int, ...]
    projection: np.ndarray

    def project(self, vector) -> tuple[int, ...]:
        coords = self.projection.dot(np.asarray(vector, dtype=object))
        return tuple(int(c) % s for c, s in zip(coords, self.quotient_factors))

    @property
    def order(self) -> int:
        return int(np.prod(self.quotient_factors, dtype=object))


def cokernel(factors: Sequence[int], relations) -> Cokernel:
    """Quotient of ⊕ Z/f_i by the span of the rows of ``relations``."""
    f = tuple(int(x) for x in factors)
    r = len(f)
    if r == 0:
        return Cokernel(f, (), np.zeros((0, 0), dtype=object))
    rel = _rows(relations, r).T
    presentation = np.hstack([np.diag(np.asarray(f, dtype=np.int64)).reshape(r, r), rel]).astype(object)
    snf = SmithNormalForm(presentation, track_right=False)
    diagonal = snf.diagonal
    kept = [i for i in range(r) if abs(diagonal[i]) != 1]
    return Cokernel(
        f,
        tuple(abs(diagonal[i]) for i in kept),
        snf.left[kept] if kept else np.zeros((0, r), dtype=object),
    )


def odd_part(subgroup: AbelianSubgroup) -> AbelianSubgroup:
    """The elements of odd order."""
    e = subgroup.modulus
    two = 1
    while e % (two * 2) == 0:
        two *= 2
    return subgroup.scale(two)


def two_power_multiple(factors: Sequence[int]) -> AbelianSubgroup:
    """2^v·A for A = ⊕ Z/f_i, 2^v the 2-part of the exponent: the odd part of A."""
    return odd_part(AbelianSubgroup.whole(factors))
