"""Smith normal form over Z and over Z/e.

Over Z the entries are Python integers (object arrays), so nothing
overflows. Over Z/e the arithmetic is int64 reduced mod e after every step;
cohomology of modules of exponent e only ever needs the latter.
"""

import logging
from dataclasses import dataclass
from math import gcd

import numpy as np
from sympy import mod_inverse

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # sympy < 1.13
    from sympy.core.numbers import igcdex

logger = logging.getLogger(__name__)


def _identity(size: int, dtype) -> np.ndarray:
    if dtype is object:
        eye = np.empty((size, size), dtype=object)
        eye.fill(0)
        for i in range(size):
            eye[i, i] = 1
        return eye
    return np.eye(size, dtype=dtype)


class SmithNormalForm:
    """Diagonalizes ``matrix`` so that ``left @ matrix @ right`` is diagonal.

    The diagonal satisfies d_1 | d_2 | ... (over Z/e every nonzero d_i divides e
    and zeros come last). ``left_inverse`` is tracked on request, it is what
    turns the diagonal basis back into generators.
    """

    def __init__(
        self,
        matrix,
        modulus: int | None = None,
        *,
        track_left: bool = True,
        track_right: bool = True,
        track_left_inverse: bool = False,
    ):
        self.modulus = modulus
        dtype = object if modulus is None else np.int64
        A = np.array(matrix, dtype=dtype)
        if A.ndim != 2:
            raise ValueError("Smith normal form needs a 2-dimensional matrix")
        if modulus is not None:
            A %= modulus
        self.matrix = A
        m, n = A.shape
        self.left = _identity(m, dtype) if track_left else None
        self.right = _identity(n, dtype) if track_right else None
        self.left_inverse = _identity(m, dtype) if track_left_inverse else None
        self.rank = 0
        self._reduce()

    @property
    def diagonal(self) -> list[int]:
        return [int(self.matrix[i, i]) for i in range(min(self.matrix.shape))]

    def _mod(self, M):
        if self.modulus is not None:
            M %= self.modulus

    def _reduce(self):
        s = 0
        while s < min(self.matrix.shape):
            if not self._place_pivot(s):
                break
            while True:
                self._normalize_pivot(s)
                if self._clear_column(s) or self._clear_row(s):
                    continue
                if not self._fix_divisibility(s):
                    break
            if self.modulus is None and self.matrix[s, s] < 0:
                self._scale_row(s, -1, -1)
            s += 1
        self.rank = s

    def _place_pivot(self, s: int) -> bool:
        sub = self.matrix[s:, s:]
        nonzero = sub != 0
        if not nonzero.any():
            return False
        if self.modulus is None:
            keys = np.where(nonzero, np.abs(sub), None)
            best = min((k, idx) for idx, k in np.ndenumerate(keys) if k is not None)[1]
        else:
            keys = np.where(nonzero, np.gcd(sub, self.modulus), self.modulus + 1)
            best = np.unravel_index(np.argmin(keys), keys.shape)
        i, j = s + int(best[0]), s + int(best[1])
        self._swap_rows(s, i)
        self._swap_columns(s, j)
        return True

    def _normalize_pivot(self, s: int):
        """Over Z/e scales the pivot by a unit to gcd(pivot, e)."""
        if self.modulus is None:
            return
        e = self.modulus
        p = int(self.matrix[s, s])
        g = gcd(p, e)
        if p == g:
            return
        reduced = e // g
        u = int(mod_inverse((p // g) % reduced, reduced)) if reduced > 1 else 1
        while gcd(u, e) != 1:
            u += reduced
        self._scale_row(s, u, int(mod_inverse(u, e)))

    def _clear_column(self, s: int) -> bool:
        """Eliminates below the pivot; True if the pivot changed."""
        A = self.matrix
        p = A[s, s]
        below = np.flatnonzero(A[s + 1 :, s] != 0) + s + 1
        if below.size == 0:
            return False
        entries = A[below, s]
        divisible = below[entries % p == 0]
        if divisible.size:
            q = A[divisible, s] // p
            self._subtract_rows(divisible, s, q)
        for i in below[entries % p != 0]:
            self._combine_rows(s, int(i))
            return True
        return False

    def _clear_row(self, s: int) -> bool:
        A = self.matrix
        p = A[s, s]
        right = np.flatnonzero(A[s, s + 1 :] != 0) + s + 1
        if right.size == 0:
            return False
        entries = A[s, right]
        divisible = right[entries % p == 0]
        if divisible.size:
            q = A[s, divisible] // p
            self._subtract_columns(divisible, s, q)
        for j in right[entries % p != 0]:
            self._combine_columns(s, int(j))
            return True
        return False

    def _fix_divisibility(self, s: int) -> bool:
        A = self.matrix
        p = A[s, s]
        rest = A[s + 1 :, s + 1 :]
        if rest.size == 0:
            return False
        bad = np.argwhere(rest % p != 0)
        if bad.size == 0:
            return False
        self._add_row(s, s + 1 + int(bad[0][0]))
        return True

    def _swap_rows(self, a: int, b: int):
        if a == b:
            return
        for M in (self.matrix, self.left):
            if M is not None:
                M[[a, b]] = M[[b, a]]
        if self.left_inverse is not None:
            self.left_inverse[:, [a, b]] = self.left_inverse[:, [b, a]]

    def _swap_columns(self, a: int, b: int):
        if a == b:
            return
        for M in (self.matrix, self.right):
            if M is not None:
                M[:, [a, b]] = M[:, [b, a]]

    def _scale_row(self, s: int, unit: int, inverse: int):
        for M in (self.matrix, self.left):
            if M is not None:
                M[s] = M[s] * unit
                self._mod(M[s])
        if self.left_inverse is not None:
            self.left_inverse[:, s] = self.left_inverse[:, s] * inverse
            self._mod(self.left_inverse[:, s])

    def _add_row(self, target: int, source: int):
        self._transform_rows(target, source, 1, 1, 0, 1)

    def _subtract_rows(self, rows: np.ndarray, s: int, q: np.ndarray):
        """row_i -= q_i row_s for every i in rows."""
        for M in (self.matrix, self.left):
            if M is not None:
                block = M[rows] - q[:, None] * M[s][None, :]
                self._mod(block)
                M[rows] = block
        if self.left_inverse is not None:
            Linv = self.left_inverse
            Linv[:, s] += Linv[:, rows].dot(q)
            self._mod(Linv[:, s])

    def _subtract_columns(self, cols: np.ndarray, s: int, q: np.ndarray):
        for M in (self.matrix, self.right):
            if M is not None:
                block = M[:, cols] - M[:, s][:, None] * q[None, :]
                self._mod(block)
                M[:, cols] = block

    def _combine_rows(self, s: int, i: int):
        a, b = int(self.matrix[s, s]), int(self.matrix[i, s])
        x, y, g = (int(v) for v in igcdex(a, b))
        self._transform_rows(s, i, x, y, -b // g, a // g)

    def _combine_columns(self, s: int, j: int):
        a, b = int(self.matrix[s, s]), int(self.matrix[s, j])
        x, y, g = (int(v) for v in igcdex(a, b))
        self._transform_columns(s, j, x, y, -b // g, a // g)

    def _transform_rows(self, s: int, i: int, p: int, q: int, r: int, t: int):
        """(row_s, row_i) <- (p row_s + q row_i, r row_s + t row_i), pt - qr = 1."""
        for M in (self.matrix, self.left):
            if M is not None:
                rs, ri = M[s].copy(), M[i].copy()
                M[s] = p * rs + q * ri
                M[i] = r * rs + t * ri
                self._mod(M[s])
                self._mod(M[i])
        if self.left_inverse is not None:
            Linv = self.left_inverse
            cs, ci = Linv[:, s].copy(), Linv[:, i].copy()
            Linv[:, s] = t * cs - r * ci
            Linv[:, i] = p * ci - q * cs
            self._mod(Linv[:, s])
            self._mod(Linv[:, i])

    def _transform_columns(self, s: int, j: int, p: int, q: int, r: int, t: int):
        for M in (self.matrix, self.right):
            if M is not None:
                cs, cj = M[:, s].copy(), M[:, j].copy()
                M[:, s] = p * cs + q * cj
                M[:, j] = r * cs + t * cj
                self._mod(M[:, s])
                self._mod(M[:, j])


def smith_normal_form(matrix, modulus: int | None = None):
    """Returns (U, S, V) with U @ matrix @ V = S."""
    snf = SmithNormalForm(matrix, modulus)
    return snf.left, snf.matrix, snf.right


def kernel_mod(matrix, modulus: int) -> np.ndarray:
    """Columns generating {x in (Z/e)^n : matrix @ x = 0 mod e}."""
    A = np.asarray(matrix, dtype=np.int64)
    n = A.shape[1]
    snf = SmithNormalForm(A, modulus, track_left=False)
    diagonal = snf.diagonal
    columns = []
    for i in range(n):
        d = diagonal[i] if i < len(diagonal) else 0
        step = modulus // gcd(d, modulus)
        if step % modulus == 0:
            continue
        columns.append(snf.right[:, i] * step % modulus)
    if not columns:
        return np.zeros((n, 0), dtype=np.int64)
    return np.stack(columns, axis=1)


@dataclass(frozen=True, eq=False)
class LinearSolver:
    """Solves A x = b mod e repeatedly from one Smith form of A."""

    left: np.ndarray
    diagonal: tuple[int, ...]
    right: np.ndarray
    modulus: int

    @classmethod
    def for_matrix(cls, matrix, modulus: int) -> "LinearSolver":
        snf = SmithNormalForm(np.asarray(matrix, dtype=np.int64), modulus)
        return cls(snf.left, tuple(snf.diagonal), snf.right, modulus)

    def solve(self, rhs) -> np.ndarray | None:
        e = self.modulus
        m, n = self.left.shape[0], self.right.shape[0]
        c = self.left.dot(np.asarray(rhs, dtype=np.int64) % e) % e
        y = np.zeros(n, dtype=np.int64)
        for i in range(m):
            d = self.diagonal[i] if i < len(self.diagonal) else 0
            g = gcd(d, e)
            if c[i] % g:
                return None
            if d == 0:
                continue
            reduced = e // g
            if reduced > 1:
                y[i] = (int(c[i]) // g) * int(mod_inverse((d // g) % reduced, reduced)) % reduced
        return self.right.dot(y) % e

    def to_arrays(self, prefix: str) -> dict[str, np.ndarray]:
        return {
            f"{prefix}_left": self.left,
            f"{prefix}_diagonal": np.asarray(self.diagonal, dtype=np.int64),
            f"{prefix}_right": self.right,
        }

    @classmethod
    def from_arrays(cls, arrays, prefix: str, modulus: int) -> "LinearSolver":
        return cls(
            arrays[f"{prefix}_left"],
            tuple(int(d) for d in arrays[f"{prefix}_diagonal"]),
            arrays[f"{prefix}_right"],
            modulus,
        )


def solve_mod(matrix, rhs, modulus: int) -> np.ndarray | None:
    """Some x with matrix @ x = rhs mod e, or None."""
    return LinearSolver.for_matrix(matrix, modulus).solve(rhs)


def is_solvable_mod(matrix, rhs, modulus: int, chunk: int = 256) -> bool:
    """Whether matrix @ x = rhs mod e has a solution.

    Tall systems are folded a chunk of rows at a time: the left transform of each
    Smith form leaves at most one live row per column, and dead rows must have a zero
    right-hand side.
    """
    A = np.asarray(matrix, dtype=np.int64) % modulus
    b = np.asarray(rhs, dtype=np.int64) % modulus
    if A.shape[1] == 0:
        return not b.any()
    kept_A, kept_b = A[:0], b[:0]
    for start in range(0, A.shape[0], chunk):
        block_A = np.vstack([kept_A, A[start : start + chunk]])
        block_b = np.concatenate([kept_b, b[start : start + chunk]])
        left = SmithNormalForm(block_A, modulus, track_right=False).left
        reduced_A, reduced_b = left.dot(block_A) % modulus, left.dot(block_b) % modulus
        live = reduced_A.any(axis=1)
        if reduced_b[~live].any():
            return False
        kept_A, kept_b = reduced_A[live], reduced_b[live]
    return not len(kept_b) or solve_mod(kept_A, kept_b, modulus) is not None


@dataclass(frozen=True)
class IntMatrix:
    """An integer matrix whose row i is read mod ``moduli[i]`` when given."""

    entries: np.ndarray
    moduli: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.entries.ndim != 2:
            raise ValueError("IntMatrix entries must be 2-dimensional")
        if self.moduli is not None:
            if len(self.moduli) != self.entries.shape[0] or min(self.moduli, default=1) < 1:
                raise ValueError("one positive modulus per row is required")

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def reduced(self) -> np.ndarray:
        if self.moduli is None:
            return self.entries
        return self.entries % np.asarray(self.moduli, dtype=np.int64)[:, None]
