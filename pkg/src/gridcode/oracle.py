"""Brute-force ground truth: exhaustive enumeration of the degree-d code.

Everything here is an exact oracle backing the Monte Carlo experiments: the
code F(k, d) is enumerated codeword by codeword (all p^C(k,<=d) coefficient
vectors in lexicographic order) and distances are exact fractions.  Budgets
are hard errors, never silent approximations.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .cube import CubeFunction
from .errors import BudgetExceededError
from .field import PrimeField, binomial_sum
from .poly import MultilinearPoly, subsets_up_to

# Full-cube value matrices up to this many bytes are cached per (k, d, p).
_CACHE_BYTE_LIMIT = 1 << 28
_matrix_cache: dict = {}

_BLOCK_ROWS = 1 << 13


class CodeEnumeration:
    """All degree-<=d multilinear polynomials on k variables over F_p.

    Codeword index c encodes the coefficient vector as base-p digits with the
    lowest monomial mask as the most significant digit, so increasing index
    order is lexicographic order on coefficient vectors.  ``subsets_up_to``
    fixes the monomial order.
    """

    def __init__(self, k: int, d: int, field: PrimeField, budget: int = 10**7):
        if not 0 <= d <= k:
            raise ValueError(f"need 0 <= d <= k, got d={d}, k={k}")
        self.k = k
        self.d = d
        self.field = field
        self.monomials = subsets_up_to(k, d)
        self.dimension = binomial_sum(k, d)
        self.size = field.p ** self.dimension
        if self.size > budget:
            raise BudgetExceededError(
                f"code has {self.size} codewords (budget {budget})",
                required=self.size,
                budget=budget,
            )

    def coefficient_vector(self, index: int) -> tuple[int, ...]:
        """Base-p digits of the index, first monomial most significant."""
        p = self.field.p
        digits = []
        for _ in range(self.dimension):
            digits.append(index % p)
            index //= p
        return tuple(reversed(digits))

    def poly_at(self, index: int) -> MultilinearPoly:
        vec = self.coefficient_vector(index)
        coeffs = {m: c for m, c in zip(self.monomials, vec) if c}
        return MultilinearPoly(self.k, self.field, coeffs)

    def index_of(self, poly: MultilinearPoly) -> int:
        p = self.field.p
        index = 0
        for m in self.monomials:
            index = index * p + poly.coeffs.get(m, 0)
        return index

    def monomial_matrix(self, points) -> np.ndarray:
        """Rows: monomials, columns: evaluation points (0/1 entries)."""
        pts = np.asarray(list(points), dtype=np.int64)
        mono = np.asarray(self.monomials, dtype=np.int64)
        return ((pts[None, :] & mono[:, None]) == mono[:, None]).astype(np.int64)

    def _coefficient_block(self, start: int, stop: int) -> np.ndarray:
        shape = (self.field.p,) * self.dimension
        return np.stack(
            np.unravel_index(np.arange(start, stop), shape), axis=1
        ).astype(np.int64)

    def iter_value_blocks(self, points, block_rows: int = _BLOCK_ROWS):
        """Yield (start_index, values) with values of shape (rows, len(points)).

        Scanning blocks in order visits coefficient vectors lexicographically
        while keeping memory bounded.
        """
        points = list(points)
        mono = self.monomial_matrix(points)
        p = self.field.p
        dtype = np.uint8 if p < 256 else np.int64
        for start in range(0, self.size, block_rows):
            stop = min(start + block_rows, self.size)
            block = (self._coefficient_block(start, stop) @ mono) % p
            yield start, block.astype(dtype)

    def value_matrix(self, points) -> np.ndarray:
        """All codeword values on the given points, rows in index order."""
        points = list(points)
        blocks = [b for _, b in self.iter_value_blocks(points)]
        return np.concatenate(blocks, axis=0)

    def cached_full_matrix(self) -> np.ndarray | None:
        """Value matrix over the entire cube, or None if it would be too big."""
        key = (self.k, self.d, self.field.p)
        hit = _matrix_cache.get(key)
        if hit is not None:
            return hit
        if self.size * (1 << self.k) > _CACHE_BYTE_LIMIT:
            return None
        matrix = self.value_matrix(range(1 << self.k))
        _matrix_cache[key] = matrix
        return matrix

    def __iter__(self):
        for index in range(self.size):
            yield self.poly_at(index)


def _min_disagreement(code: CodeEnumeration, points, table: np.ndarray,
                      weights: np.ndarray | None = None) -> tuple[int, int]:
    """(best codeword index, weighted disagreement count) over the code.

    First index attaining the minimum wins, which is the lexicographically
    smallest coefficient vector.
    """
    points = list(points)
    full = None
    if weights is None and points == list(range(1 << code.k)):
        full = code.cached_full_matrix()
    best_index = 0
    best_count = None
    if full is not None:
        counts = np.count_nonzero(full != table[None, :], axis=1)
        best_index = int(np.argmin(counts))
        best_count = int(counts[best_index])
        return best_index, best_count
    for start, block in code.iter_value_blocks(points):
        neq = block != table[None, :]
        if weights is None:
            counts = np.count_nonzero(neq, axis=1)
        else:
            counts = neq.astype(np.int64) @ weights
        local = int(np.argmin(counts))
        count = int(counts[local])
        if best_count is None or count < best_count:
            best_count = count
            best_index = start + local
    return best_index, best_count


def exact_delta_d(f: CubeFunction, d: int, budget: int = 10**7):
    """Exact distance from f to the degree-d code, with the nearest codeword.

    Ties break to the lexicographically smallest coefficient vector.  Raises
    BudgetExceededError when p^C(n,<=d) exceeds the budget.
    """
    code = CodeEnumeration(f.n, d, f.field, budget=budget)
    dtype = np.uint8 if f.field.p < 256 else np.int64
    table = np.asarray(f.values, dtype=dtype)
    best, count = _min_disagreement(code, range(1 << f.n), table)
    return Fraction(count, 1 << f.n), code.poly_at(best)


def certify_far(f: CubeFunction, d: int, bound, budget: int = 10**7) -> bool:
    """True iff the exact distance to the degree-d code is at least ``bound``."""
    delta, _ = exact_delta_d(f, d, budget=budget)
    return delta >= Fraction(bound)
