"""Dual witnesses: small well-separated sets supporting a nonzero vector
orthogonal to every monomial of size at most d.

Such a set T forbids any two degree-<=d polynomials from differing at exactly
one point of T: the difference would pair to a single nonzero product against
the witness, contradicting orthogonality.  T is built by a greedy Hamming
code of size C(k,<=d)+1 followed by a kernel computation for the homogeneous
system sum_{y in U} f(y) * prod_{i in A} y_i = 0 over all |A| <= d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BudgetExceededError, CapacityError
from .field import FieldElement, PrimeField, binomial_sum
from .poly import subsets_up_to


def hamming(a: int, b: int) -> int:
    return bin(a ^ b).count("1")


def default_window(k: int) -> tuple[int, int]:
    """Desk-scale distance window; wide enough to fit C(k,<=d)+1 points at
    small k, unlike the asymptotic [k/4, 3k/4] choice."""
    lo = max(1, math.ceil(k / 8))
    return lo, k - lo


def asymptotic_window(k: int) -> tuple[int, int]:
    """The asymptotic window [k/4, 3k/4]; needs k large enough to fill."""
    return math.ceil(k / 4), (3 * k) // 4


def greedy_code(k: int, lo: int, hi: int, target_size: int) -> list[int]:
    """First-fit scan of {0,1}^k in ascending mask order, keeping a point iff
    its distance to every kept point lies in [lo, hi].

    Raises CapacityError (with the count found) if the cube is exhausted
    before ``target_size`` points are kept.
    """
    if not 0 < lo <= hi < k:
        raise ValueError(f"need 0 < lo <= hi < k, got lo={lo}, hi={hi}, k={k}")
    if target_size < 1:
        raise ValueError("target size must be positive")
    kept: list[int] = []
    for candidate in range(1 << k):
        if all(lo <= hamming(candidate, point) <= hi for point in kept):
            kept.append(candidate)
            if len(kept) == target_size:
                return kept
    raise CapacityError(
        f"greedy window [{lo}, {hi}] packed only {len(kept)} of {target_size} "
        f"points in {{0,1}}^{k}",
        found=len(kept),
    )


def _kernel_vector(rows: list[list[int]], field: PrimeField) -> list[int]:
    """A nonzero kernel vector of an under-determined system over F_p.

    Gaussian elimination pivoting on the first nonzero column; with more
    columns than rows a free column always remains.
    """
    p = field.p
    rows = [list(r) for r in rows]
    cols = len(rows[0]) if rows else 0
    pivot_of_col: dict[int, int] = {}
    rank = 0
    for col in range(cols):
        pivot_row = None
        for r in range(rank, len(rows)):
            if rows[r][col] % p:
                pivot_row = r
                break
        if pivot_row is None:
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        inv = field.inv(rows[rank][col])
        rows[rank] = [v * inv % p for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] % p:
                factor = rows[r][col] % p
                rows[r] = [(a - factor * b) % p for a, b in zip(rows[r], rows[rank])]
        pivot_of_col[col] = rank
        rank += 1
    free = next(c for c in range(cols) if c not in pivot_of_col)
    solution = [0] * cols
    solution[free] = 1
    for col, r in pivot_of_col.items():
        solution[col] = (-rows[r][free]) % p
    return solution


@dataclass(frozen=True)
class DualWitness:
    """Support points with nonzero weights orthogonal to the degree-d code."""

    k: int
    d: int
    field: PrimeField
    support: tuple[int, ...]
    weights: tuple[FieldElement, ...]
    window: tuple[int, int]

    def weight_at(self, point: int) -> FieldElement:
        return self.weights[self.support.index(point)]


def build_witness(
    k: int,
    d: int,
    field: PrimeField,
    lo: int | None = None,
    hi: int | None = None,
) -> DualWitness:
    """Construct a dual witness supported on a greedy code of C(k,<=d)+1 points.

    The N homogeneous orthogonality constraints in N+1 unknowns always admit
    a nonzero solution; its nonzero entries form the support.
    """
    if lo is None or hi is None:
        d_lo, d_hi = default_window(k)
        lo = d_lo if lo is None else lo
        hi = d_hi if hi is None else hi
    n_constraints = binomial_sum(k, d)
    universe = greedy_code(k, lo, hi, n_constraints + 1)
    monomials = subsets_up_to(k, d)
    rows = [
        [1 if (y & mono) == mono else 0 for y in universe]
        for mono in monomials
    ]
    solution = _kernel_vector(rows, field)
    support = []
    weights = []
    for y, w in zip(universe, solution):
        if w:
            support.append(y)
            weights.append(field.element(w))
    return DualWitness(k, d, field, tuple(support), tuple(weights), (lo, hi))


@dataclass(frozen=True)
class WitnessReport:
    orthogonality: bool
    window: bool
    size: bool
    one_point_separation: bool
    separation_mode: str  # "exhaustive" or "implied"

    def all_ok(self) -> bool:
        return self.orthogonality and self.window and self.size and self.one_point_separation


def verify_witness(witness: DualWitness, budget: int = 10**6) -> WitnessReport:
    """Check the three defining properties of a dual witness.

    One-point separation is checked exhaustively over the code when
    p^C(k,<=d) fits the budget; pair differences range over nonzero
    codewords, so scanning codewords covers every pair.  Otherwise it is
    implied by exact orthogonality with nonzero weights and flagged so.
    """
    from .oracle import CodeEnumeration  # local import; oracle pulls in numpy

    p = witness.field.p
    monomials = subsets_up_to(witness.k, witness.d)
    orthogonality = True
    for mono in monomials:
        total = 0
        for y, w in zip(witness.support, witness.weights):
            if (y & mono) == mono:
                total += w.residue
        if total % p:
            orthogonality = False
            break

    lo, hi = witness.window
    window_ok = all(
        lo <= min(hamming(a, b), witness.k - hamming(a, b))
        for idx, a in enumerate(witness.support)
        for b in witness.support[idx + 1:]
    )

    size_ok = 0 < len(witness.support) <= binomial_sum(witness.k, witness.d) + 1
    nonzero_weights = all(w.residue for w in witness.weights)

    code_size = p ** binomial_sum(witness.k, witness.d)
    if code_size <= budget:
        separation_mode = "exhaustive"
        separation = True
        code = CodeEnumeration(witness.k, witness.d, witness.field, budget=budget)
        for _, block in code.iter_value_blocks(witness.support):
            # A codeword with exactly one nonzero value on the support is the
            # difference of a violating pair (and is itself nonzero).
            nonzero_counts = (block != 0).sum(axis=1)
            if bool((nonzero_counts == 1).any()):
                separation = False
                break
    else:
        separation_mode = "implied"
        separation = orthogonality and nonzero_weights

    return WitnessReport(orthogonality, window_ok, size_ok, separation, separation_mode)
