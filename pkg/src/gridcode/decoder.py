"""Local decoding over small characteristic via balanced-weight queries.

With k the smallest power of the characteristic p exceeding the degree d,
summing a degree-<=d polynomial G on the balanced points of {0,1}^{2k} whose
last k-d coordinates are zero kills every nonconstant monomial mod p (the
binomial C(d+k-i, k-i) vanishes mod p exactly for 1 <= i <= d, by Lucas'
theorem) and leaves c * G(0) with c = C(d+k, k) invertible.  The decoder maps
the target point to the origin of a random 2k-variable restriction, queries
the balanced points, and inverts that relation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .cube import CubeFunction
from .field import FieldElement, PrimeField, decoder_constant

FULL_BALANCED = "full_B"
ZERO_TAIL_ONLY = "B_prime_only"


@dataclass(frozen=True)
class DecoderParams:
    """Derived decoding parameters for characteristic p and degree d."""

    field: PrimeField
    d: int
    k: int
    c: FieldElement

    @classmethod
    def for_degree(cls, p: int, d: int) -> "DecoderParams":
        k, c = decoder_constant(d, p)
        return cls(PrimeField(p), d, k, c)

    def __post_init__(self):
        p = self.field.p
        k = self.k
        while k % p == 0:
            k //= p
        if k != 1:
            raise ValueError(f"k={self.k} is not a power of {p}")
        if not self.k > self.d:
            raise ValueError("k must exceed the degree")
        if self.d >= 1 and self.k > p * self.d:
            raise ValueError("k must be at most p*d")
        if self.c.residue == 0:
            raise ValueError("decoding constant must be invertible")

    @property
    def query_budget(self) -> int:
        """Queries per decoding call in the full balanced mode."""
        return math.comb(2 * self.k, self.k)

    @property
    def tolerance(self) -> Fraction:
        """Corruption rate up to which decoding succeeds with probability 3/4."""
        return Fraction(1, 4 * self.query_budget)


def balanced_set(k: int) -> list[int]:
    """All points of {0,1}^{2k} of Hamming weight exactly k, ascending masks."""
    if k < 1:
        raise ValueError("k must be positive")
    masks = [
        sum(1 << i for i in positions)
        for positions in itertools.combinations(range(2 * k), k)
    ]
    masks.sort()
    return masks


def zero_tail_balanced_set(k: int, d: int) -> list[int]:
    """Balanced points whose last k-d coordinates are zero (C(k+d, k) of them).

    Built directly by placing the k ones among the first k+d coordinates, so
    the full balanced set is never materialised (it is astronomically larger
    for big k).
    """
    if not 0 <= d < k:
        raise ValueError(f"need 0 <= d < k, got d={d}, k={k}")
    masks = [
        sum(1 << i for i in positions)
        for positions in itertools.combinations(range(k + d), k)
    ]
    masks.sort()
    return masks


def decode_from_ball(values: dict, params: DecoderParams) -> FieldElement:
    """Recover G(0^{2k}) as c^{-1} * sum of G over the zero-tail balanced set.

    ``values`` must map exactly that set of masks to residues or elements.
    """
    expected = zero_tail_balanced_set(params.k, params.d)
    if set(values.keys()) != set(expected):
        raise ValueError("values must cover exactly the zero-tail balanced set")
    p = params.field.p
    total = 0
    for v in values.values():
        total += v.residue if isinstance(v, FieldElement) else v
    total %= p
    return FieldElement(total * params.field.inv(params.c.residue) % p, params.field)


@dataclass(frozen=True)
class QueryLog:
    """Which oracle points one decoding call touched."""

    mode: str
    target: int
    origin_image: int  # where y = 0 would be queried; equals target
    assignment: tuple[int, ...]  # variable -> output index in [2k]
    queries: tuple[tuple[int, int], ...]  # (y mask over 2k vars, oracle mask)

    @property
    def query_count(self) -> int:
        return len(self.queries)


def local_decode(
    f: CubeFunction,
    x: int,
    params: DecoderParams,
    rng,
    mode: str = FULL_BALANCED,
) -> tuple[FieldElement, QueryLog]:
    """Decode the value at x of the codeword near f.

    Each variable is assigned a uniform output in [2k]; the query for a
    balanced point y reads f at z with z_j = y_{h(j)} xor x_j, a uniform
    point of the cube.  The full mode queries every balanced point
    (C(2k,k) queries, of which only the zero-tail ones enter the sum); the
    reduced mode queries only the zero-tail set (C(k+d,k) queries).
    """
    if f.field.p != params.field.p:
        raise ValueError("oracle modulus does not match decoder parameters")
    if not 0 <= x < (1 << f.n):
        raise ValueError("target point out of range")
    if mode not in (FULL_BALANCED, ZERO_TAIL_ONLY):
        raise ValueError(f"unknown mode {mode!r}")
    width = 2 * params.k
    assignment = tuple(rng.randrange(width) for _ in range(f.n))
    points = balanced_set(params.k) if mode == FULL_BALANCED else zero_tail_balanced_set(
        params.k, params.d
    )
    queries = []
    answers = {}
    for y in points:
        z = x
        for j, out in enumerate(assignment):
            if (y >> out) & 1:
                z ^= 1 << j
        queries.append((y, z))
        answers[y] = f.values[z]
    needed = zero_tail_balanced_set(params.k, params.d)
    value = decode_from_ball({y: answers[y] for y in needed}, params)
    # y = 0 is never queried, but the construction pins its image to x.
    log = QueryLog(mode, x, x, assignment, tuple(queries))
    assert log.origin_image == log.target
    return value, log
