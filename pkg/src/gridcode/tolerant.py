"""Tolerant testing: estimate the distance to the code and threshold it.

Step 1 runs the amplified intolerant test to screen out functions far beyond
the tolerant regime.  Step 2 restricts through an i.i.d. uniform variable map
(not the bucket process; buckets may be empty here) and samples a query set S
from the small cube.  Step 3 brute-force interpolates the closest degree-d
polynomial on S and accepts iff its distance mu on S is below
(delta_1 + delta_2) / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cube import CubeFunction, bucket_masks, query_mask
from .field import PrimeField
from .oracle import CodeEnumeration, _min_disagreement
from .poly import MultilinearPoly, from_truth_table
from .restrict import UniformRestriction
from .tester import TesterParams, amplified_test


@dataclass(frozen=True)
class TolerantParams:
    """Distance thresholds and sampling sizes for the tolerant test.

    The asymptotic regime takes k on the order of d log(d/eps)/eps^4 and
    m of order 1/eps^2 + k^d; the desk profile replaces both with small
    explicit values (the guarantees then rest on measurement, not on the
    concentration constants).
    """

    d: int
    delta1: Fraction
    delta2: Fraction
    k: int
    m: int
    intolerant: TesterParams
    intolerant_reps: int = 1
    replacement: bool = True
    asymptotic: bool = False

    def __post_init__(self):
        if not 0 <= self.delta1 < self.delta2 < 1:
            raise ValueError("need 0 <= delta1 < delta2 < 1")
        if self.k <= self.d:
            raise ValueError("k must exceed d")
        if self.m < 1:
            raise ValueError("need at least one sample point")
        if self.intolerant_reps < 1:
            raise ValueError("need at least one intolerant repetition")

    @classmethod
    def desk(
        cls,
        d: int,
        delta1,
        delta2,
        k: int | None = None,
        m: int | None = None,
        intolerant_k: int | None = None,
        intolerant_reps: int = 1,
        replacement: bool = True,
    ) -> "TolerantParams":
        delta1 = Fraction(delta1)
        delta2 = Fraction(delta2)
        eps = (delta2 - delta1) / 2
        if eps <= 0:
            raise ValueError("delta2 must exceed delta1")
        if k is None:
            k = d + 5
        if m is None:
            m = math.ceil(1 / float(eps) ** 2) + k**d
        intolerant = TesterParams.desk(d, intolerant_k)
        return cls(d, delta1, delta2, k, m, intolerant, intolerant_reps, replacement)

    @property
    def eps(self) -> Fraction:
        return (self.delta2 - self.delta1) / 2

    @property
    def threshold(self) -> Fraction:
        return (self.delta1 + self.delta2) / 2

    @property
    def far_screen(self) -> Fraction:
        """Distance parameter of the step-1 intolerant screen."""
        return Fraction(1, 1 << (self.d + 10))

    @property
    def max_queries(self) -> int:
        return self.intolerant_reps * self.intolerant.queries_per_run + self.m


def sample_uniform_restriction(n: int, k: int, rng) -> UniformRestriction:
    """phi(i) i.i.d. uniform on [k] plus a uniform complement mask.

    No surjectivity guarantee: outputs may have empty buckets, hence the
    relaxed restriction type.
    """
    if n < 1 or k < 1:
        raise ValueError("dimensions must be positive")
    phi = [rng.randrange(k) for _ in range(n)]
    shift = rng.getrandbits(n)
    return UniformRestriction(n, k, phi, shift)


def sample_query_set(k: int, m: int, rng, replacement: bool = True) -> list[int]:
    """m points of {0,1}^k: i.i.d. uniform (default) or distinct."""
    if m < 1:
        raise ValueError("need at least one point")
    size = 1 << k
    if replacement:
        return [rng.randrange(size) for _ in range(m)]
    if m > size:
        raise ValueError(f"cannot draw {m} distinct points from {size}")
    return rng.sample(range(size), m)


def _closest_on_points(
    values: dict[int, int],
    weights: dict[int, int],
    k: int,
    d: int,
    field: PrimeField,
    budget: int,
) -> tuple[MultilinearPoly, Fraction]:
    """Exhaustive weighted nearest codeword on a set of points.

    Ties break to the lexicographically smallest coefficient vector (the
    enumeration order of CodeEnumeration).
    """
    code = CodeEnumeration(k, d, field, budget=budget)
    points = sorted(values)
    dtype = np.uint8 if field.p < 256 else np.int64
    table = np.asarray([values[pt] for pt in points], dtype=dtype)
    weight_vec = np.asarray([weights[pt] for pt in points], dtype=np.int64)
    total = int(weight_vec.sum())
    best, count = _min_disagreement(code, points, table, weights=weight_vec)
    return code.poly_at(best), Fraction(count, total)


def closest_poly_on_set(
    g: CubeFunction, sample: list[int], d: int, budget: int = 10**7
) -> tuple[MultilinearPoly, Fraction]:
    """Closest degree-d polynomial to g on a multiset of points, with its
    multiset-weighted distance mu."""
    weights: dict[int, int] = {}
    for pt in sample:
        weights[pt] = weights.get(pt, 0) + 1
    values = {pt: g.values[pt] for pt in weights}
    return _closest_on_points(values, weights, g.n, d, g.field, budget)


@dataclass(frozen=True)
class TolerantReport:
    accepted: bool
    intolerant_accepted: bool
    mu: Fraction | None
    threshold: Fraction
    queries_used: int
    interpolated: MultilinearPoly | None


def tolerant_test(f: CubeFunction, params: TolerantParams, rng) -> TolerantReport:
    """Run the three-step tolerant test; the verdict is a deterministic
    function of (f, rng state)."""
    if f.n <= params.k:
        raise ValueError(f"need n > k, got n={f.n}, k={params.k}")
    queries = params.intolerant_reps * params.intolerant.queries_per_run
    if not amplified_test(f, params.intolerant, params.intolerant_reps, rng):
        return TolerantReport(False, False, None, params.threshold, queries, None)

    restriction = sample_uniform_restriction(f.n, params.k, rng)
    sample = sample_query_set(params.k, params.m, rng, params.replacement)
    buckets = bucket_masks(restriction)
    weights: dict[int, int] = {}
    for pt in sample:
        weights[pt] = weights.get(pt, 0) + 1
    values = {
        pt: f.values[query_mask(restriction, pt, buckets)] for pt in weights
    }
    queries += len(weights)
    interpolated, mu = _closest_on_points(
        values, weights, params.k, params.d, f.field, budget=10**7
    )
    assert queries <= params.max_queries
    accepted = mu < params.threshold
    return TolerantReport(accepted, True, mu, params.threshold, queries, interpolated)


def restricted_min_distance(k: int, d: int, field: PrimeField, sample) -> Fraction:
    """Minimum fractional weight on the sample over nonzero codewords.

    By linearity this equals the minimum distance of the degree-d code
    restricted to the sample (points weighted by multiplicity).
    """
    points = sorted(set(sample))
    multiplicity: dict[int, int] = {}
    for pt in sample:
        multiplicity[pt] = multiplicity.get(pt, 0) + 1
    weight_vec = np.asarray([multiplicity[pt] for pt in points], dtype=np.int64)
    total = int(weight_vec.sum())
    code = CodeEnumeration(k, d, field)
    best = None
    for start, block in code.iter_value_blocks(points):
        nonzero = (block != 0).astype(np.int64) @ weight_vec
        if start == 0:
            nonzero = nonzero[1:]  # skip the zero codeword
        local = int(nonzero.min()) if len(nonzero) else None
        if local is not None and (best is None or local < best):
            best = local
    return Fraction(best, total)
