"""Impossibility machinery for decoding over large or zero characteristic.

Vectors of {-1,1}^n are stored as bitmasks with bit j set exactly when
coordinate j+1 is -1 (matching the a -> 1-2a correspondence used by
``SignedCubeFunction``).  The core question: is the all-ones vector a linear
combination of at most t nearly balanced vectors?  Over Q a successful
combination carries a Cramer certificate (integers a_i, b with |a_i|, |b|
bounded by t!), and the hard erased-linear-function distribution turns the
negative answer into a concrete adversarial oracle for decoders.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cube import SignedCubeFunction
from .errors import BudgetExceededError
from .field import PrimeField

ALL_PLUS_ONES = 0  # mask of the +1^n vector


def coordinate_sum(mask: int, n: int) -> int:
    """Sum over Z of the +-1 coordinates encoded by the mask."""
    return n - 2 * bin(mask).count("1")


def span_exponent(s: float) -> int:
    """floor(ln s / ln ln s), the query-count scale tied to (t+1)! >= s."""
    if s <= math.e:
        return 1
    return int(math.log(s) / math.log(math.log(s)))


def sample_balanced_vectors(n: int, s: int, count: int, rng) -> list[int]:
    """Uniform vectors of {-1,1}^n with |coordinate sum| <= n/s, by rejection."""
    if s < 1 or n < 1:
        raise ValueError("need positive n and s")
    bound = n / s
    out = []
    while len(out) < count:
        mask = rng.getrandbits(n)
        if abs(coordinate_sum(mask, n)) <= bound:
            out.append(mask)
    return out


@dataclass(frozen=True)
class SpanInstance:
    """A target vector and a pool of balance-bounded candidate vectors."""

    n: int
    s: int
    vectors: tuple[int, ...]
    target: int = ALL_PLUS_ONES

    def __post_init__(self):
        for v in self.vectors:
            if abs(coordinate_sum(v, self.n)) > self.n / self.s:
                raise ValueError("candidate vector violates the balance bound")


def _int_det(matrix: list[list[int]]) -> int:
    """Exact determinant of a small integer matrix (fraction-free Bareiss)."""
    m = [row[:] for row in matrix]
    size = len(m)
    sign = 1
    prev = 1
    for col in range(size - 1):
        pivot_row = next((r for r in range(col, size) if m[r][col]), None)
        if pivot_row is None:
            return 0
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            sign = -sign
        for r in range(col + 1, size):
            for c in range(col + 1, size):
                m[r][c] = (m[r][c] * m[col][col] - m[r][col] * m[col][c]) // prev
            m[r][col] = 0
        prev = m[col][col]
    return sign * m[-1][-1]


def _pattern_rows(subset: tuple[int, ...], n: int) -> list[tuple[int, ...]]:
    """Distinct coordinate patterns of the chosen vectors, as +-1 tuples.

    Coordinate j contributes the row (x^1_j, ..., x^u_j); the span equation
    holds for all n coordinates iff it holds for each distinct pattern.
    """
    rows = set()
    for j in range(n):
        rows.add(tuple(-1 if (v >> j) & 1 else 1 for v in subset))
    return sorted(rows)


def _solve_pattern_system(rows: list[tuple[int, ...]], field: PrimeField | None,
                          affine: bool):
    """Solve <c, row> = 1 for all rows (plus sum c = 1 in affine mode).

    Over Q (field None) returns (True, coefficients, (numerators, denominator))
    with the Cramer certificate from an invertible square subsystem; over F_p
    returns (True, residues, None).  Returns (False, None, None) if unsolvable.
    """
    u = len(rows[0])
    system = [list(r) for r in rows]
    rhs = [1] * len(system)
    if affine:
        system.append([1] * u)
        rhs.append(1)

    if field is not None:
        return _solve_mod_p(system, rhs, field)

    # Select u independent rows by rational elimination, tracking originals.
    frac_rows = [[Fraction(v) for v in row] + [Fraction(b)]
                 for row, b in zip(system, rhs)]
    chosen: list[int] = []
    reduced: list[list[Fraction]] = []
    for idx, row in enumerate(frac_rows):
        work = row[:]
        for pivot_col, red in zip(chosen_cols(reduced), reduced):
            if work[pivot_col]:
                factor = work[pivot_col]
                work = [a - factor * b for a, b in zip(work, red)]
        lead = next((c for c in range(u) if work[c]), None)
        if lead is None:
            if work[-1]:
                return False, None, None  # inconsistent
            continue
        work = [v / work[lead] for v in work]
        reduced.append(work)
        chosen.append(idx)
        if len(chosen) == u:
            break
    if len(chosen) < u:
        # Rank-deficient but consistent: extend any solution of the reduced
        # system with zeros on free columns.
        solution = _back_substitute(reduced, u)
    else:
        square = [system[i][:u] for i in chosen]
        b_vec = [rhs[i] for i in chosen]
        det = _int_det(square)
        numerators = []
        for col in range(u):
            replaced = [row[:col] + [b] + row[col + 1:]
                        for row, b in zip(square, b_vec)]
            numerators.append(_int_det(replaced))
        solution = [Fraction(a, det) for a in numerators]
    for row, b in zip(system, rhs):
        if sum(c * v for c, v in zip(solution, row)) != b:
            return False, None, None
    if len(chosen) == u:
        certificate = (tuple(numerators), det)
    else:
        certificate = None
    return True, tuple(solution), certificate


def chosen_cols(reduced: list[list[Fraction]]) -> list[int]:
    return [next(c for c, v in enumerate(row[:-1]) if v) for row in reduced]


def _back_substitute(reduced: list[list[Fraction]], u: int) -> list[Fraction]:
    solution = [Fraction(0)] * u
    for row in reversed(reduced):
        lead = next(c for c in range(u) if row[c])
        acc = row[-1]
        for c in range(lead + 1, u):
            acc -= row[c] * solution[c]
        solution[lead] = acc
    return solution


def _solve_mod_p(system: list[list[int]], rhs: list[int], field: PrimeField):
    p = field.p
    u = len(system[0])
    aug = [[v % p for v in row] + [b % p] for row, b in zip(system, rhs)]
    rank = 0
    pivots = []
    for col in range(u):
        pivot = next((r for r in range(rank, len(aug)) if aug[r][col]), None)
        if pivot is None:
            continue
        aug[rank], aug[pivot] = aug[pivot], aug[rank]
        inv = field.inv(aug[rank][col])
        aug[rank] = [v * inv % p for v in aug[rank]]
        for r in range(len(aug)):
            if r != rank and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [(a - factor * b) % p for a, b in zip(aug[r], aug[rank])]
        pivots.append(col)
        rank += 1
    for r in range(rank, len(aug)):
        if aug[r][-1]:
            return False, None, None
    solution = [0] * u
    for r, col in enumerate(pivots):
        solution[col] = aug[r][-1]
    return True, tuple(solution), None


@dataclass(frozen=True)
class SpanResult:
    found: bool
    subset: tuple[int, ...] | None = None
    coefficients: tuple | None = None
    certificate: tuple | None = None  # ((a_1,...,a_u), b) over Q


def _rows_from_key(key: int, u: int) -> list[tuple[int, ...]]:
    """Decode a pattern-set bitmask back into +-1 rows (bit b of a pattern
    index set means element b of the subset has a -1 coordinate there)."""
    return [
        tuple(-1 if (pattern >> b) & 1 else 1 for b in range(u))
        for pattern in range(1 << u)
        if (key >> pattern) & 1
    ]


def _pattern_key(subset: tuple[int, ...], n: int) -> int:
    """Bitmask over 2^u pattern indices marking which patterns occur."""
    u = len(subset)
    full = (1 << n) - 1
    key = 0
    for pattern in range(1 << u):
        m = full
        for b, v in enumerate(subset):
            m &= v if (pattern >> b) & 1 else ~v & full
            if not m:
                break
        if m:
            key |= 1 << pattern
    return key


class _PatternOracle:
    """Memoised solvability of pattern systems, keyed by (size, pattern set)."""

    def __init__(self, field, affine: bool):
        self.field = field
        self.affine = affine
        self.cache: dict[tuple[int, int], bool] = {}

    def solvable(self, key: int, u: int) -> bool:
        ck = (u, key)
        hit = self.cache.get(ck)
        if hit is None:
            rows = _rows_from_key(key, u)
            hit = _solve_pattern_system(rows, self.field, self.affine)[0]
            self.cache[ck] = hit
        return hit

    def solvable_keys(self, keys: np.ndarray, u: int) -> np.ndarray:
        good = [
            k for k in np.unique(keys).tolist() if self.solvable(int(k), u)
        ]
        return np.asarray(good, dtype=keys.dtype)


def _scan_pairs_vectorized(masks: np.ndarray, full, oracle: _PatternOracle):
    count = len(masks)
    for i in range(count - 1):
        a, not_a = masks[i], ~masks[i] & full
        tail = masks[i + 1:]
        not_tail = ~tail & full
        key = np.zeros(len(tail), dtype=np.uint8)
        for pattern in range(4):
            m1 = a if pattern & 1 else not_a
            m2 = tail if pattern & 2 else not_tail
            key |= ((m1 & m2) != 0).astype(np.uint8) << np.uint8(pattern)
        hits = np.isin(key, oracle.solvable_keys(key, 2))
        if hits.any():
            j = i + 1 + int(np.argmax(hits))
            return i, j
    return None


def _scan_triples_vectorized(masks: np.ndarray, full, oracle: _PatternOracle):
    count = len(masks)
    for i in range(count - 2):
        a, not_a = masks[i], ~masks[i] & full
        rest = masks[i + 1:]
        jj, ll = np.triu_indices(len(rest), k=1)
        second, third = rest[jj], rest[ll]
        not_second, not_third = ~second & full, ~third & full
        key = np.zeros(len(jj), dtype=np.uint8)
        for pattern in range(8):
            m1 = a if pattern & 1 else not_a
            m2 = second if pattern & 2 else not_second
            m3 = third if pattern & 4 else not_third
            key |= ((m1 & m2 & m3) != 0).astype(np.uint8) << np.uint8(pattern)
        hits = np.isin(key, oracle.solvable_keys(key, 3))
        if hits.any():
            first = int(np.argmax(hits))
            return i, i + 1 + int(jj[first]), i + 1 + int(ll[first])
    return None


def _find_spanning_subset(candidates, size, n, oracle: _PatternOracle):
    """First subset of the given size (in combination order) spanning the
    target, or None.  Sizes 2 and 3 use a vectorized pattern scan."""
    if size in (2, 3) and n <= 64 and len(candidates) > size:
        masks = np.asarray(candidates, dtype=np.uint64)
        full = np.uint64((1 << n) - 1)
        scan = _scan_pairs_vectorized if size == 2 else _scan_triples_vectorized
        found = scan(masks, full, oracle)
        if found is None:
            return None
        return tuple(candidates[i] for i in found)
    for subset in itertools.combinations(candidates, size):
        if oracle.solvable(_pattern_key(subset, n), size):
            return subset
    return None


def t_span_contains(
    target: int,
    candidates,
    t: int,
    n: int,
    field: PrimeField | None = None,
    budget: int = 10**6,
    affine: bool = False,
) -> SpanResult:
    """Is the target a linear combination of at most t of the candidates?

    Exact over Q (field None) or over F_p.  Subsets are scanned in increasing
    size; the number of subsets C(len(candidates), <=t) must not exceed the
    budget.  A subset spans the all-ones vector iff its set of distinct
    coordinate patterns admits a solution of <c, pattern> = 1, which makes
    the check cacheable by pattern set; over Q a positive answer includes an
    integer Cramer certificate (a_i, b) with coefficients a_i/b and
    |a_i|, |b| <= t!.

    ``affine`` additionally constrains the combination coefficients to sum
    to 1 (affine span); no factorial bound is asserted in that mode.
    """
    candidates = list(candidates)
    if t > len(candidates):
        raise ValueError("t cannot exceed the candidate count")
    work = sum(math.comb(len(candidates), u) for u in range(1, t + 1))
    if work > budget:
        raise BudgetExceededError(
            f"span scan needs {work} subsets (budget {budget})",
            required=work,
            budget=budget,
        )
    if target != ALL_PLUS_ONES:
        raise ValueError("only the all-plus-ones target is supported")

    oracle = _PatternOracle(field, affine)
    for size in range(1, t + 1):
        subset = _find_spanning_subset(candidates, size, n, oracle)
        if subset is None:
            continue
        rows = _pattern_rows(subset, n)
        ok, coefficients, certificate = _solve_pattern_system(rows, field, affine)
        assert ok
        if field is None and certificate is not None and not affine:
            numerators, det = certificate
            bound = math.factorial(size)
            if abs(det) > bound or any(abs(a) > bound for a in numerators):
                raise AssertionError("Cramer certificate exceeds the factorial bound")
        return SpanResult(True, subset, coefficients, certificate)
    return SpanResult(False)


@dataclass(frozen=True)
class HardFunction:
    """A random linear function erased on imbalanced inputs.

    Off the erased set E = {x : |sum x_i| >= 2n/s} the value is
    l(x) = sum a_i x_i; on E it is 0.  Coefficients are uniform residues over
    F_p, or uniform integers in [-N, N] with N = n^ceil(ln s/ln ln s) over
    characteristic 0.
    """

    n: int
    s: int
    field: PrimeField | None
    coefficients: tuple[int, ...]
    table: SignedCubeFunction
    erased_count: int

    def is_erased(self, mask: int) -> bool:
        return abs(coordinate_sum(mask, self.n)) >= 2 * self.n / self.s

    def linear_value(self, mask: int):
        """l at the point encoded by the mask (before erasure)."""
        total = 0
        for j, a in enumerate(self.coefficients):
            total += -a if (mask >> j) & 1 else a
        if self.field is not None:
            total %= self.field.p
        return total

    def value(self, mask: int):
        return self.table.values[mask]

    def erased_fraction(self) -> Fraction:
        return Fraction(self.erased_count, 1 << self.n)

    def distance_to_linear(self) -> Fraction:
        diff = sum(
            self.table.values[m] != self.linear_value(m) for m in range(1 << self.n)
        )
        return Fraction(diff, 1 << self.n)


def erased_fraction_bound(n: int, s: int) -> float:
    """The tail bound 2 exp(-n / (2 s^2)) on the erased fraction."""
    return 2.0 * math.exp(-n / (2.0 * s * s))


def sample_hard_function(
    n: int, s: int, field: PrimeField | None, rng, require_large_char: bool = False
) -> HardFunction:
    """Draw coefficients, then erase every imbalanced input to 0.

    ``require_large_char`` enforces the regime where decoding is provably
    hard: characteristic 0 or at least n^2.
    """
    if require_large_char and field is not None and field.p < n * n:
        raise ValueError("hard regime needs characteristic at least n^2")
    if field is not None:
        coefficients = tuple(rng.randrange(field.p) for _ in range(n))
    else:
        if s > math.e:
            exponent = max(1, math.ceil(math.log(s) / math.log(math.log(s))))
        else:
            exponent = 1
        width = n ** exponent
        coefficients = tuple(rng.randint(-width, width) for _ in range(n))
    return _build_hard_table(n, s, field, coefficients)


def _build_hard_table(n, s, field, coefficients) -> HardFunction:
    values = []
    erased = 0
    threshold = 2 * n / s
    for mask in range(1 << n):
        if abs(coordinate_sum(mask, n)) >= threshold:
            values.append(0)
            erased += 1
        else:
            total = 0
            for j, a in enumerate(coefficients):
                total += -a if (mask >> j) & 1 else a
            if field is not None:
                total %= field.p
            values.append(total)
    table = SignedCubeFunction(n, field, values)
    return HardFunction(n, s, field, coefficients, table, erased)


@dataclass(frozen=True)
class StressReport:
    trials: int
    successes: int
    total_queries: int

    @property
    def rate(self) -> float:
        return self.successes / self.trials

    @property
    def stderr(self) -> float:
        p = self.rate
        return math.sqrt(p * (1.0 - p) / self.trials)

    @property
    def queries_per_trial(self) -> float:
        return self.total_queries / self.trials


def decoder_stress(
    strategy, n: int, s: int, field: PrimeField | None, trials: int, rng
) -> StressReport:
    """Run a decoding strategy against fresh hard functions.

    ``strategy(oracle, n, rng) -> value`` receives a counting oracle over
    masks of {-1,1}^n and must output its guess for the linear value at the
    all-plus-ones point (mask 0).  Success means guessing l(1^n) exactly,
    erasure notwithstanding.
    """
    successes = 0
    total_queries = 0
    for _ in range(trials):
        hard = sample_hard_function(n, s, field, rng)
        counter = [0]

        def oracle(mask: int, _h=hard, _c=counter) -> int:
            _c[0] += 1
            return _h.value(mask)

        guess = strategy(oracle, n, rng)
        truth = hard.linear_value(ALL_PLUS_ONES)
        if guess == truth:
            successes += 1
        total_queries += counter[0]
    return StressReport(trials, successes, total_queries)
