"""Random variable-identification restrictions and the bucket (set-union) process.

A restriction collapses n cube variables to k by mapping each variable i to an
output variable phi(i), optionally complemented: x_i(y) = y_{phi(i)} xor a_i.
Three samplers produce the same bucket-size distribution:

  * the recursive process (repeatedly identify a random pair, then relabel),
  * the direct parent process (each index above k picks a uniform earlier parent),
  * the cycle sampler (arrange all elements on a cycle entered at a uniform
    special element; each special element owns the arc up to the next special).

Exact enumerators for all three are provided so the equivalence can be checked
as an identity of rational distributions rather than statistically.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceededError


class Restriction:
    """A map phi:[n]->[k] plus complement mask, all indices 0-based.

    ``var_to_output[i]`` is phi(i); bit i of ``shift_mask`` is the complement
    bit a_i.  Every output variable must have at least one preimage (each
    bucket contains its seed); ``UniformRestriction`` relaxes that.
    """

    require_full_buckets = True

    def __init__(self, n: int, k: int, var_to_output, shift_mask: int):
        if n < 1 or k < 1:
            raise ValueError("dimensions must be positive")
        var_to_output = tuple(var_to_output)
        if len(var_to_output) != n:
            raise ValueError(f"expected {n} output assignments, got {len(var_to_output)}")
        if any(not 0 <= j < k for j in var_to_output):
            raise ValueError("output index out of range")
        if not 0 <= shift_mask < (1 << n):
            raise ValueError("shift mask out of range")
        if self.require_full_buckets:
            seen = set(var_to_output)
            if len(seen) != k:
                missing = sorted(set(range(k)) - seen)
                raise ValueError(f"empty buckets for outputs {missing}")
        self.n = n
        self.k = k
        self.var_to_output = var_to_output
        self.shift_mask = shift_mask

    def __repr__(self):
        return (
            f"{type(self).__name__}(n={self.n}, k={self.k}, "
            f"phi={self.var_to_output}, shift={self.shift_mask:0{self.n}b})"
        )

    def __eq__(self, other):
        return (
            isinstance(other, Restriction)
            and other.n == self.n
            and other.k == self.k
            and other.var_to_output == self.var_to_output
            and other.shift_mask == self.shift_mask
        )

    def buckets(self) -> list[list[int]]:
        """Preimage classes of phi, indexed by output variable."""
        out: list[list[int]] = [[] for _ in range(self.k)]
        for i, j in enumerate(self.var_to_output):
            out[j].append(i)
        return out

    def bucket_sizes(self) -> tuple[int, ...]:
        """Sorted sizes of the preimage classes."""
        return tuple(sorted(len(b) for b in self.buckets()))

    def identity(self) -> bool:
        return self.n == self.k and self.shift_mask == 0 and all(
            j == i for i, j in enumerate(self.var_to_output)
        )


class UniformRestriction(Restriction):
    """Restriction sampled with i.i.d. uniform phi; buckets may be empty."""

    require_full_buckets = False


def identity_restriction(n: int) -> Restriction:
    return Restriction(n, n, range(n), 0)


def compose(first: Restriction, second: Restriction) -> Restriction:
    """The single restriction equivalent to applying ``first`` then ``second``.

    x_i = y_{phi1(i)} xor a1_i and y_j = z_{phi2(j)} xor a2_j collapse to
    phi = phi2 o phi1 with shifts a1_i xor a2_{phi1(i)}.
    """
    if second.n != first.k:
        raise ValueError(f"cannot compose: {first.k} outputs vs {second.n} inputs")
    phi = tuple(second.var_to_output[j] for j in first.var_to_output)
    shift = first.shift_mask
    for i, j in enumerate(first.var_to_output):
        if (second.shift_mask >> j) & 1:
            shift ^= 1 << i
    cls = Restriction
    if not (first.require_full_buckets and second.require_full_buckets):
        cls = UniformRestriction
    return cls(first.n, second.k, phi, shift)


@dataclass(frozen=True)
class IdentificationStep:
    """One merge round: the removed variable is replaced by flip xor kept."""

    kept: int
    removed: int
    flip: int


@dataclass(frozen=True)
class RestrictionTranscript:
    """Full record of one run of the recursive sampler."""

    steps: tuple[IdentificationStep, ...]
    survivors: tuple[int, ...]
    bijection: dict  # survivor variable -> output index
    final_shift: dict  # survivor variable -> complement bit


def sample_restriction_recursive(n: int, k: int, rng):
    """Sample a restriction by n-k random pairwise identifications.

    Each round picks distinct surviving variables (kept, removed) and a bit,
    substituting x_removed := bit xor x_kept.  A uniform bijection onto the
    outputs and a uniform complement per survivor finish the job.  Returns
    (restriction, transcript).
    """
    if not n > k >= 1:
        raise ValueError(f"need n > k >= 1, got n={n}, k={k}")
    survivors = list(range(n))
    # removed variable -> (its representative at removal time, flip bit)
    alias: dict[int, tuple[int, int]] = {}
    steps = []
    while len(survivors) > k:
        kept, removed = rng.sample(survivors, 2)
        flip = rng.getrandbits(1)
        alias[removed] = (kept, flip)
        survivors.remove(removed)
        steps.append(IdentificationStep(kept, removed, flip))

    targets = list(range(k))
    rng.shuffle(targets)
    bijection = {s: t for s, t in zip(survivors, targets)}
    final_shift = {s: rng.getrandbits(1) for s in survivors}

    phi = [0] * n
    shift = 0
    for i in range(n):
        root, flip = _resolve_alias(i, alias)
        phi[i] = bijection[root]
        if flip ^ final_shift[root]:
            shift |= 1 << i
    restriction = Restriction(n, k, phi, shift)
    transcript = RestrictionTranscript(tuple(steps), tuple(survivors), bijection, final_shift)
    return restriction, transcript


def _resolve_alias(i: int, alias: dict) -> tuple[int, int]:
    flip = 0
    while i in alias:
        i, f = alias[i]
        flip ^= f
    return i, flip


def direct_restriction(n: int, k: int, shift_bits, perm, parents) -> Restriction:
    """Build the parent-process restriction from explicit choices.

    ``perm[pos]`` is the variable at chain position pos; ``parents[pos]``
    (for pos >= k) is a position < pos; ``shift_bits[pos]`` is the complement
    used when position pos is substituted (or mapped to its output, pos < k).
    Position pos < k terminates at output pos.
    """
    if not n > k >= 1:
        raise ValueError(f"need n > k >= 1, got n={n}, k={k}")
    phi = [0] * n
    shift = 0
    for pos in range(n):
        cur = pos
        acc = 0
        while cur >= k:
            acc ^= shift_bits[cur]
            cur = parents[cur]
        acc ^= shift_bits[cur]
        var = perm[pos]
        phi[var] = cur
        if acc:
            shift |= 1 << var
    return Restriction(n, k, phi, shift)


def sample_restriction_direct(n: int, k: int, rng) -> Restriction:
    """Sample the non-iterative form: uniform complements, uniform variable
    order, and an independent uniform parent below each position above k."""
    if not n > k >= 1:
        raise ValueError(f"need n > k >= 1, got n={n}, k={k}")
    shift_bits = [rng.getrandbits(1) for _ in range(n)]
    perm = list(range(n))
    rng.shuffle(perm)
    parents = [0] * n
    for pos in range(k, n):
        parents[pos] = rng.randrange(pos)
    return direct_restriction(n, k, shift_bits, perm, parents)


@dataclass(frozen=True)
class BucketSample:
    """A partition of [r] into k labelled buckets with seed j in bucket j."""

    r: int
    k: int
    buckets: tuple[frozenset, ...]

    def __post_init__(self):
        if len(self.buckets) != self.k:
            raise ValueError("wrong bucket count")
        union = set()
        for j, b in enumerate(self.buckets):
            if not b:
                raise ValueError(f"bucket {j} is empty")
            if j not in b:
                raise ValueError(f"bucket {j} does not contain its seed")
            union |= b
        if union != set(range(self.r)):
            raise ValueError("buckets do not partition the ground set")

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.buckets)

    def sorted_sizes(self) -> tuple[int, ...]:
        return tuple(sorted(self.sizes()))


def _cycle_buckets(r: int, k: int, entry: int, rest) -> list[set]:
    """Arc partition of the order [entry, *rest]; seeds are elements < k."""
    buckets: list[set] = [set() for _ in range(k)]
    current = entry
    buckets[entry].add(entry)
    for element in rest:
        if element < k:
            current = element
        buckets[current].add(element)
    return buckets


def sample_buckets_cycle(r: int, k: int, rng) -> BucketSample:
    """Cycle sampler: uniform entry special element, uniform order of the rest.

    Walking the cycle from the entry point, each special element (0..k-1)
    opens the bucket that collects the non-special elements up to the next
    special one.
    """
    if not r >= k >= 1:
        raise ValueError(f"need r >= k >= 1, got r={r}, k={k}")
    entry = rng.randrange(k)
    rest = [e for e in range(r) if e != entry]
    rng.shuffle(rest)
    buckets = _cycle_buckets(r, k, entry, rest)
    return BucketSample(r, k, tuple(frozenset(b) for b in buckets))


def _parent_bucket_sizes(r: int, k: int, parents) -> list[int]:
    """Bucket sizes of the parent process; parents[i] < i for i in [k, r)."""
    owner = list(range(k)) + [0] * (r - k)
    sizes = [1] * k
    for i in range(k, r):
        owner[i] = owner[parents[i]]
        sizes[owner[i]] += 1
    return sizes


def sample_buckets_direct(r: int, k: int, rng) -> BucketSample:
    """Parent-process sampler for the bucket distribution alone."""
    if not r >= k >= 1:
        raise ValueError(f"need r >= k >= 1, got r={r}, k={k}")
    parents = [0] * r
    for i in range(k, r):
        parents[i] = rng.randrange(i)
    owner = list(range(k)) + [0] * (r - k)
    buckets: list[set] = [{j} for j in range(k)]
    for i in range(k, r):
        owner[i] = owner[parents[i]]
        buckets[owner[i]].add(i)
    return BucketSample(r, k, tuple(frozenset(b) for b in buckets))


def _parent_space_size(r: int, k: int) -> int:
    return math.prod(range(k, r)) if r > k else 1


def enumerate_parent_buckets(r: int, k: int):
    """Yield (labelled sizes, exact probability) over all parent functions."""
    total = _parent_space_size(r, k)
    weight = Fraction(1, total)
    ranges = [range(i) for i in range(k, r)]
    for tail in itertools.product(*ranges):
        parents = [0] * k + list(tail)
        yield tuple(_parent_bucket_sizes(r, k, parents)), weight


def enumerate_cycle_buckets(r: int, k: int):
    """Yield (labelled sizes, exact probability) over all cycle outcomes."""
    total = k * math.factorial(r - 1)
    weight = Fraction(1, total)
    for entry in range(k):
        rest = [e for e in range(r) if e != entry]
        for order in itertools.permutations(rest):
            buckets = _cycle_buckets(r, k, entry, order)
            yield tuple(len(b) for b in buckets), weight


def enumerate_recursive_buckets(n: int, k: int):
    """Yield (sorted sizes, exact probability) over all identification paths.

    Complement bits and the final bijection do not affect sizes and are not
    enumerated.  Classes are tracked as a sorted multiset of sizes.
    """

    def walk(sizes: tuple[int, ...], weight: Fraction):
        m = len(sizes)
        if m == k:
            yield tuple(sorted(sizes)), weight
            return
        # Ordered pair (kept, removed) from m classes: m*(m-1) choices, but
        # merging class u into v and v into u give the same size multiset,
        # so enumerate unordered pairs with doubled weight.
        step = weight / (m * (m - 1))
        for u in range(m):
            for v in range(u + 1, m):
                merged = list(sizes)
                merged[u] += merged[v]
                del merged[v]
                yield from walk(tuple(merged), 2 * step)

    yield from walk((1,) * n, Fraction(1))


def _aggregate(pairs) -> dict:
    dist: dict[tuple[int, ...], Fraction] = {}
    for sizes, weight in pairs:
        key = tuple(sorted(sizes))
        dist[key] = dist.get(key, Fraction(0)) + weight
    return dist


def exact_bucket_distribution(r: int, k: int, budget: int = 10**7) -> dict:
    """Exact sorted-size distribution of the parent process.

    Enumerates all prod_{i=k+1..r} (i-1) parent functions; raises
    BudgetExceededError if that count exceeds ``budget``.
    """
    if not r >= k >= 1:
        raise ValueError(f"need r >= k >= 1, got r={r}, k={k}")
    total = _parent_space_size(r, k)
    if total > budget:
        raise BudgetExceededError(
            f"parent enumeration needs {total} cases (budget {budget})",
            required=total,
            budget=budget,
        )
    return _aggregate(enumerate_parent_buckets(r, k))


def exact_bucket_distribution_cycle(r: int, k: int, budget: int = 10**7) -> dict:
    """Exact sorted-size distribution of the cycle sampler."""
    total = k * math.factorial(r - 1)
    if total > budget:
        raise BudgetExceededError(
            f"cycle enumeration needs {total} cases (budget {budget})",
            required=total,
            budget=budget,
        )
    return _aggregate(enumerate_cycle_buckets(r, k))


def exact_bucket_distribution_recursive(n: int, k: int, budget: int = 10**7) -> dict:
    """Exact sorted-size distribution of the recursive identification process."""
    total = math.prod(m * (m - 1) for m in range(k + 1, n + 1))
    if total > budget:
        raise BudgetExceededError(
            f"recursive enumeration needs {total} cases (budget {budget})",
            required=total,
            budget=budget,
        )
    return _aggregate(enumerate_recursive_buckets(n, k))


def min_bucket_tail(r: int, k: int, trials: int, rng) -> tuple[float, float]:
    """Monte Carlo estimate of Pr[min bucket size >= r/(4k)], with std error.

    For r <= 4k the bound holds with probability 1 (every bucket has size
    at least 1 >= r/(4k)) and no sampling is done.
    """
    if r <= 4 * k:
        return 1.0, 0.0
    threshold = r / (4 * k)
    hits = 0
    for _ in range(trials):
        parents = [0] * r
        for i in range(k, r):
            parents[i] = rng.randrange(i)
        if min(_parent_bucket_sizes(r, k, parents)) >= threshold:
            hits += 1
    rate = hits / trials
    stderr = math.sqrt(rate * (1.0 - rate) / trials)
    return rate, stderr
