"""Truth tables of functions {0,1}^n -> F_p, indexed by bitmask.

Convention used throughout the package: the point x in {0,1}^n is the mask m
with bit i of m equal to x_{i+1}, i.e. coordinate 1 is the least significant
bit.  Values are stored as raw residues (ints in [0, p)) for speed; use
``element_at`` to get wrapped field elements.
"""

from __future__ import annotations

from fractions import Fraction

from .field import FieldElement, PrimeField
from .restrict import Restriction

MAX_VARIABLES = 30


class CubeFunction:
    """Dense truth table of a function on the Boolean cube."""

    __slots__ = ("n", "field", "values")

    def __init__(self, n: int, field: PrimeField, values):
        if not 1 <= n <= MAX_VARIABLES:
            raise ValueError(f"n must be in [1, {MAX_VARIABLES}], got {n}")
        values = list(values)
        if len(values) != 1 << n:
            raise ValueError(f"expected {1 << n} values, got {len(values)}")
        p = field.p
        for i, v in enumerate(values):
            if isinstance(v, FieldElement):
                if v.field.p != p:
                    raise ValueError("value modulus mismatch")
                values[i] = v.residue
            elif not 0 <= v < p:
                values[i] = v % p
        self.n = n
        self.field = field
        self.values = values

    @classmethod
    def constant(cls, n: int, field: PrimeField, value: int = 0) -> "CubeFunction":
        return cls(n, field, [value % field.p] * (1 << n))

    @classmethod
    def random(cls, n: int, field: PrimeField, rng) -> "CubeFunction":
        return cls(n, field, [rng.randrange(field.p) for _ in range(1 << n)])

    def value_at(self, mask: int) -> int:
        return self.values[mask]

    def element_at(self, mask: int) -> FieldElement:
        return FieldElement(self.values[mask], self.field)

    def __eq__(self, other):
        return (
            isinstance(other, CubeFunction)
            and other.n == self.n
            and other.field.p == self.field.p
            and other.values == self.values
        )

    def __repr__(self):
        return f"CubeFunction(n={self.n}, p={self.field.p})"


def distance(f: CubeFunction, g: CubeFunction) -> Fraction:
    """Fraction of points where f and g disagree, exact."""
    if f.n != g.n or f.field.p != g.field.p:
        raise ValueError("distance requires matching dimension and modulus")
    diff = sum(a != b for a, b in zip(f.values, g.values))
    return Fraction(diff, 1 << f.n)


def corrupt(f: CubeFunction, delta, rng) -> CubeFunction:
    """Change f at exactly floor(delta * 2^n) distinct uniform positions.

    Each changed position receives a uniform value different from the old
    one, so the distance to f is exactly the flip count over 2^n.
    """
    if not 0 <= delta <= 1:
        raise ValueError("corruption rate must be in [0, 1]")
    size = 1 << f.n
    flips = int(Fraction(delta) * size)
    p = f.field.p
    values = list(f.values)
    for pos in rng.sample(range(size), flips):
        values[pos] = (values[pos] + rng.randrange(1, p)) % p
    return CubeFunction(f.n, f.field, values)


def bucket_masks(r: Restriction) -> list[int]:
    """For each output variable, the mask of its preimage variables."""
    masks = [0] * r.k
    for i, j in enumerate(r.var_to_output):
        masks[j] |= 1 << i
    return masks


def query_mask(r: Restriction, y: int, masks: list[int] | None = None) -> int:
    """The query point x(y) with x_i(y) = y_{phi(i)} xor a_i, as a mask."""
    if masks is None:
        masks = bucket_masks(r)
    x = r.shift_mask
    for j in range(r.k):
        if (y >> j) & 1:
            x ^= masks[j]
    return x


def restriction_query_masks(r: Restriction) -> list[int]:
    """The query point x(y) for every y in {0,1}^k, as masks indexed by y.

    x_i(y) = y_{phi(i)} xor a_i.  Buckets are disjoint, so x(y) is the shift
    mask xored with the union of the bucket masks of the set bits of y.
    """
    bucket = bucket_masks(r)
    out = [0] * (1 << r.k)
    out[0] = r.shift_mask
    for y in range(1, 1 << r.k):
        low = y & -y
        out[y] = out[y ^ low] ^ bucket[low.bit_length() - 1]
    return out


def apply_restriction(f: CubeFunction, r: Restriction) -> CubeFunction:
    """Restrict f to k variables: g(y) = f(x(y)).

    Consults exactly 2^k evaluations of f (distinct whenever every output
    variable has a preimage).
    """
    if r.n != f.n:
        raise ValueError(f"restriction expects {r.n} variables, function has {f.n}")
    masks = restriction_query_masks(r)
    return CubeFunction(r.k, f.field, [f.values[m] for m in masks])


class SignedCubeFunction:
    """Truth table over {-1,1}^n via the correspondence a -> 1 - 2a.

    Bit i of the index mask is 1 exactly when coordinate i+1 equals -1.  When
    ``field`` is None the values are exact integers or rationals instead of
    residues (used by the characteristic-0 experiments).
    """

    __slots__ = ("n", "field", "values")

    def __init__(self, n: int, field, values):
        if not 1 <= n <= MAX_VARIABLES:
            raise ValueError(f"n must be in [1, {MAX_VARIABLES}], got {n}")
        values = list(values)
        if len(values) != 1 << n:
            raise ValueError(f"expected {1 << n} values, got {len(values)}")
        if field is not None:
            p = field.p
            for i, v in enumerate(values):
                if isinstance(v, FieldElement):
                    if v.field.p != p:
                        raise ValueError("value modulus mismatch")
                    values[i] = v.residue
                elif not 0 <= v < p:
                    values[i] = v % p
        self.n = n
        self.field = field
        self.values = values

    def value_at(self, mask: int):
        return self.values[mask]

    def coordinate_sum(self, mask: int) -> int:
        """Sum over Z of the +-1 coordinates of the point with this mask."""
        return self.n - 2 * bin(mask).count("1")

    def __eq__(self, other):
        return (
            isinstance(other, SignedCubeFunction)
            and other.n == self.n
            and other.field == self.field
            and other.values == self.values
        )


def signed_distance(f: SignedCubeFunction, g: SignedCubeFunction) -> Fraction:
    if f.n != g.n:
        raise ValueError("distance requires matching dimension")
    diff = sum(a != b for a, b in zip(f.values, g.values))
    return Fraction(diff, 1 << f.n)


def write_truth_table(f: CubeFunction, stream) -> None:
    """Text format: first line "n p", then the 2^n residues in mask order."""
    stream.write(f"{f.n} {f.field.p}\n")
    stream.write(" ".join(str(v) for v in f.values))
    stream.write("\n")


def read_truth_table(stream) -> CubeFunction:
    header = stream.readline().split()
    if len(header) != 2:
        raise ValueError("truth table header must be 'n p'")
    n, p = int(header[0]), int(header[1])
    tokens = stream.read().split()
    field = PrimeField(p)
    values = [int(t) for t in tokens]
    return CubeFunction(n, field, values)
