"""Sparse multilinear polynomials over F_p on the Boolean cube.

Coefficients are keyed by monomial bitmask (bit i set means variable i+1 is
in the monomial); zero coefficients are never stored.  Conversion to and from
truth tables is by the subset Moebius transform, which is an exact inverse
pair over any field.
"""

from __future__ import annotations

import itertools

from .cube import CubeFunction
from .field import FieldElement, PrimeField


def subsets_up_to(n: int, d: int) -> list[int]:
    """All subset masks of [n] of size at most d, ascending as integers."""
    masks = [m for size in range(min(n, d) + 1)
             for positions in itertools.combinations(range(n), size)
             for m in (sum(1 << i for i in positions),)]
    masks.sort()
    return masks


class MultilinearPoly:
    """A multilinear polynomial as a sparse coefficient map."""

    __slots__ = ("n", "field", "coeffs")

    def __init__(self, n: int, field: PrimeField, coeffs):
        if n < 0:
            raise ValueError("variable count must be non-negative")
        clean: dict[int, int] = {}
        p = field.p
        for mask, c in dict(coeffs).items():
            if not 0 <= mask < (1 << n):
                raise ValueError(f"monomial mask {mask} out of range for n={n}")
            if isinstance(c, FieldElement):
                if c.field.p != p:
                    raise ValueError("coefficient modulus mismatch")
                c = c.residue
            else:
                c %= p
            if c:
                clean[mask] = c
        self.n = n
        self.field = field
        self.coeffs = clean

    @classmethod
    def zero(cls, n: int, field: PrimeField) -> "MultilinearPoly":
        return cls(n, field, {})

    def degree(self) -> int:
        """Largest monomial size with a nonzero coefficient (0 if none)."""
        if not self.coeffs:
            return 0
        return max(bin(m).count("1") for m in self.coeffs)

    def coefficient(self, mask: int) -> FieldElement:
        return FieldElement(self.coeffs.get(mask, 0), self.field)

    def evaluate_residue(self, x_mask: int) -> int:
        """Value at the point with the given mask, as a raw residue."""
        total = 0
        for mask, c in self.coeffs.items():
            if mask & x_mask == mask:
                total += c
        return total % self.field.p

    def evaluate(self, x_mask: int) -> FieldElement:
        if not 0 <= x_mask < (1 << self.n):
            raise ValueError(f"point mask {x_mask} out of range for n={self.n}")
        return FieldElement(self.evaluate_residue(x_mask), self.field)

    def truth_table(self) -> CubeFunction:
        """Dense evaluation over the whole cube via the zeta transform."""
        p = self.field.p
        values = [0] * (1 << self.n)
        for mask, c in self.coeffs.items():
            values[mask] = c
        for i in range(self.n):
            bit = 1 << i
            for m in range(1 << self.n):
                if m & bit:
                    values[m] = (values[m] + values[m ^ bit]) % p
        return CubeFunction(self.n, self.field, values)

    def __eq__(self, other):
        return (
            isinstance(other, MultilinearPoly)
            and other.n == self.n
            and other.field.p == self.field.p
            and other.coeffs == self.coeffs
        )

    def __repr__(self):
        terms = len(self.coeffs)
        return f"MultilinearPoly(n={self.n}, p={self.field.p}, terms={terms})"


def evaluate(poly: MultilinearPoly, x_mask: int) -> FieldElement:
    return poly.evaluate(x_mask)


def degree(poly: MultilinearPoly) -> int:
    return poly.degree()


def from_truth_table(f: CubeFunction) -> MultilinearPoly:
    """The unique multilinear polynomial agreeing with f on the whole cube.

    Moebius inversion: alpha_S = sum_{T subseteq S} (-1)^{|S|-|T|} f(1_T),
    computed in place one direction at a time.
    """
    p = f.field.p
    coeffs = list(f.values)
    for i in range(f.n):
        bit = 1 << i
        for m in range(1 << f.n):
            if m & bit:
                coeffs[m] = (coeffs[m] - coeffs[m ^ bit]) % p
    return MultilinearPoly(f.n, f.field, {m: c for m, c in enumerate(coeffs) if c})


def truth_table_degree(f: CubeFunction) -> int:
    """Degree of the multilinear polynomial computing f (0 for constants)."""
    return from_truth_table(f).degree()


def identify_variables(poly: MultilinearPoly, i: int, j: int, b: int) -> MultilinearPoly:
    """Substitute X_j := b xor X_i and renumber the surviving variables.

    b = 0 sets X_j to X_i; b = 1 sets X_j to 1 - X_i.  Squares collapse via
    X_i^2 = X_i, which is valid on {0,1} inputs.  Variables are 0-based and
    the survivors keep their relative order.
    """
    n = poly.n
    if i == j:
        raise ValueError("cannot identify a variable with itself")
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError("variable index out of range")
    if b not in (0, 1):
        raise ValueError("complement bit must be 0 or 1")
    p = poly.field.p
    bit_i, bit_j = 1 << i, 1 << j
    merged: dict[int, int] = {}

    def add(mask: int, c: int) -> None:
        c = (merged.get(mask, 0) + c) % p
        if c:
            merged[mask] = c
        else:
            merged.pop(mask, None)

    for mask, c in poly.coeffs.items():
        if not mask & bit_j:
            add(mask, c)
            continue
        base = mask ^ bit_j
        if b == 0:
            add(base | bit_i, c)
        else:
            # X_j = 1 - X_i: the term splits into base and -base*X_i.
            add(base, c)
            add(base | bit_i, -c)

    low = bit_j - 1
    compressed = {
        (mask & low) | ((mask >> 1) & ~low): c for mask, c in merged.items()
    }
    return MultilinearPoly(n - 1, poly.field, compressed)


def random_poly(n: int, d: int, field: PrimeField, rng) -> MultilinearPoly:
    """Uniform coefficients on every monomial of size at most d."""
    if not 0 <= d <= n:
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={n}")
    coeffs = {}
    for mask in subsets_up_to(n, d):
        c = rng.randrange(field.p)
        if c:
            coeffs[mask] = c
    return MultilinearPoly(n, field, coeffs)


def _mask_to_text(mask: int) -> str:
    if mask == 0:
        return "0"
    return ",".join(str(i + 1) for i in range(mask.bit_length()) if mask >> i & 1)


def _text_to_mask(text: str) -> int:
    text = text.strip()
    if text == "0":
        return 0
    mask = 0
    for token in text.split(","):
        index = int(token)
        if index < 1:
            raise ValueError(f"variable index must be >= 1, got {index}")
        mask |= 1 << (index - 1)
    return mask


def write_poly(poly: MultilinearPoly, stream) -> None:
    """Text format: header "n p", then one "S:coeff" line per monomial.

    S lists 1-based variable indices separated by commas; the empty monomial
    is written as the zero mask "0".  Lines are emitted in ascending mask
    order so output is canonical.
    """
    stream.write(f"{poly.n} {poly.field.p}\n")
    for mask in sorted(poly.coeffs):
        stream.write(f"{_mask_to_text(mask)}:{poly.coeffs[mask]}\n")


def read_poly(stream) -> MultilinearPoly:
    header = stream.readline().split()
    if len(header) != 2:
        raise ValueError("polynomial header must be 'n p'")
    n, p = int(header[0]), int(header[1])
    field = PrimeField(p)
    coeffs: dict[int, int] = {}
    for line in stream:
        line = line.strip()
        if not line:
            continue
        left, _, right = line.partition(":")
        coeffs[_text_to_mask(left)] = int(right)
    return MultilinearPoly(n, field, coeffs)
