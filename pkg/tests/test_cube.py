import io
import itertools
import random
from fractions import Fraction

import pytest

from gridcode.cube import (
    CubeFunction,
    SignedCubeFunction,
    apply_restriction,
    corrupt,
    distance,
    query_mask,
    read_truth_table,
    restriction_query_masks,
    signed_distance,
    write_truth_table,
)
from gridcode.field import PrimeField
from gridcode.poly import from_truth_table, random_poly
from gridcode.restrict import Restriction, UniformRestriction, compose, identity_restriction

F2 = PrimeField(2)
F3 = PrimeField(3)


def test_distance_identity():
    f = CubeFunction.random(4, F3, random.Random(0))
    assert distance(f, f) == 0


def test_distance_single_point():
    f = CubeFunction.constant(3, F2, 0)
    g = CubeFunction(3, F2, [1, 0, 0, 0, 0, 0, 0, 0])
    assert distance(f, g) == Fraction(1, 8)


def test_distance_between_codewords_at_least_2_to_minus_d():
    # Distinct multilinear polynomials of degree <= d disagree on at least a
    # 2^-d fraction of the cube.
    rng = random.Random(1)
    for _ in range(30):
        a = random_poly(5, 2, F3, rng)
        b = random_poly(5, 2, F3, rng)
        if a == b:
            continue
        assert distance(a.truth_table(), b.truth_table()) >= Fraction(1, 4)


def test_distance_shape_mismatch():
    with pytest.raises(ValueError):
        distance(CubeFunction.constant(2, F2), CubeFunction.constant(3, F2))
    with pytest.raises(ValueError):
        distance(CubeFunction.constant(2, F2), CubeFunction.constant(2, F3))


def test_distance_is_a_metric_small():
    rng = random.Random(2)
    fs = [CubeFunction.random(3, F3, rng) for _ in range(6)]
    for f in fs:
        for g in fs:
            d_fg = distance(f, g)
            assert d_fg == distance(g, f)
            assert (d_fg == 0) == (f == g)
            for h in fs:
                assert d_fg <= distance(f, h) + distance(h, g)


def test_corrupt_zero_is_identity():
    f = CubeFunction.random(5, F3, random.Random(3))
    assert corrupt(f, 0, random.Random(4)) == f


def test_corrupt_single_flip():
    f = CubeFunction.random(5, F2, random.Random(5))
    g = corrupt(f, Fraction(1, 32), random.Random(6))
    assert distance(f, g) == Fraction(1, 32)


def test_corrupt_exact_flip_count():
    f = CubeFunction.random(10, F3, random.Random(7))
    g = corrupt(f, Fraction(5, 100), random.Random(8))
    assert distance(f, g) == Fraction(51, 1024)  # floor(0.05 * 1024) = 51


def test_corrupt_changes_to_different_value():
    f = CubeFunction.constant(6, F3, 1)
    g = corrupt(f, 1, random.Random(9))
    assert all(v != 1 for v in g.values)


def test_apply_identity_restriction():
    f = CubeFunction.random(4, F3, random.Random(10))
    assert apply_restriction(f, identity_restriction(4)) == f


def test_apply_restriction_and_examples():
    f_and = CubeFunction(2, F2, [0, 0, 0, 1])
    # x1 = x2 = y: g(0) = AND(0,0) = 0, g(1) = AND(1,1) = 1
    r = Restriction(2, 1, [0, 0], 0b00)
    g = apply_restriction(f_and, r)
    assert g.values == [0, 1]
    # with both inputs complemented the table flips
    r = Restriction(2, 1, [0, 0], 0b11)
    g = apply_restriction(f_and, r)
    assert g.values == [1, 0]


def test_apply_restriction_dimension_mismatch():
    f = CubeFunction.constant(3, F2)
    with pytest.raises(ValueError):
        apply_restriction(f, Restriction(2, 1, [0, 0], 0))


def test_restriction_composition():
    rng = random.Random(11)
    for _ in range(20):
        f = CubeFunction.random(6, F3, rng)
        first = UniformRestriction(6, 4, [rng.randrange(4) for _ in range(6)], rng.getrandbits(6))
        second = UniformRestriction(4, 2, [rng.randrange(2) for _ in range(4)], rng.getrandbits(4))
        two_steps = apply_restriction(apply_restriction(f, first), second)
        one_step = apply_restriction(f, compose(first, second))
        assert two_steps == one_step


def test_restriction_query_masks_match_pointwise():
    rng = random.Random(12)
    r = UniformRestriction(6, 3, [rng.randrange(3) for _ in range(6)], rng.getrandbits(6))
    masks = restriction_query_masks(r)
    for y in range(8):
        assert masks[y] == query_mask(r, y)


def test_query_point_uniform_for_random_shift():
    # With phi drawn i.i.d. and the shift uniform, the query x(y) is uniform:
    # exhaustive over all (phi, shift) at n=4, k=2 for a weight-1 point y.
    n, k, y = 4, 2, 0b01
    counts = {m: 0 for m in range(1 << n)}
    for phi in itertools.product(range(k), repeat=n):
        for shift in range(1 << n):
            r = UniformRestriction(n, k, phi, shift)
            counts[query_mask(r, y)] += 1
    total = (k**n) * (1 << n)
    assert set(counts.values()) == {total // (1 << n)}


def test_truth_table_round_trip():
    f = CubeFunction.random(4, F3, random.Random(13))
    buffer = io.StringIO()
    write_truth_table(f, buffer)
    buffer.seek(0)
    assert read_truth_table(buffer) == f


def test_truth_table_format_shape():
    f = CubeFunction(1, F2, [1, 0])
    buffer = io.StringIO()
    write_truth_table(f, buffer)
    assert buffer.getvalue() == "1 2\n1 0\n"


def test_cube_function_validation():
    with pytest.raises(ValueError):
        CubeFunction(2, F2, [0, 1, 0])  # wrong length
    with pytest.raises(ValueError):
        CubeFunction(0, F2, [])
    with pytest.raises(ValueError):
        CubeFunction(31, F2, [])


def test_apply_restriction_consults_2k_points():
    rng = random.Random(14)
    f = CubeFunction.random(7, F2, rng)
    r = Restriction(7, 3, [0, 1, 2, 0, 1, 2, 0], rng.getrandbits(7))
    masks = restriction_query_masks(r)
    assert len(masks) == 8 and len(set(masks)) == 8


def test_signed_cube_function_coordinate_sum():
    f = SignedCubeFunction(4, None, list(range(16)))
    assert f.coordinate_sum(0b0000) == 4
    assert f.coordinate_sum(0b1111) == -4
    assert f.coordinate_sum(0b0011) == 0
    g = SignedCubeFunction(4, None, [0] + list(range(1, 16)))
    assert signed_distance(f, g) == 0
