import itertools
import random
from fractions import Fraction

import pytest

from gridcode.cube import CubeFunction, corrupt, distance
from gridcode.errors import BudgetExceededError
from gridcode.field import PrimeField
from gridcode.oracle import CodeEnumeration, certify_far, exact_delta_d
from gridcode.poly import MultilinearPoly, from_truth_table, random_poly

F2 = PrimeField(2)
F3 = PrimeField(3)


def test_enumeration_size_and_roundtrip():
    code = CodeEnumeration(4, 1, F3)
    assert code.size == 3**5
    for index in (0, 1, 7, code.size - 1):
        assert code.index_of(code.poly_at(index)) == index


def test_enumeration_is_lexicographic_and_duplicate_free():
    code = CodeEnumeration(3, 1, F2)
    vectors = [code.coefficient_vector(i) for i in range(code.size)]
    assert vectors == sorted(vectors)
    assert len(set(vectors)) == code.size


def test_enumeration_budget():
    with pytest.raises(BudgetExceededError):
        CodeEnumeration(20, 3, F3)


def test_value_matrix_matches_pointwise_evaluation():
    code = CodeEnumeration(3, 2, F3)
    points = [0, 3, 5, 7]
    matrix = code.value_matrix(points)
    rng = random.Random(50)
    for _ in range(20):
        index = rng.randrange(code.size)
        poly = code.poly_at(index)
        assert [poly.evaluate_residue(pt) for pt in points] == list(matrix[index])


def test_exact_delta_zero_for_codewords():
    rng = random.Random(51)
    poly = random_poly(5, 2, F2, rng)
    delta, nearest = exact_delta_d(poly.truth_table(), 2)
    assert delta == 0
    assert nearest == poly


def test_exact_delta_and_example():
    f = CubeFunction(2, F2, [0, 0, 0, 1])
    delta, nearest = exact_delta_d(f, 1)
    assert delta == Fraction(1, 4)
    assert nearest.degree() <= 1


def test_exact_delta_single_flip():
    rng = random.Random(52)
    poly = random_poly(6, 1, F2, rng)
    f = corrupt(poly.truth_table(), Fraction(1, 64), rng)
    delta, nearest = exact_delta_d(f, 1)
    assert delta == Fraction(1, 64)
    assert nearest == poly  # one flip is inside the unique decoding radius


def test_exact_delta_zero_iff_low_degree():
    rng = random.Random(53)
    for _ in range(10):
        f = CubeFunction.random(4, F3, rng)
        delta, _ = exact_delta_d(f, 2)
        assert (delta == 0) == (from_truth_table(f).degree() <= 2)


def test_certify_far_examples():
    rng = random.Random(54)
    poly = random_poly(5, 1, F2, rng)
    f = poly.truth_table()
    assert certify_far(f, 1, 0)
    assert not certify_far(f, 1, Fraction(1, 32))
    ip = MultilinearPoly(4, F2, {0b0011: 1, 0b1100: 1})
    g = ip.truth_table()
    assert exact_delta_d(g, 1)[0] == Fraction(3, 8)
    assert certify_far(g, 1, Fraction(1, 4))


def test_exact_delta_budget_guard():
    f = CubeFunction.constant(20, F3)
    with pytest.raises(BudgetExceededError):
        exact_delta_d(f, 3)


def test_nearest_tie_break_is_lexicographic():
    # A table equidistant from several codewords must return the one whose
    # coefficient vector is lexicographically smallest.
    table = [1, 0, 0, 1]
    f = CubeFunction(2, F2, table)
    _, nearest = exact_delta_d(f, 1)
    code = CodeEnumeration(2, 1, F2)
    distances = [
        sum(poly.evaluate_residue(pt) != table[pt] for pt in range(4))
        for poly in code
    ]
    first_best = distances.index(min(distances))
    assert code.index_of(nearest) == first_best


def test_codeword_pairs_respect_minimum_distance():
    rng = random.Random(55)
    code = CodeEnumeration(4, 1, F3)
    for _ in range(40):
        a = code.poly_at(rng.randrange(code.size))
        b = code.poly_at(rng.randrange(code.size))
        if a == b:
            continue
        assert distance(a.truth_table(), b.truth_table()) >= Fraction(1, 2)


def test_iterating_code_yields_all_polys():
    code = CodeEnumeration(2, 1, F2)
    polys = list(code)
    assert len(polys) == 8
    assert len({tuple(sorted(p.coeffs.items())) for p in polys}) == 8
