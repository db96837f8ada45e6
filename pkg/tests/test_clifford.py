import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kdirac.clifford import (
    CliffordElement,
    TensorSlot,
    blade_mul,
    blade_sign,
    left_mul_matrix,
    merge_slots,
    spinor_embedding,
    split_spinor_twistor,
    vector_of,
)
from kdirac.scalars import ExactMatrix, FieldScalar, exact_rank


def gen(a, n=4, m=6):
    return CliffordElement.generator(a, n, m)


def naive_product(word):
    """Reduce a word of generators by adjacent swaps; returns (sign, sorted tuple)."""
    word = list(word)
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                word[i], word[i + 1] = word[i + 1], word[i]
                sign = -sign
                changed = True
            elif word[i] == word[i + 1]:
                del word[i:i + 2]
                sign = -sign
                changed = True
                break
    return sign, tuple(word)


def mask(indices):
    return sum(1 << (a - 1) for a in indices)


@pytest.mark.parametrize("n", [4, 6])
def test_generator_relations_exhaustive(n):
    m = n + 2
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            anti = gen(a, n, m) * gen(b, n, m) + gen(b, n, m) * gen(a, n, m)
            expected = CliffordElement.scalar(-2 if a == b else 0, n, m)
            assert anti == expected


def test_blade_sign_matches_bubble_sort_oracle():
    n = 5
    blades = [tuple(c) for r in range(n + 1) for c in itertools.combinations(range(1, n + 1), r)]
    for x in blades:
        for y in blades:
            sign, rest = naive_product(x + y)
            assert blade_sign(mask(x), mask(y)) == sign
            assert mask(x) ^ mask(y) == mask(rest)


def test_examples():
    e1, e2 = gen(1), gen(2)
    assert e1 * e1 == CliffordElement.scalar(-1, 4, 6)
    assert e1 * e2 == -(e2 * e1)
    brute = e1 * e1 + e1 * e2 + e2 * e1 + e2 * e2
    assert (e1 + e2) * (e1 + e2) == brute == CliffordElement.scalar(-2, 4, 6)
    assert CliffordElement.blade([2, 1], 4, 6) == -CliffordElement.blade([1, 2], 4, 6)


def test_vector_of():
    m = 6
    zero, one = FieldScalar(0, 0, m), FieldScalar(1, 0, m)
    assert vector_of([one, zero, zero, zero]) == gen(1)
    assert vector_of([zero] * 4).is_zero()
    v = vector_of([one, one, zero, zero])
    assert blade_mul(v, v) == CliffordElement.scalar(-2, 4, m)


def test_mismatched_n_raises():
    with pytest.raises(ValueError):
        blade_mul(gen(1, 4), gen(1, 6))


@st.composite
def elements(draw, n=4, m=6):
    blades = draw(st.lists(st.integers(0, (1 << n) - 1), min_size=0, max_size=4))
    terms = {
        b: FieldScalar(draw(st.integers(-3, 3)), draw(st.integers(-2, 2)), m) for b in blades
    }
    return CliffordElement(n, m, terms)


@given(elements(), elements(), elements())
def test_associativity_and_distributivity(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z


@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_vector_square_is_scalar(coords):
    v = vector_of([FieldScalar(c, 0, 6) for c in coords])
    assert v * v == CliffordElement.scalar(-sum(c * c for c in coords), 4, 6)


def test_left_mul_matrix_examples():
    one = CliffordElement.one(2, 4)
    assert left_mul_matrix(one) == ExactMatrix.identity(4, 4)
    e1 = CliffordElement.generator(1, 2, 4)
    sq = left_mul_matrix(e1) @ left_mul_matrix(e1)
    assert sq == ExactMatrix.identity(4, 4).scale(-1)
    # oracle: columns are the products with each blade
    mat = left_mul_matrix(e1)
    for blade in range(4):
        col = blade_mul(e1, CliffordElement(2, 4, {blade: FieldScalar(1, 0, 4)}))
        for row in range(4):
            assert mat[row, blade] == col.coefficient(row)


def test_left_mul_of_nonzero_vector_is_invertible():
    v = vector_of([FieldScalar(1, 0, 6), FieldScalar(0, 1, 6), FieldScalar(0, 0, 6), FieldScalar(2, 0, 6)])
    assert exact_rank(left_mul_matrix(v)) == 16


@given(elements(), elements())
def test_left_mul_matrix_is_homomorphism(x, y):
    assert left_mul_matrix(x * y) == left_mul_matrix(x) @ left_mul_matrix(y)


def _slot_sum(a, b):
    return merge_slots(list(a) + list(b))


def test_split_example_n4():
    n, m = 4, 6
    one = CliffordElement.one(n, m)
    twistor, spinor = split_spinor_twistor([TensorSlot(1, one)])
    expected = merge_slots(
        TensorSlot(a, (gen(a) * gen(1)).scale(Fraction(-1, 4))) for a in range(1, n + 1)
    )
    assert spinor == expected
    assert _slot_sum(twistor, spinor) == [TensorSlot(1, one)]


def test_split_idempotent_on_generator_slots():
    n, m = 4, 6
    for a in range(1, n + 1):
        for blade in range(1 << n):
            phi = CliffordElement(n, m, {blade: FieldScalar(1, 0, m)})
            twistor, spinor = split_spinor_twistor([TensorSlot(a, phi)])
            t2, s2 = split_spinor_twistor(spinor)
            assert t2 == [] and s2 == spinor
            t3, s3 = split_spinor_twistor(twistor)
            assert s3 == [] and t3 == twistor


@given(st.lists(st.tuples(st.integers(1, 4), elements()), max_size=3))
def test_split_is_complementary(pairs):
    slots = [TensorSlot(a, x) for a, x in pairs]
    twistor, spinor = split_spinor_twistor(slots)
    assert _slot_sum(twistor, spinor) == merge_slots(slots)


@given(elements())
def test_spinor_part_is_in_embedding_image(phi):
    # spinor part of e_1 (x) phi equals the embedding of -(1/n) e_1 phi
    twistor, spinor = split_spinor_twistor([TensorSlot(1, phi)])
    assert spinor == spinor_embedding(phi.left_generator(1).scale(Fraction(-1, 4)))
