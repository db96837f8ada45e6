from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kdirac.clifford import CliffordElement
from kdirac.flatmodel import (
    Coordinates,
    PolySection,
    apply_dirac,
    apply_xi_first,
    apply_xi_second,
    coordinate_derivative,
    is_q_pullback,
    random_section,
)
from kdirac.scalars import FieldScalar


def one(n):
    return CliffordElement.one(n, n + 2)


def mono(coords, powers, label="f"):
    return PolySection.from_terms(coords, {label: [(powers, one(coords.n))]})


def const(coords, c, label="f"):
    return PolySection.constant(coords, {label: CliffordElement.scalar(c, coords.n, coords.m)})


def inv_sqrt_m(m, c=1):
    return FieldScalar(0, Fraction(c, m), m)


def test_coordinates_layout():
    c = Coordinates(3, 6)
    assert c.size == 3 * 6 + 3
    assert c.second(2, 1) == (c.second(1, 2)[0], -1)
    assert c.second(2, 2) is None
    with pytest.raises(KeyError):
        c.resolve(("third", 1, 1))
    with pytest.raises(KeyError):
        c.first(4, 1)


def test_coordinate_derivative_examples():
    c = Coordinates(2, 4)
    x11 = ("first", 1, 1)
    s = mono(c, {x11: 2})
    assert coordinate_derivative(x11, s) == mono(c, {x11: 1}).scale(2)
    assert coordinate_derivative(("second", 1, 2), mono(c, {("second", 1, 2): 1})) == const(c, 1)
    with pytest.raises(KeyError):
        coordinate_derivative(("first", 3, 1), s)


def test_reversed_second_slot_variable_is_negative():
    c = Coordinates(2, 4)
    assert mono(c, {("second", 2, 1): 1}) == mono(c, {("second", 1, 2): 1}).scale(-1)


@pytest.mark.parametrize("seed", range(5))
def test_partials_commute(seed):
    s = random_section(2, 4, 4, 2, seed, False, terms=8)
    vars_ = s.coords.variables()
    for a, b in [(vars_[0], vars_[5]), (vars_[3], vars_[-1]), (vars_[-1], vars_[2])]:
        assert coordinate_derivative(a, coordinate_derivative(b, s)) == coordinate_derivative(b, coordinate_derivative(a, s))


def test_xi_first_examples():
    c = Coordinates(2, 4)
    assert apply_xi_first(1, 3, mono(c, {("first", 1, 3): 1})) == const(c, 1)
    out = apply_xi_first(1, 3, mono(c, {("second", 1, 2): 1}))
    expected = mono(c, {("first", 2, 3): 1}).scale(inv_sqrt_m(6, Fraction(-1, 2)))
    assert out == expected
    # row 2 sees x_12 through d_21 = -d_12
    out = apply_xi_first(2, 1, mono(c, {("second", 1, 2): 1}))
    assert out == mono(c, {("first", 1, 1): 1}).scale(inv_sqrt_m(6, Fraction(1, 2)))
    with pytest.raises(ValueError):
        apply_xi_first(3, 1, out)


def _bracket(j, mu, k, nu, s):
    return apply_xi_first(j, mu, apply_xi_first(k, nu, s)) - apply_xi_first(k, nu, apply_xi_first(j, mu, s))


@pytest.mark.parametrize("k,n", [(2, 4), (3, 6)])
def test_bracket_law(k, n):
    m = n + 2
    nonzero = 0
    for trial in range(4):
        s = random_section(k, n, 4, 1, 100 + trial, False, terms=10)
        for j in range(1, k + 1):
            for kk in range(1, k + 1):
                if j == kk:
                    continue
                for mu, nu in [(1, 1), (1, 2), (n, n)]:
                    lhs = _bracket(j, mu, kk, nu, s)
                    rhs = coordinate_derivative(("second", j, kk), s).scale(inv_sqrt_m(m) if mu == nu else 0)
                    assert lhs == rhs
                    nonzero += not rhs.is_zero()
    assert nonzero > 0


@pytest.mark.parametrize("seed", range(4))
def test_second_slot_commutes(seed):
    s = random_section(3, 6, 4, 1, seed, False, terms=10)
    for (i, j) in [(1, 2), (1, 3), (2, 3)]:
        for (r, mu) in [(1, 1), (2, 4), (3, 6)]:
            a = apply_xi_second(i, j, apply_xi_first(r, mu, s))
            b = apply_xi_first(r, mu, apply_xi_second(i, j, s))
            assert a == b


def test_xi_second_examples():
    c = Coordinates(2, 4)
    assert apply_xi_second(1, 2, mono(c, {("second", 1, 2): 1})) == const(c, 1)
    s = random_section(2, 4, 3, 1, 3, True)
    assert apply_xi_second(1, 2, s).is_zero()
    with pytest.raises(ValueError):
        apply_xi_second(2, 1, s)


def test_dirac_of_coordinate():
    c = Coordinates(2, 4)
    out = apply_dirac(1, mono(c, {("first", 1, 1): 1}))
    assert out == PolySection.constant(c, {"f": CliffordElement.generator(1, 4, 6)})


@pytest.mark.parametrize("seed", range(3))
def test_dirac_matches_euclidean_on_pullbacks(seed):
    s = random_section(3, 6, 3, 2, seed, True, terms=8)
    for i in (1, 2, 3):
        expected = PolySection.zero(s.coords, s.labels)
        for a in range(1, 7):
            expected = expected + coordinate_derivative(("first", i, a), s).left_mul(
                CliffordElement.generator(a, 6, 8))
        assert apply_dirac(i, s) == expected


@pytest.mark.parametrize("seed", range(3))
def test_dirac_square_is_minus_laplacian(seed):
    s = random_section(2, 4, 4, 1, seed, True, terms=8)
    lap = PolySection.zero(s.coords, s.labels)
    for a in range(1, 5):
        v = ("first", 1, a)
        lap = lap + coordinate_derivative(v, coordinate_derivative(v, s))
    assert apply_dirac(1, apply_dirac(1, s)) == lap.scale(-1)


def test_cubic_identities():
    n, m = 4, 6
    nonzero = 0
    for seed in range(10):
        phi = random_section(2, n, 4, 1, seed, False, terms=8)
        d1 = lambda s: apply_dirac(1, s)
        d2 = lambda s: apply_dirac(2, s)
        c = inv_sqrt_m(m, -2)
        lhs = d1(d1(d2(phi))) - d2(d1(d1(phi)))
        assert lhs == apply_xi_second(1, 2, d1(phi)).scale(c)
        nonzero += not lhs.is_zero()
        assert d1(d2(d2(phi))) - d2(d2(d1(phi))) == apply_xi_second(1, 2, d2(phi)).scale(c)
    assert nonzero > 0


def test_q_pullback_examples():
    c = Coordinates(2, 4)
    assert is_q_pullback(mono(c, {("first", 1, 1): 1, ("first", 2, 1): 1}))
    assert not is_q_pullback(mono(c, {("second", 1, 2): 1}))
    s = random_section(3, 6, 3, 3, 11, True)
    assert is_q_pullback(s) and s.labels == ["c1", "c2", "c3"]


@given(st.integers(0, 10_000), st.integers(0, 4))
def test_random_section_is_reproducible(seed, degree):
    a = random_section(2, 4, degree, ["e1", "e2"], seed, False)
    b = random_section(2, 4, degree, ["e1", "e2"], seed, False)
    assert a == b
    for _, exps, _, _ in a.nonzero_terms():
        assert sum(exps) <= degree


def test_random_section_rejects_negative_degree():
    with pytest.raises(ValueError):
        random_section(2, 4, -1, 1, 0, True)


@given(st.integers(0, 1000), st.integers(0, 1000))
def test_linearity(s1, s2):
    a = random_section(2, 4, 3, 1, s1, False)
    b = random_section(2, 4, 3, 1, s2, False)
    for op in (lambda s: apply_xi_first(2, 3, s), lambda s: apply_dirac(1, s)):
        assert op(a + b.scale(3)) == op(a) + op(b).scale(3)
