import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, Poly as SPoly, symbols

from ffiwasawa.algebra import (
    FieldError,
    FiniteField,
    Poly,
    field_make,
    int_resultant,
    int_resultant_modular,
    p_valuation,
    poly_squarefree,
    quadratic_character,
)
from ffiwasawa.algebra import poly as P
from ffiwasawa.algebra.intpoly import x_pow_mod_monic

x = symbols("x")


def sylvester_resultant(f, g):
    """Resultant as the determinant of the Sylvester matrix (constant-first input)."""
    m, n = len(f) - 1, len(g) - 1
    if n == 0:
        return g[0] ** m
    if m == 0:
        return f[0] ** n
    fr, gr = list(reversed(f)), list(reversed(g))
    rows = [[0] * i + fr + [0] * (n - 1 - i) for i in range(n)]
    rows += [[0] * i + gr + [0] * (m - 1 - i) for i in range(m)]
    return int(Matrix(rows).det())


def test_prime_field():
    F = field_make(5, 1, 0)
    assert F.order == 5 and F.degree == 1
    assert [F.mul(a, F.inv(a)) for a in range(1, 5)] == [1] * 4


def test_f9_every_element_fixed_by_q_power():
    F = field_make(3, 2, 0)
    assert F.order == 9
    assert all(F.pow(a, 9) == a for a in F.elements())
    # multiplicative group is cyclic of order 8
    g = F.primitive_element
    assert len({F.pow(g, k) for k in range(8)}) == 8


def test_even_characteristic_rejected():
    with pytest.raises(FieldError, match="even characteristic unsupported"):
        field_make(2, 1, 0)
    with pytest.raises((FieldError, ValueError)):
        FiniteField(9)


@pytest.mark.parametrize("l,d", [(3, 2), (3, 3), (5, 2), (7, 2)])
def test_field_axioms_exhaustive(l, d):
    F = field_make(l, d)
    els = list(F.elements())
    rng = random.Random(1)
    for a, b, c in (rng.sample(els, 3) for _ in range(200)):
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.add(a, F.neg(a)) == 0
    for a in els[1:]:
        assert F.mul(a, F.inv(a)) == 1


def test_field_make_deterministic():
    assert field_make(5, 3, 7).modulus == field_make(5, 3, 7).modulus


def test_extension_embedding_is_homomorphism(F9):
    big, emb = F9.extension(3)
    assert big.order == 729
    for a, b in itertools.product(range(9), repeat=2):
        assert emb[F9.mul(a, b)] == big.mul(emb[a], emb[b])
        assert emb[F9.add(a, b)] == big.add(emb[a], emb[b])


def test_quadratic_character_examples(F5):
    assert quadratic_character(F5(0)) == 0
    assert quadratic_character(F5(1)) == 1
    assert quadratic_character(F5(2)) == -1


@pytest.mark.parametrize("l,d", [(3, 1), (5, 1), (7, 1), (3, 2), (5, 2)])
def test_character_matches_square_enumeration(l, d):
    F = field_make(l, d)
    squares = {F.mul(a, a) for a in F.elements() if a}
    for a in range(1, F.order):
        assert F.chi(a) == (1 if a in squares else -1)
        r = F.sqrt(a)
        assert (r is not None) == (a in squares)
        if r is not None:
            assert F.mul(r, r) == a


def test_squarefree_examples(F3, F5):
    assert not poly_squarefree(Poly(F3, (0, 0, 1)))
    assert poly_squarefree(Poly(F3, (0, 1, 0, 1)))
    assert poly_squarefree(Poly(F5, (0, 1)))


def test_squarefree_count_matches_formula(F3):
    # monic squarefree of degree n: q^n - q^{n-1} for n >= 2
    for n in (2, 3, 4):
        count = sum(P.is_squarefree(F3, lo + (1,)) for lo in itertools.product(range(3), repeat=n))
        assert count == 3**n - 3 ** (n - 1)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 8), min_size=1, max_size=6), st.lists(st.integers(0, 8), min_size=2, max_size=6))
def test_divmod_identity_f9(a, b):
    F = field_make(3, 2)
    a, b = P.normalize(a), P.normalize(b)
    if not b:
        return
    qt, r = P.divmod_(F, a, b)
    assert P.add(F, P.mul(F, qt, b), r) == a
    assert P.degree(r) < P.degree(b)


def test_xgcd_bezout(F5):
    rng = random.Random(3)
    for _ in range(50):
        a = P.random_monic(F5, rng.randint(1, 6), rng)
        b = P.random_monic(F5, rng.randint(1, 6), rng)
        d, s, t = P.xgcd(F5, a, b)
        assert P.add(F5, P.mul(F5, s, a), P.mul(F5, t, b)) == d


def test_irreducible_count(F3):
    # number of monic irreducibles of degree 4 over F_3 is (81 - 9)/4 = 18
    n = sum(P.is_irreducible(F3, lo + (1,)) for lo in itertools.product(range(3), repeat=4))
    assert n == 18


def test_resultant_examples():
    assert int_resultant((3, 0, 1), (-1, 1)) == 4
    assert int_resultant((3, 0, 1), (-1, 0, 0, 0, 0, 1)) == 244
    assert int_resultant((5, 2, 1), (1,)) == 1


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.integers(-20, 20), min_size=1, max_size=7).filter(lambda f: f[-1] != 0),
    st.lists(st.integers(-20, 20), min_size=1, max_size=7).filter(lambda g: g[-1] != 0),
)
def test_resultant_matches_sylvester(f, g):
    expect = sylvester_resultant(f, g)
    assert int_resultant(f, g) == expect
    assert int_resultant_modular(f, g) == expect


def test_resultant_against_sympy_roots_case():
    f, g = [9, 1, 4, -8], [0, -5, -3, -8, 0, -7]
    assert int_resultant(f, g) == sylvester_resultant(f, g) == 13531149


def test_x_pow_mod_monic():
    c = (3, 0, 1)
    r = x_pow_mod_monic(5, c)
    expect = SPoly(x**5, x).rem(SPoly(x**2 + 3, x))
    assert tuple(int(a) for a in reversed(expect.all_coeffs())) == tuple(r)


def test_p_valuation_examples():
    assert p_valuation(54, 3) == 3
    assert p_valuation(244, 5) == 0
    assert p_valuation(1, 7) == 0
    with pytest.raises(ValueError):
        p_valuation(0, 3)
