import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cartanlie.field import (
    BoundExceeded,
    CharTooSmall,
    DivisionByZero,
    NotPrime,
    Polynomial,
    embedding,
    field_make,
    irreducible_modulus,
    is_irreducible,
    poly_roots,
)

from conftest import sympy_irreducible


def test_prime_field_placeholder():
    F = field_make(5)
    assert F.q == 5 and F.k == 1 and F.modulus == (0, 1)


def test_not_prime_and_small_char():
    with pytest.raises(NotPrime):
        field_make(4)
    with pytest.raises(CharTooSmall):
        field_make(3)


def test_bound():
    with pytest.raises(BoundExceeded):
        field_make(5, 10)
    assert field_make(5, 10, bound=2**62).q == 5**10


def test_f25_modulus_is_lex_smallest():
    # oracle: scan monic quadratics with sympy, same ordering (c0, c1)
    for c0, c1 in itertools.product(range(1, 5), range(5)):
        if sympy_irreducible([c0, c1, 1], 5):
            expected = (c0, c1, 1)
            break
    assert irreducible_modulus(5, 2) == expected == (1, 1, 1)


@pytest.mark.parametrize("p,k", [(5, 2), (5, 3), (7, 2), (7, 3), (11, 2)])
def test_irreducibility_against_sympy(p, k):
    rng = np.random.default_rng(p * 10 + k)
    for _ in range(40):
        f = [int(c) for c in rng.integers(0, p, size=k)] + [1]
        assert is_irreducible(f, p) == sympy_irreducible(f, p)


def test_basic_arithmetic(F5):
    assert F5.add(3, 4) == 2
    assert F5.div(2, 3) == 4
    with pytest.raises(DivisionByZero):
        F5.inv(0)


def test_f25_t_squared():
    F = field_make(5, 2)
    t = F.from_coeffs((0, 1))
    # t^2 = -t - 1 under t^2 + t + 1
    assert F.coeffs(F.mul(t, t)) == (4, 4)


@pytest.mark.parametrize("k", [2, 3, 6])
def test_field_axioms_extension(k):
    F = field_make(5, k, bound=2**62)
    rng = np.random.default_rng(k)
    a, b, c = (rng.integers(0, F.q, size=200) for _ in range(3))
    assert np.array_equal(F.mul(a, F.add(b, c)), F.add(F.mul(a, b), F.mul(a, c)))
    assert np.array_equal(F.mul(F.mul(a, b), c), F.mul(a, F.mul(b, c)))
    nz = a[a != 0]
    assert np.all(F.mul(nz, F.inv(nz)) == 1)
    # Frobenius is additive and has order k
    assert np.array_equal(F.frobenius(F.add(a, b)), F.add(F.frobenius(a), F.frobenius(b)))
    x = a
    for _ in range(k):
        x = F.frobenius(x)
    assert np.array_equal(x, a)


def test_large_extension_inverse():
    F = field_make(5, 24, bound=2**62)
    rng = np.random.default_rng(0)
    a = rng.integers(1, F.q, size=50)
    assert np.all(F.mul(a, F.inv(a)) == 1)


def test_matmul_matches_elementwise():
    F = field_make(5, 3)
    rng = np.random.default_rng(1)
    A = rng.integers(0, F.q, size=(4, 5))
    B = rng.integers(0, F.q, size=(5, 3))
    ref = np.zeros((4, 3), dtype=np.int64)
    for i in range(4):
        for j in range(3):
            acc = 0
            for k in range(5):
                acc = F.add(acc, F.mul(int(A[i, k]), int(B[k, j])))
            ref[i, j] = acc
    assert np.array_equal(F.matmul(A, B), ref)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 24), st.integers(0, 24), st.integers(0, 24))
def test_f25_distributive(a, b, c):
    F = field_make(5, 2)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))


def test_roots_fermat(F5):
    f = Polynomial.make(F5, [0, 4, 0, 0, 0, 1])  # t^5 - t
    rep = poly_roots(f)
    assert rep.as_dict() == {0: 1, 1: 1, 2: 1, 3: 1, 4: 1} and rep.splits


def test_roots_double(F5):
    rep = poly_roots(Polynomial.make(F5, [0, 0, 1]))
    assert rep.as_dict() == {0: 2}


def test_roots_in_extension(F5):
    # t^2 + t + 1 has no root in F_5 but splits in F_25
    f = Polynomial.make(F5, [1, 1, 1])
    assert not poly_roots(f).roots
    E = field_make(5, 2)
    rep = poly_roots(f, E)
    assert rep.splits and len(rep.roots) == 2


def test_embedding_is_a_homomorphism():
    small, big = field_make(5, 2), field_make(5, 4)
    emb = embedding(small, big)
    for a in range(0, 25, 3):
        for b in range(0, 25, 5):
            assert emb(small.mul(a, b)) == big.mul(emb(a), emb(b))
            assert emb(small.add(a, b)) == big.add(emb(a), emb(b))
