import numpy as np
import pytest

from cartanlie.exactla import (
    NotSquare,
    Subspace,
    char_poly,
    eval_matrix_poly,
    is_p_polynomial,
    kernel,
    rank,
    rref,
    solve,
)
from cartanlie.field import Polynomial, field_make
from cartanlie.derivations import Deriv, WAlgebra, ad_matrix, derivation_matrix

from conftest import shape, sympy_charpoly, sympy_rank


def test_rref_examples(F5):
    R, piv, r = rref(F5, np.eye(3, dtype=np.int64))
    assert r == 3 and np.array_equal(R, np.eye(3))
    assert rank(F5, np.zeros((3, 3), dtype=np.int64)) == 0
    R, piv, r = rref(F5, [[1, 2], [2, 4]])
    assert r == 1 and R.tolist() == [[1, 2]]


def test_rank_against_sympy(F5, rng):
    for _ in range(30):
        a, b = rng.integers(1, 9, size=2)
        M = rng.integers(0, 5, size=(a, b))
        M[rng.random(M.shape) < 0.4] = 0
        assert rank(F5, M) == sympy_rank(M, 5)


def test_kernel_examples(F5):
    assert kernel(F5, np.eye(3, dtype=np.int64)).dim == 0
    assert kernel(F5, np.zeros((2, 2), dtype=np.int64)).dim == 2
    W = WAlgebra(shape((1,)))
    K = kernel(F5, ad_matrix(W, Deriv.partial(W.shape, 1)))
    assert K.dim == 1 and K.contains(Deriv.partial(W.shape, 1).to_vector())


def test_kernel_is_kernel(F5, rng):
    for _ in range(20):
        M = rng.integers(0, 5, size=(6, 9))
        K = kernel(F5, M)
        assert K.dim == 9 - sympy_rank(M, 5)
        assert not np.any(F5.matmul(M, K.basis.T))


def test_solve(F5, rng):
    M = rng.integers(0, 5, size=(5, 7))
    x = rng.integers(0, 5, size=7)
    b = F5.matmul(M, x.reshape(-1, 1)).ravel()
    y = solve(F5, M, b)
    assert y is not None and np.array_equal(F5.matmul(M, y.reshape(-1, 1)).ravel(), b)
    assert solve(F5, [[1, 0], [2, 0]], [1, 1]) is None


def test_subspace_ops(F5):
    A = Subspace.span(F5, [[1, 0, 0], [0, 1, 0]], 3)
    B = Subspace.span(F5, [[0, 1, 0], [0, 0, 1]], 3)
    assert A.sum(B).dim == 3
    I = A.intersect(B)
    assert I.dim == 1 and I.contains([0, 3, 0])


def test_char_poly_examples(F5):
    assert char_poly(F5, np.eye(3, dtype=np.int64)).coeffs == (4, 3, 2, 1)  # (t-1)^3
    sh = shape((1,))
    M = derivation_matrix(sh, Deriv.basis(sh, (1,), 1).to_vector())
    assert char_poly(F5, M).coeffs == (0, 4, 0, 0, 0, 1)  # t^5 - t
    M = derivation_matrix(sh, Deriv.partial(sh, 1).to_vector())
    assert char_poly(F5, M).coeffs == (0, 0, 0, 0, 0, 1)
    with pytest.raises(NotSquare):
        char_poly(F5, np.zeros((2, 3), dtype=np.int64))


def test_char_poly_against_sympy(F5, rng):
    for n in (1, 2, 5, 9, 16):
        M = rng.integers(0, 5, size=(n, n))
        assert char_poly(F5, M).coeffs == sympy_charpoly(M, 5)


def test_cayley_hamilton_extension():
    E = field_make(5, 2)
    rng = np.random.default_rng(3)
    M = rng.integers(0, 25, size=(6, 6))
    assert not np.any(eval_matrix_poly(E, char_poly(E, M), M))


def test_p_polynomial(F5):
    assert is_p_polynomial(Polynomial.make(F5, [0, 4, 0, 0, 0, 1]))
    assert not is_p_polynomial(Polynomial.make(F5, [0, 0, 1]))
    sh = shape((1, 1))
    rng = np.random.default_rng(7)
    for _ in range(10):
        M = derivation_matrix(sh, Deriv.random(sh, rng).to_vector())
        assert is_p_polynomial(char_poly(F5, M))
