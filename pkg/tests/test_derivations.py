import numpy as np
import pytest

from cartanlie.derivations import (
    Deriv,
    SigmaIso,
    StructureConstants,
    WAlgebra,
    ad_matrix,
    derivation_matrix,
    format_deriv,
    parse_deriv,
    w_algebra,
)
from cartanlie.dpalgebra import DPoly, ShapeMismatch
from cartanlie.exactla import kernel, rank

from conftest import shape

S1 = shape((1,))
S2 = shape((1, 1))


def test_dims():
    assert WAlgebra(S1).dim == 5
    assert WAlgebra(S2).dim == 50
    assert WAlgebra(shape((2,))).dim == 25


def test_apply():
    x = DPoly.monomial(S1, (1,))
    D = Deriv.basis(S1, (1,), 1)  # x d
    assert D(DPoly.monomial(S1, (2,))) == DPoly.monomial(S1, (2,), 2)
    assert Deriv.partial(S1, 1)(DPoly.one(S1)).is_zero()
    rng = np.random.default_rng(0)
    for _ in range(20):
        D = Deriv.random(S2, rng)
        f, g = DPoly.random(S2, rng), DPoly.random(S2, rng)
        assert D(f * g) == D(f) * g + f * D(g)
    with pytest.raises(ShapeMismatch):
        D(x * x)


def test_bracket_examples():
    d1 = Deriv.partial(S2, 1)
    assert d1.bracket(Deriv.basis(S2, (1, 0), 1)) == d1
    d = Deriv.partial(S1, 1)
    assert d.bracket(Deriv.basis(S1, (4,), 1)) == Deriv.basis(S1, (3,), 1)
    rng = np.random.default_rng(1)
    D = Deriv.random(S2, rng)
    assert D.bracket(D).is_zero()


def test_bracket_is_commutator():
    # oracle: [D, E] acts as D E - E D on functions
    rng = np.random.default_rng(2)
    for _ in range(20):
        D, E = Deriv.random(S2, rng), Deriv.random(S2, rng)
        f = DPoly.random(S2, rng)
        assert D.bracket(E)(f) == D(E(f)) - E(D(f))


def test_module_mul():
    D = Deriv.random(S2, np.random.default_rng(3))
    assert DPoly.one(S2) * D == D
    assert (DPoly.zero(S2) * D).is_zero()
    assert DPoly.monomial(S2, (1, 0)) * Deriv.partial(S2, 1) == Deriv.basis(S2, (1, 0), 1)


def test_divergence_examples():
    assert Deriv.partial(S2, 2).divergence().is_zero()
    assert Deriv.basis(S1, (1,), 1).divergence() == DPoly.one(S1)
    assert Deriv.basis(S1, (2,), 1).divergence() == DPoly.monomial(S1, (1,))


def test_parse_format():
    D = parse_deriv(S2, "x[1,0]*d1 + 4*d2")
    assert D == Deriv.basis(S2, (1, 0), 1) + Deriv.partial(S2, 2).scale(4)
    assert parse_deriv(S2, format_deriv(D)) == D
    E = parse_deriv(S2, "(x[0,1] + x[1,0])*d1 + d2")
    assert E(DPoly.monomial(S2, (1, 0))) == DPoly.monomial(S2, (0, 1)) + DPoly.monomial(S2, (1, 0))


def test_table_matches_direct_bracket():
    W = w_algebra(S2)
    rng = np.random.default_rng(4)
    for _ in range(30):
        D, E = Deriv.random(S2, rng), Deriv.random(S2, rng)
        assert np.array_equal(W.bracket(D.to_vector(), E.to_vector()), D.bracket(E).to_vector())


def test_structure_constants_dedup(F5):
    T = StructureConstants(F5, 2, [0, 0], [1, 1], [0, 0], [2, 3])
    assert T.nnz == 0


def test_ad_examples():
    W = w_algebra(S1)
    assert not np.any(ad_matrix(W, Deriv.zero(S1)))
    A = ad_matrix(W, Deriv.partial(S1, 1))
    assert rank(W.field, A) == 4
    assert kernel(W.field, A).dim == 1


def test_action_matrix():
    rng = np.random.default_rng(5)
    D = Deriv.random(S2, rng)
    M = derivation_matrix(S2, D.to_vector())
    f = DPoly.random(S2, rng)
    assert np.array_equal(S2.field.matmul(M, f.to_vector().reshape(-1, 1)).ravel(), D(f).to_vector())


def test_sigma_examples():
    sh = shape((2,))
    sigma = SigmaIso(sh)
    T = sigma.target
    assert sigma(DPoly.one(sh)) == DPoly.one(T)
    assert sigma(DPoly.monomial(sh, (5,))) == DPoly.monomial(T, (0, 1))
    assert sigma(DPoly.monomial(sh, (6,))) == DPoly.monomial(T, (1, 1))
    assert sigma.iota(Deriv.zero(sh)).is_zero()


@pytest.mark.parametrize("n", [(2,), (1, 2)])
def test_sigma_is_multiplicative_and_iota_preserves_structure(n):
    sh = shape(n)
    sigma = SigmaIso(sh)
    rng = np.random.default_rng(6)
    for _ in range(20):
        f, g = DPoly.random(sh, rng), DPoly.random(sh, rng)
        assert sigma(f * g) == sigma(f) * sigma(g)
        assert sigma.inverse(sigma(f)) == f
        D, E = Deriv.random(sh, rng), Deriv.random(sh, rng)
        iD = sigma.iota(D)
        # iota D is sigma D sigma^-1 on functions
        assert iD(sigma(f)) == sigma(D(f))
        assert sigma.iota(D.bracket(E)) == iD.bracket(sigma.iota(E))
        assert iD.divergence() == sigma(D.divergence())
    for k in range(1, sh.m + 1):
        assert sigma.iota(Deriv.partial(sh, k)).divergence().is_zero()


def test_iota_of_partial_text():
    sh = shape((2,))
    assert str(SigmaIso(sh).iota(Deriv.partial(sh, 1))) == "d1 + x[4,0]*d2"
