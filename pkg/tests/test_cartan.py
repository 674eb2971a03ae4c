import numpy as np
import pytest

from cartanlie.cartan import (
    BadShape,
    SubalgebraHandle,
    build,
    build_H,
    build_K,
    build_S,
    build_W,
    contact_algebra,
    contact_bracket,
    d_H_map,
    d_K_map,
    derived_subalgebra,
    k_degrees,
    k_grade_split,
    poisson_bracket,
)
from cartanlie.derivations import Deriv, w_algebra
from cartanlie.dpalgebra import DPoly
from cartanlie.exactla import Subspace

from conftest import shape

S2 = shape((1, 1))
S3 = shape((1, 1, 1))


def test_W_grading():
    W = build_W(S2)
    assert W.dim == 50 and W.min_degree == -1 and W.top_degree == 7  # |tau| - 1
    assert sum(W.grade_dims().values()) == 50


def test_derived_of_abelian_is_zero():
    W = w_algebra(S2)
    A = SubalgebraHandle(W, Subspace.span(W.field, [Deriv.partial(S2, 1).to_vector(), Deriv.partial(S2, 2).to_vector()], W.dim), "A")
    assert derived_subalgebra(A).dim == 0


def test_S_dims():
    fam = build_S(S2)
    assert (fam.S.dim, fam.S1.dim, fam.CS.dim) == (26, 24, 27)
    fam = build_S(S3)
    assert fam.S.dim - fam.S1.dim == 3
    fam = build_S(shape((1, 2)))
    assert fam.S.dim - fam.S1.dim == 2
    with pytest.raises(BadShape):
        build_S(shape((1,)))


def test_S_is_divergence_free():
    fam = build_S(S2)
    for v in fam.S.basis.basis:
        assert Deriv.from_vector(S2, v).divergence().is_zero()


def test_poisson_examples():
    x1, x2 = DPoly.monomial(S2, (1, 0)), DPoly.monomial(S2, (0, 1))
    assert poisson_bracket(x1, x2) == DPoly.one(S2)
    rng = np.random.default_rng(0)
    f, g, h = (DPoly.random(S2, rng) for _ in range(3))
    assert poisson_bracket(f, f).is_zero()
    assert poisson_bracket(DPoly.one(S2), g).is_zero()
    jac = poisson_bracket(f, poisson_bracket(g, h)) + poisson_bracket(g, poisson_bracket(h, f)) + poisson_bracket(h, poisson_bracket(f, g))
    assert jac.is_zero()


def test_d_H_examples():
    assert d_H_map(DPoly.one(S2)).is_zero()
    assert d_H_map(DPoly.monomial(S2, (1, 0))) == Deriv.partial(S2, 2)


def test_d_H_is_lie_morphism():
    rng = np.random.default_rng(1)
    for sh in (S2, shape((1, 2))):
        for _ in range(20):
            f, g = DPoly.random(sh, rng), DPoly.random(sh, rng)
            assert d_H_map(f).bracket(d_H_map(g)) == d_H_map(poisson_bracket(f, g))


def test_H_dims():
    fam = build_H(S2)
    assert (fam.H.dim, fam.H2.dim) == (24, 23)
    assert fam.H2.grade_dims() == {-1: 2, 0: 3, 1: 4, 2: 5, 3: 4, 4: 3, 5: 2}


def test_contact_examples():
    one = DPoly.one(S3)
    assert d_K_map(one) == Deriv.partial(S3, 3).scale(2)
    rng = np.random.default_rng(2)
    for _ in range(20):
        f, g = DPoly.random(S3, rng), DPoly.random(S3, rng)
        assert contact_bracket(one, g) == g.partial(3).scale(2)
        assert contact_bracket(f, f).is_zero()
        assert d_K_map(f).bracket(d_K_map(g)) == d_K_map(contact_bracket(f, g))


def test_contact_table():
    C = contact_algebra(S3)
    rng = np.random.default_rng(3)
    for _ in range(10):
        f, g = DPoly.random(S3, rng), DPoly.random(S3, rng)
        assert np.array_equal(C.table.bracket(f.to_vector(), g.to_vector()), contact_bracket(f, g).to_vector())


def test_k_grading():
    assert k_grade_split(DPoly.one(S3)) == {-2: DPoly.one(S3)}
    x1 = DPoly.monomial(S3, (1, 0, 0))
    assert k_grade_split(x1) == {-1: x1}
    x3 = DPoly.monomial(S3, (0, 0, 1))
    assert k_grade_split(x3) == {0: x3}
    kd = k_degrees(S3)
    assert kd.min() == -2 and kd.max() == 14


def test_K_dims_and_bad_shape():
    fam = build_K(S3)
    assert fam.K.dim == fam.K1.dim == 125
    assert fam.K1.top_component().dim == 1
    with pytest.raises(BadShape):
        build_K(shape((1, 1, 1, 1), p=7))


def test_build_dispatch():
    assert set(build("S", S2)) == {"S", "S1", "CS"}
    assert set(build("h", S2)) == {"H", "H1", "H2"}
    with pytest.raises(BadShape):
        build("X", S2)
