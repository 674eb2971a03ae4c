import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cartanlie.dpalgebra import (
    BadIndex,
    DPoly,
    IndexOutOfRange,
    NotInvertible,
    ParseError,
    binom_mod_p,
    dp_invert,
    dp_make,
    dp_partial,
    dp_power,
    format_dpoly,
    lucas_binom,
    parse_dpoly,
)

from conftest import shape

S1 = shape((1,))
S2 = shape((1, 1))


def mono(sh, a, c=1):
    return DPoly.monomial(sh, a, c)


def test_make():
    assert dp_make(S2, []).is_zero()
    assert dp_make(S2, [((1, 0), 2), ((1, 0), 3)]).is_zero()
    assert dp_make(S2, [((2, 0), 1)]) == mono(S2, (2, 0))
    with pytest.raises(IndexOutOfRange):
        dp_make(S2, [((5, 0), 1)])


def test_lucas_examples():
    assert binom_mod_p((2,), (1,), 5) == 2
    assert binom_mod_p((5,), (1,), 5) == 0
    assert binom_mod_p((4,), (2,), 5) == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 200), st.integers(0, 200), st.sampled_from([5, 7, 11]))
def test_lucas_matches_math_comb(a, b, p):
    assert lucas_binom(a, b, p) == math.comb(a, b) % p


def test_products():
    x = mono(S1, (1,))
    assert x * x == mono(S1, (2,), 2)
    assert mono(S1, (2,)) * mono(S1, (2,)) == mono(S1, (4,))
    assert (x * mono(S1, (4,))).is_zero()


def test_partial():
    S = shape((1, 1))
    assert dp_partial(mono(S, (3, 0)), 1) == mono(S, (2, 0))
    assert dp_partial(mono(S, (3, 0)), 2).is_zero()
    assert dp_partial(DPoly.one(S), 1).is_zero()
    with pytest.raises(BadIndex):
        dp_partial(DPoly.one(S), 3)


def test_power():
    x = mono(S1, (1,))
    assert dp_power(x, 3) == mono(S1, (3,))
    assert dp_power(x, 0) == DPoly.one(S1)
    f = DPoly.one(S1) + x
    assert dp_power(f, 2) == dp_make(S1, [((0,), 1), ((1,), 2), ((2,), 2)])


def test_grade_split():
    f = DPoly.one(S2) + mono(S2, (1, 0)) + mono(S2, (1, 1))
    assert sorted(f.grade_split()) == [0, 1, 2]
    assert len(mono(S2, (1, 1)).grade_split()) == 1
    assert DPoly.zero(S2).grade_split() == {}


def test_invert():
    assert dp_invert(DPoly.one(S1)) == DPoly.one(S1)
    f = DPoly.one(S1) + mono(S1, (1,))
    g = dp_invert(f)
    assert f * g == DPoly.one(S1)
    # 1 - x + 2x^(2) - 6x^(3) + 24x^(4)
    assert g == dp_make(S1, [((0,), 1), ((1,), -1), ((2,), 2), ((3,), -6), ((4,), 24)])
    with pytest.raises(NotInvertible):
        dp_invert(mono(S1, (1,)))


def _brute_product(f, g):
    # oracle: multiply monomial by monomial with math.comb
    sh = f.shape
    out = {}
    for a, c in f.terms.items():
        for b, d in g.terms.items():
            s = tuple(i + j for i, j in zip(a, b))
            if any(x > t for x, t in zip(s, sh.tau)):
                continue
            coef = c * d
            for i, j in zip(a, b):
                coef *= math.comb(i + j, i)
            out[s] = (out.get(s, 0) + coef) % sh.p
    return dp_make(sh, out.items())


@pytest.mark.parametrize("n", [(1,), (2,), (1, 1), (1, 2)])
def test_product_against_brute_force(n):
    sh = shape(n)
    rng = np.random.default_rng(sum(n))
    for _ in range(20):
        f, g, h = (DPoly.random(sh, rng, density=0.3) for _ in range(3))
        assert f * g == _brute_product(f, g)
        assert f * g == g * f
        assert (f * g) * h == f * (g * h)
        for k in range(1, sh.m + 1):
            # Leibniz rule for the special derivations
            assert (f * g).partial(k) == f.partial(k) * g + f * g.partial(k)


@pytest.mark.parametrize("text", ["x[1,0] + 3*x[0,2]", "2 + x[1,1]", "0", "-1*x[2,0]"])
def test_parse_roundtrip(text):
    S = shape((1, 2))
    f = parse_dpoly(S, text)
    assert parse_dpoly(S, format_dpoly(f)) == f


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_dpoly(S2, "x[2")
    with pytest.raises((ParseError, IndexOutOfRange)):
        parse_dpoly(S2, "x[9,0]")
