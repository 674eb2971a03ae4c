"""Cartan-type subalgebras: S(m, n) and its derived algebra, the Hamiltonian
algebra H(2r, n) with its second derived algebra, and the contact algebra
K(2r+1, n) realised on O(2r+1, n) under the contact bracket."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .derivations import (
    Ambient,
    Deriv,
    StructureConstants,
    WAlgebra,
    derivation_matrix,
    dim_cap,
    w_algebra,
)
from .dpalgebra import DPoly, Shape, ShapeMismatch, format_dpoly, parse_dpoly
from .exactla import Subspace, kernel, rank
from .field import BoundExceeded


class BadShape(ValueError):
    pass


class NotClosed(AssertionError):
    pass


class StructureViolation(AssertionError):
    """A dimension or closure statement about a construction failed."""


# ---------------------------------------------------------------------------
# subalgebra handles


def _graded_pieces(ambient: Ambient, basis: np.ndarray) -> dict[int, np.ndarray]:
    """Project each row of a (graded) basis onto the homogeneous coordinates."""
    out = {}
    for d in np.unique(ambient.degrees):
        idx = ambient.degree_indices(int(d))
        if basis.shape[0] and np.any(basis[:, idx]):
            out[int(d)] = idx
    return out


class SubalgebraHandle:
    """A bracket-closed subspace of an ambient algebra, with its grading.

    The basis is stored as a canonical Subspace in ambient coordinates.  All
    the algebras handled here are spanned by homogeneous elements; this is
    checked when the grading is first requested.
    """

    def __init__(self, ambient: Ambient, basis: Subspace, label: str, verify: bool = True):
        if basis.ambient_dim != ambient.dim:
            raise ShapeMismatch("basis lives in a different coordinate space")
        self.ambient = ambient
        self.basis = basis
        self.label = label
        self._derived: Subspace | None = None
        if verify:
            self.verify_closed()

    @property
    def field(self):
        return self.ambient.field

    @property
    def dim(self) -> int:
        return self.basis.dim

    def __repr__(self) -> str:
        return f"{self.label}[dim {self.dim}] in {self.ambient!r}"

    def contains(self, v) -> bool:
        return self.basis.contains(v)

    def is_full(self) -> bool:
        return self.dim == self.ambient.dim

    @cached_property
    def grading(self) -> dict[int, Subspace]:
        F = self.field
        comps = {}
        for d, idx in _graded_pieces(self.ambient, self.basis.basis).items():
            rows = np.zeros((self.dim, self.ambient.dim), dtype=np.int64)
            rows[:, idx] = self.basis.basis[:, idx]
            comps[d] = Subspace.span(F, rows, self.ambient.dim)
        total = sum(c.dim for c in comps.values())
        if total != self.dim:
            raise StructureViolation(f"{self.label} is not graded: components sum to {total}, dim {self.dim}")
        return dict(sorted(comps.items()))

    def component(self, d: int) -> Subspace:
        return self.grading.get(d, Subspace.zero(self.field, self.ambient.dim))

    @property
    def top_degree(self) -> int:
        return max(self.grading)

    @property
    def min_degree(self) -> int:
        return min(self.grading)

    def top_component(self) -> Subspace:
        return self.grading[self.top_degree]

    def filtration(self, k: int) -> Subspace:
        """L_{>=k}: the sum of the components of degree at least k."""
        rows = [c.basis for d, c in self.grading.items() if d >= k]
        if not rows:
            return Subspace.zero(self.field, self.ambient.dim)
        return Subspace.span(self.field, np.vstack(rows), self.ambient.dim)

    def grade_dims(self) -> dict[int, int]:
        return {d: c.dim for d, c in self.grading.items()}

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        c = rng.integers(0, self.field.p, size=self.dim)
        return self.field.matmul(c.reshape(1, -1), self.basis.basis)[0]

    def derived_space(self) -> Subspace:
        if self._derived is None:
            self._derived = graded_bracket_span(self.ambient, self.grading, self.grading)
        return self._derived

    def verify_closed(self) -> None:
        if self.is_full():
            return
        if not self.basis.contains_space(self.derived_space()):
            raise NotClosed(f"{self.label} is not closed under the bracket")

    def to_text(self, v) -> str:
        return self.ambient.to_text(v)


def graded_bracket_span(ambient: Ambient, left: dict[int, Subspace], right: dict[int, Subspace]) -> Subspace:
    """span [L_i, R_j] over all pairs of homogeneous components.

    Brackets are homogeneous, so each target degree is reduced separately in
    its own coordinates.
    """
    F = ambient.field
    table = ambient.table
    acc: dict[int, Subspace] = {}
    degs = set(int(d) for d in np.unique(ambient.degrees))
    symmetric = left is right
    for i, Li in left.items():
        for j, Rj in right.items():
            if symmetric and j < i:
                continue
            d = i + j
            if d not in degs or Li.dim == 0 or Rj.dim == 0:
                continue
            idx = ambient.degree_indices(d)
            out = table.brackets_with(Li.basis, Rj.basis)
            sliced = out[:, idx]
            if np.count_nonzero(sliced) != np.count_nonzero(out):
                raise StructureViolation(f"bracket of degrees {i}, {j} is not homogeneous")
            cur = acc.get(d, Subspace.zero(F, len(idx)))
            if cur.dim < len(idx):
                acc[d], _ = cur.absorb(sliced)
    rows = []
    for d, V in acc.items():
        if V.dim:
            block = np.zeros((V.dim, ambient.dim), dtype=np.int64)
            block[:, ambient.degree_indices(d)] = V.basis
            rows.append(block)
    if not rows:
        return Subspace.zero(F, ambient.dim)
    return Subspace.span(F, np.vstack(rows), ambient.dim)


def derived_subalgebra(A: SubalgebraHandle, label: str | None = None) -> SubalgebraHandle:
    """[A, A] as a handle; iterate for higher derived algebras."""
    D = A.derived_space()
    out = SubalgebraHandle(A.ambient, D, label or f"{A.label}'", verify=False)
    out.verify_closed()
    return out


# ---------------------------------------------------------------------------
# W and S


def _check_prime_shape(shape: Shape) -> None:
    if shape.field is None or shape.field.k != 1:
        raise BadShape("Cartan-type algebras are built over the prime field")


def build_W(shape: Shape) -> SubalgebraHandle:
    _check_prime_shape(shape)
    W = w_algebra(shape)
    return SubalgebraHandle(W, W.full(), "W")


@dataclass(frozen=True)
class SFamily:
    S: SubalgebraHandle
    S1: SubalgebraHandle
    CS: SubalgebraHandle


@lru_cache(maxsize=None)
def build_S(shape: Shape) -> SFamily:
    """S = ker div, CS = div^-1(F), S1 = [S, S]."""
    _check_prime_shape(shape)
    if shape.m < 2:
        raise BadShape(f"type S needs m >= 2, got m = {shape.m}")
    W = w_algebra(shape)
    F = W.field
    div = W.div_matrix
    S = SubalgebraHandle(W, kernel(F, div), "S", verify=False)
    CS = SubalgebraHandle(W, kernel(F, div[1:]), "CS", verify=False)
    S1 = derived_subalgebra(S, "S1")
    if not S.basis.contains_space(S1.basis):
        raise NotClosed("S is not closed under the bracket")
    # [CS, CS] lies in S because div[D, E] = D(div E) - E(div D)
    if not S.basis.contains_space(graded_bracket_span(W, CS.grading, CS.grading)):
        raise NotClosed("[CS, CS] is not divergence free")
    if S.dim - S1.dim != shape.m:
        raise StructureViolation(f"codim S1 in S is {S.dim - S1.dim}, expected {shape.m}")
    if CS.dim != S.dim + 1:
        raise StructureViolation("div does not reach the constants")
    if shape.is_truncated and CS.dim - S1.dim != shape.m + 1:
        raise StructureViolation(f"codim S1 in CS is {CS.dim - S1.dim}, expected {shape.m + 1}")
    return SFamily(S, S1, CS)


# ---------------------------------------------------------------------------
# Hamiltonian


@dataclass(frozen=True)
class HamiltonianIndexing:
    """j' swaps j and j + r; sigma(j) is +1 on the first half, -1 on the second."""

    r: int

    def prime(self, j: int) -> int:
        if not 1 <= j <= 2 * self.r:
            raise BadShape(f"index {j} outside 1..{2 * self.r}")
        return j + self.r if j <= self.r else j - self.r

    def sign(self, j: int) -> int:
        if not 1 <= j <= 2 * self.r:
            raise BadShape(f"index {j} outside 1..{2 * self.r}")
        return 1 if j <= self.r else -1

    @classmethod
    def for_shape(cls, shape: Shape, odd: bool = False) -> "HamiltonianIndexing":
        m = shape.m - 1 if odd else shape.m
        if m < 2 or m % 2:
            kind = "odd m >= 3" if odd else "even m >= 2"
            raise BadShape(f"needs {kind}, got m = {shape.m}")
        return cls(m // 2)


def _idx(shape: Shape, idx: HamiltonianIndexing | None, odd: bool) -> HamiltonianIndexing:
    want = HamiltonianIndexing.for_shape(shape, odd)
    if idx is not None and idx != want:
        raise BadShape(f"indexing r = {idx.r} does not fit m = {shape.m}")
    return want


def poisson_bracket(f: DPoly, g: DPoly, idx: HamiltonianIndexing | None = None) -> DPoly:
    """{f, g} = sum_j sigma(j) d_j(f) d_j'(g)."""
    if f.shape != g.shape:
        raise ShapeMismatch("Poisson bracket across shapes")
    ix = _idx(f.shape, idx, odd=False)
    out = DPoly.zero(f.shape)
    for j in range(1, 2 * ix.r + 1):
        a = f.partial(j)
        if a:
            out = out + (a * g.partial(ix.prime(j))).scale(ix.sign(j))
    return out


def d_H_map(f: DPoly, idx: HamiltonianIndexing | None = None) -> Deriv:
    """D_H(f) = sum_j sigma(j) d_j(f) d_j', the derivation g -> {f, g}."""
    ix = _idx(f.shape, idx, odd=False)
    cs = [DPoly.zero(f.shape)] * f.shape.m
    for j in range(1, 2 * ix.r + 1):
        cs[ix.prime(j) - 1] = f.partial(j).scale(ix.sign(j))
    return Deriv(f.shape, cs)


@dataclass(frozen=True)
class HFamily:
    H: SubalgebraHandle
    H1: SubalgebraHandle
    H2: SubalgebraHandle


@lru_cache(maxsize=None)
def build_H(shape: Shape) -> HFamily:
    """H = D_H(O) inside W(2r, n) and its first two derived algebras."""
    _check_prime_shape(shape)
    ix = HamiltonianIndexing.for_shape(shape)
    W = w_algebra(shape)
    images = np.array([d_H_map(DPoly.monomial(shape, a), ix).to_vector() for a in shape.monomials[1:]])
    H = SubalgebraHandle(W, Subspace.span(W.field, images, W.dim), "H", verify=False)
    N = shape.dim
    if H.dim != N - 1:
        raise StructureViolation(f"dim H = {H.dim}, expected {N - 1} (kernel of D_H is F 1)")
    H1 = derived_subalgebra(H, "H1")
    if not H.basis.contains_space(H1.basis):
        raise NotClosed("H is not closed under the bracket")
    H2 = derived_subalgebra(H1, "H2")
    if H2.dim != N - 2:
        raise StructureViolation(f"dim H2 = {H2.dim}, expected {N - 2}")
    return HFamily(H, H1, H2)


# ---------------------------------------------------------------------------
# contact


def d_K_map(f: DPoly, idx: HamiltonianIndexing | None = None) -> Deriv:
    """D_K(f) = sum_{j<=2r} (sigma(j) d_j f + x_j' d_m f) d_j' + (2f - sum_{j<=2r} x_j d_j f) d_m."""
    sh = f.shape
    ix = _idx(sh, idx, odd=True)
    m = sh.m
    dm = f.partial(m)
    cs = [DPoly.zero(sh)] * m
    last = f.scale(2)
    for j in range(1, 2 * ix.r + 1):
        jp = ix.prime(j)
        dj = f.partial(j)
        cs[jp - 1] = dj.scale(ix.sign(j)) + DPoly.var(sh, jp) * dm
        last = last - DPoly.var(sh, j) * dj
    cs[m - 1] = last
    return Deriv(sh, cs)


def contact_bracket(f: DPoly, g: DPoly, idx: HamiltonianIndexing | None = None) -> DPoly:
    """<f, g> = D_K(f)(g) - 2 g d_m(f)."""
    if f.shape != g.shape:
        raise ShapeMismatch("contact bracket across shapes")
    return d_K_map(f, idx)(g) - (g * f.partial(f.shape.m)).scale(2)


def k_degrees(shape: Shape) -> np.ndarray:
    """K-degree ||a|| - 2 of every monomial, the last variable counted twice."""
    E = np.array(shape.monomials, dtype=np.int64).reshape(len(shape.monomials), shape.m)
    return E.sum(axis=1) + E[:, -1] - 2


def k_grade_split(f: DPoly) -> dict[int, DPoly]:
    sh = f.shape
    if sh.m < 3 or sh.m % 2 == 0:
        raise BadShape(f"K-grading needs odd m >= 3, got m = {sh.m}")
    out: dict[int, dict] = {}
    for a, c in f.terms.items():
        d = sum(a) + a[-1] - 2
        out.setdefault(d, {})[a] = c
    return {d: DPoly(sh, t) for d, t in sorted(out.items())}


def mu_matrix(f: DPoly) -> np.ndarray:
    """Multiplication by f on O as a matrix (columns are images)."""
    return f.shape.mult_matrix(f.to_vector())


def d_K_matrix(f: DPoly) -> np.ndarray:
    return derivation_matrix(f.shape, d_K_map(f).to_vector())


def ad_K_matrix(f: DPoly) -> np.ndarray:
    """g -> <f, g> on O, built from D_K(f) - 2 mu(d_m f)."""
    F = f.field
    return F.sub(d_K_matrix(f), F.mul(2, mu_matrix(f.partial(f.shape.m))))


class ContactAlgebra(Ambient):
    """O(2r+1, n) with the contact bracket, graded by K-degree."""

    label = "K"

    def __init__(self, shape: Shape):
        _check_prime_shape(shape)
        self.ix = HamiltonianIndexing.for_shape(shape, odd=True)
        self.shape = shape
        self.field = shape.field
        self.dim = shape.dim
        if self.dim > dim_cap():
            raise BoundExceeded(f"dim K = {self.dim} exceeds cap {dim_cap()}")
        self.degrees = k_degrees(shape)

    def __repr__(self) -> str:
        return f"O({self.shape.m},{self.shape.n}) with contact bracket over {self.field!r}"

    @cached_property
    def table(self) -> StructureConstants:
        sh = self.shape
        As, Bs, Ks, Cs = [], [], [], []
        for a_idx, a in enumerate(sh.monomials):
            M = ad_K_matrix(DPoly.monomial(sh, a))
            k, b = np.nonzero(M)
            As.append(np.full(len(k), a_idx))
            Bs.append(b)
            Ks.append(k)
            Cs.append(M[k, b])
        return StructureConstants(
            self.field, self.dim, np.concatenate(As), np.concatenate(Bs), np.concatenate(Ks), np.concatenate(Cs)
        )

    def element(self, v) -> DPoly:
        return DPoly.from_vector(self.shape, v)

    def vector(self, f: DPoly) -> np.ndarray:
        if f.shape != self.shape:
            raise ShapeMismatch("function over a different shape")
        return f.to_vector()

    def to_text(self, v) -> str:
        return format_dpoly(self.element(v))

    def parse(self, text: str) -> np.ndarray:
        return self.vector(parse_dpoly(self.shape, text))

    def d_K(self, v) -> Deriv:
        return d_K_map(self.element(v), self.ix)


@lru_cache(maxsize=None)
def contact_algebra(shape: Shape) -> ContactAlgebra:
    return ContactAlgebra(shape)


@dataclass(frozen=True)
class KFamily:
    K: SubalgebraHandle
    K1: SubalgebraHandle


@lru_cache(maxsize=None)
def build_K(shape: Shape) -> KFamily:
    """K = O(2r+1, n) under the contact bracket and its derived algebra."""
    C = contact_algebra(shape)
    F = C.field
    W = WAlgebra(shape) if shape.m * shape.dim <= dim_cap() else None
    if W is not None:
        images = np.array([d_K_map(DPoly.monomial(shape, a), C.ix).to_vector() for a in shape.monomials])
        if rank(F, images) != shape.dim:
            raise StructureViolation("D_K is not injective on the monomial basis")
    K = SubalgebraHandle(C, C.full(), "K")
    K1 = derived_subalgebra(K, "K1")
    expected = 1 if (shape.m + 3) % shape.p == 0 else 0
    if K.dim - K1.dim != expected:
        raise StructureViolation(f"codim K1 in K is {K.dim - K1.dim}, expected {expected}")
    return KFamily(K, K1)


def build(kind: str, shape: Shape) -> dict[str, SubalgebraHandle]:
    """All handles of one type, keyed by label."""
    kind = kind.upper()
    if kind == "W":
        return {"W": build_W(shape)}
    if kind == "S":
        fam = build_S(shape)
        return {"S": fam.S, "S1": fam.S1, "CS": fam.CS}
    if kind == "H":
        fam = build_H(shape)
        return {"H": fam.H, "H1": fam.H1, "H2": fam.H2}
    if kind == "K":
        fam = build_K(shape)
        return {"K": fam.K, "K1": fam.K1}
    raise BadShape(f"unknown type {kind!r}")
