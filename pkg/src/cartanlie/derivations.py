"""Special derivations W(m, n) = O d_1 + ... + O d_m, their brackets and
divergence, sparse structure constants, and the embedding into W(|n|, 1)."""

from __future__ import annotations

from functools import cached_property, lru_cache
import os
import re

import numpy as np
import scipy.sparse as sp

from .dpalgebra import (
    DPoly,
    ParseError,
    Shape,
    ShapeMismatch,
    format_dpoly,
    parse_dpoly,
    split_top_level,
)
from .exactla import DEFAULT_DIM_CAP, Subspace
from .field import BoundExceeded, Field


def dim_cap() -> int:
    return int(os.environ.get("CARTANLIE_DIM_CAP", DEFAULT_DIM_CAP))


class Deriv:
    """D = sum_k f_k d_k with coefficients f_1, ..., f_m in O(m, n)."""

    __slots__ = ("shape", "coeffs")

    def __init__(self, shape: Shape, coeffs):
        coeffs = tuple(coeffs)
        if len(coeffs) != shape.m:
            raise ShapeMismatch(f"{len(coeffs)} coefficients for m = {shape.m}")
        for c in coeffs:
            if c.shape != shape:
                raise ShapeMismatch(f"coefficient over {c.shape}, expected {shape}")
        self.shape = shape
        self.coeffs = coeffs

    @classmethod
    def zero(cls, shape: Shape) -> "Deriv":
        return cls(shape, [DPoly.zero(shape)] * shape.m)

    @classmethod
    def partial(cls, shape: Shape, k: int) -> "Deriv":
        """The partial derivative d_k (k from 1)."""
        return cls.basis(shape, (0,) * shape.m, k)

    @classmethod
    def basis(cls, shape: Shape, a, k: int, c: int = 1) -> "Deriv":
        """c x^(a) d_k."""
        cs = [DPoly.zero(shape)] * shape.m
        cs[k - 1] = DPoly.monomial(shape, tuple(a), c)
        return cls(shape, cs)

    @classmethod
    def from_vector(cls, shape: Shape, v) -> "Deriv":
        v = np.asarray(v, dtype=np.int64)
        N = shape.dim
        return cls(shape, [DPoly.from_vector(shape, v[k * N : (k + 1) * N]) for k in range(shape.m)])

    @classmethod
    def random(cls, shape: Shape, rng: np.random.Generator) -> "Deriv":
        return cls(shape, [DPoly.random(shape, rng) for _ in range(shape.m)])

    @property
    def field(self) -> Field:
        return self.shape.field

    def to_vector(self) -> np.ndarray:
        return np.concatenate([c.to_vector() for c in self.coeffs])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Deriv):
            return NotImplemented
        return self.shape == other.shape and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.shape, self.coeffs))

    def _same(self, other: "Deriv") -> None:
        if not isinstance(other, Deriv) or other.shape != self.shape:
            raise ShapeMismatch("derivations over different shapes")

    def __add__(self, other: "Deriv") -> "Deriv":
        self._same(other)
        return Deriv(self.shape, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "Deriv":
        return Deriv(self.shape, [-a for a in self.coeffs])

    def __sub__(self, other: "Deriv") -> "Deriv":
        return self + (-other)

    def scale(self, c: int) -> "Deriv":
        return Deriv(self.shape, [a.scale(c) for a in self.coeffs])

    def __rmul__(self, other):
        if isinstance(other, DPoly):
            return d_module_mul(other, self)
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        return NotImplemented

    def __call__(self, f: DPoly) -> DPoly:
        return d_apply(self, f)

    def bracket(self, other: "Deriv") -> "Deriv":
        return d_bracket(self, other)

    def divergence(self) -> DPoly:
        return divergence(self)

    def homogeneous_part(self, d: int) -> "Deriv":
        """Component of degree d (x^(a) d_k has degree |a| - 1)."""
        return Deriv(self.shape, [c.homogeneous_part(d + 1) for c in self.coeffs])

    def degrees(self) -> list[int]:
        return sorted({sum(a) - 1 for c in self.coeffs for a in c.terms})

    def __str__(self) -> str:
        return format_deriv(self)

    def __repr__(self) -> str:
        return f"Deriv({self})"


def d_apply(D: Deriv, f: DPoly) -> DPoly:
    if f.shape != D.shape:
        raise ShapeMismatch("derivation and function over different shapes")
    out = DPoly.zero(f.shape)
    for k, fk in enumerate(D.coeffs, start=1):
        if fk:
            dk = f.partial(k)
            if dk:
                out = out + fk * dk
    return out


def d_bracket(D: Deriv, E: Deriv) -> Deriv:
    """[D, E]: coefficient k is D(g_k) - E(f_k)."""
    D._same(E)
    return Deriv(D.shape, [D(g) - E(f) for f, g in zip(D.coeffs, E.coeffs)])


def d_module_mul(f: DPoly, D: Deriv) -> Deriv:
    if f.shape != D.shape:
        raise ShapeMismatch("function and derivation over different shapes")
    return Deriv(D.shape, [f * c for c in D.coeffs])


def divergence(D: Deriv) -> DPoly:
    out = DPoly.zero(D.shape)
    for k, fk in enumerate(D.coeffs, start=1):
        out = out + fk.partial(k)
    return out


# ---------------------------------------------------------------------------
# text grammar:  deriv := dterm ('+' dterm)* ;  dterm := poly '*' 'd' int | 'd' int

_DTERM = re.compile(r"^(.*?)\*?\s*d(\d+)$", re.S)


def parse_deriv(shape: Shape, text: str) -> Deriv:
    out = Deriv.zero(shape)
    for part in split_top_level(text):
        m = _DTERM.match(part.strip())
        if not m:
            raise ParseError(f"bad derivation term {part!r}")
        head = m.group(1).strip()
        k = int(m.group(2))
        if not 1 <= k <= shape.m:
            raise ParseError(f"d{k} outside d1..d{shape.m}")
        if head.endswith("*"):
            head = head[:-1].strip()
        if head in ("", "+"):
            f = DPoly.one(shape)
        elif head == "-":
            f = -DPoly.one(shape)
        else:
            f = parse_dpoly(shape, head)
        cs = [DPoly.zero(shape)] * shape.m
        cs[k - 1] = f
        out = out + Deriv(shape, cs)
    return out


def format_deriv(D: Deriv) -> str:
    parts = []
    for k, f in enumerate(D.coeffs, start=1):
        if f.is_zero():
            continue
        if f == DPoly.one(D.shape):
            parts.append(f"d{k}")
            continue
        s = format_dpoly(f)
        if len(f.terms) > 1:
            s = f"({s})"
        parts.append(f"{s}*d{k}")
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------


class StructureConstants:
    """Sparse bilinear bracket over a prime field: [e_a, e_b] = sum c e_k.

    Vectors are rows of encoded field elements.  All evaluation goes through
    float64 sparse products, exact because entries and sums stay far below
    2^53 at desk scale.
    """

    def __init__(self, field: Field, dim: int, A, B, K, C):
        if field.k != 1:
            raise ValueError("structure constants are kept over prime fields")
        self.field = field
        self.dim = dim
        p = field.p
        A, B, K, C = (np.asarray(x, dtype=np.int64) for x in (A, B, K, C))
        key = (A * dim + B) * dim + K
        uniq, inv = np.unique(key, return_inverse=True)
        vals = np.zeros(len(uniq), dtype=np.int64)
        np.add.at(vals, inv, C % p)
        vals %= p
        keep = vals != 0
        uniq, vals = uniq[keep], vals[keep]
        self.A = uniq // (dim * dim)
        self.B = (uniq // dim) % dim
        self.K = uniq % dim
        self.C = vals
        self._adj = sp.csr_matrix(
            (self.C.astype(np.float64), (self.A, self.B * dim + self.K)), shape=(dim, dim * dim)
        )
        self._scatter = sp.csr_matrix(
            (self.C.astype(np.float64), (np.arange(len(self.C)), self.K)), shape=(len(self.C), dim)
        )

    @property
    def nnz(self) -> int:
        return len(self.C)

    def _mod(self, X) -> np.ndarray:
        return np.rint(np.asarray(X)).astype(np.int64) % self.field.p

    def bracket(self, u, v) -> np.ndarray:
        return self.bracket_pairs(np.atleast_2d(u), np.atleast_2d(v))[0]

    def bracket_pairs(self, U, V, chunk: int = 128) -> np.ndarray:
        """Row-wise brackets [U_t, V_t]."""
        p = self.field.p
        U = np.atleast_2d(np.asarray(U, dtype=np.int64))
        V = np.atleast_2d(np.asarray(V, dtype=np.int64))
        # small characteristic: gather in uint8, scatter in float32, both exact
        per_out = np.bincount(self.K, minlength=self.dim).max(initial=0)
        small = (p - 1) ** 2 < 256 and per_out * (p - 1) ** 3 < 2**24
        gtype, stype = (np.uint8, np.float32) if small else (np.float64, np.float64)
        S = self._scatter.T.tocsr().astype(stype)
        U, V = U.astype(gtype), V.astype(gtype)
        out = np.empty((U.shape[0], self.dim), dtype=np.int64)
        for s in range(0, U.shape[0], chunk):
            w = (U[s : s + chunk][:, self.A] * V[s : s + chunk][:, self.B]).astype(stype)
            out[s : s + chunk] = self._mod((S @ w.T).T)
        return out

    def ad(self, u) -> np.ndarray:
        """Matrix of ad u: column b holds [u, e_b]."""
        row = sp.csr_matrix(np.asarray(u, dtype=np.float64).reshape(1, -1))
        T = (row @ self._adj).toarray().reshape(self.dim, self.dim)
        return self._mod(T).T.copy()

    def brackets_with(self, U, W) -> np.ndarray:
        """All [U_a, W_b], stacked as an (|U| * |W|) x dim array.

        Only the structure constants touching the supports of U and W are
        used, so brackets of homogeneous blocks stay cheap.
        """
        U = np.atleast_2d(np.asarray(U, dtype=np.int64))
        W = np.atleast_2d(np.asarray(W, dtype=np.int64))
        n = self.dim
        if U.shape[0] == 0 or W.shape[0] == 0:
            return np.zeros((U.shape[0] * W.shape[0], n), dtype=np.int64)
        iu = np.flatnonzero(np.any(U, axis=0))
        iw = np.flatnonzero(np.any(W, axis=0))
        pos_u = np.full(n, -1)
        pos_u[iu] = np.arange(len(iu))
        pos_w = np.full(n, -1)
        pos_w[iw] = np.arange(len(iw))
        keep = (pos_u[self.A] >= 0) & (pos_w[self.B] >= 0)
        sub = sp.csr_matrix(
            (self.C[keep].astype(np.float64), (pos_u[self.A[keep]], pos_w[self.B[keep]] * n + self.K[keep])),
            shape=(len(iu), len(iw) * n),
        )
        Uc = sp.csr_matrix(U[:, iu].astype(np.float64))
        Wc = W[:, iw].astype(np.float64)
        chunk = max(1, 4_000_000 // max(1, len(iw) * n))
        blocks = []
        for s in range(0, U.shape[0], chunk):
            T = (Uc[s : s + chunk] @ sub).toarray().reshape(-1, len(iw), n)
            T = np.mod(T, self.field.p)
            blocks.append(self._mod(np.matmul(Wc, T)).reshape(-1, n))
        return np.vstack(blocks)

    def jacobiator(self, X, Y, Z) -> np.ndarray:
        b = self.bracket_pairs
        F = self.field
        return F.add(F.add(b(X, b(Y, Z)), b(Y, b(Z, X))), b(Z, b(X, Y)))


class Ambient:
    """A finite-dimensional graded Lie algebra given by structure constants on
    a coordinate basis.  Subalgebra handles live inside one of these."""

    label = "?"
    field: Field
    dim: int
    degrees: np.ndarray
    table: StructureConstants

    def to_text(self, v) -> str:
        raise NotImplementedError

    def parse(self, text: str) -> np.ndarray:
        raise NotImplementedError

    def bracket(self, u, v) -> np.ndarray:
        return self.table.bracket(u, v)

    def ad(self, u) -> np.ndarray:
        return self.table.ad(u)

    def degree_indices(self, d: int) -> np.ndarray:
        return np.flatnonzero(self.degrees == d)

    def full(self) -> Subspace:
        return Subspace.full(self.field, self.dim)


class WAlgebra(Ambient):
    """W(m, n) with flat coordinates (k, a) -> (k - 1) * dim O + index(a)."""

    label = "W"

    def __init__(self, shape: Shape):
        if shape.field.k != 1:
            raise ValueError("W(m, n) is built over the prime field")
        self.shape = shape
        self.field = shape.field
        self.dim = shape.m * shape.dim
        if self.dim > dim_cap():
            raise BoundExceeded(f"dim W = {self.dim} exceeds cap {dim_cap()}")
        self.degrees = np.tile(shape.degrees - 1, shape.m)

    def __repr__(self) -> str:
        return f"W({self.shape.m},{self.shape.n}) over {self.field!r}"

    @cached_property
    def table(self) -> StructureConstants:
        sh = self.shape
        N, m, p = sh.dim, sh.m, sh.p
        I, J, K, C = sh.mult_table
        As, Bs, Ks, Cs = [], [], [], []
        for i in range(m):
            src, dst = sh.partial_maps[i]
            up = np.full(N, -1, dtype=np.int64)
            up[dst] = src  # index of b + e_i, or -1 when b_i = tau_i
            for j in range(m):
                # C(a + b', a) x^(a+b') d_j  with  b = b' + e_i
                ok = up[J] >= 0
                As.append(i * N + I[ok])
                Bs.append(j * N + up[J[ok]])
                Ks.append(j * N + K[ok])
                Cs.append(C[ok])
                # -C(a' + b, b) x^(a'+b) d_i  with  a = a' + e_j
                srcj, dstj = sh.partial_maps[j]
                upj = np.full(N, -1, dtype=np.int64)
                upj[dstj] = srcj
                ok = upj[J] >= 0
                As.append(i * N + upj[J[ok]])
                Bs.append(j * N + I[ok])
                Ks.append(i * N + K[ok])
                Cs.append((p - C[ok]) % p)
        return StructureConstants(
            self.field, self.dim, np.concatenate(As), np.concatenate(Bs), np.concatenate(Ks), np.concatenate(Cs)
        )

    def element(self, v) -> Deriv:
        return Deriv.from_vector(self.shape, v)

    def vector(self, D: Deriv) -> np.ndarray:
        if D.shape != self.shape:
            raise ShapeMismatch("derivation over a different shape")
        return D.to_vector()

    def to_text(self, v) -> str:
        return format_deriv(self.element(v))

    def parse(self, text: str) -> np.ndarray:
        return self.vector(parse_deriv(self.shape, text))

    def basis_element(self, a, k: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[(k - 1) * self.shape.dim + self.shape.index[tuple(a)]] = 1
        return v

    @cached_property
    def div_matrix(self) -> np.ndarray:
        """div as a (dim O) x (dim W) matrix."""
        sh = self.shape
        N = sh.dim
        M = np.zeros((N, self.dim), dtype=np.int64)
        for k in range(sh.m):
            src, dst = sh.partial_maps[k]
            M[dst, k * N + src] = 1
        return M

    def action_matrix(self, D) -> np.ndarray:
        """Matrix of D acting on O(m, n); D may be a Deriv or a coordinate vector."""
        v = self.vector(D) if isinstance(D, Deriv) else np.asarray(D, dtype=np.int64)
        return derivation_matrix(self.shape, v)


def derivation_matrix(shape: Shape, v) -> np.ndarray:
    """Matrix of sum_k f_k d_k on O for a flat coefficient vector v (any field)."""
    F = shape.field
    N = shape.dim
    v = np.asarray(v, dtype=np.int64)
    M = np.zeros((N, N), dtype=np.int64)
    for k in range(shape.m):
        fk = v[k * N : (k + 1) * N]
        if not np.any(fk):
            continue
        mu = shape.mult_matrix(fk)
        src, dst = shape.partial_maps[k]
        # (mu . d_k)[:, src] = mu[:, dst]
        part = np.zeros((N, N), dtype=np.int64)
        part[:, src] = mu[:, dst]
        M = F.add(M, part)
    return M


@lru_cache(maxsize=None)
def w_algebra(shape: Shape) -> WAlgebra:
    return WAlgebra(shape)


def ad_matrix(W: WAlgebra, D, V: Subspace | None = None) -> np.ndarray:
    """Matrix of ad D on V.  Square in V's basis when [D, V] lies in V,
    otherwise rectangular with columns in ambient coordinates."""
    u = W.vector(D) if isinstance(D, Deriv) else np.asarray(D, dtype=np.int64)
    if V is None:
        return W.ad(u)
    if V.ambient_dim != W.dim:
        raise ShapeMismatch("subspace is not inside this algebra")
    if V.dim == 0:
        return np.zeros((W.dim, 0), dtype=np.int64)
    images = W.table.brackets_with(u, V.basis)  # rows [D, v_j]
    if V.contains_space(Subspace.span(W.field, images, W.dim)):
        return V.coordinates(images).T.copy()
    return images.T.copy()


# ---------------------------------------------------------------------------


class SigmaIso:
    """The algebra isomorphism O(m, n) -> O(N, 1), x_i^(p^j) -> xi_{i,j}.

    Target variables are ordered (1,0), ..., (1, n_1 - 1), (2, 0), ...
    """

    def __init__(self, shape: Shape):
        self.source = shape
        p = shape.p
        self.N = sum(shape.n)
        self.target = Shape(p, (1,) * self.N, shape.field)
        self.offsets = [sum(shape.n[:i]) for i in range(shape.m)]
        F = shape.field
        tgt_index, scale = [], []
        for a in shape.monomials:
            e = [0] * self.N
            prod = DPoly.one(shape)
            fact = 1
            for i, ai in enumerate(a):
                for j in range(shape.n[i]):
                    d = (ai // p**j) % p
                    e[self.offsets[i] + j] = d
                    prod = prod * DPoly.var(shape, i + 1, p**j) ** d
                    for t in range(2, d + 1):
                        fact = fact * t % p
            unit = prod.terms.get(a, 0)
            assert unit, f"product of digit powers vanished for {a}"
            tgt_index.append(self.target.index[tuple(e)])
            # prod(xi^d) = prod(d!) xi^(d) and prod(x_i^(p^j))^d = unit x^(a)
            scale.append(F.mul(fact, F.inv(unit)))
        self.tgt_index = np.array(tgt_index, dtype=np.int64)
        self.scale = np.array(scale, dtype=np.int64)
        self.inv_scale = np.asarray(F.inv(self.scale))
        self.src_index = np.empty_like(self.tgt_index)
        self.src_index[self.tgt_index] = np.arange(len(tgt_index))

    def variable(self, i: int, j: int) -> int:
        """1-based target variable number of xi_{i,j}."""
        return self.offsets[i - 1] + j + 1

    def apply_vector(self, v) -> np.ndarray:
        F = self.source.field
        out = np.zeros(self.target.dim, dtype=np.int64)
        out[self.tgt_index] = F.mul(np.asarray(v, dtype=np.int64), self.scale)
        return out

    def apply(self, f: DPoly) -> DPoly:
        if f.shape != self.source:
            raise ShapeMismatch("sigma applied outside its source")
        return DPoly.from_vector(self.target, self.apply_vector(f.to_vector()))

    __call__ = apply

    def inverse(self, g: DPoly) -> DPoly:
        if g.shape != self.target:
            raise ShapeMismatch("sigma^-1 applied outside its target")
        F = self.source.field
        w = g.to_vector()
        v = F.mul(w[self.tgt_index], self.inv_scale)
        return DPoly.from_vector(self.source, v)

    def iota(self, D: Deriv) -> Deriv:
        """sigma o D o sigma^-1: the d/dxi_{i,j} coefficient is sigma(D(x_i^(p^j)))."""
        if D.shape != self.source:
            raise ShapeMismatch("iota applied outside its source")
        p = self.source.p
        coeffs = [None] * self.N
        for i in range(self.source.m):
            for j in range(self.source.n[i]):
                coeffs[self.offsets[i] + j] = self.apply(D(DPoly.var(self.source, i + 1, p**j)))
        return Deriv(self.target, coeffs)


def sigma_apply(sigma: SigmaIso, f: DPoly) -> DPoly:
    return sigma.apply(f)


def iota_embed(sigma: SigmaIso, D: Deriv) -> Deriv:
    return sigma.iota(D)
