"""Dense exact linear algebra over a :class:`~cartanlie.field.Field`.

Matrices are int64 numpy arrays of encoded field elements; the field is
passed alongside.  Vectors are rows: a subspace is stored as the RREF of a
matrix whose rows span it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import Field, Polynomial

DEFAULT_DIM_CAP = 1024


class AmbientMismatch(ValueError):
    pass


class NotSquare(ValueError):
    pass


def as_matrix(M, cols: int | None = None) -> np.ndarray:
    A = np.array(M, dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(1, -1) if A.size else np.zeros((0, cols or 0), dtype=np.int64)
    if A.ndim == 2 and A.shape[0] == 0 and cols is not None:
        A = A.reshape(0, cols)
    return A


def rref(F: Field, M) -> tuple[np.ndarray, list[int], int]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns, rank)."""
    A = as_matrix(M).copy()
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        lead = int(A[r, c])
        if lead != 1:
            A[r, c:] = F.mul(A[r, c:], F.inv(lead))
        col = A[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            A[hit, c:] = F.sub(A[hit, c:], F.mul(col[hit, None], A[r, c:][None, :]))
        pivots.append(c)
        r += 1
    return A[:r], pivots, r


def rank(F: Field, M) -> int:
    return rref(F, M)[2]


def _null_basis(F: Field, R: np.ndarray, pivots: list[int], cols: int) -> np.ndarray:
    free = [c for c in range(cols) if c not in set(pivots)]
    K = np.zeros((len(free), cols), dtype=np.int64)
    for t, c in enumerate(free):
        K[t, c] = 1
        if pivots:
            K[t, pivots] = F.neg(R[:, c])
    return K


def kernel(F: Field, M, cols: int | None = None) -> "Subspace":
    """Right kernel {v : M v = 0}."""
    A = as_matrix(M, cols)
    n = A.shape[1]
    R, piv, _ = rref(F, A)
    return Subspace.span(F, _null_basis(F, R, piv, n), n)


def left_kernel(F: Field, M) -> "Subspace":
    """{c : c M = 0}."""
    A = as_matrix(M)
    return kernel(F, A.T, A.shape[0])


def solve(F: Field, M, b) -> np.ndarray | None:
    """A particular solution of M x = b, free variables set to zero."""
    A = as_matrix(M)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    R, piv, r = rref(F, np.hstack([A, b]))
    n = A.shape[1]
    if piv and piv[-1] == n:
        return None
    x = np.zeros(n, dtype=np.int64)
    for row, c in enumerate(piv):
        x[c] = R[row, n]
    return x


def matrix_power(F: Field, M, e: int) -> np.ndarray:
    A = as_matrix(M)
    result = np.eye(A.shape[0], dtype=np.int64)
    base = A
    while e:
        if e & 1:
            result = F.matmul(result, base)
        base = F.matmul(base, base)
        e >>= 1
    return result


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of F^n stored by its canonical RREF basis (one row per vector)."""

    field: Field
    ambient_dim: int
    basis: np.ndarray
    pivots: tuple[int, ...]

    @classmethod
    def span(cls, F: Field, vectors, n: int) -> "Subspace":
        A = as_matrix(vectors, n)
        if A.shape[0] == 0:
            return cls.zero(F, n)
        if A.shape[1] != n:
            raise AmbientMismatch(f"vectors of length {A.shape[1]} in F^{n}")
        R, piv, _ = rref(F, A)
        return cls(F, n, R, tuple(piv))

    @classmethod
    def zero(cls, F: Field, n: int) -> "Subspace":
        return cls(F, n, np.zeros((0, n), dtype=np.int64), ())

    @classmethod
    def full(cls, F: Field, n: int) -> "Subspace":
        return cls(F, n, identity(n), tuple(range(n)))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    rank = dim

    def __len__(self) -> int:
        return self.dim

    def _check(self, other: "Subspace") -> None:
        if other.ambient_dim != self.ambient_dim or other.field != self.field:
            raise AmbientMismatch(
                f"F^{self.ambient_dim} over {self.field!r} vs F^{other.ambient_dim} over {other.field!r}"
            )

    def reduce(self, V) -> np.ndarray:
        """Residual of each row of V after clearing the pivot columns."""
        V = as_matrix(V, self.ambient_dim)
        if self.dim == 0 or V.shape[0] == 0:
            return V.copy()
        F = self.field
        return F.sub(V, F.matmul(V[:, list(self.pivots)], self.basis))

    def coordinates(self, v) -> np.ndarray:
        """Coordinates of a member vector in the RREF basis."""
        v = np.asarray(v, dtype=np.int64)
        return v[..., list(self.pivots)]

    def contains(self, v) -> bool:
        return not np.any(self.reduce(v))

    def contains_space(self, other: "Subspace") -> bool:
        self._check(other)
        return not np.any(self.reduce(other.basis))

    def sum(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(self.field, np.vstack([self.basis, other.basis]), self.ambient_dim)

    __add__ = sum

    def intersect(self, other: "Subspace") -> "Subspace":
        """Via the relation system a A = b B on the stacked bases."""
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.field, self.ambient_dim)
        F = self.field
        rel = left_kernel(F, np.vstack([self.basis, other.basis]))
        if rel.dim == 0:
            return Subspace.zero(F, self.ambient_dim)
        return Subspace.span(F, F.matmul(rel.basis[:, : self.dim], self.basis), self.ambient_dim)

    __and__ = intersect

    def equals(self, other: "Subspace") -> bool:
        self._check(other)
        return self.pivots == other.pivots and np.array_equal(self.basis, other.basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.field == other.field
            and self.ambient_dim == other.ambient_dim
            and self.equals(other)
        )

    __hash__ = None

    def absorb(self, V) -> tuple["Subspace", np.ndarray]:
        """Add the rows of V; returns the enlarged space and the rows (already
        reduced and independent) that were new."""
        R = self.reduce(V)
        R = R[np.any(R, axis=1)]
        if R.shape[0] == 0:
            return self, R
        F = self.field
        new, newpiv, _ = rref(F, R)
        B = self.basis
        if B.shape[0]:
            B = F.sub(B, F.matmul(B[:, newpiv], new))
        rows = np.vstack([B, new])
        piv = list(self.pivots) + newpiv
        order = np.argsort(piv, kind="stable")
        merged = Subspace(F, self.ambient_dim, rows[order], tuple(int(piv[i]) for i in order))
        return merged, new

    def complement_coordinates(self) -> list[int]:
        return [c for c in range(self.ambient_dim) if c not in set(self.pivots)]

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, field={self.field!r})"


def subspace_combine(A: Subspace, B: Subspace, op: str):
    if op == "sum":
        return A.sum(B)
    if op == "intersect":
        return A.intersect(B)
    if op == "equals":
        return A.equals(B)
    if op == "contains_vector":
        raise ValueError("use Subspace.contains(vector) for membership")
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# characteristic polynomials


def char_poly(F: Field, M) -> Polynomial:
    """det(tI - M) by Berkowitz's division-free algorithm."""
    A = as_matrix(M)
    n, m = A.shape
    if n != m:
        raise NotSquare(f"{n}x{m} matrix")
    if n == 0:
        return Polynomial(F, (1,))
    # coefficient vectors are kept highest degree first while building
    poly = [1, F.neg(int(A[n - 1, n - 1]))]
    for s in range(n - 2, -1, -1):
        a = int(A[s, s])
        R = A[s, s + 1 :]
        C = A[s + 1 :, s]
        sub = A[s + 1 :, s + 1 :]
        size = n - s - 1
        krylov = np.empty((size, size), dtype=np.int64)
        v = C.reshape(-1, 1)
        for j in range(size):
            krylov[:, j] = v.ravel()
            v = F.matmul(sub, v)
        col = [1, F.neg(a)] + [int(x) for x in F.neg(F.matmul(R.reshape(1, -1), krylov).ravel())]
        # Toeplitz(col) @ poly = first size+2 entries of the convolution
        if F.k == 1:
            poly = [int(x) % F.p for x in np.convolve(col, poly)[: size + 2]]
        else:
            out = [0] * (size + 2)
            for i in range(size + 2):
                acc = 0
                for j in range(max(0, i - len(col) + 1), min(i, len(poly) - 1) + 1):
                    if poly[j] and col[i - j]:
                        acc = F.add(acc, F.mul(col[i - j], poly[j]))
                out[i] = acc
            poly = out
    return Polynomial.make(F, list(reversed(poly)))


def eval_matrix_poly(F: Field, f: Polynomial, M) -> np.ndarray:
    """f(M) by Horner's rule."""
    A = as_matrix(M)
    n = A.shape[0]
    acc = np.zeros((n, n), dtype=np.int64)
    for c in reversed(f.coeffs):
        acc = F.matmul(acc, A)
        if c:
            acc[np.arange(n), np.arange(n)] = F.add(acc[np.arange(n), np.arange(n)], c)
    return acc


def is_p_polynomial(f: Polynomial, samples: int = 32, seed: int = 0) -> bool:
    """True iff every nonzero coefficient sits at a degree p^j, confirmed by
    additivity f(a + b) = f(a) + f(b) on sampled field elements."""
    F = f.field
    p = F.p
    allowed = set()
    d = 1
    while d <= max(f.degree, 1):
        allowed.add(d)
        d *= p
    for i, c in enumerate(f.coeffs):
        if c and i not in allowed:
            return False
    rng = np.random.default_rng(seed)
    a = rng.integers(0, F.q, size=samples)
    b = rng.integers(0, F.q, size=samples)
    return bool(np.all(f(F.add(a, b)) == F.add(f(a), f(b))))
