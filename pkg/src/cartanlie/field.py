"""Finite fields GF(p^k) and univariate polynomials over them.

Field elements are plain integers: the element sum(c_i t^i) of GF(p^k) is
encoded as sum(c_i p^i).  Prime-subfield elements therefore keep their usual
residues, which makes scalar extension a no-op on coordinates.  Every
arithmetic method accepts Python ints or integer numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
import itertools
import math

import numpy as np

DEFAULT_BOUND = 2**20
# int64 encodings must stay exact
HARD_BOUND = 2**62
_TABLE_LIMIT = 4096


class FieldError(ValueError):
    pass


class NotPrime(FieldError):
    pass


class CharTooSmall(FieldError):
    pass


class BoundExceeded(FieldError):
    pass


class DivisionByZero(FieldError, ZeroDivisionError):
    pass


class FieldMismatch(FieldError):
    pass


class ZeroPolynomial(FieldError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# Polynomials over F_p as coefficient lists (low degree first).  Only used to
# find and test moduli; general polynomials live in the Polynomial class.
# ---------------------------------------------------------------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pdivmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    if not b:
        raise DivisionByZero("polynomial division by zero")
    inv = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        shift = len(a) - len(b)
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        _trim(a)
    return q, a


def _pmulmod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pdivmod(out, f, p)[1]


def _ppowmod(a: list[int], e: int, f: list[int], p: int) -> list[int]:
    result = [1]
    base = _pdivmod(a, f, p)[1]
    while e:
        if e & 1:
            result = _pmulmod(result, base, f, p)
        base = _pmulmod(base, base, f, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [x * inv % p for x in a]
    return a


def _pinvmod(a: list[int], f: list[int], p: int) -> list[int]:
    """Inverse of a modulo f by the extended Euclidean algorithm."""
    r0, r1 = _trim(list(f)), _trim([x % p for x in a])
    s0, s1 = [], [1]
    while r1:
        q, r = _pdivmod(r0, r1, p)
        qs = [0] * (len(q) + len(s1))
        for i, x in enumerate(q):
            for j, y in enumerate(s1):
                qs[i + j] = (qs[i + j] + x * y) % p
        n = max(len(s0), len(qs))
        s2 = _trim([((s0[i] if i < len(s0) else 0) - (qs[i] if i < len(qs) else 0)) % p for i in range(n)])
        r0, r1, s0, s1 = r1, r, s1, s2
    if len(r0) != 1:
        raise DivisionByZero("element is not invertible")
    c = pow(r0[0], p - 2, p)
    return [x * c % p for x in s0]


def is_irreducible(f: list[int], p: int) -> bool:
    """Ben-Or's test for a monic polynomial f over F_p (low degree first):
    f is irreducible iff gcd(f, t^(p^i) - t) = 1 for 1 <= i <= deg(f)/2."""
    f = _trim([x % p for x in f])
    k = len(f) - 1
    if k < 1:
        return False
    h = [0, 1]
    for _ in range(k // 2):
        h = _ppowmod(h, p, f, p)
        g = h + [0] * max(0, 2 - len(h))
        g[1] = (g[1] - 1) % p
        if len(_pgcd(f, _trim(g), p)) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def irreducible_modulus(p: int, k: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree k, ordering coefficient tuples
    (c_0, c_1, ..., c_{k-1}) lexicographically."""
    # c_0 = 0 means t divides f
    first = range(1, p) if k >= 2 else range(p)
    for c0 in first:
        for rest in itertools.product(range(p), repeat=k - 1):
            f = [c0, *rest, 1]
            if is_irreducible(f, p):
                return tuple(f)
    raise FieldError(f"no irreducible polynomial of degree {k} over F_{p}")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Field:
    """GF(p^k).  For k == 1 the modulus is the placeholder ``(0, 1)`` (i.e. t)."""

    p: int
    k: int = 1
    modulus: tuple[int, ...] = (0, 1)

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def is_prime_field(self) -> bool:
        return self.k == 1

    def __repr__(self) -> str:
        return f"GF({self.p})" if self.k == 1 else f"GF({self.p}^{self.k})"

    # -- encoding ---------------------------------------------------------
    @cached_property
    def _pows(self) -> np.ndarray:
        return np.array([self.p**i for i in range(self.k)], dtype=np.int64)

    def coeffs(self, a: int) -> tuple[int, ...]:
        a = int(a)
        out = []
        for _ in range(self.k):
            a, r = divmod(a, self.p)
            out.append(r)
        return tuple(out)

    def from_coeffs(self, cs) -> int:
        cs = list(cs)
        if len(cs) > self.k:
            # reduce modulo the defining polynomial
            cs = _pdivmod(cs, list(self.modulus), self.p)[1]
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(cs))

    def _digits(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._pows) % self.p

    def _encode(self, d: np.ndarray) -> np.ndarray:
        return (d * self._pows).sum(axis=-1)

    @cached_property
    def _reduction(self) -> np.ndarray:
        """R[i*k + j] = coefficients of t^(i+j) reduced mod the modulus."""
        k, p = self.k, self.p
        f = list(self.modulus)
        rows = []
        for i in range(k):
            for j in range(k):
                mono = [0] * (i + j) + [1]
                r = _pdivmod(mono, f, p)[1]
                rows.append(r + [0] * (k - len(r)))
        return np.array(rows, dtype=np.int64)

    @cached_property
    def _reduction_f(self) -> np.ndarray:
        return self._reduction.astype(np.float64)

    @cached_property
    def _tables(self):
        if self.k == 1 or self.q > _TABLE_LIMIT:
            return None
        elems = np.arange(self.q, dtype=np.int64)
        d = self._digits(elems)
        add = self._encode((d[:, None, :] + d[None, :, :]) % self.p)
        prod = (d[:, None, :, None] * d[None, :, None, :]).reshape(self.q, self.q, self.k * self.k)
        mul = self._encode((prod @ self._reduction) % self.p)
        neg = self._encode((-d) % self.p)
        return add, mul, neg

    def _wrap(self, r):
        return int(r) if np.ndim(r) == 0 else r

    # -- arithmetic -------------------------------------------------------
    def add(self, a, b):
        if self.k == 1:
            return (a + b) % self.p
        t = self._tables
        if t is not None:
            return self._wrap(t[0][a, b])
        return self._wrap(self._encode((self._digits(a) + self._digits(b)) % self.p))

    def neg(self, a):
        if self.k == 1:
            return (-a) % self.p
        t = self._tables
        if t is not None:
            return self._wrap(t[2][a])
        return self._wrap(self._encode((-self._digits(a)) % self.p))

    def sub(self, a, b):
        if self.k == 1:
            return (a - b) % self.p
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.k == 1:
            return (a * b) % self.p
        t = self._tables
        if t is not None:
            return self._wrap(t[1][a, b])
        da, db = np.broadcast_arrays(self._digits(a).astype(np.float64), self._digits(b).astype(np.float64))
        prod = (da[..., :, None] * db[..., None, :]).reshape(da.shape[:-1] + (self.k * self.k,))
        # entries stay below k^2 p^3, exact in float64
        red = np.rint(prod @ self._reduction_f).astype(np.int64) % self.p
        return self._wrap(self._encode(red))

    def pow(self, a, e: int):
        if self.k == 1:
            if np.ndim(a) == 0:
                return pow(int(a), e, self.p)
            return self._wrap(self._pow_array(a, e))
        return self._wrap(self._pow_array(a, e))

    def _pow_array(self, a, e: int):
        result = np.ones_like(np.asarray(a, dtype=np.int64))
        base = np.asarray(a, dtype=np.int64)
        while e:
            if e & 1:
                result = np.asarray(self.mul(result, base))
            base = np.asarray(self.mul(base, base))
            e >>= 1
        return result

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise DivisionByZero("inverse of zero")
        if self.k == 1 and np.ndim(a) == 0:
            return pow(int(a), self.p - 2, self.p)
        if self.k == 1 or self._tables is not None:
            return self.pow(a, self.q - 2)
        f = list(self.modulus)
        if np.ndim(a) == 0:
            return self.from_coeffs(_pinvmod(list(self.coeffs(int(a))), f, self.p))
        arr = np.asarray(a, dtype=np.int64)
        vals, back = np.unique(arr, return_inverse=True)
        invs = np.array([self.inv(int(v)) for v in vals], dtype=np.int64)
        return invs[back].reshape(arr.shape)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def frobenius(self, a):
        return self.pow(a, self.p)

    def elements(self) -> np.ndarray:
        if self.q > DEFAULT_BOUND:
            raise BoundExceeded(f"refusing to enumerate {self!r}")
        return np.arange(self.q, dtype=np.int64)

    def scalar(self, a) -> "Scalar":
        if isinstance(a, Scalar):
            return a
        return Scalar(self, int(a) % self.p if self.k == 1 else int(a))

    def from_int(self, n: int) -> int:
        """Image of an integer in the prime subfield."""
        return int(n) % self.p

    # -- matrices ---------------------------------------------------------
    def matmul(self, A, B) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        inner = A.shape[-1]
        if self.k == 1:
            if inner * (self.p - 1) ** 2 < 2**52:
                return np.rint(A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64) % self.p
            return (A @ B) % self.p
        da = self._digits(A).astype(np.float64)  # (r, n, k)
        db = self._digits(B).astype(np.float64)  # (n, c, k)
        k = self.k
        s = np.einsum("rni,ncj->rcij", da, db).reshape(A.shape[0], B.shape[1], k * k) % self.p
        return self._encode(np.rint(s @ self._reduction_f).astype(np.int64) % self.p)

    def str_element(self, a: int) -> str:
        a = int(a)
        if self.k == 1:
            return str(a)
        cs = self.coeffs(a)
        parts = []
        for i in range(self.k - 1, -1, -1):
            c = cs[i]
            if not c:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if i == 0:
                parts.append(str(c))
            else:
                parts.append(mono if c == 1 else f"{c}{mono}")
        return "[" + ("+".join(parts) if parts else "0") + "]"


def field_make(p: int, k: int = 1, bound: int = DEFAULT_BOUND) -> Field:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p <= 3:
        raise CharTooSmall(f"characteristic {p} <= 3")
    if k < 1:
        raise FieldError("extension degree must be >= 1")
    if p**k > min(bound, HARD_BOUND):
        raise BoundExceeded(f"{p}^{k} exceeds bound {bound}")
    if k == 1:
        return Field(p)
    return Field(p, k, irreducible_modulus(p, k))


@dataclass(frozen=True)
class Scalar:
    """A field element together with its field."""

    field: Field
    value: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.coeffs(self.value)

    def _other(self, other) -> int:
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return self.field.from_int(int(other))
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        return Scalar(self.field, self.field.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        return Scalar(self.field, self.field.sub(self.value, b))

    def __rsub__(self, other):
        b = self._other(other)
        return Scalar(self.field, self.field.sub(b, self.value))

    def __mul__(self, other):
        b = self._other(other)
        return Scalar(self.field, self.field.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        return Scalar(self.field, self.field.div(self.value, b))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        if e < 0:
            return Scalar(self.field, self.field.pow(self.field.inv(self.value), -e))
        return Scalar(self.field, self.field.pow(self.value, e))

    def frobenius(self) -> "Scalar":
        return Scalar(self.field, self.field.frobenius(self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == self.field.from_int(int(other))
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.value))

    def __str__(self) -> str:
        return self.field.str_element(self.value)

    def __repr__(self) -> str:
        return f"Scalar({self.field!r}, {self})"


def field_arithmetic(a: Scalar, b: Scalar, op: str) -> Scalar:
    if a.field != b.field:
        raise FieldMismatch(f"{a.field!r} vs {b.field!r}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if not b:
            raise DivisionByZero("division by zero")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    """Univariate polynomial in t, coefficients low degree first, trimmed."""

    field: Field
    coeffs: tuple[int, ...]

    @classmethod
    def make(cls, field: Field, coeffs) -> "Polynomial":
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return cls(field, tuple(cs))

    @classmethod
    def from_roots(cls, field: Field, roots) -> "Polynomial":
        f = cls(field, (1,))
        for r in roots:
            f = f * cls.make(field, [field.neg(r), 1])
        return f

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        F = self.field
        acc = np.zeros_like(np.asarray(x, dtype=np.int64)) if np.ndim(x) else 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        F = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Polynomial.make(F, [F.add(x, y) for x, y in zip(a, b)])

    def __neg__(self) -> "Polynomial":
        return Polynomial.make(self.field, [self.field.neg(c) for c in self.coeffs])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        F = self.field
        if self.is_zero() or other.is_zero():
            return Polynomial(F, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = F.add(out[i + j], F.mul(a, b))
        return Polynomial.make(F, out)

    def __pow__(self, e: int) -> "Polynomial":
        out = Polynomial(self.field, (1,))
        for _ in range(e):
            out = out * self
        return out

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        F = self.field
        if other.is_zero():
            raise ZeroPolynomial("division by the zero polynomial")
        a = list(self.coeffs)
        b = other.coeffs
        inv = F.inv(b[-1])
        q = [0] * max(len(a) - len(b) + 1, 0)
        while len(a) >= len(b) and a:
            c = F.mul(a[-1], inv)
            shift = len(a) - len(b)
            q[shift] = c
            for i, bi in enumerate(b):
                a[shift + i] = F.sub(a[shift + i], F.mul(c, bi))
            while a and a[-1] == 0:
                a.pop()
        return Polynomial.make(F, q), Polynomial.make(F, a)

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        inv = self.field.inv(self.coeffs[-1])
        return Polynomial.make(self.field, [self.field.mul(c, inv) for c in self.coeffs])

    def gcd(self, other: "Polynomial") -> "Polynomial":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def map_coeffs(self, field: Field, fn) -> "Polynomial":
        return Polynomial.make(field, [fn(c) for c in self.coeffs])

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            cs = self.field.str_element(c)
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if i == 0:
                parts.append(cs)
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{cs}{mono}")
        return " + ".join(parts)


def embedding(small: Field, big: Field):
    """Return a function mapping encoded elements of ``small`` into ``big``.

    Prime-subfield elements share their encoding, so the map is the identity
    when ``small`` is a prime field.  Otherwise t is sent to the smallest
    root of the modulus of ``small`` inside ``big``.
    """
    if small == big or small.k == 1:
        if small.p != big.p:
            raise FieldMismatch(f"{small!r} does not embed in {big!r}")
        return lambda a: int(a)
    if small.p != big.p or big.k % small.k:
        raise FieldMismatch(f"{small!r} does not embed in {big!r}")
    mod = Polynomial.make(big, small.modulus)
    roots = np.nonzero(mod(big.elements()) == 0)[0]
    rho = int(roots[0])
    powers = [1]
    for _ in range(small.k - 1):
        powers.append(big.mul(powers[-1], rho))

    def embed(a: int) -> int:
        acc = 0
        for c, r in zip(small.coeffs(a), powers):
            acc = big.add(acc, big.mul(c, r))
        return acc

    return embed


@dataclass(frozen=True)
class RootReport:
    field: Field
    roots: tuple[tuple[int, int], ...]  # (root, multiplicity), sorted by root
    degree: int

    @property
    def splits(self) -> bool:
        return sum(m for _, m in self.roots) == self.degree

    def as_dict(self) -> dict[int, int]:
        return dict(self.roots)


def poly_roots(f: Polynomial, search_field: Field | None = None) -> RootReport:
    """All roots of ``f`` in ``search_field`` with multiplicities.

    Exhaustive evaluation over the search field followed by repeated
    synthetic division for the multiplicities.
    """
    if f.is_zero():
        raise ZeroPolynomial("poly_roots of the zero polynomial")
    F = search_field or f.field
    emb = embedding(f.field, F)
    g = f.map_coeffs(F, emb)
    values = g(F.elements())
    found = []
    for r in np.nonzero(values == 0)[0]:
        r = int(r)
        lin = Polynomial.make(F, [F.neg(r), 1])
        mult, h = 0, g
        while True:
            quo, rem = h.divmod(lin)
            if not rem.is_zero():
                break
            mult += 1
            h = quo
        found.append((r, mult))
    return RootReport(F, tuple(found), g.degree)
