"""The divided power algebra O(m, n) and the truncated polynomial ring B_m.

O(m, n) has basis x^(a) for 0 <= a <= tau with tau_i = p^(n_i) - 1 and product
x^(a) x^(b) = C(a+b, a) x^(a+b).  Variables and partial derivatives are
indexed from 1, as in the usual notation x_1, ..., x_m and d_1, ..., d_m.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
import itertools
import math
import re

import numpy as np

from .field import Field, field_make


class IndexOutOfRange(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


class BadIndex(ValueError):
    pass


class NotInvertible(ValueError):
    pass


class ParseError(ValueError):
    pass


MultiIndex = tuple[int, ...]


def lucas_binom(a: int, b: int, p: int) -> int:
    """C(a, b) mod p digit by digit."""
    if b < 0 or b > a:
        return 0
    out = 1
    while a or b:
        ai, bi = a % p, b % p
        if bi > ai:
            return 0
        out = out * math.comb(ai, bi) % p
        a //= p
        b //= p
    return out


def binom_mod_p(a: MultiIndex, b: MultiIndex, p: int) -> int:
    out = 1
    for ai, bi in zip(a, b):
        out = out * lucas_binom(ai, bi, p) % p
        if not out:
            return 0
    return out


@dataclass(frozen=True)
class Shape:
    """The pair (m, n) over a field of characteristic p."""

    p: int
    n: tuple[int, ...]
    field: Field | None = None

    def __post_init__(self):
        if not self.n or any(int(x) <= 0 for x in self.n):
            raise ValueError(f"n must be a nonempty tuple of positive integers, got {self.n}")
        object.__setattr__(self, "n", tuple(int(x) for x in self.n))
        if self.field is None:
            object.__setattr__(self, "field", field_make(self.p))
        elif self.field.p != self.p:
            raise ValueError("field characteristic differs from p")

    @classmethod
    def make(cls, p: int, n, field: Field | None = None) -> "Shape":
        if isinstance(n, int):
            n = (n,)
        return cls(p, tuple(n), field)

    @classmethod
    def truncated(cls, p: int, m: int, field: Field | None = None) -> "Shape":
        """Shape of B_m = O(m, 1)."""
        return cls(p, (1,) * m, field)

    def with_field(self, field: Field) -> "Shape":
        return Shape(self.p, self.n, field)

    @property
    def m(self) -> int:
        return len(self.n)

    @property
    def tau(self) -> MultiIndex:
        return tuple(self.p**ni - 1 for ni in self.n)

    @property
    def dim(self) -> int:
        return self.p ** sum(self.n)

    @property
    def is_truncated(self) -> bool:
        return all(ni == 1 for ni in self.n)

    def __str__(self) -> str:
        return f"O({self.m},({','.join(map(str, self.n))})) over {self.field!r}"

    @cached_property
    def monomials(self) -> tuple[MultiIndex, ...]:
        return tuple(itertools.product(*(range(t + 1) for t in self.tau)))

    @cached_property
    def index(self) -> dict[MultiIndex, int]:
        return {a: i for i, a in enumerate(self.monomials)}

    @cached_property
    def exponents(self) -> np.ndarray:
        return np.array(self.monomials, dtype=np.int64).reshape(-1, self.m)

    @cached_property
    def degrees(self) -> np.ndarray:
        return self.exponents.sum(axis=1)

    @cached_property
    def _binom_table(self) -> np.ndarray:
        top = 2 * max(self.tau) + 1
        return np.array([[lucas_binom(a, b, self.p) for b in range(top)] for a in range(top)], dtype=np.int64)

    def check_index(self, a: MultiIndex) -> MultiIndex:
        a = tuple(int(x) for x in a)
        if len(a) != self.m or any(x < 0 or x > t for x, t in zip(a, self.tau)):
            raise IndexOutOfRange(f"{a} outside 0..{self.tau}")
        return a

    def product_coefficient(self, a: MultiIndex, b: MultiIndex) -> tuple[MultiIndex, int]:
        """x^(a) x^(b) = c x^(a+b); c is 0 when a+b leaves 0..tau."""
        g = tuple(x + y for x, y in zip(a, b))
        T = self._binom_table
        c = 1
        for gi, ai in zip(g, a):
            c = c * int(T[gi, ai]) % self.p
        if any(gi > ti for gi, ti in zip(g, self.tau)):
            # outside the spanning set the binomial must already vanish
            assert c == 0, f"nonzero coefficient {c} for {a} * {b} outside tau"
        return g, c

    @cached_property
    def mult_table(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """COO arrays (I, J, K, C): x^(I) x^(J) = C x^(K), nonzero entries only."""
        E = self.exponents
        N = len(E)
        G = E[:, None, :] + E[None, :, :]
        inside = np.all(G <= np.array(self.tau), axis=2)
        T = self._binom_table
        C = np.ones((N, N), dtype=np.int64)
        for i in range(self.m):
            C = C * T[G[:, :, i], np.broadcast_to(E[:, None, i], (N, N))] % self.p
        assert not np.any(C[~inside]), "binomial bookkeeping: product outside tau is nonzero"
        I, J = np.nonzero(inside & (C != 0))
        strides = np.array([math.prod(t + 1 for t in self.tau[i + 1 :]) for i in range(self.m)], dtype=np.int64)
        K = (G[I, J] * strides).sum(axis=1)
        return I, J, K, C[I, J]

    @cached_property
    def partial_maps(self) -> tuple[np.ndarray, ...]:
        """For each variable k: source indices and target indices of d_k."""
        out = []
        for k in range(self.m):
            src, dst = [], []
            for i, a in enumerate(self.monomials):
                if a[k]:
                    b = a[:k] + (a[k] - 1,) + a[k + 1 :]
                    src.append(i)
                    dst.append(self.index[b])
            out.append((np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64)))
        return tuple(out)

    def vec_mul(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Product of coordinate vectors (prime or extension field)."""
        I, J, K, C = self.mult_table
        F = self.field
        vals = F.mul(F.mul(u[I], v[J]), C)
        out = np.zeros(self.dim, dtype=np.int64)
        if F.k == 1:
            np.add.at(out, K, vals)
            return out % F.p
        for k, val in zip(K, vals):
            out[k] = F.add(out[k], val)
        return out

    def mult_matrix(self, f: np.ndarray) -> np.ndarray:
        """Matrix of multiplication by f (columns = images of basis monomials)."""
        I, J, K, C = self.mult_table
        F = self.field
        M = np.zeros((self.dim, self.dim), dtype=np.int64)
        vals = F.mul(np.asarray(f, dtype=np.int64)[I], C)
        if F.k == 1:
            np.add.at(M, (K, J), vals)
            return M % F.p
        for k, j, val in zip(K, J, vals):
            M[k, j] = F.add(M[k, j], val)
        return M

    def partial_matrix(self, k: int) -> np.ndarray:
        src, dst = self.partial_maps[k - 1]
        M = np.zeros((self.dim, self.dim), dtype=np.int64)
        M[dst, src] = 1
        return M


class DPoly:
    """An element of O(m, n): a sparse map multi-index -> nonzero coefficient.

    Treated as immutable.
    """

    __slots__ = ("shape", "terms")

    def __init__(self, shape: Shape, terms: dict[MultiIndex, int] | None = None):
        self.shape = shape
        self.terms = {a: c for a, c in (terms or {}).items() if c}

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, shape: Shape) -> "DPoly":
        return cls(shape)

    @classmethod
    def one(cls, shape: Shape) -> "DPoly":
        return cls.const(shape, 1)

    @classmethod
    def const(cls, shape: Shape, c: int) -> "DPoly":
        return cls(shape, {(0,) * shape.m: shape.field.from_int(c) if shape.field.k == 1 else c})

    @classmethod
    def monomial(cls, shape: Shape, a: MultiIndex, c: int = 1) -> "DPoly":
        return cls(shape, {shape.check_index(a): c % shape.p if shape.field.k == 1 else c})

    @classmethod
    def var(cls, shape: Shape, k: int, power: int = 1) -> "DPoly":
        """x_k^(power)."""
        if not 1 <= k <= shape.m:
            raise BadIndex(f"variable {k} not in 1..{shape.m}")
        a = [0] * shape.m
        a[k - 1] = power
        return cls.monomial(shape, tuple(a))

    @classmethod
    def from_vector(cls, shape: Shape, v) -> "DPoly":
        v = np.asarray(v, dtype=np.int64)
        mons = shape.monomials
        return cls(shape, {mons[i]: int(v[i]) for i in np.flatnonzero(v)})

    @classmethod
    def random(cls, shape: Shape, rng: np.random.Generator, density: float = 1.0) -> "DPoly":
        q = shape.field.q
        v = rng.integers(0, q, size=shape.dim)
        if density < 1.0:
            v = v * (rng.random(shape.dim) < density)
        return cls.from_vector(shape, v)

    # -- basic protocol ---------------------------------------------------
    @property
    def field(self) -> Field:
        return self.shape.field

    def to_vector(self) -> np.ndarray:
        v = np.zeros(self.shape.dim, dtype=np.int64)
        idx = self.shape.index
        for a, c in self.terms.items():
            v[idx[a]] = c
        return v

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, DPoly):
            return self.shape == other.shape and self.terms == other.terms
        if isinstance(other, int):
            return self == DPoly.const(self.shape, other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.shape, frozenset(self.terms.items())))

    def _same(self, other: "DPoly") -> None:
        if not isinstance(other, DPoly) or other.shape != self.shape:
            raise ShapeMismatch(f"{self.shape} vs {getattr(other, 'shape', other)}")

    def __add__(self, other):
        if isinstance(other, int):
            other = DPoly.const(self.shape, other)
        self._same(other)
        F = self.field
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = F.add(out.get(a, 0), c)
        return DPoly(self.shape, out)

    __radd__ = __add__

    def __neg__(self) -> "DPoly":
        F = self.field
        return DPoly(self.shape, {a: F.neg(c) for a, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = DPoly.const(self.shape, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> "DPoly":
        F = self.field
        c = F.from_int(c) if F.k == 1 else c
        return DPoly(self.shape, {a: F.mul(v, c) for a, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        if not isinstance(other, DPoly):
            return NotImplemented
        self._same(other)
        F = self.field
        sh = self.shape
        if F.k == 1 and len(self.terms) * len(other.terms) > 256:
            return DPoly.from_vector(sh, sh.vec_mul(self.to_vector(), other.to_vector()))
        out: dict[MultiIndex, int] = {}
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                g, k = sh.product_coefficient(a, b)
                if k:
                    out[g] = F.add(out.get(g, 0), F.mul(F.mul(c, d), k))
        return DPoly(sh, out)

    def __rmul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        return NotImplemented

    def __pow__(self, e: int) -> "DPoly":
        return dp_power(self, e)

    def partial(self, k: int) -> "DPoly":
        return dp_partial(self, k)

    # -- gradings ---------------------------------------------------------
    def grade_split(self) -> dict[int, "DPoly"]:
        parts: dict[int, dict] = {}
        for a, c in self.terms.items():
            parts.setdefault(sum(a), {})[a] = c
        return {d: DPoly(self.shape, parts[d]) for d in sorted(parts)}

    def homogeneous_part(self, d: int) -> "DPoly":
        return DPoly(self.shape, {a: c for a, c in self.terms.items() if sum(a) == d})

    def part_at_least(self, d: int) -> "DPoly":
        return DPoly(self.shape, {a: c for a, c in self.terms.items() if sum(a) >= d})

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.shape.m, 0)

    def lowest_degree(self) -> int | None:
        return min((sum(a) for a in self.terms), default=None)

    def invert(self) -> "DPoly":
        return dp_invert(self)

    # -- text ---------------------------------------------------------------
    def __str__(self) -> str:
        return format_dpoly(self)

    def __repr__(self) -> str:
        return f"DPoly({self})"


def dp_make(shape: Shape, terms) -> DPoly:
    """Canonical DPoly from (multi-index, coefficient) pairs; like terms merge."""
    F = shape.field
    out: dict[MultiIndex, int] = {}
    for a, c in terms:
        a = shape.check_index(a)
        c = F.from_int(c) if F.k == 1 else int(c)
        out[a] = F.add(out.get(a, 0), c)
    return DPoly(shape, out)


def dp_multiply(f: DPoly, g: DPoly) -> DPoly:
    return f * g


def dp_partial(f: DPoly, k: int) -> DPoly:
    m = f.shape.m
    if not 1 <= k <= m:
        raise BadIndex(f"partial d_{k} not in 1..{m}")
    i = k - 1
    out = {}
    for a, c in f.terms.items():
        if a[i]:
            out[a[:i] + (a[i] - 1,) + a[i + 1 :]] = c
    return DPoly(f.shape, out)


def dp_power(f: DPoly, e: int) -> DPoly:
    if e < 0:
        raise ValueError("negative exponent")
    out = DPoly.one(f.shape)
    for _ in range(e):
        out = out * f
    return out


def grade_split(f: DPoly) -> dict[int, DPoly]:
    return f.grade_split()


def dp_invert(f: DPoly) -> DPoly:
    """Inverse through the geometric series of the nilpotent part."""
    c = f.constant_term()
    if not c:
        raise NotInvertible("constant term is zero")
    F = f.field
    cinv = F.inv(c)
    nil = f.scale(cinv) - DPoly.one(f.shape)  # f = c (1 + nil)
    out = DPoly.one(f.shape)
    power = DPoly.one(f.shape)
    while True:
        power = -(power * nil)
        if power.is_zero():
            break
        out = out + power
    return out.scale(cinv)


# ---------------------------------------------------------------------------
# text grammar:  poly := term ('+' term)*
#                term := scalar '*'? monomial | scalar | monomial
#                monomial := 'x[' int (',' int)* ']'

_SCALAR_EXT = re.compile(r"^\[([^\]]*)\]")
_INT = re.compile(r"^-?\d+")
_MONO = re.compile(r"^x\[\s*(\d+(?:\s*,\s*\d+)*)\s*\]")


def split_top_level(text: str, sep: str = "+") -> list[str]:
    """Split on ``sep`` outside brackets/parentheses; binary '-' becomes '+-'."""
    s = text.strip()
    chars = []
    depth = 0
    prev = ""
    for ch in s:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == "-" and depth == 0 and prev not in ("", "+", "*", "(") and sep == "+":
            chars.append("\0")
        if ch == sep and depth == 0:
            chars.append("\0")
        else:
            chars.append(ch)
        if not ch.isspace():
            prev = ch
    return [part.strip() for part in "".join(chars).split("\0")]


def parse_scalar(field: Field, text: str) -> tuple[int, str]:
    """Leading scalar of ``text``: an integer or a bracketed t-polynomial."""
    text = text.strip()
    neg = False
    if text.startswith("-") and text[1:2] == "[":
        neg, text = True, text[1:]
    m = _SCALAR_EXT.match(text)
    if m:
        value = _parse_tpoly(field, m.group(1))
        rest = text[m.end() :]
        return (field.neg(value) if neg else value), rest
    m = _INT.match(text)
    if m:
        return field.from_int(int(m.group(0))), text[m.end() :]
    if text.startswith("-"):
        return field.neg(1), text[1:]
    return 1, text


def _parse_tpoly(field: Field, text: str) -> int:
    cs = [0] * max(field.k, 1)
    body = text.replace(" ", "")
    if not body:
        raise ParseError("empty bracketed scalar")
    for part in split_top_level(body):
        if not part:
            continue
        m = re.fullmatch(r"(-?\d*)(t(?:\^(\d+))?)?", part)
        if not m or (not m.group(1) and not m.group(2)) or m.group(1) == "-" and not m.group(2):
            raise ParseError(f"bad scalar term {part!r}")
        coef = m.group(1)
        c = 1 if coef in ("", "+") else (-1 if coef == "-" else int(coef))
        e = 0 if not m.group(2) else int(m.group(3) or 1)
        while len(cs) <= e:
            cs.append(0)
        cs[e] += c
    return field.from_coeffs(cs)


def parse_term(shape: Shape, text: str) -> DPoly:
    F = shape.field
    t = text.strip()
    if not t:
        raise ParseError("empty term")
    c, rest = parse_scalar(F, t)
    rest = rest.strip()
    if rest.startswith("*"):
        rest = rest[1:].strip()
    if not rest:
        if t.strip() in ("-",):
            raise ParseError(f"bad term {text!r}")
        return DPoly(shape, {(0,) * shape.m: c})
    m = _MONO.match(rest)
    if not m or rest[m.end() :].strip():
        raise ParseError(f"bad term {text!r}")
    a = tuple(int(x) for x in m.group(1).split(","))
    if len(a) != shape.m:
        raise ParseError(f"monomial {rest!r} needs {shape.m} indices")
    try:
        a = shape.check_index(a)
    except IndexOutOfRange as exc:
        raise ParseError(str(exc)) from exc
    return DPoly(shape, {a: c})


def parse_dpoly(shape: Shape, text: str) -> DPoly:
    text = text.strip()
    if text.startswith("(") and text.endswith(")") and _balanced(text[1:-1]):
        text = text[1:-1]
    out = DPoly.zero(shape)
    for part in split_top_level(text):
        out = out + parse_term(shape, part)
    return out


def _balanced(s: str) -> bool:
    depth = 0
    for ch in s:
        depth += ch == "("
        depth -= ch == ")"
        if depth < 0:
            return False
    return depth == 0


def format_dpoly(f: DPoly) -> str:
    if f.is_zero():
        return "0"
    F = f.field
    parts = []
    for a in sorted(f.terms):
        c = f.terms[a]
        cs = F.str_element(c)
        if not any(a):
            parts.append(cs)
            continue
        mono = "x[" + ",".join(map(str, a)) + "]"
        parts.append(mono if c == 1 else f"{cs}*{mono}")
    return " + ".join(parts)
