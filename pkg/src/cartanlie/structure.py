"""Constants rings, centralisers, the normal form of constant-free
derivations of B_m, subalgebra closures and the centraliser witnesses
that rule out one-and-a-half generation for types S, H and K."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Any

import numpy as np

from .cartan import (
    SubalgebraHandle,
    ad_K_matrix,
    build_H,
    build_S,
    build_W,
    d_H_map,
    graded_bracket_span,
    k_degrees,
)
from .derivations import Deriv, derivation_matrix
from .dpalgebra import DPoly, Shape, ShapeMismatch
from .exactla import (
    Subspace,
    as_matrix,
    char_poly,
    eval_matrix_poly,
    is_p_polynomial,
    kernel,
    left_kernel,
    matrix_power,
    rank,
    solve,
)
from .field import HARD_BOUND, Field, Polynomial, _ppowmod, field_make

DEFAULT_MAX_EXT = 24


class TheoremViolation(AssertionError):
    """A computation contradicts a statement that is proved to hold."""


class NontrivialConstants(ValueError):
    pass


class SplitFailure(ValueError):
    def __init__(self, msg: str, needed: int | None = None):
        super().__init__(msg)
        self.needed = needed


class SplittingFieldTooSmall(SplitFailure):
    pass


class NotInOmega(ValueError):
    pass


class NoConstantFound(TheoremViolation):
    pass


class ZeroWitness(TheoremViolation):
    pass


class LemmaViolation(TheoremViolation):
    pass


class NotAnIdeal(ValueError):
    pass


class SearchExhausted(RuntimeError):
    pass


@dataclass
class Report:
    name: str
    parameters: dict[str, Any]
    status: str = "pass"  # pass | fail | skipped | theorem-violation
    evidence: dict[str, Any] = dc_field(default_factory=dict)
    witnesses: list[str] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "skipped")

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "parameters": self.parameters,
            "status": self.status,
            "evidence": self.evidence,
            "witnesses": self.witnesses,
        }


def _vec(x, dim: int | None = None) -> np.ndarray:
    if isinstance(x, (Deriv, DPoly)):
        return x.to_vector()
    v = np.asarray(x, dtype=np.int64)
    if dim is not None and v.shape != (dim,):
        raise ShapeMismatch(f"vector of shape {v.shape}, expected ({dim},)")
    return v


# ---------------------------------------------------------------------------
# constants and centralisers


def action_matrix(D: Deriv) -> np.ndarray:
    return derivation_matrix(D.shape, D.to_vector())


def constants_ring(D: Deriv) -> Subspace:
    """O^D, the kernel of D acting on O(m, n)."""
    return kernel(D.field, action_matrix(D))


def centraliser(X, V: SubalgebraHandle, within: Subspace | None = None) -> Subspace:
    """{v in within : [X, v] = 0}; `within` defaults to V itself."""
    amb = V.ambient
    x = _vec(X, amb.dim)
    W = V.basis if within is None else within
    if W.ambient_dim != amb.dim:
        raise ShapeMismatch("`within` is not in the ambient coordinates")
    if W.dim == 0:
        return W
    images = amb.table.brackets_with(x, W.basis)
    rel = left_kernel(amb.field, images)
    if rel.dim == 0:
        return Subspace.zero(amb.field, amb.dim)
    return Subspace.span(amb.field, amb.field.matmul(rel.basis, W.basis), amb.dim)


# ---------------------------------------------------------------------------
# p-polynomials and their roots


def p_poly_coefficients(chi: Polynomial) -> dict[int, int]:
    """{j: a_j} with chi = sum a_j t^(p^j); raises if chi is not a p-polynomial."""
    p = chi.field.p
    out = {}
    for i, c in enumerate(chi.coeffs):
        if not c:
            continue
        j, d = 0, 1
        while d < i:
            d *= p
            j += 1
        if d != i:
            raise TheoremViolation(f"characteristic polynomial has a term t^{i}, not a p-polynomial")
        out[j] = c
    return out


def separable_part(chi: Polynomial) -> tuple[int, Polynomial]:
    """chi = g^(p^r) with g separable; returns (r, g) over the prime field."""
    F = chi.field
    a = p_poly_coefficients(chi)
    r = min(a)
    coeffs = [0] * (F.p ** (max(a) - r) + 1)
    for j, c in a.items():
        coeffs[F.p ** (j - r)] = c
    return r, Polynomial.make(F, coeffs)


def splitting_degree(g: Polynomial, limit: int) -> int | None:
    """Least k <= limit with g | t^(p^k) - t, for separable g over F_p."""
    p = g.field.p
    mod = list(g.coeffs)
    if g.degree <= 1:
        return 1
    h = [0, 1]
    for k in range(1, limit + 1):
        h = _ppowmod(h, p, mod, p)
        if h == [0, 1]:
            return k
    return None


def max_extension_degree(p: int) -> int:
    k = 1
    while p ** (k + 1) < HARD_BOUND:
        k += 1
    return k


def additive_roots(g: Polynomial, E: Field) -> list[int]:
    """Roots in E of a p-polynomial g over F_p.

    x -> g(x) is F_p-linear on E, so the roots are the kernel of a k x k
    matrix over F_p, enumerated from its basis.
    """
    F = g.field
    p, k = E.p, E.k
    gE = Polynomial.make(E, list(g.coeffs))
    basis = [E.from_coeffs([1 if i == j else 0 for i in range(k)]) for j in range(k)]
    cols = [E.coeffs(int(gE(b))) for b in basis]
    M = np.array(cols, dtype=np.int64).T
    ker = kernel(F, M)
    roots = []
    for combo in np.ndindex(*(p,) * ker.dim):
        v = F.matmul(np.array(combo, dtype=np.int64).reshape(1, -1), ker.basis)[0] if ker.dim else np.zeros(k, int)
        roots.append(E.from_coeffs([int(c) for c in v]))
    return sorted(roots)


# ---------------------------------------------------------------------------
# regularity and the normal form


def _require_truncated(D: Deriv) -> None:
    if not D.shape.is_truncated:
        raise ShapeMismatch("this analysis runs on B_m = O(m, 1)")
    if D.field.k != 1:
        raise ShapeMismatch("derivation must be defined over the prime field")


def nilpotency_index(F: Field, M, limit: int) -> int | None:
    """Least e <= limit with M^e = 0."""
    A = as_matrix(M)
    P = np.eye(A.shape[0], dtype=np.int64)
    for e in range(1, limit + 1):
        P = F.matmul(P, A)
        if not np.any(P):
            return e
    return None


def regularity_classify(D: Deriv, max_ext: int = DEFAULT_MAX_EXT) -> tuple[str, dict[str, Any]]:
    """'regular_nilpotent', 'regular_semisimple' or 'neither', with evidence."""
    _require_truncated(D)
    F = D.field
    sh = D.shape
    N = sh.dim
    M = action_matrix(D)
    idx = nilpotency_index(F, M, N)
    if idx == N:
        P = matrix_power(F, M, N - 1)
        col = int(np.flatnonzero(np.any(P, axis=0))[0])
        return "regular_nilpotent", {
            "nilpotency_index": idx,
            "witness": str(DPoly.monomial(sh, sh.monomials[col])),
        }
    if idx is not None:
        return "neither", {"nilpotency_index": idx}
    chi = char_poly(F, M)
    r, g = separable_part(chi)
    if r > 0:
        return "neither", {"chi": str(chi), "r": r}
    k = splitting_degree(g, max_ext)
    if k is None:
        needed = splitting_degree(g, max_extension_degree(F.p))
        raise SplittingFieldTooSmall(f"chi needs an extension of degree {needed} > {max_ext}", needed)
    E = field_make(F.p, k, bound=HARD_BOUND)
    roots = additive_roots(g, E)
    if len(roots) != N:
        raise TheoremViolation(f"separable chi of degree {N} has {len(roots)} roots in its splitting field")
    return "regular_semisimple", {"split_degree": k, "eigenvalues": [E.str_element(x) for x in roots]}


@dataclass
class DecompositionResult:
    """D = N (x) id + id (x) S on B' (x) B''.

    `chain` are z_1 = 1, ..., z_{p^r} in B' with D z_k = z_{k-1}; the
    eigenvectors g_lambda span B'' and live over the splitting field.
    """

    shape: Shape
    r: int
    chi: Polynomial
    separable: Polynomial
    split_degree: int
    field: Field
    Lambda: tuple[int, ...]
    Bprime: Subspace
    Bsecond: Subspace
    chain: np.ndarray
    eigenvectors: dict[int, np.ndarray]
    nilpotent_part: np.ndarray
    semisimple_part: tuple[int, ...]
    checks: dict[str, bool]

    @property
    def reconstructed(self) -> bool:
        return self.checks.get("reconstruction", False)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def as_dict(self) -> dict[str, Any]:
        E = self.field
        return {
            "r": self.r,
            "chi": str(self.chi),
            "split_degree": self.split_degree,
            "Lambda": [E.str_element(x) for x in self.Lambda],
            "dim_Bprime": self.Bprime.dim,
            "dim_Bsecond": self.Bsecond.dim,
            "chain": [str(DPoly.from_vector(self.shape, z)) for z in self.chain],
            "checks": dict(self.checks),
        }


def decompose_derivation(D: Deriv, max_ext: int = DEFAULT_MAX_EXT) -> DecompositionResult:
    """Normal form of a derivation of B_m without non-trivial constants."""
    _require_truncated(D)
    F = D.field
    sh = D.shape
    p, m, N = F.p, sh.m, sh.dim
    M = action_matrix(D)
    consts = kernel(F, M)
    if consts.dim != 1:
        raise NontrivialConstants(f"constants ring has dimension {consts.dim}")
    chi = char_poly(F, M)
    if not is_p_polynomial(chi):
        raise TheoremViolation(f"chi = {chi} is not a p-polynomial")
    r, g = separable_part(chi)
    k = splitting_degree(g, max_ext)
    if k is None:
        needed = splitting_degree(g, max_extension_degree(p))
        raise SplitFailure(f"chi splits only over an extension of degree {needed} > {max_ext}", needed)
    E = field_make(p, k, bound=HARD_BOUND)
    Lam = additive_roots(g, E)
    checks: dict[str, bool] = {}
    checks["Lambda_size"] = len(Lam) == p ** (m - r)
    lam_set = set(Lam)
    checks["Lambda_additive"] = all(int(E.add(a, b)) in lam_set for a in Lam for b in Lam)

    # nilspace and the chain z_1 = 1, D z_k = z_{k-1}
    pr = p**r
    Mpr = matrix_power(F, M, pr)
    Bp = kernel(F, Mpr)
    checks["dim_Bprime"] = Bp.dim == pr
    chain = [DPoly.one(sh).to_vector()]
    MB = F.matmul(M, Bp.basis.T)
    for _ in range(1, Bp.dim):
        c = solve(F, MB, chain[-1])
        if c is None:
            checks["chain"] = False
            break
        chain.append(F.matmul(c.reshape(1, -1), Bp.basis)[0])
    else:
        checks["chain"] = True
    chain_arr = np.array(chain, dtype=np.int64)
    checks["chain_basis"] = rank(F, chain_arr) == pr

    # eigenvectors, one kernel per Frobenius orbit
    eig: dict[int, np.ndarray] = {}
    I = np.eye(N, dtype=np.int64)
    eig_dims_ok = True
    char_dims_ok = True
    for lam in Lam:
        if lam in eig:
            continue
        ker = kernel(E, E.sub(M, E.mul(lam, I)))
        eig_dims_ok &= ker.dim == 1
        cs = kernel(E, E.sub(Mpr, E.mul(E.pow(lam, pr), I)))
        char_dims_ok &= cs.dim == pr
        v = ker.basis[0]
        mu, w = lam, v
        while mu not in eig:
            eig[mu] = w
            mu, w = int(E.frobenius(mu)), np.asarray(E.frobenius(w))
    checks["eigenspace_dim_1"] = bool(eig_dims_ok)
    checks["characteristic_space_dim"] = bool(char_dims_ok)
    checks["g0_is_1"] = np.array_equal(eig.get(0, np.zeros(N, int)), DPoly.one(sh).to_vector())
    Bs = Subspace.span(E, np.array([eig[l] for l in Lam]), N)
    checks["dim_Bsecond"] = Bs.dim == len(Lam)
    # B'' is also ker g(D) over F_p
    checks["Bsecond_is_ker_g"] = kernel(F, eval_matrix_poly(F, g, M)).dim == len(Lam)

    # product basis z_k g_lambda and exact reconstruction of D on it
    prods, expected = [], []
    for lam in Lam:
        gl = eig[lam]
        prev = np.zeros(N, dtype=np.int64)
        for z in chain:
            zg = E.matmul(sh.mult_matrix(z), gl.reshape(-1, 1)).ravel()
            prods.append(zg)
            expected.append(E.add(E.mul(lam, zg), prev))
            prev = zg
    P = np.array(prods, dtype=np.int64)
    checks["product_basis"] = rank(E, P) == N
    DP = E.matmul(M, P.T).T
    checks["reconstruction"] = bool(np.array_equal(DP, np.array(expected, dtype=np.int64)))

    nil = np.zeros((pr, pr), dtype=np.int64)
    for i in range(1, pr):
        nil[i - 1, i] = 1
    return DecompositionResult(
        shape=sh,
        r=r,
        chi=chi,
        separable=g,
        split_degree=k,
        field=E,
        Lambda=tuple(Lam),
        Bprime=Bp,
        Bsecond=Bs,
        chain=chain_arr,
        eigenvectors=eig,
        nilpotent_part=nil,
        semisimple_part=tuple(Lam),
        checks=checks,
    )


# ---------------------------------------------------------------------------
# closures


def _absorb_blocks(V: Subspace, rows: np.ndarray, cap: int) -> tuple[Subspace, np.ndarray]:
    """Absorb many rows in slices so that most are cleared by a cheap reduction."""
    new = []
    step = max(32, 2 * (cap - V.dim))
    for s in range(0, rows.shape[0], step):
        V, fresh = V.absorb(rows[s : s + step])
        if fresh.shape[0]:
            new.append(fresh)
        if V.dim >= cap:
            break
        step = max(32, 2 * (cap - V.dim))
    frontier = np.vstack(new) if new else np.zeros((0, V.ambient_dim), dtype=np.int64)
    return V, frontier


def subalgebra_closure(generators, A: SubalgebraHandle, label: str | None = None) -> SubalgebraHandle:
    """The least bracket-closed subspace of A containing the generators."""
    amb = A.ambient
    G = as_matrix([_vec(g, amb.dim) for g in generators], amb.dim) if len(generators) else np.zeros((0, amb.dim), int)
    for g in G:
        if not A.contains(g):
            raise ValueError("generator outside the algebra")
    V = Subspace.span(amb.field, G, amb.dim)
    frontier = V.basis
    while frontier.shape[0] and V.dim < A.dim:
        prods = amb.table.brackets_with(frontier, V.basis)
        V, frontier = _absorb_blocks(V, prods, A.dim)
    if V.dim == A.dim:
        V = A.basis
    return SubalgebraHandle(amb, V, label or f"<gen in {A.label}>", verify=False)


def _sub_seed(seed: int, *keys) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFF, *[k & 0xFFFFFFFF for k in keys]])


def nongeneration_probe(
    x,
    H: SubalgebraHandle,
    samples: int,
    seed: int,
    expect_proper: bool | None = True,
    name: str = "nongeneration",
) -> Report:
    """closure({x, y}) for random y in H.  With expect_proper, an equality
    with H is a theorem violation; with expect_proper=False the report
    passes iff some pair generates (a sanity diagnostic)."""
    amb = H.ambient
    xv = _vec(x, amb.dim)
    if not np.any(xv):
        raise ValueError("x must be nonzero")
    if not H.contains(xv):
        raise ValueError("x is not in the algebra")
    rng = np.random.default_rng(seed)
    dims, equal = [], 0
    first_equal = None
    for _ in range(samples):
        y = H.random_element(rng)
        c = subalgebra_closure([xv, y], H)
        dims.append(c.dim)
        if c.dim == H.dim:
            equal += 1
            if first_equal is None:
                first_equal = amb.to_text(y)
    ev = {
        "dim_H": H.dim,
        "samples": samples,
        "closure_dim_max": max(dims) if dims else 0,
        "closure_dim_min": min(dims) if dims else 0,
        "generating_pairs": equal,
    }
    if expect_proper:
        status = "theorem-violation" if equal else "pass"
    elif expect_proper is False:
        status = "pass" if equal else "fail"
    else:
        status = "pass"
    wits = [amb.to_text(xv)] + ([first_equal] if first_equal else [])
    return Report(name, {"algebra": H.label, "seed": seed}, status, ev, wits)


# ---------------------------------------------------------------------------
# Omega and witnesses


def in_omega(v, handle: SubalgebraHandle) -> bool:
    d = handle.ambient.degrees
    return bool(np.any(np.asarray(v)[d == handle.min_degree]))


def sample_omega(handle: SubalgebraHandle, rng: np.random.Generator, tries: int = 1000) -> np.ndarray:
    """A random element with a nonzero component of the lowest degree."""
    for _ in range(tries):
        v = handle.random_element(rng)
        if in_omega(v, handle):
            return v
    raise SearchExhausted("no element of Omega found")


def _lowest_degree(D: Deriv) -> int | None:
    ds = D.degrees()
    return ds[0] if ds else None


def witness_S(D: Deriv, S1: SubalgebraHandle | None = None) -> Deriv:
    """Delta = f D with 0 != f in O^D_{>=2}: commutes with D, divergence free, in S_{>=1}."""
    sh = D.shape
    if S1 is None:
        S1 = build_S(sh).S1
    v = D.to_vector()
    if not S1.contains(v):
        raise NotInOmega("D is not in the derived algebra of S")
    if D.homogeneous_part(-1).is_zero():
        raise NotInOmega("D has no component of degree -1")
    consts = constants_ring(D)
    if consts.dim <= 1:
        raise NoConstantFound("the constants ring of D is just the scalars")
    f = None
    for row in consts.basis:
        g = row.copy()
        g[0] = 0
        if np.any(g):
            f = DPoly.from_vector(sh, g)
            break
    if f is None:
        raise NoConstantFound("no non-constant element among the constants")
    if not f.homogeneous_part(1).is_zero():
        f = f * f
    delta = f * D
    if delta.is_zero():
        raise ZeroWitness("f D vanished")
    return delta


def check_witness_S(D: Deriv, delta: Deriv, S: SubalgebraHandle | None = None) -> dict[str, bool]:
    if S is None:
        S = build_S(D.shape).S
    low = _lowest_degree(delta)
    return {
        "nonzero": not delta.is_zero(),
        "in_L_ge1": S.contains(delta.to_vector()) and low is not None and low >= 1,
        "commutes": D.bracket(delta).is_zero(),
        "divergence_free": delta.divergence().is_zero(),
    }


def witness_H(f: DPoly) -> Deriv:
    """Delta = D_H(f^3) for f without constant term and with a linear term."""
    f = f - DPoly.const(f.shape, f.constant_term())
    if f.homogeneous_part(1).is_zero():
        raise NotInOmega("D_H(f) has no component of degree -1")
    delta = d_H_map(f * f * f)
    if delta.is_zero():
        raise ZeroWitness("D_H(f^3) vanished")
    return delta


def check_witness_H(f: DPoly, delta: Deriv, H: SubalgebraHandle | None = None) -> dict[str, bool]:
    if H is None:
        H = build_H(f.shape).H
    D = d_H_map(f)
    low = _lowest_degree(delta)
    return {
        "nonzero": not delta.is_zero(),
        "in_L_ge1": H.contains(delta.to_vector()) and low is not None and low >= 1,
        "commutes": D.bracket(delta).is_zero(),
    }


def h_potential(D, H: SubalgebraHandle) -> DPoly:
    """f without constant term with D_H(f) = D."""
    sh = H.ambient.shape
    v = _vec(D, H.ambient.dim)
    cols = np.array([d_H_map(DPoly.monomial(sh, a)).to_vector() for a in sh.monomials[1:]]).T
    c = solve(H.field, cols, v)
    if c is None:
        raise NotInOmega("element is not Hamiltonian")
    return DPoly.from_vector(sh, np.concatenate([[0], c]))


def _k_ge(shape: Shape, d: int) -> np.ndarray:
    return np.flatnonzero(k_degrees(shape) >= d)


def k_centraliser(f: DPoly) -> Subspace:
    """O^{ad_K f}: everything commuting with f under the contact bracket."""
    return kernel(f.field, ad_K_matrix(f))


def witness_K(f: DPoly) -> Subspace:
    """The centraliser of f under the contact bracket inside K_{>=1}; for f
    with a nonzero constant term it has dimension at least 2."""
    sh = f.shape
    if sh.m < 3 or sh.m % 2 == 0:
        raise ShapeMismatch("contact algebras need odd m >= 3")
    if not f.constant_term():
        raise NotInOmega("f has no term of K-degree -2")
    F = f.field
    M = ad_K_matrix(f)
    idx = _k_ge(sh, 1)
    ker = kernel(F, M[:, idx])
    rows = np.zeros((ker.dim, sh.dim), dtype=np.int64)
    rows[:, idx] = ker.basis
    space = Subspace.span(F, rows, sh.dim)
    full = kernel(F, M).dim
    r = (sh.m - 1) // 2
    if full < min(2 * r + 1, sh.p):
        raise LemmaViolation(f"centraliser of dimension {full} < min(2r+1, p)")
    if space.dim < 2:
        raise LemmaViolation(f"centraliser in K_>=1 of dimension {space.dim} < 2")
    return space


def k_centraliser_diagnostics(f: DPoly) -> dict[str, Any]:
    """d, l and the Jordan profile of ad_K(f) on its nilspace.

    chi = g^(p^(|n|-d)) with g separable of degree p^d; g(ad)^(p^l) = 0 is the
    minimal such power.  Reported only, no assertions.
    """
    F = f.field
    sh = f.shape
    M = ad_K_matrix(f)
    chi = char_poly(F, M)
    r, g = separable_part(chi)
    nn = sum(sh.n)
    G = eval_matrix_poly(F, g, M)
    ell, P = 0, G
    while np.any(P) and ell <= r:
        ell += 1
        P = matrix_power(F, G, F.p**ell)
    N = sh.dim
    kdims = [0]
    Pk = np.eye(N, dtype=np.int64)
    nil_dim = F.p**r
    while kdims[-1] < nil_dim and len(kdims) <= nil_dim:
        Pk = F.matmul(Pk, M)
        kdims.append(N - rank(F, Pk))
    at_least = [kdims[i] - kdims[i - 1] for i in range(1, len(kdims))]
    sizes = []
    for i in range(len(at_least)):
        nxt = at_least[i + 1] if i + 1 < len(at_least) else 0
        sizes += [i + 1] * (at_least[i] - nxt)
    return {
        "d": nn - r,
        "l": ell,
        "nilspace_dim": kdims[-1],
        "jordan_blocks": sorted(sizes, reverse=True),
        "centraliser_dim": at_least[0] if at_least else 0,
    }


def check_witness_K(f: DPoly, space: Subspace) -> dict[str, bool]:
    sh = f.shape
    deg = k_degrees(sh)
    M = ad_K_matrix(f)
    F = f.field
    return {
        "nonzero": space.dim >= 1,
        "dim_at_least_2": space.dim >= 2,
        "in_L_ge1": not np.any(space.basis[:, deg < 1]),
        "commutes": not np.any(F.matmul(M, space.basis.T)),
    }


# ---------------------------------------------------------------------------
# the centraliser criterion


def criterion_audit(L: SubalgebraHandle, H: SubalgebraHandle, samples: int, seed: int) -> Report:
    """Check both hypotheses of the filtered non-generation criterion.

    (a) the centraliser of H in L is zero; (b) for sampled X in Omega, the
    centraliser of X meets L_{>=1}.  For each X a witness Y is chosen and
    H_X = {h in H : [Y, h] = 0}; the intersection of all H_X must contain the
    top graded component of H.
    """
    if L.ambient is not H.ambient:
        raise ShapeMismatch("L and H live in different ambients")
    amb = L.ambient
    if not H.basis.contains_space(graded_bracket_span(amb, L.grading, H.grading)):
        raise NotAnIdeal(f"{H.label} is not an ideal of {L.label}")
    C = L.basis
    for h in H.basis.basis:
        C = centraliser(h, L, within=C)
        if C.dim == 0:
            break
    ev: dict[str, Any] = {"dim_L": L.dim, "dim_H": H.dim, "centraliser_of_H": C.dim}
    rng = np.random.default_rng(seed)
    Lge1 = L.filtration(1)
    inter = H.basis
    failures = 0
    min_dim = None
    for _ in range(samples):
        X = sample_omega(H, rng)
        cent = centraliser(X, L, within=Lge1)
        min_dim = cent.dim if min_dim is None else min(min_dim, cent.dim)
        if cent.dim == 0:
            failures += 1
            continue
        Y = cent.basis[0]
        HX = centraliser(Y, H)
        if not HX.contains(X) or HX.dim == H.dim:
            failures += 1
        inter = inter & HX
    top = H.top_component()
    ev.update(
        {
            "samples": samples,
            "failures": failures,
            "min_centraliser_ge1_dim": min_dim if min_dim is not None else 0,
            "intersection_dim": inter.dim,
            "top_degree": H.top_degree,
            "top_dim": top.dim,
            "top_in_intersection": inter.contains_space(top),
        }
    )
    ok = C.dim == 0 and failures == 0 and ev["top_in_intersection"]
    status = "pass" if ok else "theorem-violation"
    return Report("criterion_audit", {"L": L.label, "H": H.label, "seed": seed}, status, ev)


def remark_W_probe(shape: Shape, samples: int = 20, seed: int = 0) -> tuple[np.ndarray | None, Report]:
    """Look for X in W_m with ad X injective on L_{>=0}."""
    if not shape.is_truncated:
        raise ShapeMismatch("the probe runs on W_m = W(m, 1)")
    Wh = build_W(shape)
    W = Wh.ambient
    F = W.field
    p, m = shape.p, shape.m
    Lge0 = Wh.filtration(0)

    def injective(x) -> bool:
        return rank(F, W.table.brackets_with(x, Lge0.basis)) == Lge0.dim

    # d_1 + x_1^(p-1) d_2 + x_1^(p-1) x_2^(p-1) d_3 + ...
    cand = Deriv.partial(shape, 1)
    for k in range(2, m + 1):
        a = tuple(p - 1 if i < k - 1 else 0 for i in range(m))
        cand = cand + Deriv.basis(shape, a, k)
    tried = 1
    found = cand.to_vector() if injective(cand.to_vector()) else None
    source = "candidate"
    rng = np.random.default_rng(seed)
    while found is None and tried <= samples:
        x = Wh.random_element(rng)
        tried += 1
        if injective(x):
            found, source = x, "random"
    if found is None:
        return None, Report("remark_W_probe", {"m": m, "p": p}, "fail", {"tried": tried})
    M = derivation_matrix(shape, found)
    ev = {
        "tried": tried,
        "source": source,
        "dim_L_ge0": Lge0.dim,
        "nilpotency_index_on_B": nilpotency_index(F, M, shape.dim) or 0,
        "regular_nilpotent": nilpotency_index(F, M, shape.dim) == shape.dim,
    }
    return found, Report("remark_W_probe", {"m": m, "p": p, "seed": seed}, "pass", ev, [W.to_text(found)])
