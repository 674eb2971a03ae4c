"""Verification suites.  Each suite returns a list of Report records; the
CLI `verify` command and the acceptance tests both run these."""

from __future__ import annotations

from dataclasses import dataclass, field
import itertools
import zlib

import numpy as np

from .cartan import (
    build_H,
    build_K,
    build_S,
    build_W,
    contact_algebra,
    contact_bracket,
    d_K_map,
    k_degrees,
)
from .derivations import SigmaIso, WAlgebra, derivation_matrix, dim_cap, w_algebra
from .dpalgebra import DPoly, Shape
from .exactla import Subspace, char_poly, kernel
from .field import BoundExceeded, Field, field_make
from .structure import (
    DEFAULT_MAX_EXT,
    Report,
    SplitFailure,
    TheoremViolation,
    centraliser,
    check_witness_H,
    check_witness_K,
    check_witness_S,
    constants_ring,
    criterion_audit,
    decompose_derivation,
    h_potential,
    nongeneration_probe,
    remark_W_probe,
    sample_omega,
    witness_H,
    witness_K,
    witness_S,
)
from .derivations import Deriv


@dataclass
class SuiteConfig:
    p: int = 5
    seed: int = 0
    samples: int | None = None  # overrides every per-suite default when set
    max_ext: int = DEFAULT_MAX_EXT
    kind: str | None = None  # restrict to one type when set
    m: int | None = None  # restrict to shapes with m variables when set
    n: tuple[int, ...] | None = None  # restrict to one shape when set
    extra: dict = field(default_factory=dict)

    @property
    def field(self) -> Field:
        return field_make(self.p)

    def shape(self, n) -> Shape:
        return Shape.make(self.p, tuple(n), self.field)

    def count(self, default: int) -> int:
        return default if self.samples is None else self.samples

    def rng(self, *keys) -> np.random.Generator:
        subs = [zlib.crc32(str(k).encode()) for k in keys]
        return np.random.default_rng([self.seed & 0xFFFFFFFF, *subs])

    def shapes(self, kind: str, defaults: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
        if self.kind is not None and self.kind != kind:
            return []
        if self.n is not None:
            return [self.n]
        if self.m is not None:
            return [n for n in defaults if len(n) == self.m] or [(1,) * self.m]
        return defaults


def _shape_label(kind: str, n) -> str:
    return f"{kind}({len(n)},({','.join(map(str, n))}))"


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


# ---------------------------------------------------------------------------
# 1. Jacobi and anticommutativity


def _jacobi_report(W: WAlgebra, X, Y, Z, label: str, mode: str, seed: int) -> Report:
    T = W.table
    J = T.jacobiator(X, Y, Z)
    anti = W.field.add(T.bracket_pairs(X, Y), T.bracket_pairs(Y, X))
    jf = int(np.count_nonzero(np.any(J, axis=1)))
    af = int(np.count_nonzero(np.any(anti, axis=1)))
    ev = {"dim": W.dim, "triples": int(len(X)), "jacobi_failures": jf, "anticommutativity_failures": af}
    return Report("jacobi", {"algebra": label, "mode": mode, "seed": seed}, _status(jf == 0 and af == 0), ev)


def suite_jacobi(cfg: SuiteConfig) -> list[Report]:
    out = []
    for n in cfg.shapes("W", [(1,), (2,), (1, 1), (1, 1, 1)]):
        sh = cfg.shape(n)
        if len(n) * sh.dim > dim_cap():
            out.append(Report("jacobi", {"algebra": _shape_label("W", n)}, "skipped", {"reason": "dim cap"}))
            continue
        W = w_algebra(sh)
        if W.dim <= 25:
            idx = np.array(list(itertools.product(range(W.dim), repeat=3)))
            E = np.eye(W.dim, dtype=np.int64)
            rep = _jacobi_report(W, E[idx[:, 0]], E[idx[:, 1]], E[idx[:, 2]], _shape_label("W", n), "exhaustive", cfg.seed)
            # grading: [W_a, W_b] lies in W_{a+b}
            deg = W.degrees
            B = W.table.bracket_pairs(E[idx[:, 0]], E[idx[:, 1]])
            target = deg[idx[:, 0]] + deg[idx[:, 1]]
            bad = int(np.count_nonzero(np.any((B != 0) & (deg[None, :] != target[:, None]), axis=1)))
            rep.evidence["grading_failures"] = bad
            if bad:
                rep.status = "fail"
            out.append(rep)
        else:
            rng = cfg.rng("jacobi", n)
            k = cfg.count(10_000)
            X, Y, Z = (rng.integers(0, cfg.p, size=(k, W.dim)) for _ in range(3))
            out.append(_jacobi_report(W, X, Y, Z, _shape_label("W", n), "random", cfg.seed))
    return out


# ---------------------------------------------------------------------------
# 2. divergence identities


def suite_divergence(cfg: SuiteConfig) -> list[Report]:
    out = []
    for n in cfg.shapes("W", [(1, 1), (2,)]):
        sh = cfg.shape(n)
        rng = cfg.rng("divergence", n)
        k = cfg.count(1000)
        f1 = f2 = 0
        for _ in range(k):
            f = DPoly.random(sh, rng)
            D, E = Deriv.random(sh, rng), Deriv.random(sh, rng)
            if (f * D).divergence() != f * D.divergence() + D(f):
                f1 += 1
            if D.bracket(E).divergence() != D(E.divergence()) - E(D.divergence()):
                f2 += 1
        ev = {"samples": k, "div_fD_failures": f1, "div_bracket_failures": f2}
        out.append(Report("divergence", {"algebra": _shape_label("W", n), "seed": cfg.seed}, _status(f1 == f2 == 0), ev))
    return out


# ---------------------------------------------------------------------------
# 3. the embedding into W(|n|, 1)


def suite_embedding(cfg: SuiteConfig) -> list[Report]:
    out = []
    for n in cfg.shapes("W", [(2,), (1, 2)]):
        sh = cfg.shape(n)
        if sh.is_truncated:
            continue
        sigma = SigmaIso(sh)
        Ws, Wt = w_algebra(sh), w_algebra(sigma.target)
        div_fail = 0
        for k in range(1, sh.m + 1):
            for a in sh.monomials:
                D = Deriv.basis(sh, a, k)
                if sigma.iota(D).divergence() != sigma(D.divergence()):
                    div_fail += 1
        rng = cfg.rng("embedding", n)
        k = cfg.count(500)
        lie_fail = 0
        for _ in range(k):
            D, E = Deriv.random(sh, rng), Deriv.random(sh, rng)
            left = sigma.iota(Ws.element(Ws.bracket(D.to_vector(), E.to_vector()))).to_vector()
            right = Wt.bracket(sigma.iota(D).to_vector(), sigma.iota(E).to_vector())
            if not np.array_equal(left, right):
                lie_fail += 1
        ev = {"basis_size": Ws.dim, "div_failures": div_fail, "pairs": k, "lie_failures": lie_fail}
        out.append(
            Report("embedding", {"algebra": _shape_label("W", n), "seed": cfg.seed}, _status(div_fail == lie_fail == 0), ev)
        )
    return out


# ---------------------------------------------------------------------------
# 4. dimensions


def suite_dimensions(cfg: SuiteConfig) -> list[Report]:
    out = []
    p = cfg.p
    for n in cfg.shapes("W", [(1,), (2,), (1, 1), (1, 2), (1, 1, 1)]):
        sh = cfg.shape(n)
        W = build_W(sh)
        ev = {
            "dim_O": sh.dim,
            "expected_dim_O": p ** sum(n),
            "dim_W": W.dim,
            "expected_dim_W": len(n) * p ** sum(n),
            "top_degree_dim": W.top_component().dim,
            "bottom_degree_dim": W.component(-1).dim,
        }
        ok = (
            ev["dim_O"] == ev["expected_dim_O"]
            and ev["dim_W"] == ev["expected_dim_W"]
            and ev["top_degree_dim"] == ev["bottom_degree_dim"] == len(n)
        )
        out.append(Report("dimensions", {"algebra": _shape_label("W", n)}, _status(ok), ev))
    for n in cfg.shapes("S", [(1, 1), (1, 1, 1)]):
        fam = build_S(cfg.shape(n))
        ev = {"dim_S": fam.S.dim, "dim_S1": fam.S1.dim, "dim_CS": fam.CS.dim, "codim_S1_in_S": fam.S.dim - fam.S1.dim}
        out.append(Report("dimensions", {"algebra": _shape_label("S", n)}, _status(ev["codim_S1_in_S"] == len(n)), ev))
    for n in cfg.shapes("H", [(1, 1)]):
        fam = build_H(cfg.shape(n))
        ev = {"dim_H": fam.H.dim, "dim_H2": fam.H2.dim, "expected_dim_H2": p ** sum(n) - 2}
        out.append(Report("dimensions", {"algebra": _shape_label("H", n)}, _status(ev["dim_H2"] == ev["expected_dim_H2"]), ev))
    for n in cfg.shapes("K", [(1, 1, 1), (1,) * 7]):
        sh = cfg.shape(n)
        params = {"algebra": _shape_label("K", n)}
        if sh.dim > dim_cap():
            out.append(Report("dimensions", params, "skipped", {"reason": f"dim {sh.dim} above cap {dim_cap()}"}))
            continue
        fam = build_K(sh)
        expected = 1 if (len(n) + 3) % p == 0 else 0
        ev = {"dim_K": fam.K.dim, "dim_K1": fam.K1.dim, "codim_K1_in_K": fam.K.dim - fam.K1.dim, "expected_codim": expected}
        out.append(Report("dimensions", params, _status(ev["codim_K1_in_K"] == expected and fam.K.dim == sh.dim), ev))
    return out


# ---------------------------------------------------------------------------
# 5. centraliser law and the normal form


def _constant_free_samples(cfg: SuiteConfig, n, k: int) -> tuple[list[Deriv], list[Deriv]]:
    """k derivations with constants F, plus the rejected draws."""
    sh = cfg.shape(n)
    rng = cfg.rng("constant-free", n)
    good, rejected = [], []
    while len(good) < k and len(rejected) < 50 * k:
        D = Deriv.random(sh, rng)
        (good if constants_ring(D).dim == 1 else rejected).append(D)
    return good, rejected


def suite_centraliser(cfg: SuiteConfig) -> list[Report]:
    out = []
    for n in cfg.shapes("W", [(1,), (1, 1)]):
        sh = cfg.shape(n)
        if not sh.is_truncated:
            continue
        Wh = build_W(sh)
        m = sh.m
        good, rejected = _constant_free_samples(cfg, n, cfg.count(100))
        dims = [int(centraliser(D.to_vector(), Wh).dim) for D in good]
        law_fail = sum(1 for d in dims if d != m)
        # contrapositive: a centraliser larger than m forces constants beyond F
        contra_fail = contra_hits = 0
        for D in good + rejected[:50]:
            if centraliser(D.to_vector(), Wh).dim > m:
                contra_hits += 1
                if constants_ring(D).dim <= 1:
                    contra_fail += 1
        ev = {
            "samples": len(good),
            "law_failures": law_fail,
            "centraliser_dims": sorted(set(dims)),
            "contrapositive_checked": len(good) + min(len(rejected), 50),
            "contrapositive_large_centralisers": contra_hits,
            "contrapositive_failures": contra_fail,
        }
        ok = law_fail == 0 and contra_fail == 0 and len(good) == cfg.count(100)
        out.append(Report("centraliser", {"algebra": _shape_label("W", n), "seed": cfg.seed}, _status(ok), ev))
    return out


def suite_decomposition(cfg: SuiteConfig) -> list[Report]:
    out = []
    for n in cfg.shapes("W", [(1,), (1, 1)]):
        sh = cfg.shape(n)
        if not sh.is_truncated:
            continue
        good, _ = _constant_free_samples(cfg, n, cfg.count(100))
        failures, split_fail, violations = 0, 0, 0
        degrees, rs = set(), set()
        first_bad = None
        for D in good:
            try:
                R = decompose_derivation(D, cfg.max_ext)
            except SplitFailure:
                split_fail += 1
                continue
            except TheoremViolation:
                violations += 1
                continue
            degrees.add(R.split_degree)
            rs.add(R.r)
            if not R.ok:
                failures += 1
                first_bad = first_bad or str(D)
        ev = {
            "samples": len(good),
            "failures": failures,
            "split_failures": split_fail,
            "split_degrees": sorted(degrees),
            "r_values": sorted(rs),
        }
        status = "theorem-violation" if violations else _status(failures == 0 and split_fail == 0)
        out.append(
            Report("decomposition", {"algebra": _shape_label("W", n), "seed": cfg.seed, "max_ext": cfg.max_ext}, status, ev,
                   [first_bad] if first_bad else [])
        )
    return out


# ---------------------------------------------------------------------------
# 6. contact algebra


def suite_contact(cfg: SuiteConfig) -> list[Report]:
    out = []
    for n in cfg.shapes("K", [(1, 1, 1)]):
        sh = cfg.shape(n)
        params = {"algebra": _shape_label("K", n), "seed": cfg.seed}
        if len(n) * sh.dim > dim_cap():
            out.append(Report("contact", params, "skipped", {"reason": "dim cap"}))
            continue
        F = sh.field
        C = contact_algebra(sh)
        W = w_algebra(sh)
        DK = np.array([d_K_map(DPoly.monomial(sh, a)).to_vector() for a in sh.monomials]).T
        rng = cfg.rng("contact", n)
        ev = {}

        k = cfg.count(500)
        f = rng.integers(0, cfg.p, size=(k, sh.dim))
        g = rng.integers(0, cfg.p, size=(k, sh.dim))
        lhs = W.table.bracket_pairs(F.matmul(f, DK.T), F.matmul(g, DK.T))
        rhs = F.matmul(C.table.bracket_pairs(f, g), DK.T)
        ev["morphism_pairs"] = k
        ev["morphism_failures"] = int(np.count_nonzero(np.any(lhs != rhs, axis=1)))
        # the table agrees with the closed formula on a few pairs
        ev["formula_failures"] = sum(
            1
            for i in range(min(k, 20))
            if not np.array_equal(
                contact_bracket(C.element(f[i]), C.element(g[i])).to_vector(), C.table.bracket(f[i], g[i])
            )
        )

        k = cfg.count(200)
        conj_fail = 0
        for _ in range(k):
            fv = rng.integers(0, cfg.p, size=sh.dim)
            mu = sh.mult_matrix(fv)
            adk = C.ad(fv)
            dk = derivation_matrix(sh, F.matmul(DK, fv.reshape(-1, 1)).ravel())
            if not np.array_equal(F.matmul(adk, mu), F.matmul(mu, dk)):
                conj_fail += 1
        ev["conjugation_samples"] = k
        ev["conjugation_failures"] = conj_fail

        k = cfg.count(50)
        cp_fail = tr_fail = 0
        for _ in range(k):
            fv = rng.integers(0, cfg.p, size=sh.dim)
            fv[0] = rng.integers(1, cfg.p)
            adk = C.ad(fv)
            dk = derivation_matrix(sh, F.matmul(DK, fv.reshape(-1, 1)).ravel())
            if char_poly(F, adk) != char_poly(F, dk):
                cp_fail += 1
            mu = sh.mult_matrix(fv)
            ca, cd = kernel(F, adk), kernel(F, dk)
            moved = Subspace.span(F, F.matmul(mu, cd.basis.T).T, sh.dim) if cd.dim else Subspace.zero(F, sh.dim)
            if not ca.equals(moved):
                tr_fail += 1
        ev["invertible_samples"] = k
        ev["charpoly_failures"] = cp_fail
        ev["transport_failures"] = tr_fail

        K = build_K(sh)
        k = cfg.count(50)
        bound_fail = 0
        min_full = min_ge1 = None
        r = (sh.m - 1) // 2
        for _ in range(k):
            fv = sample_omega(K.K1, rng)
            fpoly = C.element(fv)
            try:
                space = witness_K(fpoly)
            except TheoremViolation:
                bound_fail += 1
                continue
            full = kernel(F, C.ad(fv)).dim
            min_full = full if min_full is None else min(min_full, full)
            min_ge1 = space.dim if min_ge1 is None else min(min_ge1, space.dim)
        ev["omega_samples"] = k
        ev["omega_failures"] = bound_fail
        ev["min_centraliser_dim"] = min_full or 0
        ev["min_centraliser_ge1_dim"] = min_ge1 or 0
        ev["centraliser_bound"] = min(2 * r + 1, cfg.p)

        # K_i K_j lies in K_{i+j+2}, exhaustively on monomials
        I, J, Kk, _ = sh.mult_table
        kd = k_degrees(sh)
        ev["product_degree_failures"] = int(np.count_nonzero(kd[Kk] != kd[I] + kd[J] + 2))
        # <1, f> = 2 d_m f is not zero in general: 1 is not central
        one = DPoly.one(sh)
        xm = DPoly.var(sh, sh.m)
        ev["one_not_central"] = not contact_bracket(one, xm).is_zero() and contact_bracket(one, xm) == xm.partial(sh.m).scale(2)

        counts = [
            ev["morphism_failures"],
            ev["formula_failures"],
            conj_fail,
            cp_fail,
            tr_fail,
            ev["product_degree_failures"],
        ]
        ok = not any(counts) and ev["one_not_central"]
        status = "theorem-violation" if bound_fail else _status(ok)
        out.append(Report("contact", params, status, ev))
    return out


# ---------------------------------------------------------------------------
# 7. witnesses


def suite_witnesses(cfg: SuiteConfig) -> list[Report]:
    out = []
    for n in cfg.shapes("S", [(1, 1)]):
        sh = cfg.shape(n)
        fam = build_S(sh)
        rng = cfg.rng("witness-S", n)
        k = cfg.count(200)
        bad = viol = 0
        example = None
        for _ in range(k):
            D = Deriv.from_vector(sh, sample_omega(fam.S1, rng))
            try:
                delta = witness_S(D, fam.S1)
            except TheoremViolation:
                viol += 1
                continue
            if not all(check_witness_S(D, delta, fam.S).values()):
                bad += 1
            example = example or f"D = {D} ; Delta = {delta}"
        status = "theorem-violation" if viol else _status(bad == 0)
        ev = {"samples": k, "failures": bad, "violations": viol}
        out.append(Report("witness_S", {"algebra": _shape_label("S1", n), "seed": cfg.seed}, status, ev, [example] if example else []))
    for n in cfg.shapes("H", [(1, 1)]):
        sh = cfg.shape(n)
        fam = build_H(sh)
        rng = cfg.rng("witness-H", n)
        k = cfg.count(200)
        bad = viol = 0
        example = None
        for _ in range(k):
            f = h_potential(sample_omega(fam.H2, rng), fam.H)
            try:
                delta = witness_H(f)
            except TheoremViolation:
                viol += 1
                continue
            if not all(check_witness_H(f, delta, fam.H).values()):
                bad += 1
            example = example or f"f = {f} ; Delta = {delta}"
        status = "theorem-violation" if viol else _status(bad == 0)
        ev = {"samples": k, "failures": bad, "violations": viol}
        out.append(Report("witness_H", {"algebra": _shape_label("H2", n), "seed": cfg.seed}, status, ev, [example] if example else []))
    for n in cfg.shapes("K", [(1, 1, 1)]):
        sh = cfg.shape(n)
        if sh.dim > dim_cap():
            out.append(Report("witness_K", {"algebra": _shape_label("K", n)}, "skipped", {"reason": "dim cap"}))
            continue
        fam = build_K(sh)
        rng = cfg.rng("witness-K", n)
        k = cfg.count(50)
        bad = viol = 0
        min_dim = None
        for _ in range(k):
            f = DPoly.from_vector(sh, sample_omega(fam.K1, rng))
            try:
                space = witness_K(f)
            except TheoremViolation:
                viol += 1
                continue
            if not all(check_witness_K(f, space).values()):
                bad += 1
            min_dim = space.dim if min_dim is None else min(min_dim, space.dim)
        status = "theorem-violation" if viol else _status(bad == 0)
        ev = {"samples": k, "failures": bad, "violations": viol, "min_dim": min_dim or 0}
        out.append(Report("witness_K", {"algebra": _shape_label("K", n), "seed": cfg.seed}, status, ev))
    return out


# ---------------------------------------------------------------------------
# 8, 9. non-generation


def _top_handles(cfg: SuiteConfig):
    for n in cfg.shapes("S", [(1, 1)]):
        yield "S", n, build_S(cfg.shape(n)).S1, 200
    for n in cfg.shapes("H", [(1, 1)]):
        yield "H", n, build_H(cfg.shape(n)).H2, 200
    for n in cfg.shapes("K", [(1, 1, 1)]):
        if cfg.p ** sum(n) <= dim_cap():
            yield "K", n, build_K(cfg.shape(n)).K1, 50


def suite_nongeneration(cfg: SuiteConfig) -> list[Report]:
    out = []
    for kind, n, L, default in _top_handles(cfg):
        top = L.top_component()
        for i, x in enumerate(top.basis):
            seed = int(cfg.rng("nongeneration", kind, n, i).integers(2**31))
            rep = nongeneration_probe(x, L, cfg.count(default), seed, expect_proper=True)
            rep.parameters.update({"algebra": _shape_label(L.label, n), "top_degree": L.top_degree, "basis_index": i})
            out.append(rep)
    return out


def suite_sanity(cfg: SuiteConfig) -> list[Report]:
    """Random non-top x should 2-generate H(2,(1,1))^(2) for some y."""
    out = []
    for n in cfg.shapes("H", [(1, 1)]):
        L = build_H(cfg.shape(n)).H2
        rng = cfg.rng("sanity", n)
        top = L.top_component()
        x = L.random_element(rng)
        while top.contains(x):
            x = L.random_element(rng)
        seed = int(rng.integers(2**31))
        rep = nongeneration_probe(x, L, cfg.count(50), seed, expect_proper=False, name="sanity")
        rep.parameters.update({"algebra": _shape_label("H2", n), "gating": False})
        out.append(rep)
    return out


# ---------------------------------------------------------------------------
# extras: the criterion hypotheses and the W probe


def suite_audit(cfg: SuiteConfig) -> list[Report]:
    out = []
    k = cfg.count(20)
    for n in cfg.shapes("S", [(1, 1)]):
        fam = build_S(cfg.shape(n))
        out.append(criterion_audit(fam.S, fam.S1, k, cfg.seed))
    for n in cfg.shapes("H", [(1, 1)]):
        fam = build_H(cfg.shape(n))
        out.append(criterion_audit(fam.H, fam.H2, k, cfg.seed))
    for n in cfg.shapes("K", [(1, 1, 1)]):
        if cfg.p ** sum(n) <= dim_cap():
            fam = build_K(cfg.shape(n))
            out.append(criterion_audit(fam.K, fam.K1, k, cfg.seed))
    for rep in out:
        rep.parameters["samples"] = k
    return out


def suite_remark(cfg: SuiteConfig) -> list[Report]:
    out = []
    for n in cfg.shapes("W", [(1,), (1, 1)]):
        sh = cfg.shape(n)
        if not sh.is_truncated:
            continue
        _, rep = remark_W_probe(sh, cfg.count(20), cfg.seed)
        out.append(rep)
    return out


SUITES = {
    "jacobi": suite_jacobi,
    "divergence": suite_divergence,
    "embedding": suite_embedding,
    "dimensions": suite_dimensions,
    "centraliser": suite_centraliser,
    "decomposition": suite_decomposition,
    "contact": suite_contact,
    "witnesses": suite_witnesses,
    "nongeneration": suite_nongeneration,
    "sanity": suite_sanity,
    "audit": suite_audit,
    "remark": suite_remark,
}


def run_suite(name: str, cfg: SuiteConfig) -> list[Report]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    try:
        return SUITES[name](cfg)
    except BoundExceeded as exc:
        return [Report(name, {"p": cfg.p}, "skipped", {"reason": str(exc)})]


def gating(rep: Report) -> bool:
    return rep.parameters.get("gating", True)
