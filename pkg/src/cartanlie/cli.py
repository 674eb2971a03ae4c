"""cartanlie: build Cartan-type Lie algebras over F_p, run verification
suites and construct centraliser witnesses.

stdout carries one canonical JSON report per run; stderr carries human
diagnostics.  Exit codes: 0 ok, 1 check failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any

import numpy as np

from . import __version__
from .cartan import build, build_H, build_S, contact_algebra
from .derivations import dim_cap, parse_deriv
from .dpalgebra import ParseError, Shape, parse_dpoly
from .field import FieldError, field_make
from .structure import (
    DEFAULT_MAX_EXT,
    NotInOmega,
    Report,
    TheoremViolation,
    check_witness_H,
    check_witness_K,
    check_witness_S,
    k_centraliser_diagnostics,
    witness_H,
    witness_K,
    witness_S,
)
from .suites import SUITES, SuiteConfig, gating, run_suite

SCHEMA = 1
DEFAULT_SHAPES = {"W": (1, 1), "S": (1, 1), "H": (1, 1), "K": (1, 1, 1)}


class ConfigError(ValueError):
    pass


def _jsonable(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def render(doc: dict[str, Any]) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, default=_jsonable) + "\n"


def parse_n(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        n = tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise ConfigError(f"bad --n {text!r}; expected a,b,...") from None
    if not n or min(n) < 1:
        raise ConfigError(f"bad --n {text!r}; entries must be positive")
    return n


def make_config(args: argparse.Namespace) -> SuiteConfig:
    field_make(args.p)  # NotPrime / CharTooSmall before any work
    kind = args.type.upper() if args.type else None
    if kind is not None and kind not in "WSHK":
        raise ConfigError(f"unknown type {args.type!r}")
    n = parse_n(args.n)
    if n is not None and args.m is not None and len(n) != args.m:
        raise ConfigError(f"--m {args.m} does not match --n with {len(n)} entries")
    if args.m is not None and args.m < 1:
        raise ConfigError("--m must be positive")
    if args.samples is not None and args.samples < 0:
        raise ConfigError("--samples must be non-negative")
    if args.max_ext < 1:
        raise ConfigError("--max-ext must be positive")
    return SuiteConfig(p=args.p, seed=args.seed, samples=args.samples, max_ext=args.max_ext, kind=kind, m=args.m, n=n)


def config_echo(cfg: SuiteConfig, args: argparse.Namespace, **extra) -> dict[str, Any]:
    echo = {
        "command": args.command,
        "p": cfg.p,
        "type": cfg.kind,
        "m": cfg.m,
        "n": list(cfg.n) if cfg.n else None,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "max_ext": cfg.max_ext,
        "dim_cap": dim_cap(),
    }
    echo.update(extra)
    return echo


def document(echo: dict[str, Any], reports: list[Report], timings: dict[str, float] | None = None) -> dict[str, Any]:
    ok = all(r.ok for r in reports if gating(r))
    doc = {
        "schema": SCHEMA,
        "tool": "cartanlie",
        "version": __version__,
        "config": echo,
        "reports": [r.as_dict() for r in reports],
        "status": "pass" if ok else "fail",
    }
    if timings is not None:
        doc["timings"] = timings
    return doc


def _shape_for(cfg: SuiteConfig, kind: str) -> Shape:
    n = cfg.n or ((1,) * cfg.m if cfg.m else DEFAULT_SHAPES[kind])
    return cfg.shape(n)


# ---------------------------------------------------------------------------
# commands


def cmd_info(cfg: SuiteConfig, args) -> tuple[dict, int]:
    kind = cfg.kind or "W"
    sh = _shape_for(cfg, kind)
    handles = build(kind, sh)
    ev: dict[str, Any] = {"dim_O": sh.dim}
    for label, h in handles.items():
        ev[f"dim_{label}"] = h.dim
        ev[f"grading_{label}"] = {str(d): k for d, k in sorted(h.grade_dims().items())}
    if kind == "S":
        ev["codim_S1_in_S"] = handles["S"].dim - handles["S1"].dim
        ev["codim_S1_in_CS"] = handles["CS"].dim - handles["S1"].dim
    if kind == "H":
        ev["codim_H2_in_H"] = handles["H"].dim - handles["H2"].dim
    if kind == "K":
        ev["codim_K1_in_K"] = handles["K"].dim - handles["K1"].dim
    params = {"type": kind, "p": sh.p, "m": sh.m, "n": list(sh.n)}
    rep = Report("info", params, "pass", ev)
    for label, h in handles.items():
        print(f"{label}({sh.m},{sh.n}): dim {h.dim}  grading {h.grade_dims()}", file=sys.stderr)
    return document(config_echo(cfg, args), [rep]), 0


def cmd_verify(cfg: SuiteConfig, args) -> tuple[dict, int]:
    names = args.suite.split(",") if args.suite else list(SUITES)
    for name in names:
        if name not in SUITES:
            raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    reports: list[Report] = []
    timings: dict[str, float] = {}
    for name in names:
        t0 = time.perf_counter()
        reps = run_suite(name, cfg)
        timings[name] = round(time.perf_counter() - t0, 3)
        for r in reps:
            r.parameters.setdefault("suite", name)
            print(f"{name:14s} {r.name:16s} {r.status:18s} {r.parameters.get('algebra', '')}", file=sys.stderr)
        reports += reps
    doc = document(config_echo(cfg, args, suites=names), reports, timings if args.timings else None)
    return doc, 0 if doc["status"] == "pass" else 1


def _checks_status(checks: dict[str, bool]) -> str:
    return "pass" if all(checks.values()) else "fail"


def cmd_witness(cfg: SuiteConfig, args) -> tuple[dict, int]:
    kind = cfg.kind
    if kind not in ("S", "H", "K"):
        raise ConfigError("witness needs --type S, H or K")
    if args.elem is None:
        raise ConfigError("witness needs --elem")
    sh = _shape_for(cfg, kind)
    params = {"type": kind, "p": sh.p, "m": sh.m, "n": list(sh.n), "elem": args.elem}
    lines = []
    if kind == "S":
        D = parse_deriv(sh, args.elem)
        fam = build_S(sh)
        delta = witness_S(D, fam.S1)
        checks = check_witness_S(D, delta, fam.S)
        wits = [str(D), str(delta)]
        lines.append(f"Delta = {delta}")
        ev = {"checks": checks}
    elif kind == "H":
        f = parse_dpoly(sh, args.elem)
        delta = witness_H(f)
        checks = check_witness_H(f, delta, build_H(sh).H)
        wits = [str(f), str(delta)]
        lines.append(f"Delta = D_H(f^3) = {delta}")
        ev = {"checks": checks}
    else:
        f = parse_dpoly(sh, args.elem)
        space = witness_K(f)
        checks = check_witness_K(f, space)
        C = contact_algebra(sh)
        wits = [str(f)] + [C.to_text(v) for v in space.basis]
        lines.append(f"centraliser in K_>=1 of dim {space.dim}:")
        lines += [f"  {w}" for w in wits[1:]]
        ev = {"checks": checks, "dim": space.dim, "diagnostics": k_centraliser_diagnostics(f)}
    for k, v in checks.items():
        lines.append(f"{k}: {str(v).lower()}")
    if kind in ("S", "H"):
        lines.append(f"[D,Delta]=0: {str(checks['commutes']).lower()}")
    print("\n".join(lines), file=sys.stderr)
    rep = Report(f"witness_{kind}", params, _checks_status(checks), ev, wits)
    return document(config_echo(cfg, args), [rep]), 0 if rep.ok else 1


COMMANDS = {"info": cmd_info, "verify": cmd_verify, "witness": cmd_witness}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cartanlie", description=__doc__.split("\n\n")[0])
    ap.add_argument("command", choices=list(COMMANDS))
    ap.add_argument("--type", choices=["W", "S", "H", "K", "w", "s", "h", "k"])
    ap.add_argument("--p", type=int, default=5)
    ap.add_argument("--m", type=int)
    ap.add_argument("--n", help="comma separated n_i, e.g. 1,2")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, help="override every per-check sample count")
    ap.add_argument("--max-ext", type=int, default=DEFAULT_MAX_EXT, dest="max_ext")
    ap.add_argument("--suite", help=f"comma separated, from {','.join(SUITES)}")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--elem", help="element text for `witness`")
    ap.add_argument("--timings", action="store_true", help="include wall-clock per suite (breaks byte-identity)")
    return ap


def run(argv: list[str] | None = None) -> tuple[str | None, int]:
    """Parse argv and run; returns (report text, exit code)."""
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        doc, code = COMMANDS[args.command](cfg, args)
    except (ConfigError, FieldError, ParseError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return None, 2
    except NotInOmega as exc:
        print(f"error: NotInOmega: {exc}", file=sys.stderr)
        return None, 1
    except TheoremViolation as exc:
        print(f"theorem violation: {type(exc).__name__}: {exc}", file=sys.stderr)
        return None, 1
    except ValueError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return None, 2
    text = render(doc)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text, code


def main(argv: list[str] | None = None) -> int:
    try:
        _, code = run(argv)
    except SystemExit as exc:  # argparse
        return int(exc.code or 0) and 2
    return code


if __name__ == "__main__":
    sys.exit(main())
