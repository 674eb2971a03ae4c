"""Exact computations in graded Cartan-type Lie algebras W, S, H, K over finite fields."""

__version__ = "0.1.0"

from .field import Field, Polynomial, field_make
from .dpalgebra import DPoly, Shape, parse_dpoly
from .derivations import Deriv, SigmaIso, WAlgebra, parse_deriv, w_algebra
from .cartan import (
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
    poisson_bracket,
)
from .structure import (
    Report,
    centraliser,
    constants_ring,
    criterion_audit,
    decompose_derivation,
    nongeneration_probe,
    regularity_classify,
    subalgebra_closure,
    witness_H,
    witness_K,
    witness_S,
)

__all__ = [
    "Field", "Polynomial", "field_make", "DPoly", "Shape", "parse_dpoly", "Deriv", "SigmaIso", "WAlgebra",
    "parse_deriv", "w_algebra", "SubalgebraHandle", "build", "build_H", "build_K", "build_S", "build_W",
    "contact_algebra", "contact_bracket", "d_H_map", "d_K_map", "poisson_bracket", "Report", "centraliser",
    "constants_ring", "criterion_audit", "decompose_derivation", "nongeneration_probe", "regularity_classify",
    "subalgebra_closure", "witness_H", "witness_K", "witness_S",
]
