"""Exact N-commutators of polynomial vector fields.

Modules: ``polyring`` (polynomials over Q), ``diffop`` (differential
operators), ``skewsum`` (the alternating sum s_k), ``formulas`` (determinant
formulas in two variables), ``grading`` (graded bases and escort tables),
``identities`` (verification checks), ``superdiff`` (odd derivations),
``parse`` and ``cli``.
"""

from __future__ import annotations

from .diffop import DiffOp, commutator, compose, d12, divergence, lie_bracket, potential, rsym
from .parse import ParseError, parse_field, parse_op, parse_poly
from .polyring import Poly
from .skewsum import EvalStrategy, ProductMode, s_k

__version__ = "0.1.0"

__all__ = [
    "DiffOp",
    "EvalStrategy",
    "ParseError",
    "Poly",
    "ProductMode",
    "commutator",
    "compose",
    "d12",
    "divergence",
    "lie_bracket",
    "parse_field",
    "parse_op",
    "parse_poly",
    "potential",
    "rsym",
    "s_k",
]
