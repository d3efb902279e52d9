"""Exact polynomial algebra, the polynomial parser and truncated jets."""

from .evaluate import CompiledPolynomial
from .jets import (DEFAULT_ORDER, Jet, NewtonError, PivotError, graph_residual, implicit_graph_jet,
                   polynomial_on_jets, taylor_jet)
from .numbers import QQi
from .parser import ParseError, parse_constant, parse_polynomial
from .polynomial import (AffineMap, Polynomial, dehomogenize, homogenize, linear_substitute,
                         monomials_upto, translate)

__all__ = [
    "AffineMap", "CompiledPolynomial", "DEFAULT_ORDER", "Jet", "NewtonError", "ParseError",
    "PivotError", "Polynomial", "QQi", "dehomogenize", "graph_residual", "homogenize",
    "implicit_graph_jet",
    "linear_substitute", "monomials_upto", "parse_constant", "parse_polynomial",
    "polynomial_on_jets", "taylor_jet", "translate",
]
