"""blexpand: boundary layer sizes, profiles and expansions from symbols.

The package computes, for a singularly perturbed linear differential
operator given through its frozen-coefficient symbol, the singular
exponents and multiplicities via an exact Newton polygon, checks the
uniformity/ellipticity/solvability hypotheses behind composite
boundary-layer expansions, builds the layer profile bases, assembles
truncated expansions for shipped problem families, and validates them
against independent high-precision reference solutions.
"""

from .sympoly import CRat, SymbolPoly, CR_I, CR_ONE, CR_ZERO
from .errors import (
    BlexpandError,
    ClusterViolation,
    DegreeZero,
    EmptyPolynomial,
    IllConditioned,
    NegativeValuation,
    NonConstantMPlus,
    NonUniform,
    OverdeterminedHierarchy,
    ParseError,
    RealAxisRoot,
    StructuralError,
    UnderdeterminedHierarchy,
    UnsupportedOperatorClass,
    UnsupportedProblem,
    ZeroPolynomial,
)

__version__ = "0.1.0"
