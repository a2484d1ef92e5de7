"""Exception hierarchy shared across the toolkit.

Every failure mode that callers are expected to branch on gets its own
class; generic ValueError/TypeError are reserved for plain misuse.
"""

from __future__ import annotations


class BlexpandError(Exception):
    """Base class for all toolkit errors."""


class StructuralError(BlexpandError):
    """Operands are structurally incompatible (e.g. mismatched nvars)."""


class NegativeValuation(BlexpandError):
    """A limit at eps -> 0 was requested but negative eps-powers remain.

    Signals that the normalizing valuation used for a rescaling was wrong.
    """


class EmptyPolynomial(BlexpandError):
    """An operation needs a nonzero polynomial and received the zero one."""


class DegreeZero(BlexpandError):
    """Root finding requested for a polynomial of degree < 1."""


class NonUniform(BlexpandError):
    """The singular-exponent pattern varies with the tangential frequency.

    Raised by the exponent engine when the uniformity hypothesis fails at
    the sampled frequencies.
    """

    def __init__(self, message: str, patterns: list | None = None):
        super().__init__(message)
        self.patterns = patterns or []


class ZeroPolynomial(BlexpandError):
    """An ellipticity check received the identically-zero symbol."""


class ClusterViolation(BlexpandError):
    """Numeric roots refuse to organize into the exact engine's clusters."""

    def __init__(self, message: str, eps: float | None = None,
                 root: complex | None = None):
        super().__init__(message)
        self.eps = eps
        self.root = root


class RealAxisRoot(BlexpandError):
    """A root sits (numerically) on the real axis; the half-plane count
    and the decay classification are undefined for it."""


class NonConstantMPlus(BlexpandError):
    """The upper-half-plane root count changed along a connected boundary
    component, which contradicts the connectedness argument."""

    def __init__(self, message: str, counts: dict | None = None):
        super().__init__(message)
        self.counts = counts or {}


class UnsupportedOperatorClass(BlexpandError):
    """The layer operator is genuinely differential in the tangential
    variables; no effective solvability criterion is implemented."""


class ParseError(BlexpandError):
    """Lexical/syntax/semantic error in a spec file, with source span."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


class UnderdeterminedHierarchy(BlexpandError):
    """Fewer boundary conditions than the interior + layers require."""

    def __init__(self, message: str, counts: dict | None = None):
        super().__init__(message)
        self.counts = counts or {}


class OverdeterminedHierarchy(BlexpandError):
    """More boundary conditions than the interior + layers can absorb."""

    def __init__(self, message: str, counts: dict | None = None):
        super().__init__(message)
        self.counts = counts or {}


class IllConditioned(BlexpandError):
    """The reference linear solve is too ill-conditioned to trust."""

    def __init__(self, message: str, condition: float = 0.0):
        super().__init__(message)
        self.condition = condition


class UnsupportedProblem(BlexpandError):
    """The expansion machinery does not cover this problem family."""
