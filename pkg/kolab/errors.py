"""
Error types raised by the KO laboratory.
"""


class KolabError(Exception):
    """Base class for every error raised by this package."""


class ShapeMismatchError(KolabError, ValueError):
    """Operands live over different shapes."""


class MixedParityError(KolabError, ValueError):
    """An operation that needs a Z_2-homogeneous input received a mixed one."""


class ParseError(KolabError, ValueError):
    """Monomial, potential or derivation text could not be parsed."""


class CapExceededError(KolabError):
    """The requested model is larger than the configured dimension cap."""


class QuotientActionError(KolabError, ValueError):
    """An action does not preserve the subspace that defines a quotient."""


class AutomorphismError(KolabError):
    """A generated map is not a Lie superalgebra automorphism."""


class NoSolutionError(KolabError, RuntimeError):
    """Linear system over GF(p) has no solution."""
