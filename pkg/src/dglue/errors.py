"""Exception hierarchy shared by every module of the package."""


class DGlueError(Exception):
    """Base class for all errors raised by dglue."""


class QuadraticInVar(DGlueError):
    """Extraction asked for a variable that appears squared in an exponent."""


class Singular(DGlueError):
    """Matrix has zero determinant."""


class NonIntegralSign(DGlueError):
    pass


class BadTopology(DGlueError):
    pass


class GenusMismatch(DGlueError):
    pass


class GenusUnsupported(DGlueError):
    pass


class NotNormalized(DGlueError):
    """A class D with D.Sigma = 1 (and D^2 = 0 where required) was expected."""


class SingularCap(DGlueError):
    """Cap vector lies on the degeneracy locus of the coefficient matrix."""


class NotSimpleType(DGlueError):
    pass


class SectorMismatch(DGlueError):
    pass


class OutOfDomain(DGlueError):
    pass


class ParseError(DGlueError):
    pass


class ValidationError(DGlueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
