"""Exception types shared across the package."""


class FrtkitError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(FrtkitError):
    """Malformed problem file; carries a human-readable position."""

    def __init__(self, message, where=None):
        self.where = where
        if where is not None:
            message = f"{where}: {message}"
        super().__init__(message)


class InvalidAlgebra(FrtkitError):
    pass


class EmptyIndexSet(FrtkitError):
    pass


class DimensionMismatch(FrtkitError):
    pass


class AlgebraMismatch(FrtkitError):
    pass


class NotProjective(FrtkitError):
    pass


class InvalidDualBases(FrtkitError):
    pass


class NotBimoduleMap(FrtkitError):
    pass


class NotYangBaxter(FrtkitError):
    pass


class NotInvertible(FrtkitError):
    pass


class NotDualizable(FrtkitError):
    pass


class NotFaceSupported(FrtkitError):
    pass


class BundleMismatch(FrtkitError):
    pass


class InhomogeneousRelations(FrtkitError):
    pass


class TruncationExceeded(FrtkitError):
    pass


class NotComposable(FrtkitError):
    pass
