"""Exception types shared across the package."""


class BisectcqError(Exception):
    """Base class for all package errors."""


class InvalidOperator(BisectcqError):
    """Input matrix is not Hermitian within tolerance."""


class NotPSD(BisectcqError):
    """Operator has an eigenvalue below the negativity tolerance."""


class DimMismatch(BisectcqError):
    """Operands live on spaces of different dimension."""


class NotNormalized(BisectcqError):
    """State trace deviates from 1 beyond tolerance."""


class InvalidPOVMElement(BisectcqError):
    """Operator is outside the [0, 1] operator interval."""


class DimCapExceeded(BisectcqError):
    """Tensor-product dimension would exceed the configured cap."""


class InvalidCodeSize(BisectcqError):
    """Codebook size is not a power of two."""


class ZeroProbSymbol(BisectcqError):
    """A zero-probability symbol appears where a log is required."""


class EnumerationCapExceeded(BisectcqError):
    """Sequence space is too large to enumerate exhaustively."""


class InvalidInstance(BisectcqError):
    """A lemma-checker instance violates its preconditions."""


class ParseError(BisectcqError):
    """Malformed ensemble or configuration file."""
