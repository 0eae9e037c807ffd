"""Exception types raised across the toolkit."""


class RslmcError(Exception):
    """Base class for all toolkit errors."""


# --- numerics ---------------------------------------------------------------

class NegativeWeight(RslmcError):
    pass


class UnnormalizedWeights(RslmcError):
    pass


class NonFiniteEntry(RslmcError):
    pass


class IterationLimitExceeded(RslmcError):
    pass


class NormOverflow(RslmcError):
    pass


class SubdivisionLimit(RslmcError):
    pass


# --- ctmc -------------------------------------------------------------------

class NegativeOffDiagonal(RslmcError):
    pass


class RowSumNonzero(RslmcError):
    pass


class NotIrreducible(RslmcError):
    pass


class StepsizeTooLarge(RslmcError):
    pass


class SingularSolve(RslmcError):
    pass


# --- models -----------------------------------------------------------------

class NotPositiveDefinite(RslmcError):
    pass


class BatchLargerThanDataset(RslmcError):
    pass


# --- samplers ---------------------------------------------------------------

class NonFiniteState(RslmcError):
    pass


# --- theory -----------------------------------------------------------------

class InvalidLambdaSplit(RslmcError):
    pass


class FrictionTooSmall(RslmcError):
    pass


# --- metrics ----------------------------------------------------------------

class NotPSD(RslmcError):
    pass


class TooFewSamples(RslmcError):
    pass


class DimensionMismatch(RslmcError):
    pass


# --- data -------------------------------------------------------------------

class ParseError(RslmcError):
    def __init__(self, row: int, column: int, message: str = ""):
        self.row = row
        self.column = column
        super().__init__(f"row {row}, column {column}: {message}")


class SchemaMismatch(RslmcError):
    pass


class UnknownClass(RslmcError):
    pass


class MissingDataset(RslmcError):
    pass


# --- cli --------------------------------------------------------------------

class ConfigError(RslmcError):
    pass


class DivergenceDetected(RslmcError):
    pass
