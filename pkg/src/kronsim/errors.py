"""Exception taxonomy shared by all modules.

Two families matter to the CLI: ValidationError maps to exit code 2,
NumericalError to exit code 3.
"""

from __future__ import annotations


class KronsimError(Exception):
    """Base class for all package errors."""


class ValidationError(KronsimError):
    """Bad input: malformed files, violated preconditions, dimension clashes."""


class NumericalError(KronsimError):
    """A numerical contract failed at run time (overflow, degree cap, drift)."""


class ParseError(ValidationError):
    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class NotSquare(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class NotUnitary(ValidationError):
    pass


class NotUnit(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NormPremiseViolated(ValidationError):
    pass


class CoefficientsMissing(ValidationError):
    pass


class NotCommuting(ValidationError):
    def __init__(self, pair: tuple[int, int], norm: float):
        super().__init__(
            f"terms {pair[0]} and {pair[1]} do not commute "
            f"(commutator operator norm {norm:.3e})"
        )
        self.pair = pair
        self.norm = norm


class SparsityOutOfRange(ValidationError):
    pass


class NegativeEigenvalueProduct(ValidationError):
    pass


class BadPermutation(ValidationError):
    pass


class WeightsNotNormalized(ValidationError):
    pass


class MixedScales(ValidationError):
    pass


class InvalidFactor(ValidationError):
    pass


class NormExceedsScale(ValidationError):
    pass


class AmplificationOverflow(NumericalError):
    pass


class DegreeOverflow(NumericalError):
    pass


class NotHermitianBlock(NumericalError):
    pass
