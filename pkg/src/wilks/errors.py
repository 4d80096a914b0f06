"""Exception hierarchy shared by the fitting, testing and ingestion code."""

import numpy as np


class WilksError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(WilksError, ValueError):
    pass


class ParseError(WilksError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SelfLoop(ParseError):
    pass


class NegativeCount(ParseError):
    pass


class InvalidNull(WilksError, ValueError):
    pass


class InvalidScenario(WilksError, ValueError):
    pass


class MleNonexistent(WilksError, ArithmeticError):
    """The maximum likelihood estimate does not exist (or could not be found)."""


class NotStronglyConnected(MleNonexistent):
    """The win digraph is not strongly connected, so the BT MLE does not exist."""


class SingularMatrix(WilksError, np.linalg.LinAlgError):
    pass


class NegativeLrt(WilksError, ArithmeticError):
    """Restricted log-likelihood exceeds the unrestricted one beyond rounding."""


class NoChiSquareApprox(WilksError):
    """No chi-square calibration exists for the requested model/null pair."""
