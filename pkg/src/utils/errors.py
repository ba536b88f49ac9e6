"""
This module defines the exception hierarchy of the Aharonov-Bohm vacuum polarization package.

Configuration errors describe inputs outside the domain of an operation; numerical errors
describe a numerical method that failed on admissible input. The command-line interface maps
the two branches to different exit codes.
"""


class AharonovBohmError(Exception):
    """
    Base class for all errors raised by the package.

    Attributes:
        operation: Name of the operation that raised the error.
    """

    def __init__(self, message: str, operation: str = ""):
        self.operation = operation
        super().__init__(f"{operation}: {message}" if operation else message)


class ConfigurationError(AharonovBohmError, ValueError):
    """
    Raised when the input parameters are outside the domain of an operation.
    """


class DomainError(ConfigurationError):
    """
    Raised when an argument violates the precondition of an operation.
    """


class PoleError(DomainError):
    """
    Raised when the gamma function is evaluated at a nonpositive integer.
    """


class KinematicError(DomainError):
    """
    Raised when a doublet is requested outside its kinematic region (p or lambda imaginary).
    """


class ParameterMismatchError(DomainError):
    """
    Raised when two doublets combined in one expression do not share (E, l, mu, s).
    """


class NumericalError(AharonovBohmError, ArithmeticError):
    """
    Raised when a numerical method fails on admissible input.

    Attributes:
        achieved_error: The best error estimate reached before the failure, if known.
    """

    def __init__(self, message: str, operation: str = "", achieved_error: float = float("nan")):
        self.achieved_error = achieved_error
        super().__init__(message, operation)


class RangeError(NumericalError):
    """
    Raised when a special function overflows or underflows.
    """


class QuadratureError(NumericalError):
    """
    Raised when an adaptive quadrature does not reach the requested tolerance.
    """


class RootNotFoundError(NumericalError):
    """
    Raised when a bracketed root search finds no sign change.
    """


class ExtrapolationError(NumericalError):
    """
    Raised when a Richardson extrapolation does not converge.
    """


class SingularSystemError(NumericalError):
    """
    Raised when a linear matching system has a vanishing determinant.
    """
