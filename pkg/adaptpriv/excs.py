# coding: utf-8

""" Custom application-wide exception classes.

This module contains custom exception classes that can be used to wrap other
exception and allow for consistent error-handling across the application.

Every exception carries an `exit_code` which the command-line front end uses
as the process exit status and a `code` (the class name) which is printed in
the machine-parsable error line.
"""


class AdaptPrivError(Exception):
    """ Base class of all application exceptions."""

    exit_code = 1

    def __init__(self, message, *args):
        super(AdaptPrivError, self).__init__(message, *args)

    @property
    def code(self) -> str:
        return type(self).__name__

    @property
    def message(self) -> str:
        return str(self.args[0]) if self.args else ""


class UnhandledError(AdaptPrivError):
    def __init__(self, message, *args):
        super(UnhandledError, self).__init__(message, *args)


# Configuration errors.


class ConfigError(AdaptPrivError):
    """ Base class of configuration and usage errors."""

    exit_code = 2

    def __init__(self, message, *args):
        super(ConfigError, self).__init__(message, *args)


class ConfigFileNotFound(ConfigError):
    """ Exception raised when a JSON configuration file is missing."""
    def __init__(self, message, *args):
        super(ConfigFileNotFound, self).__init__(message, *args)


class ConfigFileInvalid(ConfigError):
    """ Exception raised when a JSON configuration file is invalid."""
    def __init__(self, message, *args):
        super(ConfigFileInvalid, self).__init__(message, *args)


class ParseError(ConfigError):
    """ Exception raised when a configuration file is not valid JSON."""
    def __init__(self, message, *args):
        super(ParseError, self).__init__(message, *args)


class UsageError(ConfigError):
    """ Exception raised when command-line arguments are invalid."""
    def __init__(self, message, *args):
        super(UsageError, self).__init__(message, *args)


class IoError(ConfigError):
    """ Exception raised when an output file cannot be written."""
    def __init__(self, message, *args):
        super(IoError, self).__init__(message, *args)


# Probability validation errors.


class ValidationError(AdaptPrivError):
    """ Base class of invalid probability inputs."""

    exit_code = 2

    def __init__(self, message, *args):
        super(ValidationError, self).__init__(message, *args)


class NegativeMass(ValidationError):
    """ Exception raised when a probability tensor has a negative entry."""
    def __init__(self, message, *args):
        super(NegativeMass, self).__init__(message, *args)


class NotNormalized(ValidationError):
    """ Exception raised when a probability tensor does not sum to one."""
    def __init__(self, message, *args):
        super(NotNormalized, self).__init__(message, *args)


class DimensionMismatch(ValidationError):
    """ Exception raised when tensor shapes disagree with their alphabets."""
    def __init__(self, message, *args):
        super(DimensionMismatch, self).__init__(message, *args)


class EmptySubset(ValidationError):
    """ Exception raised when a marginal is requested over no variables."""
    def __init__(self, message, *args):
        super(EmptySubset, self).__init__(message, *args)


class InvalidInput(ValidationError):
    """ Exception raised on malformed solver or session inputs."""
    def __init__(self, message, *args):
        super(InvalidInput, self).__init__(message, *args)


# Numerical errors.


class NumericError(AdaptPrivError):
    """ Base class of numerical failures."""

    exit_code = 3

    def __init__(self, message, *args):
        super(NumericError, self).__init__(message, *args)


class NumericUnderflow(NumericError):
    """ Exception raised when a channel slice vanishes before normalization."""
    def __init__(self, message, *args):
        super(NumericUnderflow, self).__init__(message, *args)


class NotConverged(NumericError):
    """ Exception raised when an iteration cap is reached."""
    def __init__(self, message, *args):
        super(NotConverged, self).__init__(message, *args)


class ZeroMassRelease(NumericError):
    """ Exception raised when a release symbol carries no probability mass."""
    def __init__(self, message, *args):
        super(ZeroMassRelease, self).__init__(message, *args)


class TooFewPoints(NumericError):
    """ Exception raised when time-sharing lacks enough operating points."""
    def __init__(self, message, *args):
        super(TooFewPoints, self).__init__(message, *args)


class NoBracket(NumericError):
    """ Exception raised when no operating point brackets a target budget."""
    def __init__(self, message, *args):
        super(NoBracket, self).__init__(message, *args)


class MonotonicityViolation(NumericError):
    """ Exception raised when a leakage grows with its own multiplier during
        bisection.
    """
    def __init__(self, message, *args):
        super(MonotonicityViolation, self).__init__(message, *args)


# Budget errors.


class BudgetError(AdaptPrivError):
    """ Base class of leakage-budget errors."""

    exit_code = 4

    def __init__(self, message, *args):
        super(BudgetError, self).__init__(message, *args)


class InfeasibleBudget(BudgetError):
    """ Exception raised when a budget is malformed (negative or eps > delta).
    """
    def __init__(self, message, *args):
        super(InfeasibleBudget, self).__init__(message, *args)


class BudgetOrderViolation(InfeasibleBudget):
    """ Exception raised when a session request breaks the budget ordering
        rules (collusion budget decreasing or eps exceeding delta).
    """
    def __init__(self, message, *args):
        super(BudgetOrderViolation, self).__init__(message, *args)
