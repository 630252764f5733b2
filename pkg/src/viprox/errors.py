"""Exception types raised by the solvers and their building blocks."""


class ViproxError(Exception):
    """Base class for every error raised by this package."""


class RejectedInputError(ViproxError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class CapabilityError(ViproxError, NotImplementedError):
    """The requested (prox-setup, feasible-set) combination is not supported."""


class NumericalError(ViproxError, ArithmeticError):
    """An iteration produced a non-finite value or an inner solver stalled."""

    def __init__(self, message, residual=None, iterate=None):
        super().__init__(message)
        self.residual = residual
        self.iterate = iterate


class DivergenceError(NumericalError):
    """The doubling line search exceeded its trial cap."""

    def __init__(self, message, last_M=None, iteration=None, restart=None):
        super().__init__(message)
        self.last_M = last_M
        self.iteration = iteration
        self.restart = restart


class UncertifiedError(NumericalError):
    """An inner solver ran out of budget before certifying its tolerance."""


class PlanningError(ViproxError):
    """Tolerance planning could not produce consistent constants."""


class ConstantsMisdeclaredError(ViproxError):
    """A runtime audit contradicts the constants declared on a problem."""


class ConfigError(ViproxError, ValueError):
    """A run configuration is malformed or references unknown ids."""
