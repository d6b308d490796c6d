"""Exception types shared across the package."""


class HardylabError(Exception):
    """Base class for package-specific failures."""


class BudgetExceededError(HardylabError, ValueError):
    """A generation or discretization step would exceed a hard size budget."""


class EmptyWindowError(HardylabError, ValueError):
    """A requested window contains no points of the target set."""


class SubResolutionError(HardylabError, ValueError):
    """A requested scale is finer than the resolution of the discrete object."""


class ZeroTestFunctionError(HardylabError, ValueError):
    """A Rayleigh quotient was requested for the zero function."""


class NotACoverError(HardylabError, ValueError):
    """A candidate ball family fails to cover the support it was supplied for."""


class ConfigError(HardylabError, ValueError):
    """An experiment configuration is malformed or references unknown fixtures."""
