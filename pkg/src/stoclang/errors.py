"""Exception types shared across the package."""


class StoclangError(Exception):
    """Base class for every error raised by this package."""


class InputError(StoclangError):
    """Malformed input: unknown symbol, bad file, inconsistent configuration."""


class ContractError(StoclangError):
    """A documented precondition of an operation does not hold."""


class DivergenceError(ContractError):
    """A spectral-radius condition required for an infinite sum fails."""


class UndefinedResidualError(ContractError):
    """A residual was requested at a prefix that carries no mass."""


class CertificationError(ContractError):
    """An automaton fails the convergence certificate required here."""


class FeasibilityError(StoclangError):
    """The linear-feasibility solver could not produce a usable answer."""
