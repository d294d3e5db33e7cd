"""Exception hierarchy shared by all modules.

Each class carries a short ``category`` string that the command-line front
end prints on failure, so callers can parse the error kind without matching
on message text.
"""


class RtnSimError(Exception):
    category = "error"


class ParameterError(RtnSimError, ValueError):
    """Invalid or inconsistent input parameters."""

    category = "parameter"


class DomainError(RtnSimError, ValueError):
    """Query outside the domain on which an object is defined."""

    category = "domain"


class ContractError(RtnSimError, ValueError):
    """An input violates a structural invariant (Hermiticity, trace, ...)."""

    category = "contract"


class NumericalDegeneracyError(ContractError):
    """A matrix that should be positive semidefinite is not, beyond roundoff."""

    category = "numerical"


class ConfigError(ParameterError):
    category = "config"
