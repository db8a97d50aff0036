"""Exception hierarchy shared by the library and the CLI."""


class QrteError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 1


class ConfigError(QrteError, ValueError):
    """Invalid parameters, indices or flag combinations."""

    exit_code = 2


class DomainError(QrteError, ValueError):
    """Parameters outside the domain where a formula is defined (e.g. kappa <= sigma)."""

    exit_code = 3


class NumericError(QrteError, ArithmeticError):
    """Unnormalized states, singular systems, failed internal consistency checks."""

    exit_code = 4
