"""Exception types raised by the library."""


class ContractError(ValueError):
    """An argument violates a documented precondition (shape, range, sign)."""


class UnsupportedConfigError(ValueError):
    """The requested scheme cannot be built for these antenna counts."""


class NumericalError(ArithmeticError):
    """A matrix that must be positive definite is not, or a value is non-finite."""


class ConfigError(ValueError):
    """A run configuration file or flag is malformed or names an unknown key."""
