"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A physical parameter is outside the domain of a formula."""


class ConfigError(ValueError):
    """A configuration file or command-line value cannot be interpreted."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge.

    ``estimates`` holds the last two values produced before giving up.
    """

    def __init__(self, message, estimates=()):
        super().__init__(message)
        self.estimates = tuple(estimates)
