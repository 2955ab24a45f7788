"""Exception types shared across the package."""


class SubcoverError(Exception):
    """Base class for package errors."""


class InputError(SubcoverError, ValueError):
    """Bad argument: unknown element id, negative weight, oversized enumeration."""


class ContractViolation(SubcoverError, RuntimeError):
    """An operation was called in a state that forbids it."""


class DatasetError(SubcoverError):
    """A dataset file could not be parsed or describes an empty instance."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class ConfigError(SubcoverError, ValueError):
    """Inconsistent experiment configuration."""


class ClampWarning(UserWarning):
    """An objective value was clamped at zero to keep the oracle nonnegative."""
