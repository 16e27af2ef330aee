"""Exception hierarchy shared by every bopim module."""


class BopimError(Exception):
    """Base class for all bopim errors."""


class InputError(BopimError):
    """Bad or unreadable input data (CLI exit code 1)."""


class ConfigError(BopimError, ValueError):
    """Invalid parameters or configuration (CLI exit code 2)."""


class EmptyInput(InputError):
    pass


class MalformedLine(InputError):
    def __init__(self, lineno: int, line: str, reason: str = "non-numeric field"):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line!r}")


class InvalidT(ConfigError):
    pass


class InvalidLambda(ConfigError):
    pass


class InvalidParam(ConfigError):
    pass


class InvalidConfig(ConfigError):
    pass


class KTooLarge(ConfigError):
    pass


class DimensionMismatch(ConfigError):
    pass


class TooManyContacts(BopimError):
    pass


class FactorizationFailure(BopimError):
    pass
