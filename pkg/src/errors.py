"""Exception hierarchy shared by the algebra kernels, the CLI and the HTTP layer."""


class KPError(Exception):
    """Base class for every error raised by the library."""

    exit_code = 3
    status_code = 400


class SchemaError(KPError):
    """Malformed JSON input. `location` names the offending path."""

    exit_code = 2
    status_code = 422

    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


class CertificationError(KPError):
    """A truncation window, floor, degree or stabilization check could not be certified."""

    status_code = 409

    def __init__(self, message, quantity=""):
        super().__init__(message)
        self.quantity = quantity


class DomainError(KPError):
    """A mathematical precondition does not hold for the given input."""
