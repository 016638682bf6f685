"""Exception hierarchy shared by every refsim module."""


class RefsimError(Exception):
    """Base class for all refsim errors."""


class ParseError(RefsimError):
    """A document (platform, trace, manager config) is syntactically malformed."""


class ValidationError(RefsimError):
    """A document parsed but violates an invariant.

    ``field`` names the offending field when one can be identified.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class UnknownResource(RefsimError, LookupError):
    pass


class UnsupportedKind(RefsimError):
    pass


class InvalidPeriod(RefsimError, ValueError):
    pass


class NonContiguousSample(RefsimError):
    pass


class NoCompletedWindow(RefsimError):
    pass


class OutOfRange(RefsimError, ValueError):
    pass


class ModelMayNotActuate(RefsimError):
    pass


class DuplicateModel(RefsimError):
    pass


class DuplicateName(RefsimError):
    pass


class NoForecast(RefsimError):
    pass


class RecursiveQuery(RefsimError):
    """A policy model tried to issue a reflective query of its own."""


class DegenerateSample(RefsimError, ValueError):
    pass


class UnknownScenario(RefsimError, LookupError):
    pass


class SpecError(RefsimError, ValueError):
    """A gen-trace phase specification cannot be represented."""


class PolicyError(RefsimError):
    """Wraps an exception raised from inside a policy's execute()."""

    def __init__(self, policy: str, cause: BaseException):
        super().__init__(f"policy {policy!r} failed: {cause!r}")
        self.policy = policy
        self.cause = cause
