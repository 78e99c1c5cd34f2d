"""Exception hierarchy shared by every specforge module.

Each family carries the exit code the command line reports for it:
1 usage, 2 provider, 3 parse or assessment, 4 data integrity.
"""


class SpecforgeError(Exception):
    """Base class of all specforge errors."""
    exit_code = 4


# Usage errors

class UsageError(SpecforgeError):
    exit_code = 1


class PreconditionError(UsageError, ValueError):
    """An operation was called with arguments violating its precondition."""


class UnknownDomain(PreconditionError):
    pass


class WrongPromptKind(PreconditionError):
    pass


class UnknownPlaceholder(PreconditionError):
    pass


class EmptyRationale(PreconditionError):
    pass


class InvalidScale(PreconditionError):
    pass


class TooFewValues(PreconditionError):
    pass


class TooFewDocuments(PreconditionError):
    pass


class MixedDomains(PreconditionError):
    pass


class UnsupportedReplay(PreconditionError):
    """A same-context assessment was requested for a transcript that does not exist."""


class TemplateConfigError(PreconditionError):
    pass


# Provider errors

class ProviderError(SpecforgeError):
    exit_code = 2


class TransportError(ProviderError):
    """Transient failure; the gateway retries these."""


class RateLimited(TransportError):
    pass


class ProviderRefusal(ProviderError):
    """Non-retryable rejection by the provider."""


class EmptyResponse(ProviderError):
    pass


class EmbeddingProviderError(ProviderError):
    pass


# Parse and assessment errors

class ParseError(SpecforgeError):
    exit_code = 3


class EmptyInput(ParseError):
    pass


class NoRecognizableStructure(ParseError):
    pass


class MalformedAssessment(ParseError):
    pass


class UnknownSeverity(ParseError):
    pass


class ScoreOutOfRange(ParseError):
    pass


# Data integrity errors

class DataIntegrityError(SpecforgeError):
    exit_code = 4


class TemplateMismatch(DataIntegrityError):
    pass


class DimensionMismatch(DataIntegrityError):
    pass


class ZeroVector(DataIntegrityError):
    pass


class AlreadyDecided(DataIntegrityError):
    pass


class NoCompletedIteration(DataIntegrityError):
    pass


class EmptyGroup(DataIntegrityError):
    pass


class LedgerIntegrityError(DataIntegrityError):
    pass


class ExportError(DataIntegrityError):
    pass
