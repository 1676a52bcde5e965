"""Exception hierarchy shared by every nfat module.

Everything raised on purpose derives from :class:`NfatError`, which the CLI
maps to exit status 1.
"""


class NfatError(Exception):
    """Base class for domain errors."""


# -- ingest -----------------------------------------------------------------

class IngestError(NfatError):
    """A single log line could not be turned into a LogEvent."""

    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class MalformedLine(IngestError):
    pass


class FieldOutOfRange(IngestError):
    pass


class UnknownProtocol(IngestError):
    pass


class BadTimestamp(IngestError):
    pass


class BadAddress(IngestError):
    pass


class DuplicateEvent(IngestError):
    pass


# -- clustering / labeling / criteria ---------------------------------------

class DimensionMismatch(NfatError):
    pass


class TooFewPoints(NfatError):
    pass


class WrongClusterCount(NfatError):
    pass


class LengthMismatch(NfatError):
    pass


class RulesFileError(NfatError):
    pass


# -- evidence store ---------------------------------------------------------

class CaseNotFound(NfatError):
    pass


class DuplicateCase(NfatError):
    pass


class InvalidIdentifier(NfatError):
    pass


class InvalidRange(NfatError):
    pass


class DuplicateAnalysis(NfatError):
    pass


class AnalysisNotFound(NfatError):
    pass


class StoreLocked(NfatError):
    pass
