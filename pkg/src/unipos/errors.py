"""Exception hierarchy shared across the toolkit.

Every error raised on bad input derives from UniposError, so callers
(including the command-line front end) can distinguish data problems
from programming bugs with a single except clause.
"""


class UniposError(Exception):
    """Base class for all toolkit errors."""


class MappingError(UniposError, ValueError):
    """A tag-mapping file or mapping operation is invalid."""


class ParseError(UniposError, ValueError):
    """A line of an input file could not be parsed.

    Carries the 1-based line number when known.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateKeyError(MappingError):
    """The same fine tag is mapped twice in one mapping file."""


class InvalidTagError(MappingError):
    """A token is not one of the twelve coarse-tag renderings."""


class EmptyMappingError(MappingError):
    """A mapping file contains no entries."""


class UnknownFineTagError(MappingError):
    """A fine tag has no entry in the mapping and fallback is disabled."""


class EmptyCorpusError(UniposError, ValueError):
    """An operation that needs data was given an empty corpus."""


class InvalidTreeError(UniposError, ValueError):
    """A head structure is not a valid dependency tree."""


class InsufficientDataError(UniposError, ValueError):
    """Too few observations for the requested statistic."""
