"""Universal part-of-speech toolkit.

A coarse 12-category tagset, mappings from treebank-specific fine
tagsets onto it, a trigram hidden Markov tagger, cross-treebank
tagging experiments, and dependency grammar induction over the coarse
categories.
"""

from .errors import (
    DuplicateKeyError,
    EmptyCorpusError,
    EmptyMappingError,
    InsufficientDataError,
    InvalidTagError,
    InvalidTreeError,
    MappingError,
    ParseError,
    UniposError,
    UnknownFineTagError,
)
from .tagset import (
    MAPPING_FORMAT_VERSION,
    TagMapping,
    UniversalTag,
    ValidationReport,
    find_mapping,
    load_mapping,
    map_tag,
    parse_mapping,
    serialize_mapping,
    validate_mapping,
)

__version__ = "1.0.0"

__all__ = [
    "DuplicateKeyError",
    "EmptyCorpusError",
    "EmptyMappingError",
    "InsufficientDataError",
    "InvalidTagError",
    "InvalidTreeError",
    "MappingError",
    "MAPPING_FORMAT_VERSION",
    "ParseError",
    "TagMapping",
    "UniposError",
    "UniversalTag",
    "UnknownFineTagError",
    "ValidationReport",
    "find_mapping",
    "load_mapping",
    "map_tag",
    "parse_mapping",
    "serialize_mapping",
    "validate_mapping",
    "__version__",
]
