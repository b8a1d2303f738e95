"""The coarse part-of-speech tagset and fine-to-coarse tag mappings.

Twelve categories cover the word classes that recur across languages:

    NOUN, VERB, ADJ, ADV, PRON, DET, ADP, NUM, CONJ, PRT, PUNCT, X

PUNCT renders as "." in files and terminal output; X is the residual
class for abbreviations, foreign words, typos and other leftovers.

A tag mapping assigns one coarse category to every fine tag of a
specific treebank.  Mappings live in small text files, one entry per
line, fine tag and coarse rendering separated by a single tab:

    NNS	NOUN
    VBD	VERB

Lines whose first character is ``#`` and that contain no tab are
comments.  The tab requirement keeps the literal pound-sign fine tag
(a real tag in some treebanks) mappable.
"""

from __future__ import annotations

import enum
import os
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    DuplicateKeyError,
    EmptyMappingError,
    InvalidTagError,
    MappingError,
    ParseError,
    UnknownFineTagError,
)

MAPPING_FORMAT_VERSION = 1

MAP_DIR_ENV_VAR = "UNIPOS_MAP_DIR"


class UniversalTag(enum.Enum):
    """One of the twelve coarse part-of-speech categories.

    The enum value is the rendering used in files and reports.  All
    renderings equal the member name except PUNCT, which renders ".".
    """

    NOUN = "NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    ADV = "ADV"
    PRON = "PRON"
    DET = "DET"
    ADP = "ADP"
    NUM = "NUM"
    CONJ = "CONJ"
    PRT = "PRT"
    PUNCT = "."
    X = "X"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_string(cls, text: str) -> "UniversalTag":
        """Parse a rendering back into a tag.

        Only the twelve renderings are accepted; in particular the
        member name "PUNCT" is not a rendering and does not parse.
        """
        try:
            return cls(text)
        except ValueError:
            raise InvalidTagError(
                f"not a coarse tag rendering: {text!r}"
            ) from None


#: Renderings in enum declaration order; handy for stable iteration.
TAG_RENDERINGS: tuple[str, ...] = tuple(t.value for t in UniversalTag)


@dataclass(frozen=True)
class TagMapping:
    """An immutable fine-tag to coarse-tag table for one treebank.

    ``treebank_id`` is conventionally ``<language>-<treebank>`` and is
    taken from the file name when loaded from disk.
    """

    treebank_id: str
    entries: Mapping[str, UniversalTag]

    def __post_init__(self):
        if not self.entries:
            raise EmptyMappingError(
                f"mapping {self.treebank_id or '<anonymous>'!r} has no entries"
            )
        object.__setattr__(self, "entries", dict(self.entries))

    def __contains__(self, fine_tag: str) -> bool:
        return fine_tag in self.entries

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class ValidationReport:
    """Result of checking a mapping against an observed tag multiset."""

    unknown_tags: list[str] = field(default_factory=list)
    unused_tags: list[str] = field(default_factory=list)
    tag_histogram: dict[UniversalTag, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        """True when every observed fine tag has a mapping entry."""
        return not self.unknown_tags


def _is_comment(line: str) -> bool:
    # A pound sign can be a fine tag, but entry lines always carry a tab.
    return line.startswith("#") and "\t" not in line


def parse_mapping(text: str, treebank_id: str = "") -> TagMapping:
    """Parse mapping-file text into a TagMapping.

    Raises ParseError on malformed lines, InvalidTagError on bad coarse
    renderings, DuplicateKeyError on repeated fine tags and
    EmptyMappingError when no entries remain.  Fine tags are compared
    byte for byte; case is significant.
    """
    entries: dict[str, UniversalTag] = {}
    # Lines are newline-separated; a trailing carriage return is
    # tolerated.  Other control characters are ordinary tag bytes.
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw[:-1] if raw.endswith("\r") else raw
        if not line.strip() or _is_comment(line):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError(
                f"expected 2 tab-separated fields, got {len(fields)}", lineno
            )
        fine, coarse = fields
        if not fine:
            raise ParseError("empty fine tag", lineno)
        if fine in entries:
            raise DuplicateKeyError(
                f"line {lineno}: fine tag {fine!r} mapped twice"
            )
        try:
            entries[fine] = UniversalTag.from_string(coarse)
        except InvalidTagError as exc:
            raise InvalidTagError(f"line {lineno}: {exc}") from None
    if not entries:
        raise EmptyMappingError(
            f"mapping {treebank_id or '<anonymous>'!r} has no entries"
        )
    return TagMapping(treebank_id=treebank_id, entries=entries)


def serialize_mapping(mapping: TagMapping) -> str:
    """Render a TagMapping as mapping-file text, entries sorted by fine tag.

    parse_mapping(serialize_mapping(m)) reproduces m exactly.
    """
    lines = [
        f"{fine}\t{coarse}"
        for fine, coarse in sorted(mapping.entries.items())
    ]
    return "\n".join(lines) + "\n"


def map_tag(
    mapping: TagMapping, fine_tag: str, fallback_x: bool = False
) -> UniversalTag:
    """Look up the coarse tag for ``fine_tag``.

    Unknown fine tags raise UnknownFineTagError unless ``fallback_x``
    is set, in which case they map to X.
    """
    try:
        return mapping.entries[fine_tag]
    except KeyError:
        if fallback_x:
            return UniversalTag.X
        raise UnknownFineTagError(
            f"fine tag {fine_tag!r} not in mapping {mapping.treebank_id!r}"
        ) from None


def validate_mapping(
    mapping: TagMapping,
    observed: Mapping[str, int] | Iterable[str],
) -> ValidationReport:
    """Check a mapping against fine tags observed in a corpus.

    ``observed`` is either a tag -> count mapping or an iterable of tag
    occurrences.  The report lists observed tags missing from the
    mapping, mapping entries never observed, and the coarse-tag
    histogram of the covered occurrences.
    """
    if isinstance(observed, Mapping):
        counts = Counter(dict(observed))
    else:
        counts = Counter(observed)
    known = mapping.entries.keys()
    unknown = sorted(set(counts) - set(known))
    unused = sorted(set(known) - set(counts))
    histogram: Counter[UniversalTag] = Counter()
    for fine, n in counts.items():
        if fine in known:
            histogram[mapping.entries[fine]] += n
    return ValidationReport(
        unknown_tags=unknown,
        unused_tags=unused,
        tag_histogram=dict(histogram),
    )


def load_mapping(path: str | os.PathLike) -> TagMapping:
    """Read a mapping file; the treebank id is the file name stem."""
    p = Path(path)
    return parse_mapping(p.read_text(encoding="utf-8"), treebank_id=p.stem)


def packaged_mappings() -> dict[str, Path]:
    """Mapping files shipped with the package, keyed by treebank id."""
    data_dir = Path(__file__).parent / "data"
    return {p.stem: p for p in sorted(data_dir.glob("*.map"))}


def find_mapping(name: str) -> TagMapping:
    """Resolve a mapping by path or by treebank id.

    Resolution order: an existing file path, then ``<id>.map`` under
    the directory named by the UNIPOS_MAP_DIR environment variable,
    then the mappings shipped with the package.
    """
    p = Path(name)
    if p.is_file():
        return load_mapping(p)
    stem = p.stem if p.suffix == ".map" else name
    env_dir = os.environ.get(MAP_DIR_ENV_VAR)
    if env_dir:
        candidate = Path(env_dir) / f"{stem}.map"
        if candidate.is_file():
            return load_mapping(candidate)
    shipped = packaged_mappings()
    if stem in shipped:
        return load_mapping(shipped[stem])
    raise MappingError(f"no mapping named {name!r} found")
