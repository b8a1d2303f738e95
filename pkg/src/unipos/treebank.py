"""Treebank containers and file formats.

Two text formats are supported, both with blank-line sentence breaks:

* ten-column dependency format: one token per line with columns
  ID, FORM, LEMMA, CPOS, POS, FEATS, HEAD, DEPREL, PHEAD, PDEPREL
  separated by single tabs, underscore for absent values.  FORM, POS
  (the fine tag) and HEAD are modelled; the coarse tag is written to
  and read from the CPOS column.
* two-column word/tag format: FORM and a single tag per line.

Heads are 1-based token positions; 0 denotes the artificial root.
Forms and tags must not contain tab, newline or carriage-return
characters; those bytes are structural.
"""

from __future__ import annotations

import os
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import (
    EmptyCorpusError,
    InvalidTreeError,
    ParseError,
    UnknownFineTagError,
)
from .tagset import TagMapping, UniversalTag, map_tag

_ABSENT = "_"
_CONLL_COLUMNS = 10


@dataclass(frozen=True)
class Token:
    """One token: surface form, fine tag, coarse tag, head position.

    Unset fields are ``""`` for the fine tag and None for the rest.
    """

    form: str
    fine_tag: str = ""
    universal_tag: UniversalTag | None = None
    head: int | None = None

    @property
    def is_punct(self) -> bool:
        return self.universal_tag is UniversalTag.PUNCT


@dataclass(frozen=True)
class Sentence:
    """An immutable sequence of tokens."""

    tokens: tuple[Token, ...]

    def __init__(self, tokens: Iterable[Token]):
        object.__setattr__(self, "tokens", tuple(tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __getitem__(self, i: int) -> Token:
        return self.tokens[i]

    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]

    def fine_tags(self) -> list[str]:
        return [t.fine_tag for t in self.tokens]

    def universal_tags(self) -> list[str]:
        """Coarse-tag renderings; raises if any token is unmapped."""
        out = []
        for i, t in enumerate(self.tokens, start=1):
            if t.universal_tag is None:
                raise ValueError(f"token {i} has no coarse tag")
            out.append(str(t.universal_tag))
        return out

    def heads(self) -> list[int | None]:
        return [t.head for t in self.tokens]


def _parse_head(field: str, lineno: int) -> int | None:
    if field == _ABSENT:
        return None
    try:
        head = int(field)
    except ValueError:
        raise ParseError(f"head is not an integer: {field!r}", lineno) from None
    if head < 0:
        raise ParseError(f"head is negative: {head}", lineno)
    return head


def _parse_universal(field: str) -> UniversalTag | None:
    # The coarse column round-trips when it holds one of our renderings;
    # anything else (including the absent marker) is ignored.
    try:
        return UniversalTag(field)
    except ValueError:
        return None


def read_conllx(lines: Iterable[str]) -> Iterator[Sentence]:
    """Yield sentences from ten-column dependency-format lines."""
    tokens: list[Token] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if line and line.endswith("\r"):
            line = line[:-1]
        if not line.strip():
            if tokens:
                yield Sentence(tokens)
                tokens = []
            continue
        cols = line.split("\t")
        if len(cols) != _CONLL_COLUMNS:
            raise ParseError(
                f"expected {_CONLL_COLUMNS} tab-separated columns, got {len(cols)}",
                lineno,
            )
        try:
            token_id = int(cols[0])
        except ValueError:
            raise ParseError(f"token id is not an integer: {cols[0]!r}", lineno) from None
        if token_id != len(tokens) + 1:
            raise ParseError(
                f"token id {token_id} out of sequence (expected {len(tokens) + 1})",
                lineno,
            )
        tokens.append(
            Token(
                form=cols[1],
                fine_tag="" if cols[4] == _ABSENT else cols[4],
                universal_tag=_parse_universal(cols[3]),
                head=_parse_head(cols[6], lineno),
            )
        )
    if tokens:
        yield Sentence(tokens)


def write_conllx(sentences: Iterable[Sentence]) -> str:
    """Render sentences as ten-column dependency-format text."""
    chunks: list[str] = []
    for sentence in sentences:
        for i, t in enumerate(sentence, start=1):
            cols = [
                str(i),
                t.form,
                _ABSENT,
                str(t.universal_tag) if t.universal_tag is not None else _ABSENT,
                t.fine_tag if t.fine_tag else _ABSENT,
                _ABSENT,
                str(t.head) if t.head is not None else _ABSENT,
                _ABSENT,
                _ABSENT,
                _ABSENT,
            ]
            chunks.append("\t".join(cols))
        chunks.append("")
    return "\n".join(chunks) + ("\n" if chunks else "")


def read_wordtag(lines: Iterable[str]) -> Iterator[Sentence]:
    """Yield sentences from two-column word/tag lines.

    The tag lands in ``fine_tag``; downstream code treats tags as
    opaque strings, so files tagged with coarse renderings work too.
    """
    tokens: list[Token] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if line and line.endswith("\r"):
            line = line[:-1]
        if not line.strip():
            if tokens:
                yield Sentence(tokens)
                tokens = []
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ParseError(
                f"expected 2 tab-separated columns, got {len(cols)}", lineno
            )
        tokens.append(Token(form=cols[0], fine_tag=cols[1]))
    if tokens:
        yield Sentence(tokens)


def write_wordtag(sentences: Iterable[Sentence], tags: str = "fine") -> str:
    """Render sentences as two-column word/tag text.

    ``tags`` selects the tag column: "fine" or "universal".
    """
    if tags not in ("fine", "universal"):
        raise ValueError(f"tags must be 'fine' or 'universal', got {tags!r}")
    chunks: list[str] = []
    for sentence in sentences:
        for t in sentence:
            tag = t.fine_tag if tags == "fine" else (
                str(t.universal_tag) if t.universal_tag is not None else ""
            )
            chunks.append(f"{t.form}\t{tag}")
        chunks.append("")
    return "\n".join(chunks) + ("\n" if chunks else "")


def load_conllx(path: str | os.PathLike) -> list[Sentence]:
    with Path(path).open(encoding="utf-8") as handle:
        return list(read_conllx(handle))


def load_wordtag(path: str | os.PathLike) -> list[Sentence]:
    with Path(path).open(encoding="utf-8") as handle:
        return list(read_wordtag(handle))


def apply_mapping(
    sentence: Sentence, mapping: TagMapping, fallback_x: bool = False
) -> Sentence:
    """Return a copy with the coarse tag filled in from each fine tag.

    Unknown fine tags raise UnknownFineTagError naming the token
    position unless ``fallback_x`` maps them to X.
    """
    out = []
    for i, t in enumerate(sentence, start=1):
        try:
            coarse = map_tag(mapping, t.fine_tag, fallback_x=fallback_x)
        except UnknownFineTagError as exc:
            raise UnknownFineTagError(f"token {i}: {exc}") from None
        out.append(replace(t, universal_tag=coarse))
    return Sentence(out)


def map_corpus(
    sentences: Iterable[Sentence], mapping: TagMapping, fallback_x: bool = False
) -> list[Sentence]:
    """apply_mapping over a corpus, errors naming the sentence."""
    out = []
    for n, sentence in enumerate(sentences, start=1):
        try:
            out.append(apply_mapping(sentence, mapping, fallback_x=fallback_x))
        except UnknownFineTagError as exc:
            raise UnknownFineTagError(f"sentence {n}, {exc}") from None
    return out


def _check_heads(sentence: Sentence) -> list[int]:
    """Validate the head structure as a tree rooted at position 0."""
    n = len(sentence)
    heads: list[int] = []
    for i, t in enumerate(sentence, start=1):
        if t.head is None:
            raise InvalidTreeError(f"token {i} has no head")
        if not 0 <= t.head <= n:
            raise InvalidTreeError(f"token {i} head {t.head} out of range 0..{n}")
        if t.head == i:
            raise InvalidTreeError(f"token {i} is its own head")
        heads.append(t.head)
    # Every token must reach the root without revisiting a node.
    for i in range(1, n + 1):
        seen = set()
        node = i
        while node != 0:
            if node in seen:
                raise InvalidTreeError(f"cycle through token {node}")
            seen.add(node)
            node = heads[node - 1]
    return heads


def strip_punctuation(sentence: Sentence) -> Sentence:
    """Drop punctuation tokens, re-attaching their dependents.

    Every token needs its coarse tag set.  When heads are present they
    must form a valid tree; each surviving dependent of a punctuation
    token is re-attached to its nearest non-punctuation ancestor (the
    root if none exists), and heads are re-indexed.  Sentences without
    any heads are simply filtered.  Idempotent.
    """
    n = len(sentence)
    for i, t in enumerate(sentence, start=1):
        if t.universal_tag is None:
            raise ValueError(f"token {i} has no coarse tag")
    headed = [t.head is not None for t in sentence]
    if any(headed) and not all(headed):
        raise InvalidTreeError("mixed headed and head-less tokens")

    keep = [i for i, t in enumerate(sentence, start=1) if not t.is_punct]
    new_pos = {old: new for new, old in enumerate(keep, start=1)}

    if not any(headed):
        return Sentence(sentence[i - 1] for i in keep)

    heads = _check_heads(sentence)
    is_punct = [t.is_punct for t in sentence]

    def survivor_head(old: int) -> int:
        node = heads[old - 1]
        while node != 0 and is_punct[node - 1]:
            node = heads[node - 1]
        return new_pos[node] if node != 0 else 0

    out = [
        replace(sentence[old - 1], head=survivor_head(old)) for old in keep
    ]
    return Sentence(out)


def filter_by_length(
    corpus: Iterable[Sentence], max_len: int
) -> list[Sentence]:
    """Keep sentences with at most ``max_len`` tokens."""
    if max_len < 1:
        raise ValueError(f"max_len must be positive, got {max_len}")
    return [s for s in corpus if len(s) <= max_len]


def corpus_fine_tags(sentences: Iterable[Sentence]) -> dict[str, int]:
    """Count fine-tag occurrences across a corpus."""
    counts: dict[str, int] = {}
    for sentence in sentences:
        for t in sentence:
            counts[t.fine_tag] = counts.get(t.fine_tag, 0) + 1
    return counts


def require_nonempty(sentences: Sequence[Sentence], what: str) -> None:
    """Raise EmptyCorpusError unless at least one token is present."""
    if not sentences or all(len(s) == 0 for s in sentences):
        raise EmptyCorpusError(f"{what} is empty")
