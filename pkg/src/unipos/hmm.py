"""Trigram hidden Markov tagger.

Transitions are maximum-likelihood trigram, bigram and unigram
estimates combined by deleted interpolation; emissions are relative
frequencies; unknown words are scored by a suffix model trained on
rare words, split by capitalisation.  Decoding is beam-pruned Viterbi
in log space with a deterministic lexicographic tie-break, so equal
probability mass never makes output depend on iteration order.

Boundary handling: each sentence is padded with two start symbols and
one end symbol.  Every conditional distribution therefore normalises
over the observed tags plus the end symbol.
"""

from __future__ import annotations

import json
import math
import os
from collections import Counter, defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyCorpusError, ParseError
from .tagset import TagMapping, map_tag

#: Boundary pseudo-tags; real tags must not use these strings.
START = "<s>"
END = "</s>"

MODEL_FORMAT_VERSION = 1

DEFAULT_MAX_SUFFIX_LEN = 10
DEFAULT_RARE_THRESHOLD = 10
DEFAULT_BEAM = 1000.0

TaggedSentence = Sequence[tuple[str, str]]


@dataclass
class TrigramCounts:
    """Event counts over padded tag trigram windows.

    A sentence tagged t1..tn contributes the windows
    (S, S, t1), (S, t1, t2), ..., (t_{n-1}, t_n, E).  All five tables
    count those windows, keyed by different projections, so the three
    interpolated estimates share one event space and each conditional
    distribution sums to one over tags plus the end symbol.
    """

    trigram: dict[tuple[str, str, str], int] = field(default_factory=dict)
    context: dict[tuple[str, str], int] = field(default_factory=dict)
    pair: dict[tuple[str, str], int] = field(default_factory=dict)
    mid: dict[str, int] = field(default_factory=dict)
    outcome: dict[str, int] = field(default_factory=dict)
    n_events: int = 0

    @classmethod
    def from_sequences(cls, tag_sequences: Iterable[Sequence[str]]) -> "TrigramCounts":
        counts = cls()
        tri = Counter()
        ctx = Counter()
        pair = Counter()
        mid = Counter()
        out = Counter()
        for tags in tag_sequences:
            padded = [START, START, *tags, END]
            for i in range(len(padded) - 2):
                a, b, c = padded[i], padded[i + 1], padded[i + 2]
                tri[a, b, c] += 1
                ctx[a, b] += 1
                pair[b, c] += 1
                mid[b] += 1
                out[c] += 1
                counts.n_events += 1
        counts.trigram = dict(tri)
        counts.context = dict(ctx)
        counts.pair = dict(pair)
        counts.mid = dict(mid)
        counts.outcome = dict(out)
        return counts


def deleted_interpolation(counts: TrigramCounts) -> tuple[float, float, float]:
    """Estimate interpolation weights (lambda1, lambda2, lambda3).

    For every trigram type, its three frequency estimates are compared
    after deleting the trigram's own occurrence; the trigram's count is
    credited to the order with the largest discounted ratio.  0/0
    ratios count as zero and ties split the credit equally.  The
    returned weights are normalised to sum to one.
    """
    credit = [0.0, 0.0, 0.0]
    for (t1, t2, t3), c in counts.trigram.items():
        r3_num, r3_den = c - 1, counts.context[t1, t2] - 1
        r2_num, r2_den = counts.pair[t2, t3] - 1, counts.mid[t2] - 1
        r1_num, r1_den = counts.outcome[t3] - 1, counts.n_events - 1
        ratios = [
            r1_num / r1_den if r1_den > 0 else 0.0,
            r2_num / r2_den if r2_den > 0 else 0.0,
            r3_num / r3_den if r3_den > 0 else 0.0,
        ]
        best = max(ratios)
        winners = [i for i, r in enumerate(ratios) if r == best]
        share = c / len(winners)
        for i in winners:
            credit[i] += share
    total = sum(credit)
    if total == 0.0:
        return (1.0, 0.0, 0.0)
    return (credit[0] / total, credit[1] / total, credit[2] / total)


@dataclass
class SuffixModel:
    """Suffix statistics over rare training words, split by case.

    Tag probabilities conditioned on progressively longer suffixes are
    blended by successive abstraction: starting from the unconditioned
    rare-word tag distribution, each longer suffix refines the previous
    estimate with weight controlled by theta, the variance of the
    unconditioned tag probabilities.
    """

    max_suffix_len: int
    #: counts[capitalised][suffix][tag] over rare-word tokens; the
    #: empty suffix row doubles as the unconditioned distribution.
    counts: dict[bool, dict[str, dict[str, int]]]
    theta: float
    tagset: tuple[str, ...]

    @classmethod
    def train(
        cls,
        tagged_sentences: Iterable[TaggedSentence],
        word_freq: dict[str, int],
        tagset: Sequence[str],
        max_suffix_len: int = DEFAULT_MAX_SUFFIX_LEN,
        rare_threshold: int = DEFAULT_RARE_THRESHOLD,
    ) -> "SuffixModel":
        counts: dict[bool, dict[str, dict[str, int]]] = {True: {}, False: {}}
        for sentence in tagged_sentences:
            for word, tag in sentence:
                if word_freq[word] > rare_threshold:
                    continue
                table = counts[word[:1].isupper()]
                for k in range(0, min(len(word), max_suffix_len) + 1):
                    suffix = word[len(word) - k :] if k else ""
                    row = table.setdefault(suffix, {})
                    row[tag] = row.get(tag, 0) + 1
        theta = cls._theta(counts, tagset)
        return cls(
            max_suffix_len=max_suffix_len,
            counts=counts,
            theta=theta,
            tagset=tuple(tagset),
        )

    @staticmethod
    def _theta(counts, tagset) -> float:
        # Sample variance of the unconditioned tag probabilities.
        total = {t: 0 for t in tagset}
        for table in counts.values():
            for tag, c in table.get("", {}).items():
                total[tag] += c
        n = sum(total.values())
        if n == 0 or len(tagset) < 2:
            return 0.0
        probs = [total[t] / n for t in tagset]
        mean = sum(probs) / len(probs)
        return sum((p - mean) ** 2 for p in probs) / (len(probs) - 1)

    def distribution(self, word: str) -> dict[str, float]:
        """P(tag | word) for an unseen word, from its longest known suffix.

        Returns a distribution over the training tagset.  It is the
        unconditioned rare-word distribution refined once per known
        suffix of increasing length.
        """
        table = self.counts[word[:1].isupper()]
        base = table.get("") or self._merged_base()
        n = sum(base.values())
        probs = {t: base.get(t, 0) / n for t in self.tagset}
        for k in range(1, min(len(word), self.max_suffix_len) + 1):
            row = table.get(word[len(word) - k :])
            if row is None:
                break
            m = sum(row.values())
            probs = {
                t: (row.get(t, 0) / m + self.theta * probs[t]) / (1.0 + self.theta)
                for t in self.tagset
            }
        return probs

    def _merged_base(self) -> dict[str, int]:
        # One capitalisation class may be empty; fall back to the union.
        merged: dict[str, int] = {}
        for table in self.counts.values():
            for tag, c in table.get("", {}).items():
                merged[tag] = merged.get(tag, 0) + c
        if not merged:
            merged = {t: 1 for t in self.tagset}
        return merged


@dataclass
class TrigramHmm:
    """A trained tagger: counts, interpolation weights, suffix model."""

    tagset: tuple[str, ...]
    counts: TrigramCounts
    lambdas: tuple[float, float, float]
    emission: dict[str, dict[str, int]]
    tag_totals: dict[str, int]
    vocabulary: set[str]
    suffix_model: SuffixModel
    max_suffix_len: int = DEFAULT_MAX_SUFFIX_LEN
    rare_threshold: int = DEFAULT_RARE_THRESHOLD

    def __post_init__(self):
        self._tag_index = {t: i for i, t in enumerate(self.tagset)}
        n_tokens = sum(self.tag_totals.values())
        self._tag_prior = {
            t: self.tag_totals[t] / n_tokens for t in self.tagset
        }

    # ------------------------------------------------------------------
    # Transition model

    def transition_prob(self, t1: str, t2: str, t3: str) -> float:
        """Interpolated P(t3 | t1, t2)."""
        l1, l2, l3 = self.lambdas
        c = self.counts
        p1 = c.outcome.get(t3, 0) / c.n_events
        ctx = c.context.get((t1, t2), 0)
        p3 = c.trigram.get((t1, t2, t3), 0) / ctx if ctx else 0.0
        mid = c.mid.get(t2, 0)
        p2 = c.pair.get((t2, t3), 0) / mid if mid else 0.0
        return l1 * p1 + l2 * p2 + l3 * p3

    def transition_logprob(self, t1: str, t2: str, t3: str) -> float:
        p = self.transition_prob(t1, t2, t3)
        return math.log(p) if p > 0.0 else -math.inf

    # ------------------------------------------------------------------
    # Emission model

    def emission_logprobs(self, word: str) -> dict[str, float]:
        """Candidate tags with log emission scores for one word.

        Known words emit P(word | tag) over the tags seen with the
        word.  Unknown words score P(tag | word) from the suffix model
        divided by the tag prior, which is P(word | tag) up to a
        word-constant factor.
        """
        if word in self.vocabulary:
            out = {}
            for tag, row in self.emission.items():
                c = row.get(word)
                if c:
                    out[tag] = math.log(c / self.tag_totals[tag])
            return out
        dist = self.suffix_model.distribution(word)
        out = {}
        for tag, p in dist.items():
            prior = self._tag_prior[tag]
            if p > 0.0 and prior > 0.0:
                out[tag] = math.log(p / prior)
        return out

    def suffix_distribution(self, word: str) -> dict[str, float]:
        """P(tag | word) for an unseen word; sums to one."""
        return self.suffix_model.distribution(word)

    # ------------------------------------------------------------------
    # Decoding

    def viterbi(
        self, words: Sequence[str], beam: float | None = DEFAULT_BEAM
    ) -> list[str]:
        """Most probable tag sequence for ``words``.

        ``beam`` is a multiplicative pruning factor: after each
        position, states worse than the best by more than log(beam)
        are dropped.  None or infinity disables pruning.  Exact ties
        resolve to the sequence whose earliest differing tag has the
        lowest tagset index, so the argmax is unique.
        """
        if not words:
            raise ValueError("cannot tag an empty sentence")
        if beam is not None:
            if beam < 1.0:
                raise ValueError(f"beam factor must be >= 1, got {beam}")
            margin = math.log(beam)
        else:
            margin = math.inf

        # delta: (prev2, prev1) -> best log score.  history[t] maps a
        # state at step t to the best predecessor tag, so prefixes can
        # be materialised for tie comparison and final read-out.
        delta: dict[tuple[str, str], float] = {(START, START): 0.0}
        history: list[dict[tuple[str, str], str]] = []
        index = self._tag_index

        def prefix_key(t: int, state: tuple[str, str]) -> list[int]:
            out = []
            while t >= 0:
                out.append(index[state[1]])
                state = (history[t][state], state[0])
                t -= 1
            out.reverse()
            return out

        for t, word in enumerate(words):
            scores = self.emission_logprobs(word)
            if not scores:
                # No candidate tag at all: every tag ties at log 0.
                # Score them all so the tie-break stays well defined.
                scores = {tag: -math.inf for tag in self.tagset}
            new_delta: dict[tuple[str, str], float] = {}
            back: dict[tuple[str, str], str] = {}
            for (p2, p1), score in delta.items():
                for tag, emit in scores.items():
                    cand = score + self.transition_logprob(p2, p1, tag) + emit
                    key = (p1, tag)
                    old = new_delta.get(key)
                    if old is None or cand > old:
                        new_delta[key] = cand
                        back[key] = p2
                    elif cand == old:
                        # Equal mass: keep the prefix whose earliest
                        # differing tag has the lower index.
                        if t > 0 and prefix_key(t - 1, (p2, p1)) < prefix_key(
                            t - 1, (back[key], p1)
                        ):
                            back[key] = p2
            history.append(back)
            best = max(new_delta.values())
            delta = {k: v for k, v in new_delta.items() if v >= best - margin}

        last = len(words) - 1
        best_state: tuple[str, str] | None = None
        best_total = -math.inf
        best_key: list[int] | None = None
        for (p2, p1), score in sorted(delta.items()):
            total = score + self.transition_logprob(p2, p1, END)
            if best_state is None or total > best_total:
                best_state, best_total = (p2, p1), total
                best_key = None
            elif total == best_total:
                if best_key is None:
                    best_key = prefix_key(last, best_state)
                cand_key = prefix_key(last, (p2, p1))
                if cand_key < best_key:
                    best_state, best_key = (p2, p1), cand_key
        assert best_state is not None
        tags = []
        state = best_state
        t = last
        while t >= 0:
            tags.append(state[1])
            state = (history[t][state], state[0])
            t -= 1
        tags.reverse()
        return tags

    # ------------------------------------------------------------------
    # Serialisation

    def to_json(self) -> str:
        """Canonical JSON text; loading reproduces the model exactly."""
        payload = {
            "format": MODEL_FORMAT_VERSION,
            "tagset": list(self.tagset),
            "lambdas": list(self.lambdas),
            "max_suffix_len": self.max_suffix_len,
            "rare_threshold": self.rare_threshold,
            "n_events": self.counts.n_events,
            "trigrams": sorted(
                [a, b, c, n] for (a, b, c), n in self.counts.trigram.items()
            ),
            "emissions": sorted(
                [tag, word, n]
                for tag, row in self.emission.items()
                for word, n in row.items()
            ),
            "tag_totals": dict(sorted(self.tag_totals.items())),
            "vocabulary": sorted(self.vocabulary),
            "suffix_theta": self.suffix_model.theta,
            "suffix_counts": sorted(
                [int(cap), suffix, tag, n]
                for cap, table in self.suffix_model.counts.items()
                for suffix, row in table.items()
                for tag, n in row.items()
            ),
        }
        return json.dumps(
            payload, sort_keys=True, ensure_ascii=False, separators=(",", ":")
        )

    @classmethod
    def from_json(cls, text: str) -> "TrigramHmm":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"model file is not valid JSON: {e}") from e
        if not isinstance(payload, dict):
            raise ParseError("model file is not a JSON object")
        if payload.get("format") != MODEL_FORMAT_VERSION:
            raise ParseError(
                f"unsupported model format: {payload.get('format')!r}"
            )
        try:
            tagset = tuple(payload["tagset"])
            counts = TrigramCounts(n_events=payload["n_events"])
            tri = Counter()
            ctx = Counter()
            pair = Counter()
            mid = Counter()
            out = Counter()
            for a, b, c, n in payload["trigrams"]:
                tri[a, b, c] += n
                ctx[a, b] += n
                pair[b, c] += n
                mid[b] += n
                out[c] += n
            counts.trigram = dict(tri)
            counts.context = dict(ctx)
            counts.pair = dict(pair)
            counts.mid = dict(mid)
            counts.outcome = dict(out)
            emission: dict[str, dict[str, int]] = defaultdict(dict)
            for tag, word, n in payload["emissions"]:
                emission[tag][word] = n
            suffix_counts: dict[bool, dict[str, dict[str, int]]] = {
                True: {},
                False: {},
            }
            for cap, suffix, tag, n in payload["suffix_counts"]:
                row = suffix_counts[bool(cap)].setdefault(suffix, {})
                row[tag] = n
            suffix_model = SuffixModel(
                max_suffix_len=payload["max_suffix_len"],
                counts=suffix_counts,
                theta=payload["suffix_theta"],
                tagset=tagset,
            )
            return cls(
                tagset=tagset,
                counts=counts,
                lambdas=tuple(payload["lambdas"]),
                emission=dict(emission),
                tag_totals=dict(payload["tag_totals"]),
                vocabulary=set(payload["vocabulary"]),
                suffix_model=suffix_model,
                max_suffix_len=payload["max_suffix_len"],
                rare_threshold=payload["rare_threshold"],
            )
        except ParseError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"malformed model file: {e}") from e

    def save(self, path: str | os.PathLike) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | os.PathLike) -> "TrigramHmm":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def train(
    corpus: Iterable[TaggedSentence],
    max_suffix_len: int = DEFAULT_MAX_SUFFIX_LEN,
    rare_threshold: int = DEFAULT_RARE_THRESHOLD,
) -> TrigramHmm:
    """Train a tagger on (word, tag) sentences.

    Raises EmptyCorpusError when no tokens are present and ValueError
    on empty tags.
    """
    sentences = [list(s) for s in corpus]
    if not sentences or all(len(s) == 0 for s in sentences):
        raise EmptyCorpusError("training corpus is empty")
    if max_suffix_len < 0:
        raise ValueError(f"max_suffix_len must be >= 0, got {max_suffix_len}")
    if rare_threshold < 0:
        raise ValueError(f"rare_threshold must be >= 0, got {rare_threshold}")

    word_freq: Counter[str] = Counter()
    tag_totals: Counter[str] = Counter()
    emission: dict[str, dict[str, int]] = defaultdict(lambda: defaultdict(int))
    for sentence in sentences:
        for word, tag in sentence:
            if not tag:
                raise ValueError(f"token {word!r} has an empty tag")
            if tag in (START, END):
                raise ValueError(f"tag {tag!r} collides with a boundary symbol")
            word_freq[word] += 1
            tag_totals[tag] += 1
            emission[tag][word] += 1

    tagset = tuple(sorted(tag_totals))
    counts = TrigramCounts.from_sequences(
        [tag for _, tag in s] for s in sentences
    )
    lambdas = deleted_interpolation(counts)
    suffix_model = SuffixModel.train(
        sentences,
        word_freq,
        tagset,
        max_suffix_len=max_suffix_len,
        rare_threshold=rare_threshold,
    )
    return TrigramHmm(
        tagset=tagset,
        counts=counts,
        lambdas=lambdas,
        emission={t: dict(row) for t, row in emission.items()},
        tag_totals=dict(tag_totals),
        vocabulary=set(word_freq),
        suffix_model=suffix_model,
        max_suffix_len=max_suffix_len,
        rare_threshold=rare_threshold,
    )


def evaluate(
    model: TrigramHmm,
    corpus: Iterable[TaggedSentence],
    eval_mapping: TagMapping | None = None,
    beam: float | None = DEFAULT_BEAM,
) -> float:
    """Token accuracy of the model on a gold-tagged corpus.

    With ``eval_mapping``, both the predicted and the gold tag are
    mapped to coarse categories before comparison, so a fine-tag model
    can be scored at the coarse level.
    """
    correct = 0
    total = 0
    for sentence in corpus:
        pairs = list(sentence)
        if not pairs:
            continue
        words = [w for w, _ in pairs]
        gold = [t for _, t in pairs]
        pred = model.viterbi(words, beam=beam)
        for p, g in zip(pred, gold):
            if eval_mapping is not None:
                p_cmp = map_tag(eval_mapping, p)
                g_cmp = map_tag(eval_mapping, g)
                correct += p_cmp is g_cmp
            else:
                correct += p == g
            total += 1
    if total == 0:
        raise EmptyCorpusError("evaluation corpus is empty")
    return correct / total
