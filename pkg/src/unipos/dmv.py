"""Dependency grammar induction over coarse tag sequences.

The generative model produces a projective dependency tree from the
tag sequence alone.  An artificial root at position 0 generates the
sentence head(s) rightward; every head then generates dependents
outward in each direction, deciding stop-or-continue with separate
probabilities for the adjacent (no dependent yet) and non-adjacent
cases, and drawing each dependent's tag from a per-head-direction
attachment distribution.

Training is inside-outside EM with additive smoothing in the M step.
Prior knowledge enters as soft rules: an attachment named by a rule
has its factor multiplied by exp(strength) during expectation and
decoding, which biases rather than constrains the search.

Sentences are sequences of tag strings; heads are 1-based positions
with 0 for the root.
"""

from __future__ import annotations

import math
import os
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _chart
from .errors import (
    DuplicateKeyError,
    EmptyCorpusError,
    InvalidTagError,
    InvalidTreeError,
    ParseError,
)
from .tagset import UniversalTag

#: Additive smoothing applied to expected counts in every M step.
EM_EPSILON = 1e-6

#: Head label naming the artificial root in rule files.
ROOT_LABEL = "ROOT"

LEFT = 0
RIGHT = 1

#: Adjacency index: 1 while a head has no dependent in a direction.
ADJACENT = 1
NON_ADJACENT = 0


# ----------------------------------------------------------------------
# Parameters


@dataclass(frozen=True)
class DmvParameters:
    """Model parameters over a fixed tag inventory.

    ``attach[h, d, t]`` is the probability that head row ``h`` (tag
    index, or ``len(tags)`` for the root) generates dependent tag
    ``t`` in direction ``d``; rows sum to one.  ``stop[h, d, a]`` is
    the stop probability with adjacency ``a``.  With ``single_root``
    the root's stop row is pinned so it generates exactly one
    dependent; the root never generates leftward either way.
    """

    tags: tuple[str, ...]
    attach: np.ndarray
    stop: np.ndarray
    single_root: bool = True

    @property
    def root_index(self) -> int:
        return len(self.tags)

    def tag_index(self, tag: str) -> int:
        try:
            return self.tags.index(tag)
        except ValueError:
            raise InvalidTagError(
                f"tag {tag!r} not in model inventory {self.tags}"
            ) from None

    def validate(self, tol: float = 1e-9) -> None:
        T = len(self.tags)
        if self.attach.shape != (T + 1, 2, T):
            raise ValueError(f"attach shape {self.attach.shape} != {(T + 1, 2, T)}")
        if self.stop.shape != (T + 1, 2, 2):
            raise ValueError(f"stop shape {self.stop.shape} != {(T + 1, 2, 2)}")
        sums = self.attach.sum(axis=2)
        if not np.all(np.abs(sums - 1.0) < tol):
            raise ValueError("attach rows do not sum to one")
        if np.any(self.stop < -tol) or np.any(self.stop > 1.0 + tol):
            raise ValueError("stop probabilities outside [0, 1]")


def _pin_root(stop: np.ndarray, single_root: bool) -> None:
    root = stop.shape[0] - 1
    stop[root, LEFT, :] = 1.0
    if single_root:
        stop[root, RIGHT, ADJACENT] = 0.0
        stop[root, RIGHT, NON_ADJACENT] = 1.0


def init_harmonic(
    corpus: Sequence[Sequence[str]],
    tags: Sequence[str] | None = None,
    single_root: bool = True,
    smoothing: float = 0.1,
) -> DmvParameters:
    """Distance-harmonic initial parameters.

    Every ordered token pair contributes 1/distance pseudo-count to
    the corresponding attachment cell, the root contributes 1/position
    to each token, and ``smoothing`` is added everywhere before
    normalising over the observed tag inventory.  Stop probabilities
    start at one half.  Deterministic.
    """
    if smoothing <= 0.0:
        raise ValueError(f"smoothing must be positive, got {smoothing}")
    seqs = [list(s) for s in corpus]
    if not seqs or all(len(s) == 0 for s in seqs):
        raise EmptyCorpusError("initialisation corpus is empty")
    inventory = tuple(tags) if tags is not None else tuple(
        sorted({t for s in seqs for t in s})
    )
    index = {t: i for i, t in enumerate(inventory)}
    T = len(inventory)
    root = T
    counts = np.zeros((T + 1, 2, T))
    for s in seqs:
        ids = [index[t] for t in s]
        for d, td in enumerate(ids, start=1):
            counts[root, RIGHT, td] += 1.0 / d
            for h, th in enumerate(ids, start=1):
                if h == d:
                    continue
                direction = RIGHT if d > h else LEFT
                counts[th, direction, td] += 1.0 / abs(d - h)
    attach = counts + smoothing
    attach /= attach.sum(axis=2, keepdims=True)
    stop = np.full((T + 1, 2, 2), 0.5)
    _pin_root(stop, single_root)
    return DmvParameters(
        tags=inventory, attach=attach, stop=stop, single_root=single_root
    )


# ----------------------------------------------------------------------
# Rules


@dataclass(frozen=True)
class RuleSet:
    """Soft attachment preferences: (head tag, dependent tag) pairs.

    The head may be ROOT.  A rule's strength, or ``default_strength``
    when the file leaves it blank, scales matching attachments by
    exp(strength) during inference.  Strength zero therefore changes
    nothing.
    """

    edges: dict[tuple[str, str], float | None] = field(default_factory=dict)
    default_strength: float = 1.0

    def strength(self, head: str, dependent: str) -> float | None:
        """Effective strength for an edge, or None when no rule matches."""
        s = self.edges.get((head, dependent), _MISSING)
        if s is _MISSING:
            return None
        return self.default_strength if s is None else s


_MISSING = object()


def parse_rules(text: str, default_strength: float = 1.0) -> RuleSet:
    """Parse rule lines: HEAD, dependent, optional strength, tab-separated.

    Head and dependent must be coarse-tag renderings; the head may
    also be ROOT.  Lines starting with ``#`` and blank lines are
    skipped.
    """
    edges: dict[tuple[str, str], float | None] = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw[:-1] if raw.endswith("\r") else raw
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) not in (2, 3):
            raise ParseError(
                f"expected 2 or 3 tab-separated fields, got {len(fields)}",
                lineno,
            )
        head, dependent = fields[0], fields[1]
        if head != ROOT_LABEL:
            try:
                UniversalTag.from_string(head)
            except InvalidTagError:
                raise InvalidTagError(
                    f"line {lineno}: head {head!r} is neither a coarse tag nor {ROOT_LABEL}"
                ) from None
        try:
            UniversalTag.from_string(dependent)
        except InvalidTagError:
            raise InvalidTagError(
                f"line {lineno}: dependent {dependent!r} is not a coarse tag"
            ) from None
        strength: float | None = None
        if len(fields) == 3:
            try:
                strength = float(fields[2])
            except ValueError:
                raise ParseError(
                    f"strength is not a number: {fields[2]!r}", lineno
                ) from None
        if (head, dependent) in edges:
            raise DuplicateKeyError(
                f"line {lineno}: rule {head} -> {dependent} given twice"
            )
        edges[head, dependent] = strength
    return RuleSet(edges=edges, default_strength=default_strength)


def load_rules(path: str | os.PathLike, default_strength: float = 1.0) -> RuleSet:
    return parse_rules(
        Path(path).read_text(encoding="utf-8"), default_strength=default_strength
    )


def default_rules(default_strength: float = 1.0) -> RuleSet:
    """The ruleset shipped with the package."""
    path = Path(__file__).parent / "data" / "default.rules"
    return load_rules(path, default_strength=default_strength)


def rule_bias(rules: RuleSet | None, params: DmvParameters) -> np.ndarray:
    """Per-(head row, dependent tag) attachment multipliers.

    Rules naming tags outside the model inventory are ignored.  With
    no rules the matrix is all ones, which is also the exact effect of
    strength-zero rules.
    """
    T = len(params.tags)
    bias = np.ones((T + 1, T))
    if rules is None:
        return bias
    index = {t: i for i, t in enumerate(params.tags)}
    for (head, dependent), _ in rules.edges.items():
        strength = rules.strength(head, dependent)
        if dependent not in index:
            continue
        if head == ROOT_LABEL:
            row = T
        elif head in index:
            row = index[head]
        else:
            continue
        bias[row, index[dependent]] = math.exp(strength)
    return bias


# ----------------------------------------------------------------------
# Trees


@dataclass(frozen=True)
class DependencyTree:
    """Heads for one sentence: heads[i] is the head of token i+1."""

    heads: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.heads)

    def __iter__(self):
        return iter(self.heads)


def check_tree(heads: Sequence[int], single_root: bool = False) -> None:
    """Raise InvalidTreeError unless ``heads`` forms a projective tree."""
    n = len(heads)
    for d, h in enumerate(heads, start=1):
        if not 0 <= h <= n:
            raise InvalidTreeError(f"token {d} head {h} out of range 0..{n}")
        if h == d:
            raise InvalidTreeError(f"token {d} is its own head")
    for d in range(1, n + 1):
        seen = set()
        node = d
        while node != 0:
            if node in seen:
                raise InvalidTreeError(f"cycle through token {node}")
            seen.add(node)
            node = heads[node - 1]
    if single_root and sum(1 for h in heads if h == 0) != 1:
        raise InvalidTreeError("expected exactly one root dependent")
    if not is_projective(heads):
        raise InvalidTreeError("tree is not projective")


def is_projective(heads: Sequence[int]) -> bool:
    """True when every arc covers only descendants of its head."""
    def reaches(node: int, target: int) -> bool:
        while node != 0:
            if node == target:
                return True
            node = heads[node - 1]
        return target == 0

    for d, h in enumerate(heads, start=1):
        lo, hi = min(h, d), max(h, d)
        for k in range(lo + 1, hi):
            if not reaches(k, h):
                return False
    return True


# ----------------------------------------------------------------------
# Expectation


@dataclass
class ExpectedCounts:
    """Posterior event-count totals from one or more E steps."""

    attach: np.ndarray
    stop: np.ndarray
    cont: np.ndarray

    @classmethod
    def zeros(cls, n_tags: int) -> "ExpectedCounts":
        return cls(
            attach=np.zeros((n_tags + 1, 2, n_tags)),
            stop=np.zeros((n_tags + 1, 2, 2)),
            cont=np.zeros((n_tags + 1, 2, 2)),
        )


def _head_indices(sentence: Sequence[str], params: DmvParameters) -> np.ndarray:
    ids = [params.root_index]
    index = {t: i for i, t in enumerate(params.tags)}
    for tag in sentence:
        if tag not in index:
            raise InvalidTagError(
                f"tag {tag!r} not in model inventory {params.tags}"
            )
        ids.append(index[tag])
    return np.asarray(ids, dtype=np.int64)


def inside_outside(
    sentence: Sequence[str],
    params: DmvParameters,
    rules: RuleSet | None = None,
) -> tuple[ExpectedCounts, float]:
    """Expected counts and log likelihood for one sentence."""
    if len(sentence) == 0:
        raise EmptyCorpusError("cannot analyse an empty sentence")
    counts = ExpectedCounts.zeros(len(params.tags))
    hidx = _head_indices(sentence, params)
    ll = _chart.estep_sentence(
        hidx,
        params.attach,
        params.stop,
        rule_bias(rules, params),
        counts.attach,
        counts.stop,
        counts.cont,
    )
    return counts, float(ll)


def loglikelihood(
    corpus: Iterable[Sequence[str]],
    params: DmvParameters,
    rules: RuleSet | None = None,
) -> float:
    """Corpus log likelihood under fixed parameters."""
    bias = rule_bias(rules, params)
    total = 0.0
    seen = False
    for sentence in corpus:
        seen = True
        hidx = _head_indices(sentence, params)
        total += _chart.loglikelihood_sentence(
            hidx, params.attach, params.stop, bias
        )
    if not seen:
        raise EmptyCorpusError("corpus is empty")
    return float(total)


def _m_step(
    counts: ExpectedCounts, tags: tuple[str, ...], single_root: bool
) -> DmvParameters:
    attach = counts.attach + EM_EPSILON
    attach /= attach.sum(axis=2, keepdims=True)
    stop = (counts.stop + EM_EPSILON) / (
        counts.stop + counts.cont + 2.0 * EM_EPSILON
    )
    _pin_root(stop, single_root)
    return DmvParameters(
        tags=tags, attach=attach, stop=stop, single_root=single_root
    )


def em_train(
    corpus: Sequence[Sequence[str]],
    params: DmvParameters,
    iterations: int,
    rules: RuleSet | None = None,
) -> tuple[DmvParameters, list[float]]:
    """Run EM; returns updated parameters and per-iteration likelihoods.

    The k-th reported log likelihood is measured under the parameters
    entering iteration k, so one iteration reports the likelihood of
    the initial parameters and applies one update.  Without rules the
    sequence is non-decreasing up to the M-step smoothing.
    """
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    seqs = [list(s) for s in corpus]
    if not seqs or any(len(s) == 0 for s in seqs):
        raise EmptyCorpusError("training corpus is empty or has empty sentences")
    hidx_seqs = [_head_indices(s, params) for s in seqs]
    bias = rule_bias(rules, params)
    logliks: list[float] = []
    for _ in range(iterations):
        counts = ExpectedCounts.zeros(len(params.tags))
        ll = 0.0
        for hidx in hidx_seqs:
            ll += _chart.estep_sentence(
                hidx,
                params.attach,
                params.stop,
                bias,
                counts.attach,
                counts.stop,
                counts.cont,
            )
        logliks.append(float(ll))
        params = _m_step(counts, params.tags, params.single_root)
    return params, logliks


# ----------------------------------------------------------------------
# Decoding

#: Cell value: (probability, total arc length, ((pos, head), ...)).
#: Higher probability wins; ties fall to shorter arcs, then to the
#: smallest head vector.  Probabilities are kept in product space so
#: that mirror-image analyses with identical factors tie exactly.
_Cell = tuple[float, int, tuple[tuple[int, int], ...]]


def _better(a: _Cell, b: _Cell) -> bool:
    if a[0] != b[0]:
        return a[0] > b[0]
    return (a[1], a[2]) < (b[1], b[2])


def decode(
    sentence: Sequence[str],
    params: DmvParameters,
    rules: RuleSet | None = None,
) -> DependencyTree:
    """Highest-probability projective tree for a tag sequence.

    Deterministic: among equal-probability analyses the one with the
    smaller total arc length wins, then the smaller head vector.
    """
    n = len(sentence)
    if n == 0:
        raise EmptyCorpusError("cannot decode an empty sentence")
    hidx = _head_indices(sentence, params)
    attach = params.attach
    stop = params.stop
    bias = rule_bias(rules, params)
    N = n + 1

    def merge(a: _Cell, b: _Cell, factor: float, arc=None) -> _Cell:
        heads = a[2] + b[2]
        length = a[1] + b[1]
        if arc is not None:
            d, h = arc
            heads += ((d, h),)
            length += abs(d - h)
        return (a[0] * b[0] * factor, length, tuple(sorted(heads)))

    def scale(a: _Cell, factor: float) -> _Cell:
        return (a[0] * factor, a[1], a[2])

    EMPTY: _Cell = (1.0, 0, ())
    Or = [[None] * N for _ in range(N)]
    Cr = [[None] * N for _ in range(N)]
    Sr = [[None] * N for _ in range(N)]
    Ol = [[None] * N for _ in range(N)]
    Cl = [[None] * N for _ in range(N)]
    Sl = [[None] * N for _ in range(N)]
    for i in range(N):
        t = hidx[i]
        Cr[i][i] = EMPTY
        Sr[i][i] = scale(EMPTY, stop[t, RIGHT, ADJACENT])
        Cl[i][i] = EMPTY
        Sl[i][i] = scale(EMPTY, stop[t, LEFT, ADJACENT])
    for w in range(1, N):
        for i in range(N - w):
            j = i + w
            ti = hidx[i]
            tj = hidx[j]
            a = attach[ti, RIGHT, tj] * bias[ti, tj]
            best = None
            for k in range(i, j):
                adj = ADJACENT if k == i else NON_ADJACENT
                cand = merge(
                    Cr[i][k],
                    Sl[j][k + 1],
                    (1.0 - stop[ti, RIGHT, adj]) * a,
                    arc=(j, i),
                )
                if best is None or _better(cand, best):
                    best = cand
            Or[i][j] = best
            best = None
            for k in range(i + 1, j + 1):
                cand = merge(Or[i][k], Sr[k][j], 1.0)
                if best is None or _better(cand, best):
                    best = cand
            Cr[i][j] = best
            Sr[i][j] = scale(best, stop[ti, RIGHT, NON_ADJACENT])
            if i == 0:
                continue
            al = attach[tj, LEFT, ti] * bias[tj, ti]
            best = None
            for k in range(i + 1, j + 1):
                adj = ADJACENT if k == j else NON_ADJACENT
                cand = merge(
                    Cl[j][k],
                    Sr[i][k - 1],
                    (1.0 - stop[tj, LEFT, adj]) * al,
                    arc=(i, j),
                )
                if best is None or _better(cand, best):
                    best = cand
            Ol[j][i] = best
            best = None
            for k in range(i, j):
                cand = merge(Ol[j][k], Sl[k][i], 1.0)
                if best is None or _better(cand, best):
                    best = cand
            Cl[j][i] = best
            Sl[j][i] = scale(best, stop[tj, LEFT, NON_ADJACENT])

    final = Sr[0][n]
    heads = [0] * n
    for pos, head in final[2]:
        heads[pos - 1] = head
    return DependencyTree(heads=tuple(heads))


# ----------------------------------------------------------------------
# Evaluation and corpus utilities


def directed_accuracy(
    predicted: Sequence[Sequence[int] | DependencyTree],
    gold: Sequence[Sequence[int] | DependencyTree],
) -> float:
    """Fraction of tokens whose predicted head matches the gold head."""
    if len(predicted) != len(gold):
        raise ValueError(
            f"corpus size mismatch: {len(predicted)} predicted vs {len(gold)} gold"
        )
    correct = 0
    total = 0
    for k, (p, g) in enumerate(zip(predicted, gold), start=1):
        p_heads = list(p)
        g_heads = list(g)
        if len(p_heads) != len(g_heads):
            raise ValueError(f"sentence {k}: length mismatch")
        correct += sum(a == b for a, b in zip(p_heads, g_heads))
        total += len(g_heads)
    if total == 0:
        raise EmptyCorpusError("no tokens to score")
    return correct / total


def perturb_tags(
    corpus: Sequence[Sequence[str]], error_rate: float, seed: int
) -> list[list[str]]:
    """Corrupt a fraction of tags, drawing replacements from the
    corpus tag distribution excluding each token's own tag.

    Deterministic for a fixed seed.  Tokens whose tag has no
    alternative in the inventory are left alone.
    """
    if not 0.0 <= error_rate <= 1.0:
        raise ValueError(f"error_rate must be in [0, 1], got {error_rate}")
    seqs = [list(s) for s in corpus]
    counts: dict[str, int] = {}
    for s in seqs:
        for t in s:
            counts[t] = counts.get(t, 0) + 1
    inventory = sorted(counts)
    freq = np.asarray([counts[t] for t in inventory], dtype=float)
    rng = np.random.default_rng(seed)
    out = []
    for s in seqs:
        new = []
        for tag in s:
            if len(inventory) > 1 and rng.random() < error_rate:
                i = inventory.index(tag)
                probs = freq.copy()
                probs[i] = 0.0
                probs /= probs.sum()
                tag = inventory[rng.choice(len(inventory), p=probs)]
            new.append(tag)
        out.append(new)
    return out


def sample_corpus(
    params: DmvParameters,
    n_sentences: int,
    seed: int,
    max_len: int = 10,
) -> list[tuple[list[str], list[int]]]:
    """Sample (tags, heads) pairs from the generative model.

    Derivations longer than ``max_len`` tokens (and empty ones, which
    a multi-root model can produce) are rejected and redrawn.
    Deterministic for a fixed seed.
    """
    if n_sentences < 1:
        raise ValueError(f"n_sentences must be >= 1, got {n_sentences}")
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    rng = np.random.default_rng(seed)
    T = len(params.tags)

    def expand(tag_row: int, budget: list[int]) -> list | None:
        """Sample a subtree; None once the token budget is exhausted."""
        budget[0] -= 1
        if budget[0] < 0:
            return None
        # Node: [tag_row, left children nearest-first, right ditto].
        node: list = [tag_row, [], []]
        for direction in (LEFT, RIGHT):
            adj = ADJACENT
            while rng.random() >= params.stop[tag_row, direction, adj]:
                dep = int(rng.choice(T, p=params.attach[tag_row, direction]))
                child = expand(dep, budget)
                if child is None:
                    return None
                node[1 + direction].append(child)
                adj = NON_ADJACENT
        return node

    def realise(node: list) -> tuple[list[str], list[int]]:
        """Flatten a subtree to tokens plus span-local heads.

        Head positions are 1-based within the returned span; the
        span's own root carries head 0 for the caller to reattach.
        """
        tag_row, left, right = node
        parts = [realise(c) for c in reversed(left)]
        head_part = len(parts)
        parts.append(([params.tags[tag_row]], [0]))
        parts.extend(realise(c) for c in right)
        tokens: list[str] = []
        heads: list[int] = []
        part_roots: list[int] = []
        offset = 0
        for part_tokens, part_heads in parts:
            part_roots.append(offset + part_heads.index(0) + 1)
            tokens.extend(part_tokens)
            heads.extend(h + offset if h != 0 else 0 for h in part_heads)
            offset += len(part_tokens)
        for idx, pos in enumerate(part_roots):
            if idx != head_part:
                heads[pos - 1] = part_roots[head_part]
        return tokens, heads

    root = params.root_index
    out: list[tuple[list[str], list[int]]] = []
    while len(out) < n_sentences:
        budget = [max_len]
        subtrees: list[list] = []
        aborted = False
        adj = ADJACENT
        while rng.random() >= params.stop[root, RIGHT, adj]:
            dep = int(rng.choice(T, p=params.attach[root, RIGHT]))
            child = expand(dep, budget)
            if child is None:
                aborted = True
                break
            subtrees.append(child)
            adj = NON_ADJACENT
        if aborted or not subtrees:
            continue
        tokens: list[str] = []
        heads: list[int] = []
        offset = 0
        for subtree in subtrees:
            part_tokens, part_heads = realise(subtree)
            tokens.extend(part_tokens)
            # Span roots keep head 0: they hang off the artificial root.
            heads.extend(h + offset if h != 0 else 0 for h in part_heads)
            offset += len(part_tokens)
        out.append((tokens, heads))
    return out
