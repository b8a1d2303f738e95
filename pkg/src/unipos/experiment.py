"""Tagging experiments across tagset granularities.

For one treebank, three accuracies are measured from the same split:

* ``acc_oo``: train and score on the treebank's own fine tags.
* ``acc_uu``: train and score on the coarse tags the mapping induces.
* ``acc_ou``: train on fine tags, map both prediction and gold to
  coarse categories at scoring time.

Mapping the fine-tag model's output can only repair errors, never
introduce them, so per token ``acc_ou >= acc_oo``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from . import hmm
from .errors import InsufficientDataError
from .tagset import TagMapping
from .treebank import Sentence, map_corpus, require_nonempty


@dataclass(frozen=True)
class ExperimentResult:
    """Accuracies for one treebank, as fractions in [0, 1]."""

    treebank_id: str
    n_fine_tags: int
    acc_oo: float
    acc_uu: float
    acc_ou: float


@dataclass(frozen=True)
class VarianceReport:
    """Cross-treebank variance of accuracy percentages per regime."""

    var_oo: float
    var_uu: float
    var_ou: float
    n: int


def run_matrix(
    train: Sequence[Sentence],
    test: Sequence[Sentence],
    mapping: TagMapping,
    fallback_x: bool = False,
    beam: float | None = hmm.DEFAULT_BEAM,
) -> ExperimentResult:
    """Train and score the three regimes on one treebank split.

    Tagging has no random component, so repeated runs on the same
    split return identical accuracies.
    """
    require_nonempty(train, "training corpus")
    require_nonempty(test, "test corpus")

    fine_train = [list(zip(s.forms(), s.fine_tags())) for s in train]
    fine_test = [list(zip(s.forms(), s.fine_tags())) for s in test]
    coarse_train = [
        list(zip(s.forms(), s.universal_tags()))
        for s in map_corpus(train, mapping, fallback_x=fallback_x)
    ]
    coarse_test = [
        list(zip(s.forms(), s.universal_tags()))
        for s in map_corpus(test, mapping, fallback_x=fallback_x)
    ]

    model_fine = hmm.train(fine_train)
    model_coarse = hmm.train(coarse_train)

    acc_oo = hmm.evaluate(model_fine, fine_test, beam=beam)
    acc_uu = hmm.evaluate(model_coarse, coarse_test, beam=beam)
    acc_ou = hmm.evaluate(model_fine, fine_test, eval_mapping=mapping, beam=beam)

    n_fine_tags = len({t.fine_tag for s in train for t in s})
    return ExperimentResult(
        treebank_id=mapping.treebank_id,
        n_fine_tags=n_fine_tags,
        acc_oo=acc_oo,
        acc_uu=acc_uu,
        acc_ou=acc_ou,
    )


def _sample_variance(values: list[float]) -> float:
    # Sample variance, n-1 normaliser.
    n = len(values)
    mean = sum(values) / n
    return sum((v - mean) ** 2 for v in values) / (n - 1)


def variance_report(results: Sequence[ExperimentResult]) -> VarianceReport:
    """Variance of accuracy percentages across treebanks, per regime.

    Needs at least two results.  Accuracies are converted to
    percentages first; the variance uses the n-1 normaliser.
    """
    if len(results) < 2:
        raise InsufficientDataError(
            f"variance needs at least 2 results, got {len(results)}"
        )
    return VarianceReport(
        var_oo=_sample_variance([100.0 * r.acc_oo for r in results]),
        var_uu=_sample_variance([100.0 * r.acc_uu for r in results]),
        var_ou=_sample_variance([100.0 * r.acc_ou for r in results]),
        n=len(results),
    )


TSV_HEADER = "treebank\tn_fine_tags\tacc_oo\tacc_uu\tacc_ou"


def result_to_tsv(result: ExperimentResult) -> str:
    """One TSV row; accuracies as percentages with full precision."""
    return "\t".join(
        [
            result.treebank_id,
            str(result.n_fine_tags),
            repr(100.0 * result.acc_oo),
            repr(100.0 * result.acc_uu),
            repr(100.0 * result.acc_ou),
        ]
    )


def results_from_tsv(text: str) -> list[ExperimentResult]:
    """Parse rows written by result_to_tsv, skipping the header."""
    out = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("treebank\t"):
            continue
        treebank_id, n_fine, oo, uu, ou = line.split("\t")
        out.append(
            ExperimentResult(
                treebank_id=treebank_id,
                n_fine_tags=int(n_fine),
                acc_oo=float(oo) / 100.0,
                acc_uu=float(uu) / 100.0,
                acc_ou=float(ou) / 100.0,
            )
        )
    return out
