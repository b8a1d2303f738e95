"""
Trigram tagging across tagset regimes
=====================================

Train the trigram tagger and compare the three train/test regimes:
fine/fine (O/O), coarse/coarse (U/U), and train-fine with coarse
evaluation (O/U).  Mapping predictions to coarse categories can merge
error classes but never split them, so O/U dominates O/O.
"""

from importlib.resources import files

from unipos import experiment, hmm, treebank
from unipos.tagset import find_mapping

corpus = treebank.load_conllx(
    files("unipos").joinpath("data/sample-en.conllx")
)
mapping = find_mapping("en-ptb")

# The tagger trains on (word, tag) pairs; tags are opaque strings, so
# the same machinery serves fine and coarse runs.
pairs = [list(zip(s.forms(), s.fine_tags())) for s in corpus]
model = hmm.train(pairs)
print(f"model: {len(model.tagset)} tags, {len(model.vocabulary)} words,")
print(f"  interpolation weights {model.lambdas}")

# Decoding is Viterbi with a multiplicative beam; beam=None is exact.
words = corpus[0].forms()
print("sample decode:", list(zip(words, model.viterbi(words))))

# One matrix row: train and evaluate all three regimes on the same
# split (transductive here; the corpus is a packaged toy sample).
result = experiment.run_matrix(corpus, corpus, mapping)
print(experiment.TSV_HEADER)
print(experiment.result_to_tsv(result))

# Cross-treebank summaries aggregate matrix rows: the coarse regime's
# variance across treebanks is the headline comparability number.
rows = [
    result,
    experiment.ExperimentResult(
        treebank_id="toy-variant", n_fine_tags=result.n_fine_tags,
        acc_oo=result.acc_oo - 0.04, acc_uu=result.acc_uu - 0.02,
        acc_ou=result.acc_ou - 0.01,
    ),
]
report = experiment.variance_report(rows)
print(f"variance over {report.n} rows: "
      f"O/O {report.var_oo:.2f}  U/U {report.var_uu:.2f}  O/U {report.var_ou:.2f}")
