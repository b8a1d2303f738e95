"""
Dependency grammar induction over coarse tags
=============================================

Induce head-dependent structure from tag sequences alone: harmonic
initialization, EM over projective trees, soft universal rules, and
robustness to tagging noise.
"""

from importlib.resources import files

from unipos import dmv, treebank
from unipos.tagset import find_mapping

# Induction runs on coarse tag sequences.  Punctuation is excluded
# from both training and evaluation; gold heads re-attach through any
# punctuation dropped in between.
corpus = treebank.load_conllx(
    files("unipos").joinpath("data/sample-en.conllx")
)
mapping = find_mapping("en-ptb")
mapped = treebank.map_corpus(corpus, mapping)
stripped = [treebank.strip_punctuation(s) for s in mapped]
stripped = treebank.filter_by_length([s for s in stripped if len(s)], 10)
tag_seqs = [s.universal_tags() for s in stripped]
gold = [s.heads() for s in stripped]
print(f"{len(tag_seqs)} sentences, {sum(map(len, tag_seqs))} tokens")

# Harmonic init prefers short attachments; EM then re-estimates
# attachment and stop probabilities from inside-outside counts.
params = dmv.init_harmonic(tag_seqs, single_root=True)
params, logliks = dmv.em_train(tag_seqs, params, iterations=20)
trees = [dmv.decode(seq, params) for seq in tag_seqs]
acc = dmv.directed_accuracy(trees, gold)
print(f"plain EM: loglik {logliks[0]:.2f} -> {logliks[-1]:.2f}, "
      f"directed accuracy {acc:.3f}")

# Soft rules bias chosen head-dependent tag pairs (ROOT may head) by
# exp(strength) without hard constraints; the packaged set encodes
# broad cross-linguistic preferences like ROOT->VERB and VERB->NOUN.
rules = dmv.default_rules()
print("rules:", ", ".join(f"{h}->{d}" for h, d in sorted(rules.edges)))
params = dmv.init_harmonic(tag_seqs, single_root=True)
params, _ = dmv.em_train(tag_seqs, params, iterations=20, rules=rules)
ruled_trees = [dmv.decode(seq, params, rules=rules) for seq in tag_seqs]
ruled_acc = dmv.directed_accuracy(ruled_trees, gold)
print(f"with rules: directed accuracy {ruled_acc:.3f}")

for sentence, tree in list(zip(stripped, ruled_trees))[:2]:
    arcs = [
        f"{sentence[h - 1].form if h else 'ROOT'}->{sentence[d - 1].form}"
        for d, h in enumerate(tree, start=1)
    ]
    print(" ", "  ".join(arcs))

# Tagging noise emulates automatically produced coarse tags: each
# token's tag flips to a different corpus tag with the given rate.
noisy = dmv.perturb_tags(tag_seqs, 0.15, seed=1)
params = dmv.init_harmonic(noisy, single_root=True)
params, _ = dmv.em_train(noisy, params, iterations=20, rules=rules)
noisy_trees = [dmv.decode(seq, params, rules=rules) for seq in noisy]
noisy_acc = dmv.directed_accuracy(noisy_trees, gold)
print(f"with rules + 15% tag noise: directed accuracy {noisy_acc:.3f}")
