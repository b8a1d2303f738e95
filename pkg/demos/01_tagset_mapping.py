"""
Coarse part-of-speech mapping
=============================

Render treebank-specific fine tags down to the twelve-category coarse
tagset, check a mapping file against a corpus, and round-trip both
file formats.
"""

from importlib.resources import files

from unipos import treebank
from unipos.tagset import find_mapping, parse_mapping, serialize_mapping, validate_mapping

# Mappings resolve by treebank name from the packaged set (a file path
# works too).  Each entry sends one fine tag to one coarse category.
mapping = find_mapping("en-ptb")
print(f"mapping {mapping.treebank_id}: {len(mapping.entries)} fine tags")

# A reference sentence, tagged with Penn Treebank labels.
words = ["The", "oboist", "Heinz", "Holliger", "has", "taken",
         "a", "hard", "line", "about", "the", "problems", "."]
fine = ["DT", "NN", "NNP", "NNP", "VBZ", "VBN",
        "DT", "JJ", "NN", "IN", "DT", "NNS", "."]
sentence = treebank.Sentence(
    treebank.Token(form=w, fine_tag=t) for w, t in zip(words, fine)
)

# map_corpus attaches the coarse tag to every token; unmapped fine
# tags raise unless fallback_x sends them to the catch-all instead.
(mapped,) = treebank.map_corpus([sentence], mapping)
for token in mapped:
    print(f"{token.form:10s} {token.fine_tag:5s} -> {token.universal_tag}")

# Validating a corpus reports coverage: which coarse tags occur, and
# which fine tags the mapping never uses.
corpus = treebank.load_conllx(
    files("unipos").joinpath("data/sample-en.conllx")
)
report = validate_mapping(mapping, treebank.corpus_fine_tags(corpus))
print("coverage ok:", report.ok)
for tag in sorted(report.tag_histogram, key=lambda t: t.value):
    print(f"  {tag.value:5s} {report.tag_histogram[tag]}")

# Mapping files serialize back to the tab-separated format bit for
# bit, so parse -> serialize -> parse is the identity.
text = serialize_mapping(mapping)
assert parse_mapping(text, mapping.treebank_id).entries == mapping.entries
print("mapping file round-trips")
