"""Command-line interface.

Subcommands: ``map`` (fine tags to coarse renderings), ``validate``
(mapping-file checks), ``train``/``tag``/``eval`` (trigram tagger),
``experiment`` (cross-tagset accuracy matrix and variance), and
``induce`` (dependency grammar induction).

Exit codes: 0 success, 1 usage error, 2 data error (parse or mapping
failures; messages name the file and, where known, line and token).
Every subcommand is deterministic given its arguments, input files,
and seed.  A ``--config`` JSON file supplies option defaults by
destination name; explicit command-line flags always win.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from pathlib import Path

from . import __version__, dmv, experiment, hmm, treebank
from .errors import InvalidTagError, InvalidTreeError, UniposError, UnknownFineTagError
from .tagset import (
    MAPPING_FORMAT_VERSION,
    UniversalTag,
    find_mapping,
    validate_mapping,
)

_VERSION_LINE = (
    f"unipos {__version__} (mapping-file format {MAPPING_FORMAT_VERSION})"
)


class _Parser(argparse.ArgumentParser):
    """Argument errors exit 1; data errors elsewhere exit 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@contextmanager
def _named(path):
    """Prefix errors from a file's processing with the file name."""
    try:
        yield
    except UniposError as e:
        raise UniposError(f"{path}: {e}") from e


def _read_corpus(path, fmt):
    with _named(path):
        if fmt == "conllx":
            return treebank.load_conllx(path)
        return treebank.load_wordtag(path)


def _write_text(target, text):
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def _resolve_mapping(name):
    with _named(name):
        return find_mapping(name)


def _resolve_rules(name, default_strength):
    # The literal name "default" selects the packaged ruleset.
    if name == "default":
        return dmv.default_rules(default_strength=default_strength)
    with _named(name):
        return dmv.load_rules(name, default_strength=default_strength)


def _beam(value):
    # 0 switches pruning off (exact decoding).
    return None if value == 0 else value


def _tagged_pairs(sentences, tag_column, fmt, source):
    """(word, tag) training/evaluation pairs per sentence."""
    if tag_column == "original":
        return [list(zip(s.forms(), s.fine_tags())) for s in sentences]
    out = []
    for i, sentence in enumerate(sentences, start=1):
        tags = []
        for j, token in enumerate(sentence, start=1):
            if token.universal_tag is not None:
                tags.append(token.universal_tag.value)
            elif fmt == "wordtag":
                # The single tag column must already hold renderings.
                with _named(source):
                    UniversalTag.from_string(token.fine_tag)
                tags.append(token.fine_tag)
            else:
                raise InvalidTagError(
                    f"{source}: sentence {i} token {j} ({token.form!r}) has no "
                    "coarse tag; run map first or pass --map"
                )
        out.append(list(zip(sentence.forms(), tags)))
    return out


# ----------------------------------------------------------------------
# Subcommand implementations


def _cmd_map(args):
    corpus = _read_corpus(args.input, args.format)
    mapping = _resolve_mapping(args.map)
    with _named(args.input):
        mapped = treebank.map_corpus(corpus, mapping, fallback_x=args.fallback_x)
    if args.format == "conllx":
        text = treebank.write_conllx(mapped)
    else:
        text = treebank.write_wordtag(mapped, tags="universal")
    _write_text(args.output, text)
    return 0


def _cmd_validate(args):
    mapping = _resolve_mapping(args.map)
    lines = [
        f"treebank\t{mapping.treebank_id}",
        f"entries\t{len(mapping.entries)}",
    ]
    if args.input:
        corpus = _read_corpus(args.input, args.format)
        observed = treebank.corpus_fine_tags(corpus)
        report = validate_mapping(mapping, observed)
        lines.append(f"observed_fine_tags\t{len(observed)}")
        for tag in sorted(report.tag_histogram, key=lambda t: t.value):
            lines.append(f"{tag.value}\t{report.tag_histogram[tag]}")
        if report.unused_tags:
            lines.append("unused\t" + " ".join(report.unused_tags))
        print("\n".join(lines))
        if not report.ok:
            raise UnknownFineTagError(
                f"{args.input}: fine tags missing from mapping "
                f"{mapping.treebank_id}: " + " ".join(report.unknown_tags)
            )
    else:
        targets = sorted({t.value for t in mapping.entries.values()})
        lines.append("coarse_tags\t" + " ".join(targets))
        print("\n".join(lines))
    return 0


def _cmd_train(args):
    corpus = _read_corpus(args.input, args.format)
    if args.map:
        mapping = _resolve_mapping(args.map)
        with _named(args.input):
            corpus = treebank.map_corpus(
                corpus, mapping, fallback_x=args.fallback_x
            )
    pairs = _tagged_pairs(corpus, args.tag_column, args.format, args.input)
    model = hmm.train(
        pairs,
        max_suffix_len=args.max_suffix_len,
        rare_threshold=args.rare_threshold,
    )
    model.save(args.model)
    print(f"trained\t{len(model.tagset)} tags\t{len(model.vocabulary)} words")
    return 0


def _cmd_tag(args):
    with _named(args.model):
        model = hmm.TrigramHmm.load(args.model)
    corpus = _read_corpus(args.input, args.format)
    tagged = []
    for sentence in corpus:
        forms = sentence.forms()
        if not forms:
            continue
        predicted = model.viterbi(forms, beam=_beam(args.beam))
        tagged.append(
            treebank.Sentence(
                treebank.Token(form=w, fine_tag=t)
                for w, t in zip(forms, predicted)
            )
        )
    _write_text(args.output, treebank.write_wordtag(tagged))
    return 0


def _cmd_eval(args):
    with _named(args.model):
        model = hmm.TrigramHmm.load(args.model)
    corpus = _read_corpus(args.gold, args.format)
    pairs = _tagged_pairs(corpus, args.tag_column, args.format, args.gold)
    eval_mapping = _resolve_mapping(args.map) if args.map else None
    with _named(args.gold):
        accuracy = hmm.evaluate(
            model, pairs, eval_mapping=eval_mapping, beam=_beam(args.beam)
        )
    n_tokens = sum(len(p) for p in pairs)
    print(f"tokens\t{n_tokens}")
    print(f"accuracy\t{accuracy!r}")
    return 0


def _cmd_experiment(args):
    if args.mode == "matrix":
        train = _read_corpus(args.train, args.format)
        test = _read_corpus(args.test, args.format)
        mapping = _resolve_mapping(args.map)
        result = experiment.run_matrix(
            train,
            test,
            mapping,
            fallback_x=args.fallback_x,
            beam=_beam(args.beam),
        )
        text = experiment.TSV_HEADER + "\n" + experiment.result_to_tsv(result) + "\n"
        _write_text(args.report, text)
        return 0
    # variance: aggregate a matrix-format TSV of one row per treebank.
    with _named(args.results):
        results = experiment.results_from_tsv(
            Path(args.results).read_text(encoding="utf-8")
        )
        report = experiment.variance_report(results)
    text = (
        "n\tvar_oo\tvar_uu\tvar_ou\n"
        f"{report.n}\t{report.var_oo!r}\t{report.var_uu!r}\t{report.var_ou!r}\n"
    )
    _write_text(args.report, text)
    return 0


def _cmd_induce(args):
    corpus = _read_corpus(args.input, "conllx")
    mapping = _resolve_mapping(args.map)
    with _named(args.input):
        mapped = treebank.map_corpus(corpus, mapping, fallback_x=args.fallback_x)
        if args.len_before_strip:
            mapped = treebank.filter_by_length(mapped, args.max_len)
        stripped = [treebank.strip_punctuation(s) for s in mapped]
        stripped = [s for s in stripped if len(s) > 0]
        if not args.len_before_strip:
            stripped = treebank.filter_by_length(stripped, args.max_len)
        if not stripped:
            raise UniposError(
                f"no sentences of length <= {args.max_len} after "
                "punctuation stripping"
            )
        tag_seqs = []
        gold = []
        for i, sentence in enumerate(stripped, start=1):
            heads = sentence.heads()
            if any(h is None for h in heads):
                raise InvalidTreeError(
                    f"sentence {i}: missing dependency heads; induction "
                    "reports accuracy against gold trees"
                )
            tag_seqs.append(sentence.universal_tags())
            gold.append(heads)
    if args.tag_noise > 0.0:
        tag_seqs = dmv.perturb_tags(tag_seqs, args.tag_noise, seed=args.seed)
    rules = (
        _resolve_rules(args.rules, args.rule_strength) if args.rules else None
    )
    params = dmv.init_harmonic(tag_seqs, single_root=not args.multi_root)
    params, logliks = dmv.em_train(tag_seqs, params, args.iters, rules=rules)
    trees = [dmv.decode(seq, params, rules=rules) for seq in tag_seqs]
    accuracy = dmv.directed_accuracy(trees, gold)
    n_tokens = sum(len(s) for s in tag_seqs)
    text = (
        "sentences\ttokens\titerations\tloglik_initial\tloglik_final\taccuracy\n"
        f"{len(tag_seqs)}\t{n_tokens}\t{args.iters}\t"
        f"{logliks[0]!r}\t{logliks[-1]!r}\t{accuracy!r}\n"
    )
    _write_text(args.report, text)
    print(f"directed_accuracy\t{accuracy!r}")
    return 0


# ----------------------------------------------------------------------
# Parser assembly


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        metavar="JSON",
        help="JSON file of option defaults; explicit flags win",
    )
    common.add_argument(
        "--jobs",
        type=int,
        default=1,
        metavar="N",
        help="parallelism bound (current operations run single-threaded)",
    )

    parser = _Parser(prog="unipos", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=_VERSION_LINE)
    subparsers = parser.add_subparsers(dest="command", required=True)
    submap = {}

    def sub(name, help_text, run, **kwargs):
        p = subparsers.add_parser(
            name, parents=[common], help=help_text, **kwargs
        )
        p.set_defaults(run=run, command=name)
        submap[name] = p
        return p

    p = sub("map", "convert fine tags to coarse renderings", _cmd_map)
    p.add_argument("--input", help="corpus to convert")
    p.add_argument("--map", help="mapping file, name, or path")
    p.add_argument("--output", default="-", help="destination (default stdout)")
    p.add_argument("--format", choices=("conllx", "wordtag"), default="conllx")
    p.add_argument(
        "--fallback-x",
        action="store_true",
        help="map unlisted fine tags to the catch-all instead of failing",
    )

    p = sub("validate", "check a mapping file, optionally against a corpus", _cmd_validate)
    p.add_argument("--map", help="mapping file, name, or path")
    p.add_argument("--input", help="corpus whose fine tags to check")
    p.add_argument("--format", choices=("conllx", "wordtag"), default="conllx")

    p = sub("train", "train a trigram tagger", _cmd_train)
    p.add_argument("--input", help="training corpus")
    p.add_argument("--format", choices=("conllx", "wordtag"), default="conllx")
    p.add_argument(
        "--tag-column",
        choices=("original", "universal"),
        default="original",
        help="train on fine tags or coarse renderings",
    )
    p.add_argument("--map", help="apply this mapping before training")
    p.add_argument("--fallback-x", action="store_true")
    p.add_argument("--model", help="where to write the model")
    p.add_argument("--max-suffix-len", type=int, default=hmm.DEFAULT_MAX_SUFFIX_LEN)
    p.add_argument("--rare-threshold", type=int, default=hmm.DEFAULT_RARE_THRESHOLD)

    p = sub("tag", "tag a corpus with a trained model", _cmd_tag)
    p.add_argument("--model")
    p.add_argument("--input")
    p.add_argument("--format", choices=("conllx", "wordtag"), default="conllx")
    p.add_argument("--output", default="-", help="two-column output (default stdout)")
    p.add_argument(
        "--beam",
        type=float,
        default=hmm.DEFAULT_BEAM,
        help="beam factor; 0 disables pruning",
    )

    p = sub("eval", "score a model against gold tags", _cmd_eval)
    p.add_argument("--model")
    p.add_argument("--gold", help="gold-tagged corpus")
    p.add_argument("--format", choices=("conllx", "wordtag"), default="conllx")
    p.add_argument(
        "--tag-column",
        choices=("original", "universal"),
        default="original",
        help="which gold tags to score against",
    )
    p.add_argument(
        "--map",
        help="map predictions and gold to coarse tags before comparing",
    )
    p.add_argument("--beam", type=float, default=hmm.DEFAULT_BEAM)

    # The wrapper parser carries no options of its own: with nested
    # subparsers, an inner parser's defaults would overwrite values
    # the outer one already parsed.
    pexp = subparsers.add_parser(
        "experiment", help="cross-tagset accuracy matrix and variance"
    )
    modes = pexp.add_subparsers(dest="mode", required=True)
    m = modes.add_parser("matrix", parents=[common])
    m.set_defaults(run=_cmd_experiment, command="experiment")
    m.add_argument("--train")
    m.add_argument("--test")
    m.add_argument("--map")
    m.add_argument("--format", choices=("conllx", "wordtag"), default="conllx")
    m.add_argument("--fallback-x", action="store_true")
    m.add_argument("--beam", type=float, default=hmm.DEFAULT_BEAM)
    m.add_argument("--report", default="-", help="TSV destination")
    submap["experiment matrix"] = m
    v = modes.add_parser("variance", parents=[common])
    v.set_defaults(run=_cmd_experiment, command="experiment")
    v.add_argument(
        "--results", help="matrix-format TSV, one row per treebank"
    )
    v.add_argument("--report", default="-", help="TSV destination")
    submap["experiment variance"] = v

    p = sub("induce", "induce a dependency grammar over coarse tags", _cmd_induce)
    p.add_argument("--input", help="dependency corpus")
    p.add_argument("--map")
    p.add_argument("--fallback-x", action="store_true")
    p.add_argument("--max-len", type=int, default=10)
    p.add_argument(
        "--len-before-strip",
        action="store_true",
        help="apply the length filter before punctuation stripping",
    )
    p.add_argument("--iters", type=int)
    p.add_argument("--rules", help="rules file, or 'default' for the shipped set")
    p.add_argument("--rule-strength", type=float, default=1.0)
    p.add_argument("--multi-root", action="store_true")
    p.add_argument("--tag-noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", default="-", help="TSV destination")

    return parser, submap


# Options a run cannot proceed without.  They are not argparse-required
# so that a --config file can supply them; checked after config merge.
_REQUIRED = {
    "map": ("input", "map"),
    "validate": ("map",),
    "train": ("input", "model"),
    "tag": ("model", "input"),
    "eval": ("model", "gold"),
    "experiment matrix": ("train", "test", "map"),
    "experiment variance": ("results",),
    "induce": ("input", "map", "iters"),
}


def _subkey(args):
    return args.command if args.command != "experiment" else f"experiment {args.mode}"


def _apply_config(parser, submap, args, argv):
    target = submap[_subkey(args)]
    with _named(args.config):
        try:
            config = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise UniposError(f"not valid JSON: {e}") from e
        except OSError as e:
            raise UniposError(str(e)) from e
        if not isinstance(config, dict):
            raise UniposError("config must be a JSON object")
        allowed = set(vars(args)) - {"command", "mode", "run", "config"}
        unknown = sorted(set(config) - allowed)
        if unknown:
            raise UniposError(
                f"option(s) unknown to {args.command}: " + ", ".join(unknown)
            )
    target.set_defaults(**config)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser, submap = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            args = _apply_config(parser, submap, args, argv)
        key = _subkey(args)
        missing = [
            d for d in _REQUIRED.get(key, ()) if getattr(args, d) is None
        ]
        if missing:
            submap[key].error(
                "the following arguments are required: "
                + ", ".join("--" + d.replace("_", "-") for d in missing)
            )
        if args.jobs < 1:
            parser.error(f"--jobs must be >= 1, got {args.jobs}")
        return args.run(args)
    except SystemExit as e:
        if isinstance(e.code, int):
            return e.code
        return 0 if e.code is None else 1
    except UniposError as e:
        print(f"unipos: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"unipos: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
