"""Tests for dependency grammar induction.

Chart quantities (likelihoods, expected counts, best trees) are
checked against the brute-force enumeration in dmv_reference, which
walks the generative story tree by tree.
"""

import math

import numpy as np
import pytest

import dmv_reference as ref
from unipos import dmv
from unipos.errors import (
    DuplicateKeyError,
    EmptyCorpusError,
    InvalidTagError,
    InvalidTreeError,
    ParseError,
)

# Real coarse-tag names so rule files can address the inventory.
INVENTORY = ("ADJ", "NOUN", "VERB")


def random_params(rng, tags, single_root=True):
    """Row-normalised random parameters with root rows pinned."""
    T = len(tags)
    attach = rng.random((T + 1, 2, T)) + 0.05
    attach /= attach.sum(axis=2, keepdims=True)
    stop = rng.uniform(0.1, 0.9, size=(T + 1, 2, 2))
    stop[T, dmv.LEFT, :] = 1.0
    if single_root:
        stop[T, dmv.RIGHT, dmv.ADJACENT] = 0.0
        stop[T, dmv.RIGHT, dmv.NON_ADJACENT] = 1.0
    params = dmv.DmvParameters(
        tags=tuple(tags), attach=attach, stop=stop, single_root=single_root
    )
    params.validate()
    return params


def random_sentences(rng, tags, n_sentences, max_len):
    return [
        [tags[rng.integers(len(tags))] for _ in range(rng.integers(1, max_len + 1))]
        for _ in range(n_sentences)
    ]


def random_rules(rng, tags):
    """A few random soft preferences over the inventory, ROOT included."""
    heads = (dmv.ROOT_LABEL, *tags)
    edges = {}
    for _ in range(4):
        h = heads[rng.integers(len(heads))]
        d = tags[rng.integers(len(tags))]
        edges[h, d] = float(rng.uniform(-1.5, 1.5))
    return dmv.RuleSet(edges=edges)


def uniform_params(tags, single_root=True):
    """Dyadic parameters: every product of factors is an exact float."""
    T = len(tags)
    attach = np.full((T + 1, 2, T), 1.0 / T)
    stop = np.full((T + 1, 2, 2), 0.5)
    stop[T, dmv.LEFT, :] = 1.0
    if single_root:
        stop[T, dmv.RIGHT, dmv.ADJACENT] = 0.0
        stop[T, dmv.RIGHT, dmv.NON_ADJACENT] = 1.0
    return dmv.DmvParameters(
        tags=tuple(tags), attach=attach, stop=stop, single_root=single_root
    )


class TestHarmonicInit:
    def test_two_token_hand_values(self):
        p = dmv.init_harmonic([["NOUN", "VERB"]])
        assert p.tags == ("NOUN", "VERB")
        root = p.root_index
        assert p.attach[root, dmv.RIGHT, 0] == pytest.approx(1.1 / 1.7)
        assert p.attach[root, dmv.RIGHT, 1] == pytest.approx(0.6 / 1.7)
        assert p.attach[0, dmv.RIGHT, 1] == pytest.approx(1.1 / 1.2)
        assert p.attach[1, dmv.LEFT, 0] == pytest.approx(1.1 / 1.2)

    def test_distance_discount(self):
        p = dmv.init_harmonic([["NOUN", "VERB", "NOUN"]])
        ni = p.tags.index("NOUN")
        vi = p.tags.index("VERB")
        # VERB sees a NOUN at distance 1 on each side.
        assert p.attach[vi, dmv.LEFT, ni] > p.attach[vi, dmv.LEFT, vi]
        # Position 1 outweighs position 3 for the root.
        root_counts = [1.0 + 1.0 / 3.0, 1.0 / 2.0]
        total = sum(root_counts) + 0.2
        assert p.attach[p.root_index, dmv.RIGHT, ni] == pytest.approx(
            (root_counts[0] + 0.1) / total
        )

    def test_stop_probabilities_half(self):
        p = dmv.init_harmonic([["NOUN", "VERB"]])
        assert np.all(p.stop[:-1] == 0.5)

    def test_root_rows_pinned(self):
        p = dmv.init_harmonic([["NOUN", "VERB"]])
        root = p.root_index
        assert np.all(p.stop[root, dmv.LEFT] == 1.0)
        assert p.stop[root, dmv.RIGHT, dmv.ADJACENT] == 0.0
        assert p.stop[root, dmv.RIGHT, dmv.NON_ADJACENT] == 1.0

    def test_multi_root_leaves_right_stop_free(self):
        p = dmv.init_harmonic([["NOUN", "VERB"]], single_root=False)
        root = p.root_index
        assert np.all(p.stop[root, dmv.LEFT] == 1.0)
        assert np.all(p.stop[root, dmv.RIGHT] == 0.5)

    def test_explicit_inventory_with_unseen_tag(self):
        p = dmv.init_harmonic([["NOUN"]], tags=("ADJ", "NOUN"))
        assert p.tags == ("ADJ", "NOUN")
        p.validate()
        assert np.all(p.attach[:, :, 0] > 0.0)

    def test_rows_normalised(self):
        p = dmv.init_harmonic([["NOUN", "VERB", "ADJ"], ["NOUN"]])
        p.validate()

    def test_deterministic(self):
        a = dmv.init_harmonic([["NOUN", "VERB"]])
        b = dmv.init_harmonic([["NOUN", "VERB"]])
        assert np.array_equal(a.attach, b.attach)
        assert np.array_equal(a.stop, b.stop)

    def test_empty_corpus_rejected(self):
        with pytest.raises(EmptyCorpusError):
            dmv.init_harmonic([])
        with pytest.raises(EmptyCorpusError):
            dmv.init_harmonic([[]])

    def test_bad_smoothing_rejected(self):
        with pytest.raises(ValueError):
            dmv.init_harmonic([["NOUN"]], smoothing=0.0)


class TestParameters:
    def test_validate_accepts_good(self):
        random_params(np.random.default_rng(0), INVENTORY).validate()

    def test_validate_rejects_bad_shape(self):
        p = random_params(np.random.default_rng(0), INVENTORY)
        bad = dmv.DmvParameters(
            tags=p.tags, attach=p.attach[:, :, :2], stop=p.stop
        )
        with pytest.raises(ValueError):
            bad.validate()

    def test_validate_rejects_unnormalised(self):
        p = random_params(np.random.default_rng(0), INVENTORY)
        bad = dmv.DmvParameters(
            tags=p.tags, attach=p.attach * 2.0, stop=p.stop
        )
        with pytest.raises(ValueError):
            bad.validate()

    def test_tag_index(self):
        p = random_params(np.random.default_rng(0), INVENTORY)
        assert p.tag_index("NOUN") == 1
        with pytest.raises(InvalidTagError):
            p.tag_index("PRON")


class TestRules:
    def test_parse_two_and_three_fields(self):
        rules = dmv.parse_rules("ROOT\tVERB\nVERB\tNOUN\t0.5\n")
        assert rules.strength("ROOT", "VERB") == 1.0
        assert rules.strength("VERB", "NOUN") == 0.5
        assert rules.strength("NOUN", "VERB") is None

    def test_default_strength_override(self):
        rules = dmv.parse_rules("ROOT\tVERB\n", default_strength=2.5)
        assert rules.strength("ROOT", "VERB") == 2.5

    def test_comments_and_blanks_skipped(self):
        rules = dmv.parse_rules("# header\n\nROOT\tVERB\n  \n")
        assert len(rules.edges) == 1

    def test_crlf_tolerated(self):
        rules = dmv.parse_rules("ROOT\tVERB\r\nVERB\tNOUN\r\n")
        assert len(rules.edges) == 2

    def test_bad_field_count(self):
        with pytest.raises(ParseError, match="line 1"):
            dmv.parse_rules("ROOT VERB\n")

    def test_bad_head_tag(self):
        with pytest.raises(InvalidTagError, match="line 2"):
            dmv.parse_rules("ROOT\tVERB\nWIBBLE\tNOUN\n")

    def test_bad_dependent_tag(self):
        with pytest.raises(InvalidTagError, match="PUNCT"):
            dmv.parse_rules("ROOT\tPUNCT\n")

    def test_root_not_allowed_as_dependent(self):
        with pytest.raises(InvalidTagError):
            dmv.parse_rules("VERB\tROOT\n")

    def test_duplicate_rule(self):
        with pytest.raises(DuplicateKeyError):
            dmv.parse_rules("ROOT\tVERB\nROOT\tVERB\t2\n")

    def test_non_numeric_strength(self):
        with pytest.raises(ParseError, match="strength"):
            dmv.parse_rules("ROOT\tVERB\tstrong\n")

    def test_packaged_rules(self):
        rules = dmv.default_rules()
        assert ("ROOT", "VERB") in rules.edges
        assert len(rules.edges) == 11

    def test_bias_matrix_placement(self):
        p = uniform_params(INVENTORY)
        rules = dmv.RuleSet(edges={("ROOT", "VERB"): 2.0, ("VERB", "NOUN"): -1.0})
        bias = dmv.rule_bias(rules, p)
        assert bias[p.root_index, 2] == pytest.approx(math.exp(2.0))
        assert bias[2, 1] == pytest.approx(math.exp(-1.0))
        assert bias[0, 0] == 1.0

    def test_bias_ignores_tags_outside_inventory(self):
        p = uniform_params(("NOUN", "VERB"))
        rules = dmv.RuleSet(edges={("ADJ", "NOUN"): 3.0, ("NOUN", "ADV"): 3.0})
        assert np.array_equal(dmv.rule_bias(rules, p), np.ones((3, 2)))

    def test_zero_strength_bias_is_exactly_one(self):
        p = uniform_params(INVENTORY)
        rules = dmv.RuleSet(
            edges={("ROOT", "VERB"): 0.0, ("NOUN", "ADJ"): 0.0}
        )
        assert np.array_equal(dmv.rule_bias(rules, p), np.ones((4, 3)))


class TestInsideOutside:
    def test_one_token_hand_values(self):
        p = uniform_params(("NOUN",))
        counts, ll = dmv.inside_outside(["NOUN"], p)
        assert ll == pytest.approx(math.log(0.25))
        assert counts.attach[p.root_index, dmv.RIGHT, 0] == pytest.approx(1.0)
        assert counts.stop[0, dmv.LEFT, dmv.ADJACENT] == pytest.approx(1.0)
        assert counts.stop[0, dmv.RIGHT, dmv.ADJACENT] == pytest.approx(1.0)
        assert counts.cont[p.root_index, dmv.RIGHT, dmv.ADJACENT] == pytest.approx(1.0)
        assert counts.stop[p.root_index, dmv.RIGHT, dmv.NON_ADJACENT] == pytest.approx(1.0)

    def test_no_root_left_events(self):
        rng = np.random.default_rng(7)
        p = random_params(rng, INVENTORY)
        counts, _ = dmv.inside_outside(["NOUN", "VERB", "ADJ"], p)
        assert np.all(counts.attach[p.root_index, dmv.LEFT] == 0.0)
        assert np.all(counts.stop[p.root_index, dmv.LEFT] == 0.0)
        assert np.all(counts.cont[p.root_index, dmv.LEFT] == 0.0)

    @pytest.mark.parametrize("single_root", [True, False])
    def test_loglikelihood_matches_enumeration(self, single_root):
        rng = np.random.default_rng(11 if single_root else 13)
        for _ in range(25):
            T = int(rng.integers(1, 4))
            tags = INVENTORY[:T]
            p = random_params(rng, tags, single_root=single_root)
            sent = random_sentences(rng, tags, 1, 4)[0]
            _, _, _, ll_ref = ref.enumerate_posteriors(sent, p)
            _, ll = dmv.inside_outside(sent, p)
            assert ll == pytest.approx(ll_ref, rel=1e-10)

    @pytest.mark.parametrize("single_root", [True, False])
    def test_counts_match_enumeration(self, single_root):
        rng = np.random.default_rng(17 if single_root else 19)
        for _ in range(25):
            T = int(rng.integers(1, 4))
            tags = INVENTORY[:T]
            p = random_params(rng, tags, single_root=single_root)
            sent = random_sentences(rng, tags, 1, 4)[0]
            a_ref, s_ref, c_ref, _ = ref.enumerate_posteriors(sent, p)
            counts, _ = dmv.inside_outside(sent, p)
            np.testing.assert_allclose(counts.attach, a_ref, atol=1e-8)
            np.testing.assert_allclose(counts.stop, s_ref, atol=1e-8)
            np.testing.assert_allclose(counts.cont, c_ref, atol=1e-8)

    def test_counts_match_enumeration_with_rules(self):
        rng = np.random.default_rng(23)
        for _ in range(15):
            p = random_params(rng, INVENTORY)
            rules = random_rules(rng, INVENTORY)
            bias = dmv.rule_bias(rules, p)
            sent = random_sentences(rng, INVENTORY, 1, 4)[0]
            a_ref, s_ref, c_ref, ll_ref = ref.enumerate_posteriors(
                sent, p, bias=bias
            )
            counts, ll = dmv.inside_outside(sent, p, rules=rules)
            assert ll == pytest.approx(ll_ref, rel=1e-10)
            np.testing.assert_allclose(counts.attach, a_ref, atol=1e-8)
            np.testing.assert_allclose(counts.stop, s_ref, atol=1e-8)
            np.testing.assert_allclose(counts.cont, c_ref, atol=1e-8)

    def test_attachment_mass_equals_tokens(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            p = random_params(rng, INVENTORY)
            sent = random_sentences(rng, INVENTORY, 1, 5)[0]
            counts, _ = dmv.inside_outside(sent, p)
            assert counts.attach.sum() == pytest.approx(len(sent), abs=1e-9)

    def test_zero_probability_sentence(self):
        T = 2
        attach = np.zeros((T + 1, 2, T))
        attach[:, :, 1] = 1.0
        stop = np.full((T + 1, 2, 2), 0.5)
        stop[T, dmv.LEFT, :] = 1.0
        stop[T, dmv.RIGHT, dmv.ADJACENT] = 0.0
        stop[T, dmv.RIGHT, dmv.NON_ADJACENT] = 1.0
        p = dmv.DmvParameters(tags=("A", "B"), attach=attach, stop=stop)
        counts, ll = dmv.inside_outside(["A"], p)
        assert ll == -math.inf
        assert counts.attach.sum() == 0.0

    def test_corpus_loglikelihood_sums_sentences(self):
        rng = np.random.default_rng(31)
        p = random_params(rng, INVENTORY)
        corpus = random_sentences(rng, INVENTORY, 4, 4)
        per_sentence = sum(dmv.inside_outside(s, p)[1] for s in corpus)
        assert dmv.loglikelihood(corpus, p) == pytest.approx(per_sentence)

    def test_empty_sentence_rejected(self):
        p = uniform_params(("NOUN",))
        with pytest.raises(EmptyCorpusError):
            dmv.inside_outside([], p)
        with pytest.raises(EmptyCorpusError):
            dmv.loglikelihood([], p)

    def test_unknown_tag_rejected(self):
        p = uniform_params(("NOUN",))
        with pytest.raises(InvalidTagError):
            dmv.inside_outside(["VERB"], p)


class TestEmTrain:
    def test_loglikelihood_nondecreasing(self):
        rng = np.random.default_rng(37)
        for _ in range(20):
            T = int(rng.integers(1, 4))
            tags = INVENTORY[:T]
            corpus = random_sentences(rng, tags, int(rng.integers(2, 6)), 5)
            init = dmv.init_harmonic(corpus, tags=tags)
            _, lls = dmv.em_train(corpus, init, 8)
            assert len(lls) == 8
            for a, b in zip(lls, lls[1:]):
                assert b >= a - 1e-8

    def test_first_loglikelihood_is_initial(self):
        rng = np.random.default_rng(41)
        corpus = random_sentences(rng, INVENTORY, 3, 4)
        init = dmv.init_harmonic(corpus)
        _, lls = dmv.em_train(corpus, init, 1)
        assert lls[0] == pytest.approx(dmv.loglikelihood(corpus, init))

    def test_two_token_fixed_point(self):
        corpus = [["NOUN", "VERB"]] * 5
        init = dmv.init_harmonic(corpus)
        trained, lls = dmv.em_train(corpus, init, 30)
        ni = trained.tags.index("NOUN")
        assert trained.attach[trained.root_index, dmv.RIGHT, ni] > 0.99
        assert dmv.decode(["NOUN", "VERB"], trained).heads == (0, 1)
        assert lls[-1] >= lls[0]

    def test_zero_strength_rules_bit_identical(self):
        rng = np.random.default_rng(43)
        corpus = random_sentences(rng, INVENTORY, 4, 5)
        init = dmv.init_harmonic(corpus)
        rules = dmv.RuleSet(
            edges={("ROOT", "VERB"): 0.0, ("VERB", "NOUN"): 0.0}
        )
        plain, lls_plain = dmv.em_train(corpus, init, 5)
        ruled, lls_ruled = dmv.em_train(corpus, init, 5, rules=rules)
        assert np.array_equal(plain.attach, ruled.attach)
        assert np.array_equal(plain.stop, ruled.stop)
        assert lls_plain == lls_ruled

    def test_rules_steer_training(self):
        corpus = [["NOUN", "VERB"]] * 5
        init = dmv.init_harmonic(corpus)
        rules = dmv.RuleSet(edges={("ROOT", "VERB"): 5.0})
        trained, _ = dmv.em_train(corpus, init, 20, rules=rules)
        vi = trained.tags.index("VERB")
        assert trained.attach[trained.root_index, dmv.RIGHT, vi] > 0.9
        assert dmv.decode(["NOUN", "VERB"], trained, rules=rules).heads == (2, 0)

    def test_root_pins_survive_training(self):
        rng = np.random.default_rng(47)
        corpus = random_sentences(rng, INVENTORY, 4, 4)
        init = dmv.init_harmonic(corpus)
        trained, _ = dmv.em_train(corpus, init, 3)
        root = trained.root_index
        assert np.all(trained.stop[root, dmv.LEFT] == 1.0)
        assert trained.stop[root, dmv.RIGHT, dmv.ADJACENT] == 0.0
        assert trained.stop[root, dmv.RIGHT, dmv.NON_ADJACENT] == 1.0

    def test_multi_root_learns_root_stop(self):
        rng = np.random.default_rng(53)
        corpus = random_sentences(rng, ("NOUN", "VERB"), 5, 4)
        init = dmv.init_harmonic(corpus, single_root=False)
        trained, lls = dmv.em_train(corpus, init, 5)
        root = trained.root_index
        assert trained.single_root is False
        assert np.all(trained.stop[root, dmv.LEFT] == 1.0)
        assert 0.0 < trained.stop[root, dmv.RIGHT, dmv.NON_ADJACENT] < 1.0
        for a, b in zip(lls, lls[1:]):
            assert b >= a - 1e-8

    def test_parameters_stay_normalised(self):
        rng = np.random.default_rng(59)
        corpus = random_sentences(rng, INVENTORY, 4, 5)
        init = dmv.init_harmonic(corpus)
        trained, _ = dmv.em_train(corpus, init, 4)
        trained.validate()

    def test_bad_iterations_rejected(self):
        init = dmv.init_harmonic([["NOUN"]])
        with pytest.raises(ValueError):
            dmv.em_train([["NOUN"]], init, 0)

    def test_empty_corpus_rejected(self):
        init = dmv.init_harmonic([["NOUN"]])
        with pytest.raises(EmptyCorpusError):
            dmv.em_train([], init, 1)
        with pytest.raises(EmptyCorpusError):
            dmv.em_train([["NOUN"], []], init, 1)


class TestDecode:
    def test_identical_tags_tie_break(self):
        p = uniform_params(("NOUN", "VERB"))
        assert dmv.decode(["NOUN", "NOUN"], p).heads == (0, 1)

    def test_three_way_tie_matches_reference(self):
        p = uniform_params(("NOUN",))
        heads_ref, _ = ref.best_tree(["NOUN"] * 3, p)
        assert dmv.decode(["NOUN"] * 3, p).heads == heads_ref

    def test_rules_flip_tied_decode(self):
        p = uniform_params(("NOUN", "VERB"))
        rules = dmv.RuleSet(edges={("ROOT", "VERB"): 2.0})
        assert dmv.decode(["NOUN", "VERB"], p).heads == (0, 1)
        assert dmv.decode(["NOUN", "VERB"], p, rules=rules).heads == (2, 0)

    @pytest.mark.parametrize("single_root", [True, False])
    def test_matches_reference_probability(self, single_root):
        rng = np.random.default_rng(61 if single_root else 67)
        for _ in range(20):
            T = int(rng.integers(1, 4))
            tags = INVENTORY[:T]
            p = random_params(rng, tags, single_root=single_root)
            sent = random_sentences(rng, tags, 1, 4)[0]
            heads_ref, p_best = ref.best_tree(sent, p)
            tree = dmv.decode(sent, p)
            dmv.check_tree(tree.heads, single_root=single_root)
            p_got = ref.tree_probability(sent, tree.heads, p)
            assert p_got == pytest.approx(p_best, rel=1e-9)

    def test_dyadic_ties_match_reference_exactly(self):
        p = uniform_params(("NOUN", "VERB"))
        rng = np.random.default_rng(71)
        for _ in range(15):
            sent = random_sentences(rng, ("NOUN", "VERB"), 1, 4)[0]
            heads_ref, _ = ref.best_tree(sent, p)
            assert dmv.decode(sent, p).heads == heads_ref

    def test_single_root_enforced(self):
        rng = np.random.default_rng(73)
        for _ in range(10):
            p = random_params(rng, INVENTORY)
            sent = random_sentences(rng, INVENTORY, 1, 5)[0]
            heads = dmv.decode(sent, p).heads
            assert sum(1 for h in heads if h == 0) == 1

    def test_rules_bias_matches_reference(self):
        rng = np.random.default_rng(79)
        for _ in range(10):
            p = random_params(rng, INVENTORY)
            rules = random_rules(rng, INVENTORY)
            bias = dmv.rule_bias(rules, p)
            sent = random_sentences(rng, INVENTORY, 1, 4)[0]
            heads_ref, p_best = ref.best_tree(sent, p, bias=bias)
            tree = dmv.decode(sent, p, rules=rules)
            p_got = ref.tree_probability(sent, tree.heads, p, bias=bias)
            assert p_got == pytest.approx(p_best, rel=1e-9)

    def test_deterministic(self):
        rng = np.random.default_rng(83)
        p = random_params(rng, INVENTORY)
        sent = ["NOUN", "VERB", "ADJ", "NOUN"]
        assert dmv.decode(sent, p).heads == dmv.decode(sent, p).heads

    def test_empty_rejected(self):
        p = uniform_params(("NOUN",))
        with pytest.raises(EmptyCorpusError):
            dmv.decode([], p)


class TestTreeChecks:
    def test_valid_tree_accepted(self):
        dmv.check_tree([2, 0, 2])
        dmv.check_tree([0, 1, 2])

    def test_out_of_range_head(self):
        with pytest.raises(InvalidTreeError):
            dmv.check_tree([0, 4])

    def test_self_head(self):
        with pytest.raises(InvalidTreeError):
            dmv.check_tree([1, 0])

    def test_cycle(self):
        with pytest.raises(InvalidTreeError):
            dmv.check_tree([2, 1, 0])

    def test_nonprojective(self):
        with pytest.raises(InvalidTreeError):
            dmv.check_tree([3, 0, 2])
        assert not dmv.is_projective([3, 0, 2])

    def test_projective_examples(self):
        assert dmv.is_projective([2, 0, 2])
        assert dmv.is_projective([0, 1, 1])

    def test_single_root_requirement(self):
        dmv.check_tree([0, 1], single_root=True)
        with pytest.raises(InvalidTreeError):
            dmv.check_tree([0, 0], single_root=True)
        dmv.check_tree([0, 0])

    def test_reference_agrees_with_package_projectivity(self):
        rng = np.random.default_rng(89)
        n = 4
        for _ in range(200):
            heads = [int(rng.integers(0, n + 1)) for _ in range(n)]
            if any(h == d for d, h in enumerate(heads, 1)):
                continue
            if not ref.is_tree(heads):
                continue
            assert ref.is_projective(heads) == dmv.is_projective(heads)

    def test_dependency_tree_container(self):
        t = dmv.DependencyTree(heads=(0, 1))
        assert len(t) == 2
        assert list(t) == [0, 1]


class TestDirectedAccuracy:
    def test_hand_value(self):
        pred = [[0, 1], [2, 0]]
        gold = [[0, 1], [0, 1]]
        assert dmv.directed_accuracy(pred, gold) == pytest.approx(0.5)

    def test_accepts_tree_objects(self):
        pred = [dmv.DependencyTree(heads=(0, 1))]
        assert dmv.directed_accuracy(pred, [[0, 1]]) == 1.0

    def test_corpus_size_mismatch(self):
        with pytest.raises(ValueError):
            dmv.directed_accuracy([[0]], [[0], [0]])

    def test_sentence_length_mismatch(self):
        with pytest.raises(ValueError):
            dmv.directed_accuracy([[0, 1]], [[0]])

    def test_empty_rejected(self):
        with pytest.raises(EmptyCorpusError):
            dmv.directed_accuracy([], [])


class TestPerturbTags:
    CORPUS = [["NOUN", "VERB", "ADJ"], ["NOUN", "NOUN"]]

    def test_rate_zero_is_identity(self):
        assert dmv.perturb_tags(self.CORPUS, 0.0, seed=1) == self.CORPUS

    def test_rate_one_changes_every_token(self):
        out = dmv.perturb_tags(self.CORPUS, 1.0, seed=1)
        for orig, new in zip(self.CORPUS, out):
            assert all(a != b for a, b in zip(orig, new))

    def test_deterministic(self):
        a = dmv.perturb_tags(self.CORPUS, 0.5, seed=9)
        b = dmv.perturb_tags(self.CORPUS, 0.5, seed=9)
        assert a == b

    def test_replacements_from_corpus_inventory(self):
        out = dmv.perturb_tags(self.CORPUS, 1.0, seed=2)
        inventory = {"NOUN", "VERB", "ADJ"}
        assert all(t in inventory for s in out for t in s)

    def test_single_tag_corpus_unchanged(self):
        corpus = [["NOUN", "NOUN"]]
        assert dmv.perturb_tags(corpus, 1.0, seed=3) == corpus

    def test_empirical_rate(self):
        corpus = [["NOUN", "VERB"] * 50] * 20
        out = dmv.perturb_tags(corpus, 0.3, seed=4)
        flips = sum(
            a != b for s, o in zip(corpus, out) for a, b in zip(s, o)
        )
        assert 0.25 < flips / 2000 < 0.35

    def test_bad_rate_rejected(self):
        with pytest.raises(ValueError):
            dmv.perturb_tags(self.CORPUS, 1.5, seed=0)


class TestSampleCorpus:
    def test_valid_single_root_trees(self):
        rng = np.random.default_rng(97)
        p = random_params(rng, INVENTORY)
        corpus = dmv.sample_corpus(p, 30, seed=5, max_len=7)
        assert len(corpus) == 30
        for tags, heads in corpus:
            assert 1 <= len(tags) <= 7
            assert len(tags) == len(heads)
            assert all(t in INVENTORY for t in tags)
            dmv.check_tree(heads, single_root=True)

    def test_multi_root_trees_appear(self):
        rng = np.random.default_rng(101)
        p = random_params(rng, INVENTORY, single_root=False)
        corpus = dmv.sample_corpus(p, 50, seed=6, max_len=7)
        assert any(sum(1 for h in heads if h == 0) > 1 for _, heads in corpus)
        for _, heads in corpus:
            dmv.check_tree(heads)

    def test_deterministic(self):
        p = uniform_params(INVENTORY)
        a = dmv.sample_corpus(p, 10, seed=7, max_len=5)
        b = dmv.sample_corpus(p, 10, seed=7, max_len=5)
        assert a == b

    def test_seeds_differ(self):
        p = uniform_params(INVENTORY)
        a = dmv.sample_corpus(p, 20, seed=8, max_len=5)
        b = dmv.sample_corpus(p, 20, seed=9, max_len=5)
        assert a != b

    def test_bad_arguments_rejected(self):
        p = uniform_params(INVENTORY)
        with pytest.raises(ValueError):
            dmv.sample_corpus(p, 0, seed=0)
        with pytest.raises(ValueError):
            dmv.sample_corpus(p, 1, seed=0, max_len=0)

    def test_sharp_model_recoverable(self):
        # A model with strong preferences: decoding its own samples
        # with the true parameters recovers most heads.
        tags = ("DET", "NOUN", "VERB")
        T = len(tags)
        attach = np.full((T + 1, 2, T), 0.001)
        attach[T, dmv.RIGHT, 2] = 1.0
        attach[2, dmv.LEFT, 1] = 1.0
        attach[2, dmv.RIGHT, 1] = 1.0
        attach[1, dmv.LEFT, 0] = 1.0
        attach /= attach.sum(axis=2, keepdims=True)
        stop = np.full((T + 1, 2, 2), 0.99)
        stop[2, dmv.LEFT, dmv.ADJACENT] = 0.1
        stop[2, dmv.RIGHT, dmv.ADJACENT] = 0.1
        stop[1, dmv.LEFT, dmv.ADJACENT] = 0.5
        stop[T, dmv.LEFT, :] = 1.0
        stop[T, dmv.RIGHT, dmv.ADJACENT] = 0.0
        stop[T, dmv.RIGHT, dmv.NON_ADJACENT] = 1.0
        p = dmv.DmvParameters(tags=tags, attach=attach, stop=stop)
        p.validate()
        corpus = dmv.sample_corpus(p, 40, seed=10, max_len=8)
        pred = [dmv.decode(tags_, p) for tags_, _ in corpus]
        acc = dmv.directed_accuracy(pred, [h for _, h in corpus])
        assert acc > 0.9
