"""Coarse tagset and mapping-file behaviour."""

import pytest
from hypothesis import given, strategies as st

from unipos import (
    DuplicateKeyError,
    EmptyMappingError,
    InvalidTagError,
    MappingError,
    ParseError,
    TagMapping,
    UniversalTag,
    UnknownFineTagError,
    load_mapping,
    map_tag,
    parse_mapping,
    serialize_mapping,
    validate_mapping,
)
from unipos.tagset import TAG_RENDERINGS, find_mapping, packaged_mappings


class TestUniversalTag:
    def test_exactly_twelve_categories(self):
        assert len(UniversalTag) == 12
        assert len(set(TAG_RENDERINGS)) == 12

    def test_punctuation_renders_as_dot(self):
        assert str(UniversalTag.PUNCT) == "."
        assert UniversalTag.PUNCT.value == "."

    def test_all_other_renderings_equal_names(self):
        for tag in UniversalTag:
            if tag is not UniversalTag.PUNCT:
                assert str(tag) == tag.name

    def test_rendering_round_trips(self):
        for tag in UniversalTag:
            assert UniversalTag.from_string(str(tag)) is tag

    def test_member_name_punct_is_not_a_rendering(self):
        with pytest.raises(InvalidTagError):
            UniversalTag.from_string("PUNCT")

    @pytest.mark.parametrize("bad", ["", "noun", "NOUNS", "VB", "..", " X"])
    def test_unknown_renderings_rejected(self, bad):
        with pytest.raises(InvalidTagError):
            UniversalTag.from_string(bad)


SIMPLE = "NN\tNOUN\nVB\tVERB\n,\t.\n"


class TestParseMapping:
    def test_basic_entries(self):
        m = parse_mapping(SIMPLE, treebank_id="toy")
        assert m.treebank_id == "toy"
        assert len(m) == 3
        assert m.entries["NN"] is UniversalTag.NOUN
        assert m.entries[","] is UniversalTag.PUNCT

    def test_comments_and_blank_lines_skipped(self):
        text = "# header\n\nNN\tNOUN\n   \n# trailing\n"
        m = parse_mapping(text)
        assert len(m) == 1

    def test_pound_sign_fine_tag_is_not_a_comment(self):
        # The entry line carries a tab, which distinguishes it.
        m = parse_mapping("# comment\n#\t.\n")
        assert m.entries["#"] is UniversalTag.PUNCT

    def test_duplicate_fine_tag_rejected(self):
        with pytest.raises(DuplicateKeyError, match="NN"):
            parse_mapping("NN\tNOUN\nNN\tVERB\n")

    def test_bad_rendering_rejected_with_line_number(self):
        with pytest.raises(InvalidTagError, match="line 2"):
            parse_mapping("NN\tNOUN\nVB\tVRB\n")

    def test_wrong_field_count_rejected(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_mapping("NN NOUN\n")
        with pytest.raises(ParseError):
            parse_mapping("NN\tNOUN\tEXTRA\n")

    def test_empty_fine_tag_rejected(self):
        with pytest.raises(ParseError):
            parse_mapping("\tNOUN\n")

    def test_empty_input_rejected(self):
        with pytest.raises(EmptyMappingError):
            parse_mapping("")
        with pytest.raises(EmptyMappingError):
            parse_mapping("# only comments\n")

    def test_fine_tags_case_sensitive(self):
        m = parse_mapping("NN\tNOUN\nnn\tVERB\n")
        assert m.entries["NN"] is UniversalTag.NOUN
        assert m.entries["nn"] is UniversalTag.VERB

    def test_empty_mapping_object_rejected(self):
        with pytest.raises(EmptyMappingError):
            TagMapping(treebank_id="x", entries={})


# Tab and newline are the only structural bytes of the file format.
_fine_tag = st.text(
    st.characters(
        blacklist_characters="\t\n",
        blacklist_categories=("Cs",),
    ),
    min_size=1,
    max_size=12,
).filter(lambda s: s.strip() and not s.endswith("\r"))


class TestSerializeRoundTrip:
    def test_simple_round_trip(self):
        m = parse_mapping(SIMPLE, treebank_id="toy")
        again = parse_mapping(serialize_mapping(m), treebank_id="toy")
        assert again.entries == m.entries

    @given(
        st.dictionaries(
            _fine_tag,
            st.sampled_from(list(UniversalTag)),
            min_size=1,
            max_size=30,
        )
    )
    def test_round_trip_arbitrary_entries(self, entries):
        m = TagMapping(treebank_id="gen", entries=entries)
        again = parse_mapping(serialize_mapping(m), treebank_id="gen")
        assert again.entries == m.entries


class TestMapTag:
    def setup_method(self):
        self.m = parse_mapping(SIMPLE, treebank_id="toy")

    def test_known_tag(self):
        assert map_tag(self.m, "NN") is UniversalTag.NOUN

    def test_unknown_tag_strict_by_default(self):
        with pytest.raises(UnknownFineTagError, match="JJ"):
            map_tag(self.m, "JJ")

    def test_unknown_tag_fallback_to_x(self):
        assert map_tag(self.m, "JJ", fallback_x=True) is UniversalTag.X

    def test_fallback_does_not_shadow_known_tags(self):
        assert map_tag(self.m, "VB", fallback_x=True) is UniversalTag.VERB


class TestValidateMapping:
    def setup_method(self):
        self.m = parse_mapping(SIMPLE, treebank_id="toy")

    def test_full_coverage(self):
        report = validate_mapping(self.m, ["NN", "NN", "VB", ","])
        assert report.ok
        assert report.unknown_tags == []
        assert report.unused_tags == []
        assert report.tag_histogram == {
            UniversalTag.NOUN: 2,
            UniversalTag.VERB: 1,
            UniversalTag.PUNCT: 1,
        }

    def test_unknown_and_unused_reported_sorted(self):
        report = validate_mapping(self.m, ["NN", "ZZ", "AA"])
        assert not report.ok
        assert report.unknown_tags == ["AA", "ZZ"]
        assert report.unused_tags == [",", "VB"]

    def test_accepts_count_mapping(self):
        report = validate_mapping(self.m, {"NN": 5, "VB": 2})
        assert report.tag_histogram[UniversalTag.NOUN] == 5
        assert report.tag_histogram[UniversalTag.VERB] == 2


class TestShippedMappings:
    def test_english_ptb_has_45_entries(self):
        m = find_mapping("en-ptb")
        assert len(m) == 45
        assert m.treebank_id == "en-ptb"

    def test_english_ptb_verb_block(self):
        m = find_mapping("en-ptb")
        for fine in ["VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "MD"]:
            assert m.entries[fine] is UniversalTag.VERB

    def test_english_ptb_particles(self):
        m = find_mapping("en-ptb")
        for fine in ["POS", "RP", "TO"]:
            assert m.entries[fine] is UniversalTag.PRT

    def test_english_ptb_punctuation(self):
        m = find_mapping("en-ptb")
        for fine in ["#", "$", "''", "(", ")", ",", ".", ":", "``"]:
            assert m.entries[fine] is UniversalTag.PUNCT

    def test_russian_rnc_spot_checks(self):
        m = find_mapping("ru-rnc")
        assert len(m) == 16
        assert m.entries["A"] is UniversalTag.ADJ
        assert m.entries["COMP"] is UniversalTag.CONJ
        assert m.entries["VG"] is UniversalTag.VERB
        assert m.entries["!"] is UniversalTag.PUNCT
        assert m.entries["YES_NO_SENT"] is UniversalTag.X


class TestFindMapping:
    def test_resolves_explicit_path(self, tmp_path):
        p = tmp_path / "xx-toy.map"
        p.write_text(SIMPLE)
        m = find_mapping(str(p))
        assert m.treebank_id == "xx-toy"

    def test_resolves_via_environment_dir(self, tmp_path, monkeypatch):
        (tmp_path / "yy-env.map").write_text(SIMPLE)
        monkeypatch.setenv("UNIPOS_MAP_DIR", str(tmp_path))
        m = find_mapping("yy-env")
        assert m.treebank_id == "yy-env"

    def test_packaged_names_resolve_without_env(self, monkeypatch):
        monkeypatch.delenv("UNIPOS_MAP_DIR", raising=False)
        assert find_mapping("en-ptb").treebank_id == "en-ptb"
        assert "ru-rnc" in packaged_mappings()

    def test_missing_name_raises(self, monkeypatch):
        monkeypatch.delenv("UNIPOS_MAP_DIR", raising=False)
        with pytest.raises(MappingError):
            find_mapping("zz-nowhere")

    def test_load_mapping_reads_file(self, tmp_path):
        p = tmp_path / "aa-bb.map"
        p.write_text(SIMPLE)
        assert load_mapping(p).treebank_id == "aa-bb"
