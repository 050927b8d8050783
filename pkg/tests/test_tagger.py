import pytest

from kotowari.compiler import save
from kotowari.errors import TemplateError
from kotowari.tagger import (
    DICDIR_ENV,
    Diagnostic,
    Tagger,
    TaggerInitError,
    compile_template,
    new_tagger,
    render_template,
)

from conftest import SAMPLE_SENTENCE, SAMPLE_SURFACES, TOY_KTD


@pytest.fixture(scope="module")
def tagger():
    return Tagger(TOY_KTD)


class TestConstruction:
    def test_happy_path(self, tagger):
        assert tagger.dictionary.meta.dictionary_name == "kotowari-toy"

    def test_default_discovery_finds_bundled_dictionary(self, monkeypatch):
        monkeypatch.delenv(DICDIR_ENV, raising=False)
        t = Tagger()
        assert t.dictionary.meta.dictionary_name == "kotowari-toy"

    def test_env_var_discovery(self, monkeypatch, tmp_path, toy_dic):
        (tmp_path / "env.ktd").write_bytes(save(toy_dic))
        monkeypatch.setenv(DICDIR_ENV, str(tmp_path))
        t = Tagger()
        assert t.dictionary.meta.dictionary_name == "kotowari-toy"

    def test_missing_path_diagnostic(self):
        result = new_tagger("/nonexistent/path.ktd")
        assert isinstance(result, Diagnostic)
        assert "dictionary not installed or wrong path" in result.probable_cause
        assert any("/nonexistent/path.ktd" in v for _, v in result.debug_info)
        assert result.faq_url
        assert result.note

    def test_truncated_file_diagnostic(self, tmp_path):
        data = TOY_KTD.read_bytes()
        bad = tmp_path / "truncated.ktd"
        bad.write_bytes(data[: len(data) - 200])
        result = new_tagger(bad)
        assert isinstance(result, Diagnostic)
        assert "truncated" in result.probable_cause
        assert len(result.debug_info) >= 1

    def test_bad_magic_diagnostic(self, tmp_path):
        bad = tmp_path / "bad.ktd"
        bad.write_bytes(b"nope" + TOY_KTD.read_bytes()[4:])
        result = new_tagger(bad)
        assert isinstance(result, Diagnostic)
        assert "not a dictionary file" in result.probable_cause

    def test_constructor_raises_with_full_diagnostic(self):
        with pytest.raises(TaggerInitError) as exc:
            Tagger("/nonexistent/path.ktd")
        text = str(exc.value)
        assert "Probable cause" in text
        assert "FAQ" in text

    def test_bad_template_fails_at_construction(self):
        result = new_tagger(TOY_KTD, format_template="%q")
        assert isinstance(result, Diagnostic)
        assert "%q" in result.probable_cause


class TestTag:
    def test_sample_sentence(self, tagger):
        tokens = tagger.tag(SAMPLE_SENTENCE)
        assert len(tokens) == 15
        assert tokens[0].surface == "麩"
        assert tokens[-1].surface == "。"

    def test_returns_plain_list(self, tagger):
        result = tagger(SAMPLE_SENTENCE)
        assert isinstance(result, list)
        assert result[3].surface == "、"
        assert len(result) == 15

    def test_multiline(self, tagger):
        tokens = tagger.tag("見た\n見ました")
        assert [t.surface for t in tokens] == ["見", "た", "見", "まし", "た"]

    def test_empty(self, tagger):
        assert tagger.tag("") == []

    def test_whitespace_skipped_never_in_surfaces(self, tagger):
        tokens = tagger.tag("見た 見ました")
        assert [t.surface for t in tokens] == ["見", "た", "見", "まし", "た"]
        tokens = tagger.tag("見た　見ました")  # ideographic space
        assert [t.surface for t in tokens] == ["見", "た", "見", "まし", "た"]

    def test_spans_are_line_relative_and_skip_spaces(self, tagger):
        tokens = tagger.tag("見た 見た")
        assert [(t.start, t.end) for t in tokens] == [(0, 1), (1, 2), (3, 4), (4, 5)]

    def test_reuse_equivalence(self):
        once = Tagger(TOY_KTD)
        a = [t.surface for t in once.tag(SAMPLE_SENTENCE)]
        b = [t.surface for t in Tagger(TOY_KTD).tag(SAMPLE_SENTENCE)]
        c = [t.surface for t in once.tag(SAMPLE_SENTENCE)]
        assert a == b == c


class TestWakati:
    def test_sample_sentence(self, tagger):
        assert tagger.wakati(SAMPLE_SENTENCE) == " ".join(SAMPLE_SURFACES)

    def test_plum_sentence(self, tagger):
        assert (
            tagger.wakati("すもももももももものうち")
            == "すもも も もも も もも の うち"
        )

    def test_empty(self, tagger):
        assert tagger.wakati("") == ""

    def test_lines_preserved(self, tagger):
        assert tagger.wakati("見た\n赤かった") == "見 た\n赤かっ た"


class TestFormatToken:
    def test_surface_and_pos(self, tagger):
        token = next(t for t in tagger.tag(SAMPLE_SENTENCE) if t.surface == "日本")
        assert tagger.format_token(token, "%m\\t%f[0]") == "日本\t名詞"

    def test_surface_only(self, tagger):
        token = tagger.tag("見た")[0]
        assert tagger.format_token(token, "%m") == "見"

    def test_absent_field_renders_empty(self, tagger):
        token = tagger.tag("見た")[0]
        assert tagger.format_token(token, "%f[99]") == ""

    def test_join_skips_absent(self, tagger):
        token = next(t for t in tagger.tag(SAMPLE_SENTENCE) if t.surface == "は")
        assert tagger.format_token(token, "%F-[0,1,2,3]") == "助詞-係助詞"

    def test_unknown_marker(self, tagger):
        tokens = tagger.tag("2023年")
        marks = [tagger.format_token(t, "%s") for t in tokens]
        assert marks == ["1", "0"]

    def test_unknown_directive_rejected(self):
        with pytest.raises(TemplateError):
            compile_template("%z")

    def test_malformed_f_rejected(self):
        with pytest.raises(TemplateError):
            compile_template("%f[a]")

    def test_literal_text_and_escapes(self, tagger):
        token = tagger.tag("見た")[0]
        ops = compile_template("<%m>\\n")
        assert render_template(ops, token) == "<見>\n"
