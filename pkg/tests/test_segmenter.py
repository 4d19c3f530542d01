import pytest
from hypothesis import given, strategies as st

from bitextmine.langs import LANGS
from bitextmine.records import Article
from bitextmine.segmenter import (
    DANDA, DOUBLE_DANDA, URDU_FULL_STOP, segment_article, split_sentences, word_tokenize)


@pytest.mark.parametrize("lang", LANGS)
def test_empty_input(lang):
    assert split_sentences("", lang) == []


def test_three_terminators_en():
    assert split_sentences("A. B? C!", "en") == ["A.", "B?", "C!"]


def test_danda_hi():
    text = "यह पहला वाक्य है। यह दूसरा वाक्य है।"
    out = split_sentences(text, "hi")
    assert len(out) == 2
    assert all(s.endswith(DANDA) for s in out)


def test_double_danda_and_terminator_runs():
    assert split_sentences("क॥ ख?! ग", "mr") == ["क॥", "ख?!", "ग"]


def test_urdu_full_stop_only():
    text = f"پہلا جملہ{URDU_FULL_STOP} دوسرا. جملہ؟ تیسرا!"
    # ASCII full stop is not a terminator for Urdu, the Arabic question mark neither
    assert split_sentences(text, "ur") == [f"پہلا جملہ{URDU_FULL_STOP}", "دوسرا. جملہ؟ تیسرا!"]


def test_danda_not_a_terminator_for_tamil():
    assert split_sentences(f"அ{DANDA} ஆ. இ…", "ta") == [f"அ{DANDA} ஆ.", "இ…"]


def test_ellipsis_en_only_in_latin_like_set():
    assert split_sentences("wait… go", "en") == ["wait…", "go"]
    assert split_sentences("wait… go", "hi") == ["wait… go"]


def test_newlines_are_boundaries_and_whitespace_collapses():
    assert split_sentences("  one\ttwo \n three  ", "en") == ["one two", "three"]


def test_no_abbreviation_protection():
    assert split_sentences("Rs. 64.41 crore", "en") == ["Rs.", "64.", "41 crore"]


def test_word_tokenize_examples():
    assert word_tokenize("") == []
    assert word_tokenize("hello, world") == ["hello", ",", "world"]
    # internal punctuation stays, the leading "Rs." keeps its internal dot
    assert word_tokenize("Out of this Rs.3,18,931.22 crore.") == [
        "Out", "of", "this", "Rs.3,18,931.22", "crore", "."]
    assert word_tokenize('("quoted")') == ["(", '"', "quoted", '"', ")"]
    assert word_tokenize("है।") == ["है", "।"]


def test_segment_article_indices():
    art = Article("x", "en", None, "One. Two.\nThree")
    recs = segment_article(art)
    assert [(r.index, r.text) for r in recs] == [(0, "One."), (1, "Two."), (2, "Three")]


alphabet = st.sampled_from(list("ab .?!…\n\t") + [DANDA, DOUBLE_DANDA, URDU_FULL_STOP, "क", " "])
texts = st.lists(alphabet, max_size=40).map("".join)


@given(texts, st.sampled_from(LANGS))
def test_split_loses_no_characters(text, lang):
    out = split_sentences(text, lang)
    assert "".join(" ".join(out).split()) == "".join(text.split())


@given(texts, st.sampled_from(LANGS))
def test_split_elements_are_trimmed_nonempty_single_line(text, lang):
    for s in split_sentences(text, lang):
        assert s and s == s.strip() and "\n" not in s and "  " not in s


@given(st.text(st.characters(blacklist_categories=("Cs",)), max_size=40))
def test_word_tokenize_is_stable(text):
    toks = word_tokenize(text)
    assert word_tokenize(" ".join(toks)) == toks
    assert "".join(toks) == "".join(text.split())
