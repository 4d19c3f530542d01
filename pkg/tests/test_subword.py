import pytest
from hypothesis import given, settings, strategies as st
from sklearn.base import clone

from bitextmine.subword import EOW, SubwordModel, decode, encode, term_tokenizer, train_subword


def test_first_merge_aa():
    model = train_subword(["aa aa ab"], target_vocab=4)
    assert model.merges_ == [("a", "a")]
    assert len(model.vocab_) == 4


def test_single_char_word_has_no_merges():
    model = train_subword(["a"], target_vocab=1)
    assert model.merges_ == []


def test_target_below_inventory_is_an_error():
    with pytest.raises(ValueError, match="character inventory"):
        train_subword(["abc"], target_vocab=2)


def test_empty_corpus_is_an_error():
    with pytest.raises(ValueError):
        train_subword([], target_vocab=10)


def test_training_is_deterministic():
    corpus = ["the cat sat on the mat", "the dog sat", "a cat and a dog"]
    a, b = train_subword(corpus, 40), train_subword(list(corpus), 40)
    assert a.dumps() == b.dumps()


def test_round_trip_and_empty():
    model = train_subword(["aa ab aa"], target_vocab=6)
    assert decode(model, encode(model, "aa ab")) == "aa ab"
    assert encode(model, "") == []


def test_unseen_characters_fall_back_to_single_symbols():
    model = train_subword(["aa aa"], target_vocab=4)
    syms = model.encode("xyz")
    assert syms == ["x", "y", "z", EOW]
    assert model.decode(syms) == "xyz"


def test_reserved_marker_in_user_text_round_trips():
    model = train_subword(["a▁b a\\b", "a▁b"], target_vocab=12)
    for text in ["a▁b", "a\\b \\▁", "\\_"]:
        assert model.decode(model.encode(text)) == text


def test_decode_normalises_whitespace():
    model = train_subword(["ab ab"], target_vocab=5)
    assert model.decode(model.encode("  ab \t ab\n")) == "ab ab"


def test_ties_break_on_smallest_pair():
    # (a,b) (b,EOW) (c,d) (d,EOW) all occur twice; the smallest tuple wins
    model = train_subword(["ab cd ab cd"], target_vocab=7)
    assert model.merges_ == [("a", "b"), ("ab", EOW)]


def test_min_frequency_stops_training():
    model = train_subword(["abcdef"], target_vocab=100)
    assert model.merges_ == []
    model = train_subword(["abcdef"], target_vocab=100, min_frequency=1)
    assert len(model.merges_) == 6


def test_save_load_round_trip(tmp_path):
    corpus = ["नमस्ते दुनिया", "दुनिया नमस्ते नमस्ते"]
    model = train_subword(corpus, target_vocab=60, lang="hi")
    path = tmp_path / "hi.model"
    model.save(path)
    text = path.read_text(encoding="utf-8")
    assert text.splitlines()[0] == "subword v1 hi 60"
    again = SubwordModel.load(path)
    assert again.merges_ == model.merges_
    for s in corpus + ["नया शब्द"]:
        assert again.encode(s) == model.encode(s)


def test_load_rejects_bad_header():
    with pytest.raises(ValueError):
        SubwordModel.loads("bpe v2 hi 4\n")


def test_estimator_api():
    model = SubwordModel(lang="ta", target_vocab=30)
    assert model.get_params() == {"lang": "ta", "target_vocab": 30, "min_frequency": 2}
    fitted = model.fit(["அம்மா அப்பா", "அம்மா"])
    assert fitted is model
    assert model.transform(["அம்மா"]) == [model.encode("அம்மா")]
    assert model.inverse_transform(model.transform(["அம்மா அப்பா"])) == ["அம்மா அப்பா"]
    assert not hasattr(clone(model), "merges_")


def test_term_tokenizer():
    model = train_subword(["hello, world hello"], target_vocab=30)
    tok = term_tokenizer("subword", model)
    assert decode(model, tok("hello, world")) == "hello , world"
    assert term_tokenizer("word")("hello, world") == ["hello", ",", "world"]
    with pytest.raises(ValueError):
        term_tokenizer("subword")
    with pytest.raises(ValueError):
        term_tokenizer("chars")


alphabet = "abcdeकखगा"
words = st.text(alphabet, min_size=1, max_size=7)
lines = st.lists(words, min_size=1, max_size=8).map(" ".join)
TRAIN = ["abc abd aab", "कखग गखक कका", "deed bead cab", "aaa bbb ccc ddd eee",
         "कखग abc गा"] * 3
MODEL = train_subword(TRAIN, target_vocab=60)


@settings(max_examples=1000)
@given(lines)
def test_round_trip_random_strings(x):
    assert MODEL.decode(MODEL.encode(x)) == x


@settings(max_examples=50)
@given(st.lists(lines, min_size=1, max_size=6), st.integers(1, 80))
def test_vocab_bound(corpus, extra):
    chars = {c for s in corpus for c in s if not c.isspace()}
    model = train_subword(corpus, target_vocab=len(chars) + extra, min_frequency=1)
    assert len(model.vocab_) <= model.target_vocab + len(chars) + 1
    assert len(model.vocab_) <= max(model.target_vocab, len(chars) + 1)


@settings(max_examples=40)
@given(st.lists(lines, min_size=1, max_size=6))
def test_more_merges_never_lengthen_training_encodings(corpus):
    full = train_subword(corpus, target_vocab=200, min_frequency=1)
    prev = None
    for k in range(len(full.merges_) + 1):
        m = SubwordModel.loads(_truncated(full, k))
        total = sum(len(m.encode(s)) for s in corpus)
        if prev is not None:
            assert total <= prev
        prev = total


def _truncated(model, k):
    lines = model.dumps().splitlines()
    return "\n".join(lines[:1 + k]) + "\n"
