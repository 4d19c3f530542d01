import pytest
from hypothesis import given, settings, strategies as st

from bitextmine.filterpipe import (
    REASONS, FilterPolicy, PairFilter, apply_policy, format_report, is_numeric_token,
    is_url_token, policy_dict, report_records, run_filter)
from bitextmine.records import SentencePair

HI = "यह एक साफ़ वाक्य है ।"
EN = "this is a clean sentence ."


def pair(src=HI, tgt=EN, art="a", i=0):
    return SentencePair((i, i), (i, i), 0.5, "hi", "en", art, "e" + art, src, tgt)


def test_ratio_drop():
    src = "एक दो तीन चार पांच छह सात आठ नौ दस"
    assert apply_policy(src, "one", "hi", "en").reason == "ratio"


def test_url_drop():
    assert apply_policy("http://example.com", EN, "hi", "en").reason == "url"
    assert apply_policy(HI, "see www.pib.nic.in now", "hi", "en").reason == "url"


def test_clean_pair_kept():
    d = apply_policy(HI, EN, "hi", "en")
    assert d.keep and d.reason == "ok"


def test_numeric_only_drop():
    assert apply_policy("17/04/2017", "17/04/2017", "hi", "en").reason == "numeric"
    assert apply_policy("64.41 , 2018", "64.41", "hi", "en").reason == "numeric"


def test_script_drop():
    assert apply_policy("this is english not hindi", EN, "hi", "en").reason == "script"
    assert apply_policy(HI, "यह अंग्रेज़ी नहीं है", "hi", "en").reason == "script"


def test_length_bounds():
    assert apply_policy("। ।", EN, "hi", "en").reason == "too_short"
    long = " ".join(["शब्द"] * 201)
    assert apply_policy(long, " ".join(["w"] * 201), "hi", "en").reason == "too_long"


def test_check_order():
    # too long and url at once: length bounds come first
    long = " ".join(["http://x"] * 201)
    assert apply_policy(long, long, "hi", "en").reason == "too_long"
    # numeric beats url, url beats script, script beats ratio
    assert apply_policy("12 34", "http://a", "hi", "en").reason == "numeric"
    assert apply_policy("www.a b c d e f g", "x", "hi", "en").reason == "url"
    assert apply_policy("a b c d e f g", "x", "hi", "en").reason == "script"


def test_predicates():
    assert is_url_token("https://a.b") and is_url_token("WWW.x.org") and not is_url_token("w.w")
    assert is_numeric_token("2018") and is_numeric_token("3,18,931.22")
    assert not is_numeric_token("Rs.3") and not is_numeric_token("..")


def test_policy_validation_and_mapping():
    with pytest.raises(ValueError):
        FilterPolicy(min_len_ratio=0)
    with pytest.raises(ValueError):
        FilterPolicy(min_len_ratio=2, max_len_ratio=3)
    with pytest.raises(ValueError):
        FilterPolicy(min_script_purity=1.5)
    p = FilterPolicy.from_mapping({"max_len_ratio": "2.5", "drop_url_like": "no", "min_tokens": "2"})
    assert p.max_len_ratio == 2.5 and p.drop_url_like is False and p.min_tokens == 2
    with pytest.raises(ValueError):
        FilterPolicy.from_mapping({"unknown": "1"})
    assert policy_dict(FilterPolicy())["max_tokens"] == 200


def test_flags_disable_checks():
    p = FilterPolicy(drop_url_like=False, drop_numeric_only=False, min_script_purity=0.0)
    assert apply_policy("http://a.b", "http://a.b", "hi", "en", p).keep
    assert apply_policy("2018", "2018", "hi", "en", p).keep


def test_all_clean_passes():
    pairs = [pair(i=i, tgt=f"{EN} {i}") for i in range(3)]
    kept, report = run_filter(pairs)
    assert kept == pairs
    assert report == {**dict.fromkeys(REASONS, 0), "ok": 3}


def test_duplicates_keep_first():
    a, b = pair(art="a"), pair(art="b", src=HI + "  ")
    kept, report = run_filter([a, b])
    assert kept == [a] and report["duplicate"] == 1 and report["ok"] == 1


def test_mixed_toy_set():
    pairs = [
        pair(i=0),
        pair(i=1, src="http://x.y", tgt="link"),
        pair(i=2, src="2017", tgt="2017"),
        pair(i=3, src="एक दो तीन चार पांच छह सात", tgt="one"),
        pair(i=4, src="english words only", tgt="english words only"),
        pair(i=5),
        pair(i=6, src="।", tgt="."),
    ]
    kept, report = run_filter(pairs)
    assert kept == [pairs[0]]
    assert report == {"ok": 1, "url": 1, "numeric": 1, "ratio": 1, "script": 1,
                      "duplicate": 1, "too_short": 1, "too_long": 0}


def test_report_formats():
    _, report = run_filter([pair()])
    text = format_report(report)
    assert text.splitlines()[0].split() == ["ok", ":", "1"]
    lines = report_records(report, lang="hi").splitlines()
    assert len(lines) == len(REASONS) and '"lang": "hi"' in lines[0]


def test_estimator_form():
    f = PairFilter(max_len_ratio=2.0)
    assert f.get_params()["max_len_ratio"] == 2.0
    kept = f.fit_transform([pair(), pair(src="एक दो तीन", tgt="one")])
    assert len(kept) == 1 and f.report_["ratio"] == 1


words_hi = st.sampled_from(["यह", "एक", "वाक्य", "है", "२०१८", "http://a", "www.b", "abc", "।", "5"])
words_en = st.sampled_from(["this", "is", "a", "line", "2018", "http://c", "www.d", "कुछ", ".", "7"])
pairs_strategy = st.lists(
    st.builds(lambda s, t, i: pair(" ".join(s), " ".join(t), i=i),
              st.lists(words_hi, max_size=8), st.lists(words_en, max_size=8), st.integers(0, 3)),
    max_size=25)


@settings(max_examples=150)
@given(pairs_strategy)
def test_filter_invariants(pairs):
    kept, report = run_filter(pairs)
    assert report["ok"] == len(kept)
    assert len(kept) + sum(v for k, v in report.items() if k != "ok") == len(pairs)
    # kept pairs appear in input order
    positions = [next(i for i, p in enumerate(pairs) if p is k) for k in kept]
    assert positions == sorted(positions)
    again, report2 = run_filter(kept)
    assert again == kept
    assert report2 == {**dict.fromkeys(REASONS, 0), "ok": len(kept)}
    for p in pairs:
        d = apply_policy(p.src_text, p.tgt_text, "hi", "en")
        assert d.keep == (d.reason == "ok")
