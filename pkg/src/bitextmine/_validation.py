"""Input validation helpers shared by the estimators and pipeline stages."""

from collections.abc import Mapping

from .langs import parse_lang


def check_lang(code):
    return parse_lang(code)


def check_langs(codes, allow_empty=False):
    langs = [parse_lang(c) for c in codes]
    if not langs and not allow_empty:
        raise ValueError("at least one language is required")
    if len(set(langs)) != len(langs):
        raise ValueError(f"duplicate language codes in {codes!r}")
    return langs


def check_fraction(value, name, low=0.0, high=1.0, low_open=False):
    value = float(value)
    bad_low = value <= low if low_open else value < low
    if bad_low or value > high:
        bracket = "(" if low_open else "["
        raise ValueError(f"{name} must lie in {bracket}{low}, {high}], got {value}")
    return value


def check_count(value, name, minimum=0):
    if isinstance(value, bool) or int(value) != value:
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_texts(texts, name="texts"):
    """Materialise an iterable of strings, rejecting a bare string."""
    if isinstance(texts, str):
        raise TypeError(f"{name} must be an iterable of strings, not a single string")
    out = list(texts)
    for t in out:
        if not isinstance(t, str):
            raise TypeError(f"{name} must contain strings, got {type(t).__name__}")
    return out


def check_token_lists(token_lists, name="token_lists"):
    out = []
    for toks in token_lists:
        if isinstance(toks, str):
            raise TypeError(f"{name} must contain token lists, got a string")
        out.append(list(toks))
    return out


def check_docs(docs):
    """Validate a mapping of document id -> token list."""
    if not isinstance(docs, Mapping):
        raise TypeError("docs must be a mapping of document id to token list")
    if not docs:
        raise ValueError("docs must not be empty")
    return {k: list(v) for k, v in docs.items()}
