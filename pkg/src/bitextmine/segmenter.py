"""Rule-based sentence splitting and word tokenisation."""

import re
import unicodedata

from .langs import parse_lang
from .records import SentenceRecord

DANDA = "।"
DOUBLE_DANDA = "॥"
URDU_FULL_STOP = "۔"

_INDIC = frozenset(DANDA + DOUBLE_DANDA + ".?!")
_LATIN_LIKE = frozenset(".?!…")

TERMINATORS = {
    "hi": _INDIC, "mr": _INDIC, "bn": _INDIC, "gu": _INDIC, "or": _INDIC, "pa": _INDIC,
    "ur": frozenset(URDU_FULL_STOP + "?!"),
    "en": _LATIN_LIKE, "ta": _LATIN_LIKE, "te": _LATIN_LIKE, "ml": _LATIN_LIKE,
}

_WS = re.compile(r"\s+")


def split_sentences(text, lang):
    """Split ``text`` after runs of the language's sentence terminators.

    Line breaks are hard boundaries as well. Terminators stay attached to the
    sentence they close; whitespace inside a sentence is collapsed to single
    spaces and empty segments are dropped. There is no abbreviation handling,
    so ``"Rs. 64.41"`` splits after both full stops.
    """
    terms = TERMINATORS[parse_lang(lang)]
    out = []
    for line in text.splitlines():
        start = 0
        n = len(line)
        i = 0
        while i < n:
            if line[i] in terms:
                while i + 1 < n and line[i + 1] in terms:
                    i += 1
                _emit(out, line[start:i + 1])
                start = i + 1
            i += 1
        _emit(out, line[start:])
    return out


def _emit(out, segment):
    seg = _WS.sub(" ", segment).strip()
    if seg:
        out.append(seg)


def is_punct(ch):
    return unicodedata.category(ch).startswith("P")


def is_punct_token(token):
    return bool(token) and all(is_punct(c) for c in token)


def word_tokenize(text):
    """Whitespace-split ``text`` and peel punctuation off both ends of each chunk.

    Every detached punctuation character becomes its own token; punctuation
    inside a chunk (``"Rs.3,18,931.22"``) is left alone, so digit runs stay
    contiguous.
    """
    tokens = []
    for chunk in text.split():
        lo, hi = 0, len(chunk)
        while lo < hi and is_punct(chunk[lo]):
            lo += 1
        while hi > lo and is_punct(chunk[hi - 1]):
            hi -= 1
        tokens.extend(chunk[:lo])
        if lo < hi:
            tokens.append(chunk[lo:hi])
        tokens.extend(chunk[hi:])
    return tokens


def segment_article(article):
    return [SentenceRecord(article.id, i, s)
            for i, s in enumerate(split_sentences(article.body, article.lang))]


def segment_collection(collection):
    """Sentence records for every article, in collection (id) order."""
    return {art.id: segment_article(art) for art in collection}
