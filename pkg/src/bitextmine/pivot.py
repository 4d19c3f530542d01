"""Join xx-en pair sets on their English side into a multilingual grid."""

from __future__ import annotations

import unicodedata
from collections import Counter
from itertools import combinations

from .langs import LANGS, PIVOT, parse_lang
from .records import MultiRecord


def normalize_key(text):
    """NFC, trimmed, internal whitespace runs collapsed. Case is kept."""
    return " ".join(unicodedata.normalize("NFC", text).split())


def compile_pivot(pairs_by_lang, on_collision="keep-first"):
    """Group ``{lang: [(en_text, xx_text), ...]}`` into records keyed by English.

    Pairs are sorted per language before joining, so input order does not
    matter; "first" means first in that canonical order. An English key with
    several distinct translations in one language is a collision: either the
    first translation is kept (``"keep-first"``) or that language is dropped
    for the key (``"drop"``).

    Returns ``(records, collisions)`` with records sorted by key and
    ``collisions`` counting affected keys per language.
    """
    if on_collision not in ("keep-first", "drop"):
        raise ValueError(f"unknown collision policy {on_collision!r}")
    table = {}
    collisions = Counter()
    for lang in sorted(pairs_by_lang):
        code = parse_lang(lang)
        if code == PIVOT:
            raise ValueError("the pivot language cannot be a translation side")
        canon = sorted((normalize_key(en), xx) for en, xx in pairs_by_lang[lang])
        chosen = {}
        clashing = set()
        for key, xx in canon:
            if not key:
                continue
            if key not in chosen:
                chosen[key] = xx
            elif chosen[key] != xx:
                clashing.add(key)
        collisions[code] = len(clashing)
        for key, xx in chosen.items():
            if key in clashing and on_collision == "drop":
                continue
            table.setdefault(key, {})[code] = xx
    records = [MultiRecord(k, dict(sorted(table[k].items()))) for k in sorted(table)]
    return records, collisions


def extract_bitext(records, a, b):
    """``(a_text, b_text)`` for every record holding both languages; English reads the key."""
    a, b = parse_lang(a), parse_lang(b)
    if a == b:
        raise ValueError("extract_bitext needs two different languages")
    out = []
    for rec in records:
        ta = rec.en_key if a == PIVOT else rec.translations.get(a)
        tb = rec.en_key if b == PIVOT else rec.translations.get(b)
        if ta is not None and tb is not None:
            out.append((ta, tb))
    return out


class GridCounts:
    """Symmetric pair counts over languages; the diagonal is undefined."""

    def __init__(self, counts=None, langs=LANGS):
        self.langs = tuple(langs)
        self.counts = dict(counts or {})

    def __getitem__(self, pair):
        a, b = pair
        if a == b:
            raise KeyError("the diagonal of the grid is undefined")
        return self.counts.get((a, b), 0)

    def to_tsv(self):
        rows = ["\t".join(("",) + self.langs)]
        for a in self.langs:
            cells = ["-" if a == b else str(self[a, b]) for b in self.langs]
            rows.append("\t".join([a] + cells))
        return "\n".join(rows) + "\n"


def grid_counts(records, langs=LANGS):
    counts = Counter()
    for rec in records:
        present = sorted({PIVOT, *rec.translations})
        for a, b in combinations(present, 2):
            counts[a, b] += 1
            counts[b, a] += 1
    return GridCounts(counts, langs)
