"""Writing-script classification used as a deterministic language filter.

The code point table lives in ``data/script_ranges.tsv``; rows are applied in
file order, so a later row can carve punctuation or digits out of a block
assigned earlier.
"""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .langs import parse_lang

SCRIPTS = ("Devanagari", "Bengali", "Gurmukhi", "Gujarati", "Oriya", "Tamil",
           "Telugu", "Malayalam", "Arabic", "Latin", "Digit", "Punct", "Other")

NON_ALPHABETIC = frozenset({"Digit", "Punct"})

EXPECTED_SCRIPT = {
    "en": "Latin", "hi": "Devanagari", "mr": "Devanagari", "bn": "Bengali",
    "pa": "Gurmukhi", "gu": "Gujarati", "or": "Oriya", "ta": "Tamil",
    "te": "Telugu", "ml": "Malayalam", "ur": "Arabic",
}

TABLE_RESOURCE = "script_ranges.tsv"


def parse_table(text):
    """Parse the range table into a code point -> script map."""
    table = {}
    version = None
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.startswith("#"):
            if version is None and line.startswith("# script-ranges "):
                version = line.split()[2]
            continue
        if not line.strip():
            continue
        start, end, script = line.split("\t")
        if script not in SCRIPTS:
            raise ValueError(f"line {lineno}: unknown script {script!r}")
        lo, hi = int(start, 16), int(end, 16)
        if lo > hi:
            raise ValueError(f"line {lineno}: empty range {start}-{end}")
        for cp in range(lo, hi + 1):
            table[cp] = script
    if version is None:
        raise ValueError("script table is missing its version header")
    return table, version


@lru_cache(maxsize=1)
def _table():
    text = resources.files("bitextmine").joinpath("data", TABLE_RESOURCE).read_text("utf-8")
    return parse_table(text)


def table_version():
    return _table()[1]


def classify_char(ch):
    return _table()[0].get(ord(ch), "Other")


def _counts_as_letter(ch, script):
    if script in NON_ALPHABETIC:
        return False
    if script == "Other":
        return unicodedata.category(ch)[0] in "LM"
    return True


@dataclass(frozen=True)
class ScriptProfile:
    fractions: dict = field(default_factory=dict)
    dominant: str = "Other"
    n_letters: int = 0

    def purity(self, script):
        return self.fractions.get(script, 0.0)


def sentence_profile(text):
    """Share of each script among the alphabetic characters of ``text``.

    Digits, punctuation, whitespace and control/format characters are left
    out of the denominator. Letters and marks outside the table count as Other.
    A tie for the largest share makes the dominant script Other.
    """
    table = _table()[0]
    counts = Counter()
    for ch in text:
        script = table.get(ord(ch), "Other")
        if _counts_as_letter(ch, script):
            counts[script] += 1
    total = sum(counts.values())
    if not total:
        return ScriptProfile()
    fractions = {s: counts[s] / total for s in SCRIPTS if counts[s]}
    top = max(counts.values())
    leaders = [s for s in SCRIPTS if counts[s] == top]
    dominant = leaders[0] if len(leaders) == 1 else "Other"
    return ScriptProfile(fractions, dominant, total)


def expected_script(lang):
    return EXPECTED_SCRIPT[parse_lang(lang)]
