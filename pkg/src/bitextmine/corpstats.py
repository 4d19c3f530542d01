"""Vocabulary and OOV statistics, corpus reports, audit sampling and gold scoring."""

from __future__ import annotations

import json
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .langs import parse_lang
from .segmenter import is_punct_token, word_tokenize


@dataclass
class Vocabulary:
    lang: str
    types: Counter = field(default_factory=Counter)

    @property
    def token_total(self):
        return sum(self.types.values())

    def __len__(self):
        return len(self.types)


def build_vocab(sentences, lang):
    """Word types (NFC-normalised, punctuation-only tokens excluded) with counts."""
    types = Counter()
    for s in sentences:
        for tok in word_tokenize(s):
            if not is_punct_token(tok):
                types[unicodedata.normalize("NFC", tok)] += 1
    return Vocabulary(parse_lang(lang), types)


def oov_rate(train, test):
    """Percentage of test word types missing from the train vocabulary."""
    if not test.types:
        raise ValueError("test vocabulary is empty")
    missing = sum(1 for t in test.types if t not in train.types)
    return 100.0 * missing / len(test.types)


# Audit sampling uses SplitMix64 so a sample can be reproduced from the seed
# by any implementation of the same generator.
_MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & _MASK64

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound):
        """Uniform integer in ``[0, bound)`` by rejection of the biased tail."""
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            r = self.next()
            if r < limit:
                return r % bound


def shuffle_prefix(items, n, seed):
    """First ``n`` items of a Fisher-Yates shuffle run front to back.

    Step ``k`` swaps position ``k`` with ``k + below(len - k)``.
    """
    items = list(items)
    if n > len(items):
        raise ValueError(f"cannot sample {n} of {len(items)} items")
    rng = SplitMix64(seed)
    for k in range(n):
        j = k + rng.below(len(items) - k)
        items[k], items[j] = items[j], items[k]
    return items[:n]


def _canonical(pair):
    # content first, so a sample can be redrawn from the released pair files,
    # which carry no article ids
    if hasattr(pair, "sort_key"):
        return (pair.src_lang, pair.tgt_lang, pair.src_text, pair.tgt_text, pair.sort_key())
    return ("", "", *pair)


def audit_sample(pairs, n=100, seed=0):
    """Reproducible sample of ``n`` pairs for manual review.

    Pairs are first sorted by language pair, source text and target text, so
    the sample depends only on the pair contents, the seed and ``n``.
    """
    return shuffle_prefix(sorted(pairs, key=_canonical), n, seed)


def audit_tsv(sample):
    """``index<TAB>src<TAB>tgt<TAB>verdict`` with a blank verdict column, 1-based index."""
    from .store import escape_field

    lines = []
    for i, p in enumerate(sample, 1):
        src, tgt = (p.src_text, p.tgt_text) if hasattr(p, "src_text") else p
        lines.append(f"{i}\t{escape_field(src)}\t{escape_field(tgt)}\t")
    return "".join(line + "\n" for line in lines)


def _identity(pair):
    return pair.identity() if hasattr(pair, "identity") else tuple(pair)


def score_against_gold(predicted, gold):
    """Precision, recall and F1 of predicted pairs against gold pairs.

    Pairs are compared by ``(src article, src span, tgt article, tgt span)``;
    items may be :class:`~bitextmine.records.SentencePair` or such tuples.
    """
    pred = {_identity(p) for p in predicted}
    ref = {_identity(p) for p in gold}
    hit = len(pred & ref)
    precision = hit / len(pred) if pred else 0.0
    recall = hit / len(ref) if ref else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "f1": f1}


@dataclass
class LangStats:
    articles: int = 0
    sentences: int = 0
    aligned_to_en: Optional[int] = None
    filtered: Optional[int] = None
    vocab_size: int = 0
    oov_rate: Optional[float] = None

    def check(self, lang):
        if self.aligned_to_en is None:
            return
        if not (self.filtered or 0) <= self.aligned_to_en <= self.sentences:
            raise ValueError(
                f"{lang}: expected filtered <= aligned_to_en <= sentences, got "
                f"{self.filtered} / {self.aligned_to_en} / {self.sentences}")


class CorpusReport:
    ROWS = ("articles", "sentences", "aligned_to_en", "filtered", "vocab_size", "oov_rate")
    LABELS = {"articles": "Articles", "sentences": "Sentences", "aligned_to_en": "Aligned-en",
              "filtered": "Filtered", "vocab_size": "Vocabulary", "oov_rate": "OOV rate"}

    def __init__(self):
        self.langs = {}

    def add(self, lang, stats):
        lang = parse_lang(lang)
        stats.check(lang)
        self.langs[lang] = stats

    def _cell(self, row, value):
        if value is None:
            return "-"
        if row == "oov_rate":
            return f"{value:.1f}%"
        return str(value)

    def to_text(self):
        langs = list(self.langs)
        table = [[""] + langs]
        for row in self.ROWS:
            table.append([self.LABELS[row]] +
                         [self._cell(row, getattr(self.langs[la], row)) for la in langs])
        widths = [max(len(r[c]) for r in table) for c in range(len(table[0]))]
        lines = []
        for r in table:
            cells = [r[0].ljust(widths[0])] + [v.rjust(w) for v, w in zip(r[1:], widths[1:])]
            lines.append("  ".join(cells).rstrip())
        return "\n".join(lines) + "\n"

    def to_jsonl(self):
        return "".join(json.dumps({"lang": la, **vars(s)}) + "\n" for la, s in self.langs.items())
