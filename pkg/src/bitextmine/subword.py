"""Per-language byte-pair-merge subword vocabularies.

Words are whitespace-delimited. Each word is spelled as its characters
followed by the reserved end-of-word symbol ``EOW``; merges then fuse
adjacent symbols, so word-final pieces carry the marker. Occurrences of the
marker (and of the escape character) in user text are escaped before
training and encoding and restored on decoding.
"""

from __future__ import annotations

import heapq
from collections import Counter, defaultdict
from pathlib import Path

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_count, check_lang, check_texts

EOW = "▁"
ESC = "\\"
_ESCAPED_EOW = ESC + "_"

MODEL_MAGIC = "subword"
MODEL_VERSION = "v1"


def _escape(word):
    return word.replace(ESC, ESC + ESC).replace(EOW, _ESCAPED_EOW)


def _unescape(word):
    out = []
    i = 0
    while i < len(word):
        ch = word[i]
        if ch == ESC and i + 1 < len(word):
            nxt = word[i + 1]
            out.append(EOW if nxt == "_" else nxt)
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _spell(word):
    return tuple(_escape(word)) + (EOW,)


def _merge_word(symbols, pair, merged):
    out = []
    i = 0
    n = len(symbols)
    while i < n:
        if i + 1 < n and symbols[i] == pair[0] and symbols[i + 1] == pair[1]:
            out.append(merged)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


def _pairs(symbols):
    return zip(symbols, symbols[1:])


class SubwordModel(BaseEstimator, TransformerMixin):
    """Greedy pair-merge subword model for one language.

    ``target_vocab`` bounds the total symbol inventory: base symbols (every
    training character plus ``EOW``) and one new symbol per merge. Merges are
    learned most-frequent-first; equal counts go to the lexicographically
    smallest ``(left, right)`` pair. Pairs seen fewer than ``min_frequency``
    times are never merged.

    Parameters
    ----------
    lang : str
    target_vocab : int, default 4000
    min_frequency : int, default 2

    Attributes
    ----------
    merges_ : list of (str, str)
    vocab_ : dict mapping symbol -> integer id
    """

    def __init__(self, lang="en", target_vocab=4000, min_frequency=2):
        self.lang = lang
        self.target_vocab = target_vocab
        self.min_frequency = min_frequency

    def fit(self, X, y=None):
        sentences = check_texts(X, "sentences")
        lang = check_lang(self.lang)
        target = check_count(self.target_vocab, "target_vocab", minimum=1)
        min_freq = check_count(self.min_frequency, "min_frequency", minimum=1)
        if not sentences:
            raise ValueError("cannot train a subword model on an empty corpus")

        word_freq = Counter(w for s in sentences for w in s.split())
        chars = sorted({c for w in word_freq for c in _escape(w)})
        if target < len(chars):
            raise ValueError(
                f"target_vocab={target} is smaller than the character inventory ({len(chars)})")
        base = sorted(set(chars) | {EOW})
        n_merges = max(0, target - len(base))

        self.lang_ = lang
        self.merges_ = self._learn(word_freq, n_merges, min_freq)
        self._set_vocab(base)
        return self

    @staticmethod
    def _learn(word_freq, n_merges, min_freq):
        words = [_spell(w) for w in sorted(word_freq)]
        freqs = [word_freq[w] for w in sorted(word_freq)]
        counts = defaultdict(int)
        where = defaultdict(set)
        for idx, sym in enumerate(words):
            for p in _pairs(sym):
                counts[p] += freqs[idx]
                where[p].add(idx)
        heap = [(-c, p) for p, c in counts.items()]
        heapq.heapify(heap)
        merges = []
        while len(merges) < n_merges and heap:
            negc, pair = heapq.heappop(heap)
            if counts.get(pair, 0) != -negc:
                continue  # stale entry
            if -negc < min_freq:
                break
            merged = pair[0] + pair[1]
            merges.append(pair)
            touched = set()
            for idx in sorted(where.pop(pair, ())):
                old = words[idx]
                new = _merge_word(old, pair, merged)
                if new == old:
                    continue
                f = freqs[idx]
                for p in _pairs(old):
                    counts[p] -= f
                    touched.add(p)
                for p in _pairs(new):
                    counts[p] += f
                    where[p].add(idx)
                    touched.add(p)
                words[idx] = new
            counts.pop(pair, None)
            for p in touched:
                c = counts.get(p, 0)
                if c <= 0:
                    counts.pop(p, None)
                    where.pop(p, None)
                elif p != pair:
                    heapq.heappush(heap, (-c, p))
        return merges

    def _set_vocab(self, base):
        vocab = {s: i for i, s in enumerate(base)}
        for left, right in self.merges_:
            vocab.setdefault(left + right, len(vocab))
        self.vocab_ = vocab
        self._ranks = {p: r for r, p in enumerate(self.merges_)}
        self._cache = {}

    def _encode_word(self, word):
        hit = self._cache.get(word)
        if hit is not None:
            return hit
        symbols = _spell(word)
        ranks = self._ranks
        while len(symbols) > 1:
            best = min(_pairs(symbols), key=lambda p: ranks.get(p, float("inf")))
            if best not in ranks:
                break
            symbols = _merge_word(symbols, best, best[0] + best[1])
        if len(self._cache) < 100_000:
            self._cache[word] = symbols
        return symbols

    def encode(self, text):
        """Subword symbols for ``text``; unseen characters fall back to single-character symbols."""
        check_is_fitted(self, "merges_")
        out = []
        for w in text.split():
            out.extend(self._encode_word(w))
        return out

    def decode(self, symbols):
        words = []
        current = []
        for sym in symbols:
            for ch in sym:
                if ch == EOW:
                    if current:
                        words.append(_unescape("".join(current)))
                    current = []
                else:
                    current.append(ch)
        if current:
            words.append(_unescape("".join(current)))
        return " ".join(words)

    def transform(self, X):
        return [self.encode(t) for t in check_texts(X)]

    def inverse_transform(self, X):
        return [self.decode(s) for s in X]

    # persistence

    def dumps(self):
        check_is_fitted(self, "merges_")
        lines = [f"{MODEL_MAGIC} {MODEL_VERSION} {self.lang_} {self.target_vocab}"]
        lines.extend(f"{a} {b}" for a, b in self.merges_)
        return "\n".join(lines) + "\n"

    def save(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps(), encoding="utf-8", newline="\n")
        return path

    @classmethod
    def loads(cls, text):
        lines = text.split("\n")
        head = lines[0].split(" ")
        if len(head) != 4 or head[0] != MODEL_MAGIC or head[1] != MODEL_VERSION:
            raise ValueError(f"not a {MODEL_MAGIC} {MODEL_VERSION} model file")
        model = cls(lang=check_lang(head[2]), target_vocab=int(head[3]))
        merges = []
        for lineno, line in enumerate(lines[1:], 2):
            if not line:
                continue
            parts = line.split(" ")
            if len(parts) != 2 or not all(parts):
                raise ValueError(f"line {lineno}: malformed merge {line!r}")
            merges.append((parts[0], parts[1]))
        model.lang_ = model.lang
        model.merges_ = merges
        # Only characters reachable through merges are recoverable from the file.
        base = {EOW}
        for a, b in merges:
            base.update(c for c in a + b if c != EOW)
        model._set_vocab(sorted(base))
        return model

    @classmethod
    def load(cls, path):
        return cls.loads(Path(path).read_text(encoding="utf-8"))


def train_subword(sentences, target_vocab=4000, lang="en", min_frequency=2):
    return SubwordModel(lang=lang, target_vocab=target_vocab,
                        min_frequency=min_frequency).fit(sentences)


def encode(model, text):
    return model.encode(text)


def decode(model, symbols):
    return model.decode(symbols)


def term_tokenizer(term_space, model=None):
    """Return a text -> tokens callable for ``"word"`` or ``"subword"`` term spaces.

    Subword terms are the model's encoding of the word-tokenised text.
    """
    from .segmenter import word_tokenize

    if term_space == "word":
        return word_tokenize
    if term_space == "subword":
        if model is None:
            raise ValueError("subword term space needs a trained SubwordModel")
        return lambda text: model.encode(" ".join(word_tokenize(text)))
    raise ValueError(f"unknown term space {term_space!r}")
