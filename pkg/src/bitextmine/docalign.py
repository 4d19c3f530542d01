"""Document alignment: TF-IDF nearest neighbour inside a posted-date window.

Non-English articles are translated to English sentence by sentence, and
each translation is matched to the most similar English article posted
within ``window_days`` of it. Matching is independent per source article, so
one English article may serve several sources.
"""

from __future__ import annotations

import datetime as dt
import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_count, check_docs, check_fraction, check_token_lists
from .records import DocumentPair
from .segmenter import split_sentences, word_tokenize
from .subword import SubwordModel, term_tokenizer
from .translate import TranslationError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DocAlignConfig:
    window_days: int = 2
    min_similarity: float = 0.1
    term_space: str = "subword"

    def __post_init__(self):
        check_count(self.window_days, "window_days")
        check_fraction(self.min_similarity, "min_similarity")
        if self.term_space not in ("word", "subword"):
            raise ValueError(f"term_space must be 'word' or 'subword', got {self.term_space!r}")


def idf_weight(doc_count, df):
    return math.log(doc_count / (1 + df)) + 1.0


def _unit(weights):
    norm = math.sqrt(sum(w * w for w in weights.values()))
    if norm == 0.0:
        return {}
    return {t: w / norm for t, w in weights.items()}


def dot(u, v):
    """Dot product of sparse vectors, summed in term-id order so it is exactly symmetric."""
    if len(u) > len(v):
        u, v = v, u
    common = sorted(t for t in u if t in v)
    return math.fsum(u[t] * v[t] for t in common)


class TfIdfIndex(BaseEstimator, TransformerMixin):
    """Raw term frequency times ``ln(N / (1 + df)) + 1``, L2-normalised.

    ``fit`` takes a mapping of document id to token list. Term ids follow the
    lexicographic order of terms. ``transform`` maps new token lists into the
    fitted space, ignoring unseen terms.

    Attributes
    ----------
    vocab_ : dict term -> term id
    idf_ : dict term id -> float
    vectors_ : dict document id -> {term id: weight}, unit norm or empty
    doc_count_ : int
    """

    def fit(self, X, y=None):
        docs = check_docs(X)
        df = Counter()
        for toks in docs.values():
            df.update(set(toks))
        self.vocab_ = {t: i for i, t in enumerate(sorted(df))}
        self.doc_count_ = len(docs)
        self.idf_ = {self.vocab_[t]: idf_weight(self.doc_count_, c) for t, c in df.items()}
        self.idf_ = dict(sorted(self.idf_.items()))
        self.vectors_ = {doc_id: self._vector(toks) for doc_id, toks in docs.items()}
        return self

    def _vector(self, tokens):
        tf = Counter(self.vocab_[t] for t in tokens if t in self.vocab_)
        return _unit({t: tf[t] * self.idf_[t] for t in sorted(tf)})

    def transform(self, X):
        check_is_fitted(self, "vectors_")
        return [self._vector(toks) for toks in check_token_lists(X)]

    def cosine(self, a, b):
        check_is_fitted(self, "vectors_")
        try:
            va, vb = self.vectors_[a], self.vectors_[b]
        except KeyError as exc:
            raise KeyError(f"document {exc.args[0]!r} is not indexed") from None
        return min(1.0, max(0.0, dot(va, vb)))


def build_index(docs):
    return TfIdfIndex().fit(docs)


def cosine(index, a, b):
    return index.cosine(a, b)


def translate_article(article, translator, tgt="en", stats=None):
    """Translate an article's sentences, skipping (and counting) failures.

    Returns the list of translated sentences.
    """
    out = []
    for sent in split_sentences(article.body, article.lang):
        try:
            out.append(translator.translate(sent, article.lang, tgt))
        except TranslationError as exc:
            log.warning("article %s: translation failed: %s", article.id, exc)
            if stats is not None:
                stats["translation_failures"] += 1
    return out


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def align_documents(src_articles, en_articles, translator, cfg=None, en_model=None,
                    workers=1, stats=None):
    """Pair each source article with its nearest English article inside the date window.

    The best candidate has the highest cosine; ties go to the smaller
    absolute date difference, then to the smaller English id. Candidates
    below ``cfg.min_similarity`` are never emitted. With the subword term
    space and no ``en_model``, an English model is trained on the English
    articles. Returns pairs sorted by source id.
    """
    cfg = cfg or DocAlignConfig()
    if stats is None:
        stats = Counter()
    if cfg.term_space == "subword" and en_model is None:
        en_sents = [s for art in en_articles for s in split_sentences(art.body, "en")]
        if not en_sents:
            return []
        en_model = SubwordModel(lang="en").fit(_word_joined(en_sents))
    tokenize = term_tokenizer(cfg.term_space, en_model)

    sources = list(src_articles)

    def work(article):
        local = Counter()
        return translate_article(article, translator, "en", local), local

    translations = []
    for sents, local in _map(work, sources, workers):
        translations.append(sents)
        stats.update(local)

    docs = {("en", art.id): tokenize(art.body) for art in en_articles}
    usable = []
    for art, sents in zip(sources, translations):
        if not sents:
            stats["untranslatable_articles"] += 1
            continue
        docs[("src", art.id)] = tokenize(" ".join(sents))
        usable.append(art)
    if not usable or not any(k[0] == "en" for k in docs):
        return []
    index = TfIdfIndex().fit(docs)

    window = dt.timedelta(days=cfg.window_days)
    pairs = []
    for art in usable:
        best = None
        for day, en_ids in _dates_between(en_articles.by_date, art.date - window, art.date + window):
            delta = (day - art.date).days
            for en_id in en_ids:
                sim = index.cosine(("src", art.id), ("en", en_id))
                key = (-sim, abs(delta), en_id)
                if best is None or key < best[0]:
                    best = (key, DocumentPair(art.id, en_id, sim, delta))
        if best is not None and best[1].similarity >= cfg.min_similarity:
            pairs.append(best[1])
    pairs.sort(key=lambda p: p.src_id)
    stats["doc_pairs"] += len(pairs)
    return pairs


def _word_joined(sentences):
    return [" ".join(word_tokenize(s)) for s in sentences]


def _dates_between(by_date, lo, hi):
    day = lo
    while day <= hi:
        ids = by_date.get(day)
        if ids:
            yield day, ids
        day += dt.timedelta(days=1)


@dataclass(frozen=True)
class DateAmbiguity:
    date: dt.date
    src_ids: tuple
    tgt_ids: tuple


def align_by_date(src_articles, tgt_articles):
    """Pair articles that are alone on their posted date on both sides.

    Returns ``(pairs, ambiguities)``: dates where both sides have articles but
    at least one side has several are reported rather than paired. Date-only
    pairs carry similarity 1.0.
    """
    pairs = []
    ambiguous = []
    for day, src_ids in src_articles.by_date.items():
        tgt_ids = tgt_articles.by_date.get(day, ())
        if not tgt_ids:
            continue
        if len(src_ids) == 1 and len(tgt_ids) == 1:
            pairs.append(DocumentPair(src_ids[0], tgt_ids[0], 1.0, 0))
        else:
            ambiguous.append(DateAmbiguity(day, tuple(src_ids), tuple(tgt_ids)))
    pairs.sort(key=lambda p: p.src_id)
    return pairs, ambiguous
