"""MT-assisted monotone sentence alignment inside an aligned document pair.

Source sentences are translated into the target language and compared with
target sentences by smoothed sentence BLEU. A dynamic program picks the
best non-crossing set of one-to-one anchors; the stretches between anchors
are then filled with 1-2 / 2-1 merges where a merge beats its parts, and
whatever is left over is discarded.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from ._validation import check_count, check_fraction
from .bleu import sentence_bleu
from .records import SentencePair
from .segmenter import split_sentences, word_tokenize
from .translate import TranslationError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlignConfig:
    anchor_threshold: float = 0.1
    max_merge: int = 2
    bleu_max_n: int = 2
    term_space: str = "subword"

    def __post_init__(self):
        check_fraction(self.anchor_threshold, "anchor_threshold", low_open=True)
        check_count(self.max_merge, "max_merge", minimum=1)
        check_count(self.bleu_max_n, "bleu_max_n", minimum=1)
        if self.bleu_max_n > 4:
            raise ValueError("bleu_max_n must be <= 4")
        if self.term_space not in ("word", "subword"):
            raise ValueError(f"term_space must be 'word' or 'subword', got {self.term_space!r}")


def _default_tokenizer(cfg, tokenize):
    if tokenize is not None:
        return tokenize
    if cfg.term_space == "word":
        return word_tokenize
    raise ValueError("subword term space needs tokenize=term_tokenizer('subword', model)")


class SpanScorer:
    """Sentence BLEU between translated source spans and target spans.

    A span's tokens are the concatenation of its sentences' tokens, which is
    what tokenising the space-joined span text gives for whitespace-based
    tokenisers. Spans touching an untranslatable source sentence score 0.
    """

    def __init__(self, src, tgt, translator, cfg, tokenize=None,
                 src_lang="hi", tgt_lang="en", stats=None):
        self.cfg = cfg
        tok = _default_tokenizer(cfg, tokenize)
        self.translations = []
        for sent in src:
            try:
                self.translations.append(translator.translate(sent, src_lang, tgt_lang))
            except TranslationError as exc:
                log.warning("translation failed: %s", exc)
                if stats is not None:
                    stats["translation_failures"] += 1
                self.translations.append(None)
        self.hyp = [tok(t) if t is not None else None for t in self.translations]
        self.ref = [tok(t) for t in tgt]
        self._cache = {}

    def score(self, i0, i1, j0, j1):
        key = (i0, i1, j0, j1)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        parts = self.hyp[i0:i1 + 1]
        if any(p is None for p in parts):
            value = 0.0
        else:
            hyp = [t for p in parts for t in p]
            ref = [t for r in self.ref[j0:j1 + 1] for t in r]
            value = sentence_bleu(hyp, ref, max_n=self.cfg.bleu_max_n)
        self._cache[key] = value
        return value

    def matrix(self):
        return [[self.score(i, i, j, j) for j in range(len(self.ref))]
                for i in range(len(self.hyp))]


def score_matrix(src_sentences, tgt_sentences, translator, cfg=None, tokenize=None,
                 src_lang="hi", tgt_lang="en"):
    cfg = cfg or AlignConfig()
    return SpanScorer(src_sentences, tgt_sentences, translator, cfg, tokenize,
                      src_lang, tgt_lang).matrix()


def _better(a, b):
    """Is value ``a`` strictly preferable to ``b``? Values are ``(total, n_pairs)``."""
    return a[0] > b[0] or (a[0] == b[0] and a[1] < b[1])


def anchor_align(scores, threshold=0.1):
    """Maximum-total monotone one-to-one matching over cells scoring >= ``threshold``.

    Ties prefer fewer pairs, then the lexicographically smallest pair
    sequence. Totals are accumulated as exact rationals so tie detection
    does not depend on summation order.
    """
    n = len(scores)
    m = len(scores[0]) if n else 0
    if not n or not m:
        return []
    cells = [[Fraction(s) if s >= threshold else None for s in row] for row in scores]
    zero = (Fraction(0), 0)
    # best[i][j]: optimum over src[i:], tgt[j:]; choice[i][j]: first pair column or None.
    best = [[zero] * (m + 1) for _ in range(n + 1)]
    choice = [[None] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row_best = None
        row_col = None
        for j in range(m - 1, -1, -1):
            s = cells[i][j]
            if s is not None:
                tail = best[i + 1][j + 1]
                val = (s + tail[0], tail[1] + 1)
                if row_best is None or not _better(row_best, val):
                    row_best, row_col = val, j
            skip = best[i + 1][j]
            if row_best is not None and not _better(skip, row_best):
                best[i][j], choice[i][j] = row_best, row_col
            else:
                best[i][j], choice[i][j] = skip, None
    pairs = []
    i = j = 0
    while i < n and j < m:
        col = choice[i][j]
        if col is None:
            i += 1
        else:
            pairs.append((i, col))
            i, j = i + 1, col + 1
    return pairs


def _groupings(max_merge):
    """Span shapes tried inside gaps: 1-1, then 1-k and k-1 for k up to ``max_merge``."""
    shapes = [(1, 1)]
    for k in range(2, max_merge + 1):
        shapes.extend([(1, k), (k, 1)])
    return shapes


def _merge_ok(scorer, i0, i1, j0, j1, threshold):
    s = scorer.score(i0, i1, j0, j1)
    if s < threshold:
        return None
    if i0 != i1 or j0 != j1:
        parts = max(scorer.score(i, i, j, j)
                    for i in range(i0, i1 + 1) for j in range(j0, j1 + 1))
        if not s > parts:
            return None
    return s


def _fill_gap(scorer, a, b, c, d, cfg):
    """Best set of groupings inside src[a:b] x tgt[c:d]; returns ``[(i0, i1, j0, j1, score)]``."""
    p, q = b - a, d - c
    if p <= 0 or q <= 0:
        return []
    shapes = _groupings(cfg.max_merge)
    best = [[(0.0, 0)] * (q + 1) for _ in range(p + 1)]
    move = [[None] * (q + 1) for _ in range(p + 1)]
    for x in range(p - 1, -1, -1):
        for y in range(q - 1, -1, -1):
            cand = best[x + 1][y]
            mv = ("skip_src",)
            alt = best[x][y + 1]
            if _better(alt, cand):
                cand, mv = alt, ("skip_tgt",)
            for ks, kt in shapes:
                if x + ks > p or y + kt > q:
                    continue
                s = _merge_ok(scorer, a + x, a + x + ks - 1, c + y, c + y + kt - 1,
                              cfg.anchor_threshold)
                if s is None:
                    continue
                tail = best[x + ks][y + kt]
                val = (s + tail[0], tail[1] + 1)
                if _better(val, cand) or (mv[0] != "group" and not _better(cand, val)):
                    cand, mv = val, ("group", ks, kt, s)
            best[x][y], move[x][y] = cand, mv
    out = []
    x = y = 0
    while x < p and y < q:
        mv = move[x][y]
        if mv[0] == "skip_src":
            x += 1
        elif mv[0] == "skip_tgt":
            y += 1
        else:
            _, ks, kt, s = mv
            out.append((a + x, a + x + ks - 1, c + y, c + y + kt - 1, s))
            x, y = x + ks, y + kt
    return out


def _extensions(i, j, max_merge):
    """Candidate spans growing anchor ``(i, j)`` on one side only, nearest first."""
    out = []
    for size in range(2, max_merge + 1):
        for left in range(size - 1, -1, -1):
            right = size - 1 - left
            out.append(("src", i - left, i + right, j, j))
        for left in range(size - 1, -1, -1):
            right = size - 1 - left
            out.append(("tgt", i, i, j - left, j + right))
    return out


def gap_fill(anchors, src, tgt, translator=None, cfg=None, tokenize=None, scorer=None,
             src_lang="hi", tgt_lang="en", provenance=("", "")):
    """Turn anchors into sentence pairs, filling the gaps between them.

    Inside each gap the best-scoring set of 1-1 / 1-k / k-1 groupings is
    kept, a merged grouping counting only if it meets the threshold and
    beats every 1-1 cell it contains. Each anchor may then absorb adjacent
    leftover sentences on one side under the same rule. Anything still
    unaligned is dropped.
    """
    cfg = cfg or AlignConfig()
    if scorer is None:
        scorer = SpanScorer(src, tgt, translator, cfg, tokenize, src_lang, tgt_lang)
    n, m = len(src), len(tgt)
    spans = []
    prev_i = prev_j = -1
    for i, j in list(anchors) + [(n, m)]:
        spans.extend(_fill_gap(scorer, prev_i + 1, i, prev_j + 1, j, cfg))
        if i < n:
            spans.append((i, i, j, j, scorer.score(i, i, j, j)))
        prev_i, prev_j = i, j
    spans.sort()

    anchor_set = set(anchors)
    src_used = {k for s in spans for k in range(s[0], s[1] + 1)}
    tgt_used = {k for s in spans for k in range(s[2], s[3] + 1)}
    result = []
    for span in spans:
        i0, i1, j0, j1, score = span
        if (i0, j0) in anchor_set and i0 == i1 and j0 == j1 and cfg.max_merge > 1:
            span = _extend_anchor(scorer, i0, j0, score, n, m, src_used, tgt_used, cfg)
        result.append(span)

    return [SentencePair((i0, i1), (j0, j1), score, src_lang, tgt_lang,
                         provenance[0], provenance[1],
                         " ".join(src[i0:i1 + 1]), " ".join(tgt[j0:j1 + 1]))
            for i0, i1, j0, j1, score in result]


def _extend_anchor(scorer, i, j, score, n, m, src_used, tgt_used, cfg):
    best = (i, i, j, j, score)
    for side, i0, i1, j0, j1 in _extensions(i, j, cfg.max_merge):
        if i0 < 0 or j0 < 0 or i1 >= n or j1 >= m:
            continue
        if side == "src" and any(k in src_used for k in range(i0, i1 + 1) if k != i):
            continue
        if side == "tgt" and any(k in tgt_used for k in range(j0, j1 + 1) if k != j):
            continue
        s = _merge_ok(scorer, i0, i1, j0, j1, cfg.anchor_threshold)
        if s is not None and s > best[4]:
            best = (i0, i1, j0, j1, s)
    i0, i1, j0, j1, _ = best
    src_used.update(range(i0, i1 + 1))
    tgt_used.update(range(j0, j1 + 1))
    return best


def align_sentences(src, tgt, translator, cfg=None, tokenize=None, src_lang="hi",
                    tgt_lang="en", provenance=("", ""), stats=None):
    """score matrix -> anchors -> gap filling for two sentence lists."""
    cfg = cfg or AlignConfig()
    if not src or not tgt:
        return []
    scorer = SpanScorer(src, tgt, translator, cfg, tokenize, src_lang, tgt_lang, stats)
    anchors = anchor_align(scorer.matrix(), cfg.anchor_threshold)
    return gap_fill(anchors, src, tgt, cfg=cfg, scorer=scorer, src_lang=src_lang,
                    tgt_lang=tgt_lang, provenance=provenance)


def align_sentence_level(doc_pair, src_articles, tgt_articles, translator, cfg=None,
                         tokenize=None, stats=None):
    """Align the sentences of one document pair, looking articles up by id."""
    src_art = src_articles[doc_pair.src_id]
    tgt_art = tgt_articles[doc_pair.tgt_id]
    src = split_sentences(src_art.body, src_art.lang)
    tgt = split_sentences(tgt_art.body, tgt_art.lang)
    return align_sentences(src, tgt, translator, cfg, tokenize, src_art.lang, tgt_art.lang,
                           (src_art.id, tgt_art.id), stats)
