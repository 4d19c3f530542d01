"""BLEU: clipped n-gram precision with a brevity penalty.

Scores are on the [0, 1] scale; multiply by 100 for display.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional


@dataclass(frozen=True)
class BleuScore:
    value: float
    precisions: List[Optional[Fraction]]
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    counts: List[tuple] = ()


def ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _as_refs(refs):
    """Accept one reference token list or a list of them."""
    refs = list(refs)
    if refs and not isinstance(refs[0], str):
        return [list(r) for r in refs]
    return [refs]


def modified_precision(hyp, refs, n):
    """Return ``(matches, total)`` for order ``n``.

    Each hypothesis n-gram count is clipped at its largest count in any single
    reference. A hypothesis shorter than ``n`` gives ``(0, 0)``.
    """
    if n < 1:
        raise ValueError("n-gram order must be >= 1")
    hyp = list(hyp)
    hyp_counts = ngrams(hyp, n)
    total = sum(hyp_counts.values())
    if not total:
        return (0, 0)
    clip = Counter()
    for ref in _as_refs(refs):
        for gram, c in ngrams(ref, n).items():
            if c > clip[gram]:
                clip[gram] = c
    matches = sum(min(c, clip[g]) for g, c in hyp_counts.items())
    return (matches, total)


def closest_ref_len(hyp_len, refs):
    lens = [len(r) for r in refs]
    return min(lens, key=lambda r: (abs(r - hyp_len), r))


def brevity_penalty(hyp_len, ref_len):
    if hyp_len > ref_len:
        return 1.0
    if hyp_len == 0:
        return 0.0
    return math.exp(1.0 - ref_len / hyp_len)


def _combine(precisions, bp):
    defined = [p for p in precisions if p is not None]
    if not defined or any(p == 0 for p in defined):
        return 0.0
    log_mean = sum(math.log(p) for p in defined) / len(defined)
    return bp * math.exp(log_mean)


def corpus_bleu(pairs, max_n=4):
    """Corpus-level BLEU over ``(hypothesis, reference)`` token-list pairs.

    Match and total counts are pooled over all pairs before the per-order
    precisions are formed. Orders with no hypothesis n-grams anywhere are left
    out of the geometric mean; a zero precision makes the score zero. The
    reference side may be a token list or a list of alternative token lists.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("corpus_bleu needs at least one hypothesis/reference pair")
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = ref_len = 0
    for hyp, refs in pairs:
        hyp = list(hyp)
        refs = _as_refs(refs)
        hyp_len += len(hyp)
        ref_len += closest_ref_len(len(hyp), refs)
        for n in range(1, max_n + 1):
            m, t = modified_precision(hyp, refs, n)
            matches[n - 1] += m
            totals[n - 1] += t
    precisions = [Fraction(m, t) if t else None for m, t in zip(matches, totals)]
    bp = brevity_penalty(hyp_len, ref_len)
    return BleuScore(_combine(precisions, bp), precisions, bp, hyp_len, ref_len,
                     list(zip(matches, totals)))


def sentence_bleu(hyp, ref, max_n=2, smoothing="add-one"):
    """Sentence-level BLEU against a single reference.

    With ``smoothing="add-one"`` orders n >= 2 use ``(matches + 1) / (total + 1)``.
    Orders longer than the hypothesis are dropped. An empty hypothesis or
    reference scores 0.
    """
    hyp, ref = list(hyp), list(ref)
    if not hyp or not ref:
        return 0.0
    if smoothing not in ("add-one", None):
        raise ValueError(f"unknown smoothing {smoothing!r}")
    precisions = []
    for n in range(1, max_n + 1):
        m, t = modified_precision(hyp, [ref], n)
        if not t:
            continue
        if n >= 2 and smoothing == "add-one":
            precisions.append(Fraction(m + 1, t + 1))
        else:
            precisions.append(Fraction(m, t))
    return _combine(precisions, brevity_penalty(len(hyp), len(ref)))


def format_report(score):
    lines = [f"BLEU = {100 * score.value:.2f}"]
    for n, (p, (m, t)) in enumerate(zip(score.precisions, score.counts), 1):
        shown = "n/a" if p is None else f"{100 * float(p):.2f}"
        lines.append(f"p{n} = {shown} ({m}/{t})")
    lines.append(f"BP = {score.brevity_penalty:.4f}")
    ratio = score.hyp_len / score.ref_len if score.ref_len else float("nan")
    lines.append(f"ratio = {ratio:.4f} hyp_len = {score.hyp_len} ref_len = {score.ref_len}")
    return "\n".join(lines) + "\n"
