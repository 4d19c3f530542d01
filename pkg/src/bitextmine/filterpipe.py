"""Heuristic noise filtering of aligned sentence pairs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_count, check_fraction
from .pivot import normalize_key
from .scriptid import expected_script, sentence_profile
from .segmenter import is_punct, is_punct_token, word_tokenize

REASONS = ("ok", "ratio", "script", "url", "numeric", "too_short", "too_long", "duplicate")


@dataclass(frozen=True)
class FilterPolicy:
    min_len_ratio: float = 1 / 3
    max_len_ratio: float = 3.0
    min_script_purity: float = 0.5
    min_tokens: int = 1
    max_tokens: int = 200
    drop_url_like: bool = True
    drop_numeric_only: bool = True

    def __post_init__(self):
        if not 0 < self.min_len_ratio <= 1 <= self.max_len_ratio:
            raise ValueError("need 0 < min_len_ratio <= 1 <= max_len_ratio")
        check_fraction(self.min_script_purity, "min_script_purity")
        check_count(self.min_tokens, "min_tokens")
        check_count(self.max_tokens, "max_tokens", minimum=self.min_tokens)

    @classmethod
    def from_mapping(cls, values):
        """Build a policy from string or typed values, e.g. a config section."""
        kwargs = {}
        for f in fields(cls):
            if f.name not in values:
                continue
            raw = values[f.name]
            if f.type in ("bool", bool):
                kwargs[f.name] = raw if isinstance(raw, bool) else _parse_bool(raw)
            elif f.type in ("int", int):
                kwargs[f.name] = int(raw)
            else:
                kwargs[f.name] = float(raw)
        unknown = set(values) - {f.name for f in fields(cls)}
        if unknown:
            raise ValueError(f"unknown filter option(s): {', '.join(sorted(unknown))}")
        return cls(**kwargs)


def _parse_bool(text):
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class FilterDecision:
    keep: bool
    reason: str = "ok"


def is_url_token(token):
    return "://" in token or token.lower().startswith("www.")


def is_numeric_token(token):
    """Digits possibly joined by punctuation, as in ``64.41`` or ``17/04/2017``."""
    return any(c.isdigit() for c in token) and all(c.isdigit() or is_punct(c) for c in token)


def _content_tokens(text):
    return [t for t in word_tokenize(text) if not is_punct_token(t)]


def apply_policy(src_text, tgt_text, src_lang, tgt_lang, policy=None):
    """Decide one pair. Checks run in a fixed order and the first failure is the reason:
    length bounds, numeric-only, URL, script purity, length ratio.

    Lengths count word tokens that are not pure punctuation.
    """
    policy = policy or FilterPolicy()
    src_toks, tgt_toks = _content_tokens(src_text), _content_tokens(tgt_text)
    ns, nt = len(src_toks), len(tgt_toks)
    if ns < policy.min_tokens or nt < policy.min_tokens:
        return FilterDecision(False, "too_short")
    if ns > policy.max_tokens or nt > policy.max_tokens:
        return FilterDecision(False, "too_long")
    if policy.drop_numeric_only and (
            all(map(is_numeric_token, src_toks)) or all(map(is_numeric_token, tgt_toks))):
        return FilterDecision(False, "numeric")
    if policy.drop_url_like and (
            any(map(is_url_token, src_toks)) or any(map(is_url_token, tgt_toks))):
        return FilterDecision(False, "url")
    for text, lang in ((src_text, src_lang), (tgt_text, tgt_lang)):
        if sentence_profile(text).purity(expected_script(lang)) < policy.min_script_purity:
            return FilterDecision(False, "script")
    if nt == 0 or not policy.min_len_ratio <= ns / nt <= policy.max_len_ratio:
        return FilterDecision(False, "ratio")
    return FilterDecision(True, "ok")


def _dedup_key(pair):
    return normalize_key(pair.src_text), normalize_key(pair.tgt_text)


def run_filter(pairs, policy=None):
    """Filter ``pairs`` (objects with ``src_text``, ``tgt_text``, ``src_lang``, ``tgt_lang``).

    Exact duplicates after normalisation are removed last, keeping the first
    occurrence. Returns ``(kept, report)`` where ``report`` counts every reason;
    ``report["ok"]`` is the number kept.
    """
    policy = policy or FilterPolicy()
    report = dict.fromkeys(REASONS, 0)
    passed = []
    for p in pairs:
        d = apply_policy(p.src_text, p.tgt_text, p.src_lang, p.tgt_lang, policy)
        if d.keep:
            passed.append(p)
        else:
            report[d.reason] += 1
    kept = []
    seen = set()
    for p in passed:
        key = _dedup_key(p)
        if key in seen:
            report["duplicate"] += 1
            continue
        seen.add(key)
        kept.append(p)
    report["ok"] = len(kept)
    return kept, report


class PairFilter(BaseEstimator, TransformerMixin):
    """Transformer form of :func:`run_filter`; ``report_`` holds the last run's counts."""

    def __init__(self, min_len_ratio=1 / 3, max_len_ratio=3.0, min_script_purity=0.5,
                 min_tokens=1, max_tokens=200, drop_url_like=True, drop_numeric_only=True):
        self.min_len_ratio = min_len_ratio
        self.max_len_ratio = max_len_ratio
        self.min_script_purity = min_script_purity
        self.min_tokens = min_tokens
        self.max_tokens = max_tokens
        self.drop_url_like = drop_url_like
        self.drop_numeric_only = drop_numeric_only

    @property
    def policy(self):
        return FilterPolicy(**self.get_params())

    def fit(self, X=None, y=None):
        self.policy_ = self.policy
        return self

    def transform(self, X):
        policy = getattr(self, "policy_", None) or self.policy
        kept, self.report_ = run_filter(X, policy)
        return kept


def format_report(report):
    width = max(map(len, REASONS))
    return "\n".join(f"{r:<{width}} : {report.get(r, 0)}" for r in REASONS) + "\n"


def report_records(report, **extra):
    return "".join(json.dumps({**extra, "reason": r, "count": report.get(r, 0)},
                              ensure_ascii=False) + "\n" for r in REASONS)


def policy_dict(policy):
    return asdict(policy)
