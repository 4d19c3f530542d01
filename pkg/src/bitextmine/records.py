"""Plain data records passed between pipeline stages."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Optional, Tuple

Span = Tuple[int, int]


@dataclass(frozen=True)
class Article:
    id: str
    lang: str
    date: dt.date
    body: str
    title: Optional[str] = None


@dataclass(frozen=True)
class SentenceRecord:
    article_id: str
    index: int
    text: str


@dataclass(frozen=True)
class DocumentPair:
    src_id: str
    tgt_id: str
    similarity: float
    date_delta_days: int


@dataclass(frozen=True)
class SentencePair:
    """An aligned pair of sentence spans.

    Spans are inclusive ``(first, last)`` sentence indices within the source
    and target articles. ``src_text``/``tgt_text`` hold the resolved text
    (constituent sentences joined by a single space) once known.
    """

    src_span: Optional[Span]
    tgt_span: Optional[Span]
    score: float
    src_lang: str
    tgt_lang: str
    src_article: str
    tgt_article: str
    src_text: str = ""
    tgt_text: str = ""

    def sort_key(self):
        start = self.src_span[0] if self.src_span is not None else -1
        return (self.src_article, start, self.tgt_article,
                self.tgt_span[0] if self.tgt_span is not None else -1)

    def identity(self):
        """The key used when scoring against a gold alignment."""
        return (self.src_article, self.src_span, self.tgt_article, self.tgt_span)


@dataclass(frozen=True)
class MultiRecord:
    en_key: str
    translations: dict = field(default_factory=dict)
