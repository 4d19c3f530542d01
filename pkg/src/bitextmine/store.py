"""Article ingestion and on-disk formats for corpus artifacts.

Articles are stored as JSON lines::

    {"id": "...", "lang": "hi", "date": "2018-05-04", "title": "...", "body": "..."}

Aligned sentence pairs are written as five-column TSV
(``src_text, tgt_text, score, src_article_id, tgt_article_id``) with TAB, LF,
CR and backslash inside text escaped as ``\\t``, ``\\n``, ``\\r`` and ``\\\\``.
"""

from __future__ import annotations

import datetime as dt
import json
import logging
import re
from collections import defaultdict
from html.parser import HTMLParser
from pathlib import Path

from .langs import UnknownLanguageError, parse_lang
from .records import Article, DocumentPair, SentencePair, SentenceRecord

log = logging.getLogger(__name__)

# Tags whose boundaries become line breaks in extracted text.
BLOCK_TAGS = frozenset({
    "address", "article", "aside", "blockquote", "br", "dd", "div", "dl", "dt",
    "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3",
    "h4", "h5", "h6", "header", "hr", "li", "main", "nav", "ol", "p", "pre",
    "section", "table", "td", "th", "tr", "ul", "title", "body", "html",
})
SKIP_TAGS = frozenset({"script", "style", "noscript", "template"})


class CorpusFormatError(ValueError):
    """A malformed input record; ``lineno`` is 1-based when known."""

    def __init__(self, message, path=None, lineno=None):
        where = ""
        if path is not None:
            where = f"{path}:"
            if lineno is not None:
                where += f"{lineno}:"
            where += " "
        super().__init__(f"{where}{message}")
        self.path = path
        self.lineno = lineno


class _TextExtractor(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.parts = []
        self._skip = 0

    def handle_starttag(self, tag, attrs):
        if tag in SKIP_TAGS:
            self._skip += 1
        elif tag in BLOCK_TAGS:
            self.parts.append("\n")

    def handle_startendtag(self, tag, attrs):
        if tag in BLOCK_TAGS:
            self.parts.append("\n")

    def handle_endtag(self, tag):
        if tag in SKIP_TAGS:
            self._skip = max(0, self._skip - 1)
        elif tag in BLOCK_TAGS:
            self.parts.append("\n")

    def handle_data(self, data):
        if not self._skip:
            self.parts.append(data)


_INLINE_WS = re.compile(r"[^\S\n]+")


def _tidy_lines(text):
    lines = (_INLINE_WS.sub(" ", line).strip() for line in text.split("\n"))
    return "\n".join(line for line in lines if line)


def extract_text(raw, is_html=True):
    """Return the plain text of ``raw``.

    For HTML, tags are dropped, character references decoded and block-level
    boundaries turned into newlines; blank lines are removed and runs of
    inline whitespace collapsed. Plain text only has its line endings
    normalised to LF.
    """
    text = raw.replace("\r\n", "\n").replace("\r", "\n")
    if not is_html:
        return text
    parser = _TextExtractor()
    parser.feed(text)
    parser.close()
    return _tidy_lines("".join(parser.parts))


class ArticleCollection:
    """An immutable, id-sorted set of articles with language and date indices."""

    def __init__(self, articles=()):
        by_id = {}
        for art in articles:
            if art.id in by_id:
                raise ValueError(f"duplicate article id: {art.id!r}")
            by_id[art.id] = art
        self._articles = tuple(by_id[k] for k in sorted(by_id))
        self._by_id = by_id
        by_lang = defaultdict(list)
        by_date = defaultdict(list)
        for art in self._articles:
            by_lang[art.lang].append(art.id)
            by_date[art.date].append(art.id)
        self.by_lang = {k: tuple(v) for k, v in sorted(by_lang.items())}
        self.by_date = {k: tuple(v) for k, v in sorted(by_date.items())}
        self.skipped = 0

    @property
    def articles(self):
        return self._articles

    def __iter__(self):
        return iter(self._articles)

    def __len__(self):
        return len(self._articles)

    def __contains__(self, article_id):
        return article_id in self._by_id

    def __getitem__(self, article_id):
        return self._by_id[article_id]

    def __eq__(self, other):
        if not isinstance(other, ArticleCollection):
            return NotImplemented
        return self._articles == other._articles

    def __repr__(self):
        return f"ArticleCollection(n={len(self)}, langs={list(self.by_lang)})"

    def for_lang(self, lang):
        return ArticleCollection(self._by_id[i] for i in self.by_lang.get(lang, ()))


def _parse_date(value):
    if not isinstance(value, str) or not re.fullmatch(r"\d{4}-\d{2}-\d{2}", value):
        raise ValueError(f"unparseable date: {value!r}")
    try:
        return dt.date.fromisoformat(value)
    except ValueError:
        raise ValueError(f"unparseable date: {value!r}") from None


def _parse_record(obj, html, allow_empty_body):
    if not isinstance(obj, dict):
        raise ValueError("record is not a JSON object")
    missing = [k for k in ("id", "lang", "date", "body") if k not in obj]
    if missing:
        raise ValueError(f"missing field(s): {', '.join(missing)}")
    art_id = obj["id"]
    if isinstance(art_id, int) and not isinstance(art_id, bool):
        art_id = str(art_id)
    if not isinstance(art_id, str) or not art_id.strip():
        raise ValueError("article id must be a nonempty string")
    lang = parse_lang(obj["lang"])
    date = _parse_date(obj["date"])
    body = obj["body"]
    title = obj.get("title")
    if not isinstance(body, str):
        raise ValueError("body must be a string")
    if title is not None and not isinstance(title, str):
        raise ValueError("title must be a string or null")
    if html:
        body = extract_text(body, is_html=True)
    if not body.strip() and not (allow_empty_body or obj.get("empty_ok")):
        raise ValueError(f"article {art_id!r} has an empty body")
    return Article(id=art_id, lang=lang, date=date, body=body, title=title)


def load_articles(path, lenient=False, html=False, allow_empty_body=False):
    """Read an article JSONL file into an :class:`ArticleCollection`.

    Any malformed record is a :class:`CorpusFormatError` naming the line. With
    ``lenient=True`` bad records are skipped and counted in
    ``collection.skipped`` instead.
    """
    path = Path(path)
    articles = []
    seen = set()
    skipped = 0
    with path.open(encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValueError(f"malformed JSON: {exc.msg}") from None
                art = _parse_record(obj, html, allow_empty_body)
                if art.id in seen:
                    raise ValueError(f"duplicate article id: {art.id!r}")
            except (ValueError, UnknownLanguageError) as exc:
                if not lenient:
                    raise CorpusFormatError(str(exc), path, lineno) from None
                log.warning("%s:%d: skipped: %s", path, lineno, exc)
                skipped += 1
                continue
            seen.add(art.id)
            articles.append(art)
    coll = ArticleCollection(articles)
    coll.skipped = skipped
    return coll


def write_articles(articles, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for art in sorted(articles, key=lambda a: a.id):
            rec = {"id": art.id, "lang": art.lang, "date": art.date.isoformat(),
                   "title": art.title, "body": art.body}
            if not art.body.strip():
                rec["empty_ok"] = True
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
            n += 1
    return n


_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def escape_field(text):
    return "".join(_ESCAPES.get(ch, ch) for ch in text)


def unescape_field(text):
    if "\\" not in text:
        return text
    out = []
    chars = iter(text)
    for ch in chars:
        if ch == "\\":
            nxt = next(chars, "")
            out.append(_UNESCAPES.get(nxt, "\\" + nxt))
        else:
            out.append(ch)
    return "".join(out)


def format_score(score):
    return f"{score:.6f}"


def write_pairs(pairs, path):
    """Write resolved sentence pairs as TSV sorted by source article and span start.

    Returns the number of lines written.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = sorted(pairs, key=lambda p: p.sort_key())
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for p in rows:
            fh.write("\t".join((escape_field(p.src_text), escape_field(p.tgt_text),
                                format_score(p.score), escape_field(p.src_article),
                                escape_field(p.tgt_article))) + "\n")
    return len(rows)


def read_pairs(path, src_lang, tgt_lang):
    """Read a pair TSV back; spans are not stored in this format and come back as ``None``."""
    src_lang, tgt_lang = parse_lang(src_lang), parse_lang(tgt_lang)
    out = []
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 5:
                raise CorpusFormatError(f"expected 5 columns, got {len(cols)}", path, lineno)
            try:
                score = float(cols[2])
            except ValueError:
                raise CorpusFormatError(f"bad score {cols[2]!r}", path, lineno) from None
            out.append(SentencePair(None, None, score, src_lang, tgt_lang,
                                    unescape_field(cols[3]), unescape_field(cols[4]),
                                    unescape_field(cols[0]), unescape_field(cols[1])))
    return out


def write_alignments(pairs, path):
    """Write pairs with spans as JSON lines (the lossless companion to the TSV)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = sorted(pairs, key=lambda p: p.sort_key())
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for p in rows:
            rec = {"src_article": p.src_article, "tgt_article": p.tgt_article,
                   "src_lang": p.src_lang, "tgt_lang": p.tgt_lang,
                   "src_span": list(p.src_span) if p.src_span else None,
                   "tgt_span": list(p.tgt_span) if p.tgt_span else None,
                   "score": round(p.score, 12), "src_text": p.src_text, "tgt_text": p.tgt_text}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    return len(rows)


def read_alignments(path):
    out = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            r = json.loads(line)
            out.append(SentencePair(
                tuple(r["src_span"]) if r["src_span"] else None,
                tuple(r["tgt_span"]) if r["tgt_span"] else None,
                r["score"], r["src_lang"], r["tgt_lang"], r["src_article"],
                r["tgt_article"], r["src_text"], r["tgt_text"]))
    return out


def _one_line(text):
    return " ".join(text.split("\n"))


def write_bitext(pairs, directory, a, b):
    """Write line-aligned ``train.<a>`` / ``train.<b>`` files from ``(a_text, b_text)`` pairs."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    pa, pb = directory / f"train.{a}", directory / f"train.{b}"
    with pa.open("w", encoding="utf-8", newline="\n") as fa, \
            pb.open("w", encoding="utf-8", newline="\n") as fb:
        for x, y in pairs:
            fa.write(_one_line(x) + "\n")
            fb.write(_one_line(y) + "\n")
    return [pa, pb]


def write_doc_pairs(pairs, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = sorted(pairs, key=lambda p: (p.src_id, p.tgt_id))
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for p in rows:
            fh.write(f"{escape_field(p.src_id)}\t{escape_field(p.tgt_id)}\t"
                     f"{format_score(p.similarity)}\t{p.date_delta_days}\n")
    return len(rows)


def read_doc_pairs(path):
    out = []
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 4:
                raise CorpusFormatError(f"expected 4 columns, got {len(cols)}", path, lineno)
            try:
                out.append(DocumentPair(unescape_field(cols[0]), unescape_field(cols[1]),
                                        float(cols[2]), int(cols[3])))
            except ValueError as exc:
                raise CorpusFormatError(str(exc), path, lineno) from None
    return out


def write_sentences(records, path):
    """Sentence dump: ``article_id<TAB>index<TAB>text``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(f"{escape_field(r.article_id)}\t{r.index}\t{escape_field(r.text)}\n")
            n += 1
    return n


def read_sentences(path):
    out = []
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise CorpusFormatError(f"expected 3 columns, got {len(cols)}", path, lineno)
            try:
                idx = int(cols[1])
            except ValueError:
                raise CorpusFormatError(f"bad index {cols[1]!r}", path, lineno) from None
            out.append(SentenceRecord(unescape_field(cols[0]), idx, unescape_field(cols[2])))
    return out
