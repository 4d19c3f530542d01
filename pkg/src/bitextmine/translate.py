"""Pluggable sentence translators used for alignment.

A translator only needs ``translate(sentence, src, tgt) -> str`` and a
``concurrent_safe`` flag. Failures raise :class:`TranslationError`.
"""

from __future__ import annotations

import shlex
import subprocess
import threading
from pathlib import Path
from typing import Protocol

from .store import unescape_field


class TranslationError(RuntimeError):
    pass


class Translator(Protocol):
    concurrent_safe: bool

    def translate(self, sentence: str, src: str, tgt: str) -> str: ...


def normalize_ws(text):
    return " ".join(text.split())


class IdentityTranslator:
    concurrent_safe = True

    def translate(self, sentence, src, tgt):
        return sentence

    def __repr__(self):
        return "IdentityTranslator()"


class TableTranslator:
    """Exact sentence lookup after whitespace normalisation.

    The table file has one ``source<TAB>translation`` entry per line, escaped
    like the pair TSV. Later duplicates of a source sentence are ignored.
    """

    concurrent_safe = True

    def __init__(self, table):
        self.table = {}
        for src, tgt in table.items() if hasattr(table, "items") else table:
            self.table.setdefault(normalize_ws(src), tgt)

    @classmethod
    def from_file(cls, path):
        entries = []
        with Path(path).open(encoding="utf-8", newline="") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                cols = line.split("\t")
                if len(cols) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 2 columns, got {len(cols)}")
                entries.append((unescape_field(cols[0]), unescape_field(cols[1])))
        return cls(entries)

    def translate(self, sentence, src, tgt):
        try:
            return self.table[normalize_ws(sentence)]
        except KeyError:
            raise TranslationError(f"no table entry for {sentence[:60]!r}") from None

    def __repr__(self):
        return f"TableTranslator(n={len(self.table)})"


class WordTableTranslator:
    """Word-by-word substitution; tokens missing from the table pass through."""

    concurrent_safe = True

    def __init__(self, table):
        self.table = dict(table)

    @classmethod
    def from_file(cls, path):
        return cls(TableTranslator.from_file(path).table)

    def translate(self, sentence, src, tgt):
        return " ".join(self.table.get(w, w) for w in sentence.split())

    def __repr__(self):
        return f"WordTableTranslator(n={len(self.table)})"


class ExecTranslator:
    """Line protocol over a long-lived child process.

    Each request is one line on the child's stdin; the child must answer with
    exactly one line on stdout, in order, flushing after each. Embedded LF is
    sent as the two characters ``\\n``. Calls are serialised with a lock.
    """

    concurrent_safe = False

    def __init__(self, command):
        self.command = command
        self._argv = shlex.split(command) if isinstance(command, str) else list(command)
        self._proc = None
        self._lock = threading.Lock()

    def _start(self):
        self._proc = subprocess.Popen(
            self._argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            encoding="utf-8", errors="replace", bufsize=1)

    def translate(self, sentence, src, tgt):
        line = sentence.replace("\r\n", "\n").replace("\n", "\\n")
        with self._lock:
            if self._proc is None or self._proc.poll() is not None:
                self._start()
            try:
                self._proc.stdin.write(line + "\n")
                self._proc.stdin.flush()
                out = self._proc.stdout.readline()
            except OSError as exc:
                raise TranslationError(f"translator process failed: {exc}") from exc
            if not out:
                raise TranslationError(
                    f"translator process exited (status {self._proc.poll()})")
        return out.rstrip("\r\n")

    def close(self):
        with self._lock:
            if self._proc is not None:
                if self._proc.stdin:
                    self._proc.stdin.close()
                try:
                    self._proc.wait(timeout=5)
                except subprocess.TimeoutExpired:
                    self._proc.kill()
                    self._proc.wait()
                if self._proc.stdout:
                    self._proc.stdout.close()
                self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __repr__(self):
        return f"ExecTranslator({self.command!r})"


def parse_translator(text):
    """Build a translator from ``identity``, ``table:PATH``, ``words:PATH`` or ``exec:CMD``."""
    if text == "identity":
        return IdentityTranslator()
    kind, sep, arg = text.partition(":")
    if not sep or not arg:
        raise ValueError(f"bad translator {text!r}")
    if kind == "table":
        return TableTranslator.from_file(arg)
    if kind == "words":
        return WordTableTranslator.from_file(arg)
    if kind == "exec":
        return ExecTranslator(arg)
    raise ValueError(f"unknown translator kind {kind!r}")


def close_translator(translator):
    close = getattr(translator, "close", None)
    if close is not None:
        close()


def write_table(entries, path):
    """Write ``(source, translation)`` entries in the table-translator file format."""
    from .store import escape_field

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    items = entries.items() if hasattr(entries, "items") else entries
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for src, tgt in items:
            fh.write(f"{escape_field(src)}\t{escape_field(tgt)}\n")
    return path


class CachingTranslator:
    """Memoise another translator; failures are cached too."""

    def __init__(self, inner):
        self.inner = inner
        self.concurrent_safe = getattr(inner, "concurrent_safe", False)
        self._cache = {}
        self._lock = threading.Lock()

    def translate(self, sentence, src, tgt):
        key = (sentence, src, tgt)
        with self._lock:
            hit = self._cache.get(key)
        if hit is None:
            try:
                hit = (True, self.inner.translate(sentence, src, tgt))
            except TranslationError as exc:
                hit = (False, str(exc))
            with self._lock:
                self._cache.setdefault(key, hit)
        ok, value = hit
        if not ok:
            raise TranslationError(value)
        return value

    def close(self):
        close_translator(self.inner)

    def __repr__(self):
        return f"CachingTranslator({self.inner!r})"
