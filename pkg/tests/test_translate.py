import sys
import threading

import pytest

from bitextmine.translate import (
    CachingTranslator, ExecTranslator, IdentityTranslator, TableTranslator, TranslationError,
    WordTableTranslator, close_translator, parse_translator, write_table)

UPPER = [sys.executable, "-u", "-c",
         "import sys\nfor line in sys.stdin:\n    print(line.rstrip('\\n').upper(), flush=True)"]
ONE_SHOT = [sys.executable, "-u", "-c",
            "import sys\nline = sys.stdin.readline()\nprint(line.strip()[::-1], flush=True)"]
SILENT = [sys.executable, "-c", "import sys; sys.stdin.readline()"]


def test_identity():
    assert IdentityTranslator().translate("x  y", "hi", "en") == "x  y"


def test_table_lookup_normalises_whitespace(tmp_path):
    path = write_table([("a  b", "A B"), ("tab\there", "T"), ("a b", "ignored")], tmp_path / "t.tsv")
    t = TableTranslator.from_file(path)
    assert t.translate(" a b ", "hi", "en") == "A B"
    assert t.translate("tab here", "hi", "en") == "T"
    with pytest.raises(TranslationError):
        t.translate("missing", "hi", "en")


def test_table_file_errors(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("only-one-column\n", encoding="utf-8")
    with pytest.raises(ValueError, match="2 columns"):
        TableTranslator.from_file(path)


def test_word_table_passes_unknown_words():
    t = WordTableTranslator({"क": "ka", "।": "."})
    assert t.translate("क ख ।", "hi", "en") == "ka ख ."


def test_parse_translator(tmp_path):
    path = write_table({"a": "b"}, tmp_path / "t.tsv")
    assert isinstance(parse_translator("identity"), IdentityTranslator)
    assert isinstance(parse_translator(f"table:{path}"), TableTranslator)
    assert isinstance(parse_translator(f"words:{path}"), WordTableTranslator)
    assert isinstance(parse_translator("exec:cat"), ExecTranslator)
    for bad in ("nope", "table:", "ftp:x"):
        with pytest.raises(ValueError):
            parse_translator(bad)


def test_exec_line_protocol():
    with ExecTranslator(UPPER) as t:
        assert t.translate("hello", "hi", "en") == "HELLO"
        assert t.translate("two\nlines", "hi", "en") == "TWO\\NLINES"
        assert t.translate("नमस्ते", "hi", "en") == "नमस्ते"
    assert t._proc is None


def test_exec_is_serialised_across_threads():
    t = ExecTranslator(UPPER)
    results = {}

    def work(i):
        results[i] = t.translate(f"s{i}", "hi", "en")

    threads = [threading.Thread(target=work, args=(i,)) for i in range(20)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    t.close()
    assert results == {i: f"S{i}" for i in range(20)}
    assert t.concurrent_safe is False


def test_exec_restarts_dead_child():
    t = ExecTranslator(ONE_SHOT)
    assert t.translate("abc", "hi", "en") == "cba"
    t._proc.wait(timeout=5)
    assert t.translate("xyz", "hi", "en") == "zyx"
    t.close()


def test_exec_silent_child_fails():
    t = ExecTranslator(SILENT)
    with pytest.raises(TranslationError):
        t.translate("abc", "hi", "en")
    t.close()


def test_exec_command_string_is_split():
    t = parse_translator(f"exec:{sys.executable} -c \"print(input()[::-1])\"")
    assert t.translate("abc", "hi", "en") == "cba"
    close_translator(t)


def test_caching_translator_calls_once_and_caches_failures():
    calls = []

    class Counting:
        concurrent_safe = True

        def translate(self, s, src, tgt):
            calls.append(s)
            if s == "bad":
                raise TranslationError("no")
            return s.upper()

    c = CachingTranslator(Counting())
    assert c.translate("a", "hi", "en") == c.translate("a", "hi", "en") == "A"
    for _ in range(2):
        with pytest.raises(TranslationError):
            c.translate("bad", "hi", "en")
    assert calls == ["a", "bad"]
    assert c.concurrent_safe is True
    assert CachingTranslator(ExecTranslator(UPPER)).concurrent_safe is False
