import json
import subprocess
import sys

import pytest

from synthetic import write_fixture, write_toy

from bitextmine.cli import EXIT_DATA, EXIT_OK, EXIT_STAGE, EXIT_USAGE, main


@pytest.fixture
def toy(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    write_toy(tmp_path)
    return tmp_path


def run(*argv):
    return main([str(a) for a in argv])


def test_stage_commands_reproduce_run(toy, capsys):
    assert run("run", "--config", "toy.cfg") == EXIT_OK
    out = toy / "out"
    assert run("segment", "hi.jsonl", "-o", "hi.sent.tsv") == EXIT_OK
    assert capsys.readouterr().out.strip().endswith("3 articles, 10 sentences")
    assert (toy / "hi.sent.tsv").read_bytes() == (out / "sentences" / "hi.tsv").read_bytes()

    assert run("doc-align", "--src", "hi.jsonl", "--en", "en.jsonl", "-o", "docs.tsv",
               "--translator", "words:words.tsv", "--workers", 2) == EXIT_OK
    assert (toy / "docs.tsv").read_bytes() == (out / "docalign" / "hi-en.tsv").read_bytes()

    assert run("sent-align", "--src", "hi.jsonl", "--en", "en.jsonl", "--doc-pairs", "docs.tsv",
               "-o", "sents.tsv", "--translator", "words:words.tsv") == EXIT_OK
    assert (toy / "sents.jsonl").read_bytes() == (out / "sentalign" / "hi-en.jsonl").read_bytes()

    capsys.readouterr()
    assert run("filter", "sents.jsonl", "-o", "kept.tsv", "--report", "rep.jsonl") == EXIT_OK
    assert "url" in capsys.readouterr().out
    assert (toy / "kept.tsv").read_bytes() == (out / "filtered" / "hi-en.tsv").read_bytes()
    reasons = {json.loads(l)["reason"]: json.loads(l)["count"]
               for l in (toy / "rep.jsonl").read_text().splitlines()}
    assert reasons["ok"] == 5 and reasons["script"] == 2

    assert run("pivot", "hi=kept.tsv", "-o", "piv") == EXIT_OK
    assert (toy / "piv" / "grid.tsv").read_bytes() == (out / "pivot" / "grid.tsv").read_bytes()

    assert run("audit-sample", "hi=kept.tsv", "-n", 3, "-o", "audit.tsv") == EXIT_OK
    assert (toy / "audit.tsv").read_bytes() == (out / "audit" / "sample.tsv").read_bytes()


def test_filter_tsv_requires_language(toy, capsys):
    run("run", "--config", "toy.cfg")
    assert run("filter", "out/sentalign/hi-en.tsv", "-o", "k.tsv") == EXIT_USAGE
    assert run("filter", "out/sentalign/hi-en.tsv", "--src-lang", "hi", "-o", "k.tsv",
               "--max-tokens", 3) == EXIT_OK
    assert "too_long" in capsys.readouterr().out


def test_train_subword(tmp_path, capsys):
    text = tmp_path / "train.txt"
    text.write_text("low lower lowest\nnew newer newest\n" * 3, encoding="utf-8")
    model = tmp_path / "en.model"
    assert run("train-subword", text, "--lang", "en", "--vocab-size", 20, "-o", model) == EXIT_OK
    assert "merges" in capsys.readouterr().out
    assert model.read_text(encoding="utf-8")
    assert run("train-subword", text, "--lang", "xx", "-o", model) == EXIT_USAGE


def test_bleu_score(tmp_path, capsys):
    hyp, ref = tmp_path / "h.txt", tmp_path / "r.txt"
    hyp.write_text("the cat sat on the mat\n", encoding="utf-8")
    ref.write_text("the cat sat on the mat\n", encoding="utf-8")
    assert run("bleu-score", hyp, ref) == EXIT_OK
    assert "BLEU = 100.00" in capsys.readouterr().out
    assert run("bleu-score", hyp, ref, "--sentence", "--max-n", 2) == EXIT_OK
    assert capsys.readouterr().out.strip() == "100.00"
    ref.write_text("a\nb\n", encoding="utf-8")
    assert run("bleu-score", hyp, ref) == EXIT_DATA


def test_stats(toy, capsys):
    run("run", "--config", "toy.cfg")
    capsys.readouterr()
    assert run("stats", "--articles", "hi=hi.jsonl", "en=en.jsonl",
               "--aligned", "hi=out/sentalign/hi-en.tsv",
               "--filtered", "hi=out/filtered/hi-en.tsv", "--json") == EXIT_OK
    rows = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert rows[0] == {"lang": "hi", "articles": 3, "sentences": 10, "aligned_to_en": 9,
                       "filtered": 5, "vocab_size": rows[0]["vocab_size"], "oov_rate": None}
    assert rows[1]["aligned_to_en"] is None
    assert run("stats", "--articles", "hi=hi.jsonl") == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0].split() == ["hi"]


def test_run_flags_override_config(toy):
    assert run("run", "--config", "toy.cfg", "--output", "elsewhere", "--mode", "date",
               "--max-ratio", 2.5) == EXIT_OK
    manifest = json.loads((toy / "elsewhere" / "manifest.json").read_text())
    assert manifest["config"]["mode"] == "date"
    assert manifest["config"]["filter"]["max_len_ratio"] == 2.5
    assert not (toy / "out").exists()


def test_run_without_config(toy):
    assert run("run", "--languages", "hi", "--input", "en=en.jsonl", "hi=hi.jsonl",
               "--translator", "words:words.tsv", "--output", "o2") == EXIT_OK
    assert (toy / "o2" / "filtered" / "hi-en.tsv").exists()


def test_exit_codes(toy, capsys):
    assert run("frobnicate") == EXIT_USAGE
    assert run("run", "--seed", "many") == EXIT_USAGE
    assert run("pivot", "zz=x.tsv", "-o", "p") == EXIT_USAGE
    assert run("--help") == EXIT_OK
    assert run("pivot", "en=x.tsv", "-o", "p") == EXIT_USAGE
    # configuration and data problems
    assert run("run", "--config", "toy.cfg", "--languages", "") == EXIT_DATA
    assert run("run", "--config", "toy.cfg", "--languages", "en") == EXIT_DATA
    assert run("run", "--config", "missing.cfg") == EXIT_DATA
    assert run("segment", "nope.jsonl", "-o", "s.tsv") == EXIT_DATA
    (toy / "bad.jsonl").write_text("{not json\n", encoding="utf-8")
    assert run("segment", "bad.jsonl", "-o", "s.tsv") == EXIT_DATA
    assert run("segment", "bad.jsonl", "-o", "s.tsv", "--lenient") == EXIT_OK
    with (toy / "hi.jsonl").open("a", encoding="utf-8") as fh:
        fh.write("{broken\n")
    assert run("run", "--config", "toy.cfg") == EXIT_DATA
    assert "load" in capsys.readouterr().err
    # a stage that fails for a non-data reason
    (toy / "models").mkdir()
    (toy / "hi.jsonl").write_text(
        "\n".join((toy / "hi.jsonl").read_text(encoding="utf-8").splitlines()[:-1]) + "\n",
        encoding="utf-8")
    with (toy / "toy.cfg").open("a", encoding="utf-8") as fh:
        fh.write("subword.model_dir = models\n")
    assert run("run", "--config", "toy.cfg") == EXIT_STAGE
    assert "subword" in capsys.readouterr().err
    assert (toy / "out" / "partial").is_dir()


def test_module_entry_point(tmp_path):
    cfg, _ = write_fixture(tmp_path, n_articles=3, n_sentences=2)
    proc = subprocess.run([sys.executable, "-m", "bitextmine", "run", "--config", str(cfg),
                           "--workers", "2"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "outputs in" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "bitextmine", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("bitextmine ")
    proc = subprocess.run([sys.executable, "-m", "bitextmine"], capture_output=True, text=True)
    assert proc.returncode == 1


def test_pooled_audit_matches_pipeline(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg, _ = write_fixture(tmp_path, langs=("hi", "ta"), n_articles=4, n_sentences=3,
                           config_extra={"audit.n": "5", "seed": "11"})
    assert run("run", "--config", cfg) == EXIT_OK
    assert run("audit-sample", "ta=out/filtered/ta-en.tsv", "hi=out/filtered/hi-en.tsv",
               "-n", 5, "--seed", 11, "-o", "a.tsv") == EXIT_OK
    assert (tmp_path / "a.tsv").read_bytes() == (tmp_path / "out/audit/sample.tsv").read_bytes()
