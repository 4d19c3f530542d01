"""End-to-end run: segment, subword, document and sentence alignment, filtering,
pivoting, statistics and audit sampling, with a provenance manifest.

Everything is written under ``<output>/partial/`` first and moved into place
only when every stage succeeded, so a failed run never leaves a half-updated
output directory behind.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import logging
import shutil
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from pathlib import Path

from . import __version__
from .corpstats import CorpusReport, LangStats, audit_sample, audit_tsv, build_vocab, oov_rate
from .docalign import align_by_date, align_documents
from .filterpipe import format_report, report_records, run_filter
from .langs import PIVOT
from .pivot import compile_pivot, extract_bitext, grid_counts
from .scriptid import table_version
from .segmenter import segment_collection, split_sentences, word_tokenize
from .sentalign import align_sentence_level
from .store import (CorpusFormatError, escape_field, load_articles, write_alignments,
                    write_bitext, write_doc_pairs, write_pairs, write_sentences)
from .subword import SubwordModel, term_tokenizer
from .translate import CachingTranslator, close_translator, parse_translator

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"
PARTIAL = "partial"


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it and ``cause`` is the original error."""

    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause

    @property
    def is_data_error(self):
        return isinstance(self.cause, CorpusFormatError)


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def config_digest(cfg):
    blob = json.dumps(cfg.to_dict(), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _pmap(fn, items, workers):
    # results come back in input order whatever the thread count
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


class _Run:
    def __init__(self, cfg):
        self.cfg = cfg
        self.out = Path(cfg.output)
        self.stage_dir = self.out / PARTIAL
        self.counts = {}
        self.stats = Counter()

    def path(self, *parts):
        p = self.stage_dir.joinpath(*parts)
        p.parent.mkdir(parents=True, exist_ok=True)
        return p

    def write_text(self, text, *parts):
        self.path(*parts).write_text(text, encoding="utf-8", newline="\n")

    def stage(self, name, fn, *args):
        log.info("stage %s", name)
        try:
            return fn(*args)
        except StageError:
            raise
        except Exception as exc:
            raise StageError(name, exc) from exc

    # -- stages ---------------------------------------------------------

    def load(self):
        cfg = self.cfg
        self.articles = {}
        for lang in [PIVOT] + cfg.languages:
            coll = load_articles(cfg.inputs[lang], lenient=cfg.lenient, html=cfg.html)
            wrong = [a.id for a in coll if a.lang != lang]
            if wrong:
                raise CorpusFormatError(
                    f"article {wrong[0]!r} is not tagged {lang!r}", cfg.inputs[lang])
            self.articles[lang] = coll
        self.counts["load"] = {lang: {"articles": len(c), "skipped": c.skipped}
                               for lang, c in self.articles.items()}

    def segment(self):
        self.sentences = {}
        counts = {}
        for lang, coll in self.articles.items():
            records = segment_collection(coll)
            flat = [r for art_id in sorted(records) for r in records[art_id]]
            write_sentences(flat, self.path("sentences", f"{lang}.tsv"))
            self.sentences[lang] = flat
            counts[lang] = len(flat)
        self.counts["segment"] = counts

    def subword(self):
        cfg = self.cfg
        self.models = {}
        counts = {}
        for lang, flat in self.sentences.items():
            if cfg.subword_model_dir is not None:
                model = SubwordModel.load(Path(cfg.subword_model_dir) / f"{lang}.model")
            else:
                corpus = [" ".join(word_tokenize(r.text)) for r in flat]
                model = SubwordModel(lang=lang, target_vocab=cfg.vocab_size).fit(corpus)
            model.save(self.path("subword", f"{lang}.model"))
            self.models[lang] = model
            counts[lang] = {"merges": len(model.merges_), "symbols": len(model.vocab_)}
        self.counts["subword"] = counts

    def docalign(self):
        cfg = self.cfg
        en = self.articles[PIVOT]
        self.doc_pairs = {}
        counts = {}
        for lang in cfg.languages:
            src = self.articles[lang]
            if cfg.mode == "date":
                pairs, ambiguous = align_by_date(src, en)
                lines = "".join(
                    f"{d.date.isoformat()}\t{','.join(map(escape_field, d.src_ids))}\t"
                    f"{','.join(map(escape_field, d.tgt_ids))}\n" for d in ambiguous)
                self.write_text(lines, "docalign", f"{lang}-en.ambiguous.tsv")
                counts[lang] = {"pairs": len(pairs), "ambiguous_dates": len(ambiguous)}
            else:
                local = Counter()
                pairs = align_documents(src, en, self.translator, cfg.docalign,
                                        en_model=self.models[PIVOT],
                                        workers=self._workers(), stats=local)
                self.stats.update(local)
                counts[lang] = {"pairs": len(pairs),
                                "translation_failures": local["translation_failures"]}
            write_doc_pairs(pairs, self.path("docalign", f"{lang}-en.tsv"))
            self.doc_pairs[lang] = pairs
        self.counts["docalign"] = counts

    def sentalign(self):
        cfg = self.cfg
        tokenize = term_tokenizer(cfg.align.term_space, self.models[PIVOT])
        en = self.articles[PIVOT]
        self.aligned = {}
        counts = {}
        for lang in cfg.languages:
            src = self.articles[lang]

            def work(dp):
                local = Counter()
                return align_sentence_level(dp, src, en, self.translator, cfg.align,
                                            tokenize, local), local

            pairs = []
            failures = 0
            for found, local in _pmap(work, self.doc_pairs[lang], self._workers()):
                pairs.extend(found)
                failures += local["translation_failures"]
            pairs.sort(key=lambda p: p.sort_key())
            write_pairs(pairs, self.path("sentalign", f"{lang}-en.tsv"))
            write_alignments(pairs, self.path("sentalign", f"{lang}-en.jsonl"))
            self.aligned[lang] = pairs
            counts[lang] = {"pairs": len(pairs), "translation_failures": failures}
        self.counts["sentalign"] = counts

    def filter(self):
        self.kept = {}
        counts = {}
        for lang in self.cfg.languages:
            kept, report = run_filter(self.aligned[lang], self.cfg.filter)
            write_pairs(kept, self.path("filtered", f"{lang}-en.tsv"))
            self.write_text(format_report(report), "filtered", f"{lang}-en.report.txt")
            self.write_text(report_records(report, lang=lang), "filtered", f"{lang}-en.report.jsonl")
            self.kept[lang] = kept
            counts[lang] = dict(report)
        self.counts["filter"] = counts

    def pivot(self):
        by_lang = {lang: [(p.tgt_text, p.src_text) for p in self.kept[lang]]
                   for lang in self.cfg.languages}
        records, collisions = compile_pivot(by_lang, self.cfg.on_collision)
        langs = [PIVOT] + sorted(self.cfg.languages)
        grid = grid_counts(records, langs)
        self.write_text(grid.to_tsv(), "pivot", "grid.tsv")
        bitexts = {}
        for a, b in combinations(langs, 2):
            pairs = extract_bitext(records, a, b)
            write_bitext(pairs, self.path("pivot", f"{a}-{b}"), a, b)
            bitexts[f"{a}-{b}"] = len(pairs)
        self.counts["pivot"] = {"records": len(records), "bitexts": bitexts,
                                "collisions": {k: collisions[k] for k in sorted(collisions)}}

    def corpus_stats(self):
        cfg = self.cfg
        report = CorpusReport()
        en_filtered = [p.tgt_text for lang in cfg.languages for p in self.kept[lang]]
        for lang in [PIVOT] + cfg.languages:
            if lang == PIVOT:
                texts = en_filtered
                aligned = filtered = None
            else:
                texts = [p.src_text for p in self.kept[lang]]
                aligned, filtered = len(self.aligned[lang]), len(self.kept[lang])
            vocab = build_vocab(texts, lang)
            rate = None
            ref = cfg.oov_reference.get(lang)
            if ref is not None:
                test = [s for line in Path(ref).read_text(encoding="utf-8").splitlines()
                        for s in split_sentences(line, lang)]
                rate = oov_rate(vocab, build_vocab(test, lang))
            report.add(lang, LangStats(
                articles=len(self.articles[lang]), sentences=len(self.sentences[lang]),
                aligned_to_en=aligned, filtered=filtered, vocab_size=len(vocab), oov_rate=rate))
        self.write_text(report.to_text(), "stats", "report.txt")
        self.write_text(report.to_jsonl(), "stats", "report.jsonl")
        self.counts["stats"] = {lang: vars(s) for lang, s in report.langs.items()}

    def audit(self):
        pool = [p for lang in self.cfg.languages for p in self.kept[lang]]
        n = min(self.cfg.audit_n, len(pool))
        sample = audit_sample(pool, n, self.cfg.seed)
        self.write_text(audit_tsv(sample), "audit", "sample.tsv")
        self.counts["audit"] = {"sampled": n, "pool": len(pool)}

    def _workers(self):
        if self.cfg.workers > 1 and not getattr(self.translator, "concurrent_safe", True):
            return 1
        return self.cfg.workers

    # -- driver ---------------------------------------------------------

    def execute(self):
        if self.stage_dir.exists():
            shutil.rmtree(self.stage_dir)
        self.stage_dir.mkdir(parents=True)
        self.translator = self.stage(
            "translator", lambda: CachingTranslator(parse_translator(self.cfg.translator)))
        try:
            self.stage("load", self.load)
            self.stage("segment", self.segment)
            self.stage("subword", self.subword)
            self.stage("docalign", self.docalign)
            self.stage("sentalign", self.sentalign)
            self.stage("filter", self.filter)
            self.stage("pivot", self.pivot)
            self.stage("stats", self.corpus_stats)
            self.stage("audit", self.audit)
            manifest = self.stage("manifest", self.manifest)
        finally:
            close_translator(self.translator)
        self.stage("publish", self.publish, manifest)
        return manifest

    def manifest(self):
        cfg = self.cfg
        outputs = {}
        for p in sorted(self.stage_dir.rglob("*")):
            if p.is_file():
                outputs[p.relative_to(self.stage_dir).as_posix()] = sha256_file(p)
        inputs = {lang: {"path": str(cfg.inputs[lang]), "sha256": sha256_file(cfg.inputs[lang])}
                  for lang in [PIVOT] + cfg.languages}
        manifest = {
            "tool": "bitextmine",
            "version": __version__,
            "timestamp": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
            "config_sha256": config_digest(cfg),
            "config": cfg.to_dict(),
            "script_table": table_version(),
            "inputs": inputs,
            "counts": self.counts,
            "events": dict(sorted(self.stats.items())),
            "outputs": outputs,
        }
        text = json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        self.write_text(text, MANIFEST)
        return manifest

    def publish(self, manifest):
        # drop what the previous run produced, then move the new tree into place
        old = self.out / MANIFEST
        if old.is_file():
            try:
                previous = json.loads(old.read_text(encoding="utf-8")).get("outputs", {})
            except ValueError:
                previous = {}
            for rel in previous:
                target = self.out / rel
                if target.is_file():
                    target.unlink()
        for entry in sorted(self.stage_dir.iterdir()):
            target = self.out / entry.name
            if entry.is_dir():
                target.mkdir(exist_ok=True)
                for f in sorted(entry.rglob("*")):
                    dest = target / f.relative_to(entry)
                    if f.is_dir():
                        dest.mkdir(parents=True, exist_ok=True)
                    else:
                        dest.parent.mkdir(parents=True, exist_ok=True)
                        f.replace(dest)
            else:
                entry.replace(target)
        shutil.rmtree(self.stage_dir)
        _prune_empty_dirs(self.out)


def _prune_empty_dirs(root):
    for d in sorted((p for p in root.rglob("*") if p.is_dir()), key=lambda p: -len(p.parts)):
        if not any(d.iterdir()):
            d.rmdir()


def run_pipeline(cfg):
    """Run every stage for a validated :class:`~bitextmine.config.PipelineConfig`.

    Returns the manifest dict (also written to ``<output>/manifest.json``).
    Raises :class:`StageError` on failure, leaving partial outputs in
    ``<output>/partial/``.
    """
    cfg.validate()
    return _Run(cfg).execute()


def strip_timestamp(manifest):
    """Manifest without its run timestamp, for comparing runs."""
    return {k: v for k, v in manifest.items() if k != "timestamp"}
