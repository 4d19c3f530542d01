"""Command-line front end: one subcommand per stage plus ``run`` for the whole pipeline.

Exit status: 0 success, 1 usage error, 2 bad input data or config, 3 stage failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .bleu import corpus_bleu, format_report as format_bleu, sentence_bleu
from .config import ConfigError, build_config, read_config
from .corpstats import CorpusReport, LangStats, audit_sample, audit_tsv, build_vocab, oov_rate
from .docalign import DocAlignConfig, align_by_date, align_documents
from .filterpipe import FilterPolicy, format_report, report_records, run_filter
from .langs import PIVOT, UnknownLanguageError, parse_lang
from .pipeline import StageError, run_pipeline
from .pivot import compile_pivot, extract_bitext, grid_counts
from .segmenter import segment_collection, split_sentences, word_tokenize
from .sentalign import AlignConfig, align_sentence_level
from .store import (CorpusFormatError, load_articles, read_alignments, read_doc_pairs,
                    read_pairs, write_alignments, write_bitext, write_doc_pairs, write_pairs,
                    write_sentences)
from .subword import SubwordModel, term_tokenizer
from .translate import CachingTranslator, TranslationError, close_translator, parse_translator

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_STAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _lang_path(text):
    lang, sep, path = text.partition("=")
    if not sep or not path:
        raise argparse.ArgumentTypeError(f"expected LANG=PATH, got {text!r}")
    try:
        return parse_lang(lang), Path(path)
    except UnknownLanguageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _lang(text):
    try:
        return parse_lang(text)
    except UnknownLanguageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_translator(p):
    p.add_argument("--translator", default=None,
                   help="identity | table:PATH | words:PATH | exec:CMD (default identity)")


def _add_align_flags(p):
    p.add_argument("--anchor-threshold", type=float, default=None)
    p.add_argument("--max-merge", type=int, default=None)
    p.add_argument("--bleu-max-n", type=int, default=None)


def _add_filter_flags(p):
    p.add_argument("--min-ratio", type=float, default=None)
    p.add_argument("--max-ratio", type=float, default=None)
    p.add_argument("--min-script-purity", type=float, default=None)
    p.add_argument("--min-tokens", type=int, default=None)
    p.add_argument("--max-tokens", type=int, default=None)


def build_parser():
    parser = _Parser(prog="bitextmine", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("segment", help="split articles into sentences")
    p.add_argument("input", type=Path, help="article JSONL file")
    p.add_argument("-o", "--output", type=Path, required=True, help="sentence TSV")
    p.add_argument("--html", action="store_true")
    p.add_argument("--lenient", action="store_true")

    p = sub.add_parser("train-subword", help="learn a subword model")
    p.add_argument("input", type=Path, help="text file, one sentence per line")
    p.add_argument("--lang", type=_lang, required=True)
    p.add_argument("--vocab-size", type=int, default=4000)
    p.add_argument("--min-frequency", type=int, default=2)
    p.add_argument("-o", "--output", type=Path, required=True)

    p = sub.add_parser("doc-align", help="pair source articles with English articles")
    p.add_argument("--src", type=Path, required=True)
    p.add_argument("--en", type=Path, required=True)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--mode", choices=("tfidf", "date"), default="tfidf")
    p.add_argument("--window-days", type=int, default=2)
    p.add_argument("--min-similarity", type=float, default=0.1)
    p.add_argument("--term-space", choices=("word", "subword"), default="subword")
    p.add_argument("--subword-model", type=Path, help="English model for subword terms")
    p.add_argument("--workers", type=int, default=1)
    _add_translator(p)

    p = sub.add_parser("sent-align", help="align sentences inside document pairs")
    p.add_argument("--src", type=Path, required=True)
    p.add_argument("--en", type=Path, required=True)
    p.add_argument("--doc-pairs", type=Path, required=True)
    p.add_argument("-o", "--output", type=Path, required=True,
                   help="pair TSV; spans go to the same name with .jsonl")
    p.add_argument("--term-space", choices=("word", "subword"), default="subword")
    p.add_argument("--subword-model", type=Path)
    _add_align_flags(p)
    _add_translator(p)

    p = sub.add_parser("filter", help="drop noisy pairs")
    p.add_argument("input", type=Path, help="alignment JSONL or pair TSV")
    p.add_argument("--src-lang", type=_lang, help="needed for TSV input")
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--report", type=Path, help="write the reason counts as JSONL here")
    _add_filter_flags(p)

    p = sub.add_parser("pivot", help="join xx-en pair files through English")
    p.add_argument("pairs", nargs="+", type=_lang_path, help="LANG=PAIR_TSV (xx-en)")
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--on-collision", choices=("keep-first", "drop"), default="keep-first")

    p = sub.add_parser("stats", help="corpus statistics report")
    p.add_argument("--articles", nargs="+", type=_lang_path, required=True)
    p.add_argument("--aligned", nargs="*", type=_lang_path, default=[])
    p.add_argument("--filtered", nargs="*", type=_lang_path, default=[])
    p.add_argument("--oov", nargs="*", type=_lang_path, default=[],
                   help="LANG=TEXT reference sentences for the OOV rate")
    p.add_argument("--json", action="store_true", help="emit JSON lines instead of a table")

    p = sub.add_parser("bleu-score", help="BLEU of a hypothesis file against a reference file")
    p.add_argument("hyp", type=Path)
    p.add_argument("ref", type=Path)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--sentence", action="store_true",
                   help="smoothed per-line scores instead of one corpus score")

    p = sub.add_parser("audit-sample", help="reproducible sample of pairs for manual review")
    p.add_argument("pairs", nargs="+", type=_lang_path, help="LANG=PAIR_TSV (xx-en), pooled")
    p.add_argument("-n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("run", help="run the whole pipeline")
    p.add_argument("--config", type=Path)
    p.add_argument("--languages", help="comma- or space-separated codes")
    p.add_argument("--input", nargs="*", type=_lang_path, default=[], metavar="LANG=PATH")
    p.add_argument("--output", type=Path)
    p.add_argument("--mode", choices=("tfidf", "date"))
    p.add_argument("--window-days", type=int)
    p.add_argument("--min-similarity", type=float)
    p.add_argument("--vocab-size", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    _add_align_flags(p)
    _add_filter_flags(p)
    _add_translator(p)
    return parser


def _translator(args):
    return CachingTranslator(parse_translator(args.translator or "identity"))


def _english_model(args, en):
    if args.term_space != "subword":
        return None
    if args.subword_model:
        return SubwordModel.load(args.subword_model)
    sents = [" ".join(word_tokenize(s)) for a in en for s in split_sentences(a.body, PIVOT)]
    if not sents:
        raise ValueError("no English sentences to train a subword model on")
    return SubwordModel(lang=PIVOT).fit(sents)


def cmd_segment(args):
    coll = load_articles(args.input, lenient=args.lenient, html=args.html)
    records = segment_collection(coll)
    n = write_sentences([r for k in sorted(records) for r in records[k]], args.output)
    print(f"{len(coll)} articles, {n} sentences")


def cmd_train_subword(args):
    lines = args.input.read_text(encoding="utf-8").splitlines()
    corpus = [" ".join(word_tokenize(s)) for s in lines if s.strip()]
    model = SubwordModel(lang=args.lang, target_vocab=args.vocab_size,
                         min_frequency=args.min_frequency).fit(corpus)
    model.save(args.output)
    print(f"{len(model.merges_)} merges, {len(model.vocab_)} symbols")


def cmd_doc_align(args):
    src, en = load_articles(args.src), load_articles(args.en)
    if args.mode == "date":
        pairs, ambiguous = align_by_date(src, en)
        for d in ambiguous:
            print(f"ambiguous date {d.date}: {len(d.src_ids)} source / {len(d.tgt_ids)} English",
                  file=sys.stderr)
    else:
        cfg = DocAlignConfig(args.window_days, args.min_similarity, args.term_space)
        translator = _translator(args)
        try:
            pairs = align_documents(src, en, translator, cfg, _english_model(args, en),
                                    workers=args.workers)
        finally:
            close_translator(translator)
    print(f"{write_doc_pairs(pairs, args.output)} document pairs")


def _align_config(args, base=None):
    base = base or AlignConfig()
    return AlignConfig(
        base.anchor_threshold if args.anchor_threshold is None else args.anchor_threshold,
        base.max_merge if args.max_merge is None else args.max_merge,
        base.bleu_max_n if args.bleu_max_n is None else args.bleu_max_n,
        getattr(args, "term_space", None) or base.term_space)


def cmd_sent_align(args):
    src, en = load_articles(args.src), load_articles(args.en)
    cfg = _align_config(args)
    tokenize = term_tokenizer(cfg.term_space, _english_model(args, en))
    translator = _translator(args)
    pairs = []
    try:
        for dp in read_doc_pairs(args.doc_pairs):
            pairs.extend(align_sentence_level(dp, src, en, translator, cfg, tokenize))
    finally:
        close_translator(translator)
    n = write_pairs(pairs, args.output)
    write_alignments(pairs, args.output.with_suffix(".jsonl"))
    print(f"{n} sentence pairs")


def _filter_overrides(args):
    names = {"min_ratio": "min_len_ratio", "max_ratio": "max_len_ratio",
             "min_script_purity": "min_script_purity", "min_tokens": "min_tokens",
             "max_tokens": "max_tokens"}
    return {dest: getattr(args, flag) for flag, dest in names.items()
            if getattr(args, flag) is not None}


def cmd_filter(args):
    if args.input.suffix == ".jsonl":
        pairs = read_alignments(args.input)
    else:
        if args.src_lang is None:
            raise UsageError("--src-lang is required for TSV input")
        pairs = read_pairs(args.input, args.src_lang, PIVOT)
    kept, report = run_filter(pairs, FilterPolicy.from_mapping(_filter_overrides(args)))
    write_pairs(kept, args.output)
    if args.report:
        args.report.write_text(report_records(report), encoding="utf-8")
    sys.stdout.write(format_report(report))


def cmd_pivot(args):
    by_lang = {}
    for lang, path in args.pairs:
        if lang == PIVOT:
            raise UsageError("pair files must be xx-en with xx other than en")
        by_lang[lang] = [(p.tgt_text, p.src_text) for p in read_pairs(path, lang, PIVOT)]
    records, collisions = compile_pivot(by_lang, args.on_collision)
    langs = [PIVOT] + sorted(by_lang)
    args.output.mkdir(parents=True, exist_ok=True)
    (args.output / "grid.tsv").write_text(grid_counts(records, langs).to_tsv(), encoding="utf-8")
    for i, a in enumerate(langs):
        for b in langs[i + 1:]:
            write_bitext(extract_bitext(records, a, b), args.output / f"{a}-{b}", a, b)
    for lang in sorted(collisions):
        if collisions[lang]:
            print(f"{lang}: {collisions[lang]} colliding English keys", file=sys.stderr)
    print(f"{len(records)} English keys")


def cmd_stats(args):
    aligned = dict(args.aligned)
    filtered = dict(args.filtered)
    oov = dict(args.oov)
    report = CorpusReport()
    for lang, path in args.articles:
        coll = load_articles(path)
        n_sent = sum(len(split_sentences(a.body, lang)) for a in coll)
        n_aligned = n_filtered = None
        texts = [s for a in coll for s in split_sentences(a.body, lang)]
        if lang in aligned:
            n_aligned = len(read_pairs(aligned[lang], lang, PIVOT))
        if lang in filtered:
            kept = read_pairs(filtered[lang], lang, PIVOT)
            n_filtered = len(kept)
            texts = [p.src_text for p in kept]
        vocab = build_vocab(texts, lang)
        rate = None
        if lang in oov:
            test = oov[lang].read_text(encoding="utf-8").splitlines()
            rate = oov_rate(vocab, build_vocab(test, lang))
        report.add(lang, LangStats(len(coll), n_sent, n_aligned, n_filtered, len(vocab), rate))
    sys.stdout.write(report.to_jsonl() if args.json else report.to_text())


def _lines(path):
    return path.read_text(encoding="utf-8").splitlines()


def cmd_bleu_score(args):
    hyps, refs = _lines(args.hyp), _lines(args.ref)
    if len(hyps) != len(refs):
        raise ValueError(f"{len(hyps)} hypotheses but {len(refs)} references")
    if args.sentence:
        for h, r in zip(hyps, refs):
            print(f"{100 * sentence_bleu(word_tokenize(h), word_tokenize(r), args.max_n):.2f}")
        return
    score = corpus_bleu([(word_tokenize(h), word_tokenize(r)) for h, r in zip(hyps, refs)],
                        max_n=args.max_n)
    sys.stdout.write(format_bleu(score))


def cmd_audit_sample(args):
    pairs = [p for lang, path in args.pairs for p in read_pairs(path, lang, PIVOT)]
    text = audit_tsv(audit_sample(pairs, args.n, args.seed))
    if args.output:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _run_config(args):
    values, base = ({}, Path.cwd()) if args.config is None else read_config(args.config)
    values = dict(values)
    cli_base = Path.cwd()
    # flags override config keys; paths given on the command line are cwd-relative
    over = {
        "languages": args.languages, "docalign.mode": args.mode,
        "docalign.window_days": args.window_days, "docalign.min_similarity": args.min_similarity,
        "subword.vocab_size": args.vocab_size, "seed": args.seed, "workers": args.workers,
        "sentalign.anchor_threshold": args.anchor_threshold,
        "sentalign.max_merge": args.max_merge, "sentalign.bleu_max_n": args.bleu_max_n,
    }
    for k, v in _filter_overrides(args).items():
        over[f"filter.{k}"] = v
    for k, v in over.items():
        if v is not None:
            values[k] = str(v)
    for lang, path in args.input:
        values[f"input.{lang}"] = str((cli_base / path).resolve())
    if args.output is not None:
        values["output"] = str((cli_base / args.output).resolve())
    if args.translator is not None:
        kind, sep, arg = args.translator.partition(":")
        if kind in ("table", "words") and sep:
            arg = str((cli_base / arg).resolve())
        values["translator"] = f"{kind}{sep}{arg}"
    return build_config(values, base)


def cmd_run(args):
    cfg = _run_config(args)
    cfg.validate()
    manifest = run_pipeline(cfg)
    for stage, counts in manifest["counts"].items():
        print(f"{stage}: {json.dumps(counts, sort_keys=True)}")
    print(f"outputs in {cfg.output}")


COMMANDS = {
    "segment": cmd_segment, "train-subword": cmd_train_subword, "doc-align": cmd_doc_align,
    "sent-align": cmd_sent_align, "filter": cmd_filter, "pivot": cmd_pivot,
    "stats": cmd_stats, "bleu-score": cmd_bleu_score, "audit-sample": cmd_audit_sample,
    "run": cmd_run,
}


def main(argv=None):
    """Run one command and return its exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"bitextmine: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as exc:
        print(f"bitextmine: {exc}", file=sys.stderr)
        return EXIT_DATA if exc.is_data_error else EXIT_STAGE
    except (ConfigError, CorpusFormatError, UnknownLanguageError, TranslationError,
            ValueError, KeyError, OSError) as exc:
        print(f"bitextmine: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
