"""Mine sentence-aligned multilingual parallel corpora from dated article collections."""

__version__ = "0.1.0"

from .bleu import BleuScore, corpus_bleu, sentence_bleu
from .config import ConfigError, PipelineConfig, build_config, read_config
from .corpstats import audit_sample, build_vocab, oov_rate, score_against_gold
from .docalign import DocAlignConfig, TfIdfIndex, align_by_date, align_documents
from .filterpipe import FilterPolicy, PairFilter, run_filter
from .pipeline import StageError, run_pipeline
from .pivot import compile_pivot, extract_bitext, grid_counts
from .records import Article, DocumentPair, MultiRecord, SentencePair
from .scriptid import classify_char, sentence_profile
from .segmenter import split_sentences, word_tokenize
from .sentalign import AlignConfig, align_sentences, anchor_align, gap_fill
from .store import ArticleCollection, CorpusFormatError, load_articles
from .subword import SubwordModel, train_subword

__all__ = [
    "Article", "ArticleCollection", "AlignConfig", "BleuScore", "ConfigError",
    "CorpusFormatError", "DocAlignConfig", "DocumentPair", "FilterPolicy", "MultiRecord",
    "PairFilter", "PipelineConfig", "SentencePair", "StageError", "SubwordModel",
    "TfIdfIndex", "align_by_date", "align_documents", "align_sentences", "anchor_align",
    "audit_sample", "build_config", "build_vocab", "classify_char", "compile_pivot",
    "corpus_bleu", "extract_bitext", "gap_fill", "grid_counts", "load_articles",
    "oov_rate", "read_config", "run_filter", "run_pipeline", "score_against_gold",
    "sentence_bleu", "sentence_profile", "split_sentences", "train_subword",
    "word_tokenize",
]
