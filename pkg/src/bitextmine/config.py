"""Flat ``key = value`` pipeline configuration with dotted section keys.

Example::

    languages = hi ta
    input.en = data/en.jsonl
    input.hi = data/hi.jsonl
    input.ta = data/ta.jsonl
    output = out
    translator = table:data/table.tsv
    docalign.mode = tfidf
    docalign.window_days = 2
    sentalign.anchor_threshold = 0.1
    filter.max_len_ratio = 3.0

Relative paths are resolved against the config file's directory. Every key
can be overridden from the command line.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from ._validation import check_count, check_langs
from .docalign import DocAlignConfig
from .filterpipe import FilterPolicy
from .langs import PIVOT, parse_lang
from .sentalign import AlignConfig


class ConfigError(ValueError):
    pass


def parse_config_text(text, source="<config>"):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def read_config(path):
    path = Path(path)
    values = parse_config_text(path.read_text(encoding="utf-8"), str(path))
    return values, path.parent


@dataclass
class PipelineConfig:
    languages: List[str]
    inputs: Dict[str, Path]
    output: Path
    docalign: DocAlignConfig = field(default_factory=DocAlignConfig)
    align: AlignConfig = field(default_factory=AlignConfig)
    filter: FilterPolicy = field(default_factory=FilterPolicy)
    mode: str = "tfidf"
    translator: str = "identity"
    seed: int = 0
    workers: int = 1
    vocab_size: int = 4000
    subword_model_dir: Optional[Path] = None
    audit_n: int = 100
    on_collision: str = "keep-first"
    lenient: bool = False
    html: bool = False
    oov_reference: Dict[str, Path] = field(default_factory=dict)

    def validate(self, check_paths=True):
        if not self.languages:
            raise ConfigError("no languages to process")
        try:
            self.languages = check_langs(self.languages)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if PIVOT in self.languages:
            raise ConfigError("'en' is the pivot and cannot be listed in languages")
        if self.mode not in ("tfidf", "date"):
            raise ConfigError(f"docalign mode must be tfidf or date, got {self.mode!r}")
        if self.on_collision not in ("keep-first", "drop"):
            raise ConfigError(f"bad pivot.on_collision {self.on_collision!r}")
        check_count(self.workers, "workers", minimum=1)
        check_count(self.vocab_size, "vocab_size", minimum=1)
        check_count(self.audit_n, "audit_n")
        for lang in [PIVOT] + self.languages:
            if lang not in self.inputs:
                raise ConfigError(f"missing input.{lang}")
            if check_paths and not Path(self.inputs[lang]).is_file():
                raise ConfigError(f"input.{lang}: no such file {self.inputs[lang]}")
        if check_paths:
            kind, _, arg = self.translator.partition(":")
            if kind in ("table", "words") and not Path(arg).is_file():
                raise ConfigError(f"translator table not found: {arg}")
            if self.subword_model_dir is not None and not Path(self.subword_model_dir).is_dir():
                raise ConfigError(f"subword.model_dir not found: {self.subword_model_dir}")
        return self

    def to_dict(self, include_output=False):
        """Plain JSON-able view used for the manifest and config hash."""
        d = {
            "languages": list(self.languages),
            "inputs": {k: str(v) for k, v in sorted(self.inputs.items())},
            "docalign": asdict(self.docalign), "sentalign": asdict(self.align),
            "filter": asdict(self.filter), "mode": self.mode, "translator": self.translator,
            "seed": self.seed, "vocab_size": self.vocab_size,
            "subword_model_dir": str(self.subword_model_dir) if self.subword_model_dir else None,
            "audit_n": self.audit_n, "on_collision": self.on_collision,
            "lenient": self.lenient, "html": self.html,
            "oov_reference": {k: str(v) for k, v in sorted(self.oov_reference.items())},
        }
        if include_output:
            d["output"] = str(self.output)
        return d


_BOOL = {"1": True, "true": True, "yes": True, "on": True,
         "0": False, "false": False, "no": False, "off": False}

_ALIGN_KEYS = {"anchor_threshold": float, "max_merge": int, "bleu_max_n": int, "term_space": str}
_DOC_KEYS = {"window_days": int, "min_similarity": float, "term_space": str}


def _bool(key, value):
    try:
        return _BOOL[value.strip().lower()]
    except KeyError:
        raise ConfigError(f"{key}: not a boolean: {value!r}") from None


def build_config(values, base_dir=None):
    """Turn a flat key/value mapping into a validated-shape :class:`PipelineConfig`."""
    base = Path(base_dir) if base_dir is not None else Path(".")

    def path_of(v):
        p = Path(os.path.expanduser(v))
        return p if p.is_absolute() else base / p

    values = dict(values)
    languages = values.pop("languages", "").replace(",", " ").split()
    inputs = {}
    oov = {}
    doc_kw, align_kw, filt_kw = {}, {}, {}
    kw = {}
    try:
        for key, value in values.items():
            section, _, name = key.partition(".")
            if section == "input" and name:
                inputs[parse_lang(name)] = path_of(value)
            elif section == "oov" and name:
                oov[parse_lang(name)] = path_of(value)
            elif section == "docalign" and name == "mode":
                kw["mode"] = value
            elif section == "docalign" and name in _DOC_KEYS:
                doc_kw[name] = _DOC_KEYS[name](value)
            elif section == "sentalign" and name in _ALIGN_KEYS:
                align_kw[name] = _ALIGN_KEYS[name](value)
            elif section == "filter" and name:
                filt_kw[name] = value
            elif key == "subword.vocab_size":
                kw["vocab_size"] = int(value)
            elif key == "subword.model_dir":
                kw["subword_model_dir"] = path_of(value)
            elif key == "pivot.on_collision":
                kw["on_collision"] = value
            elif key == "audit.n":
                kw["audit_n"] = int(value)
            elif key in ("seed", "workers"):
                kw[key] = int(value)
            elif key == "translator":
                kind, sep, arg = value.partition(":")
                if kind in ("table", "words") and sep:
                    value = f"{kind}:{path_of(arg)}"
                kw["translator"] = value
            elif key in ("lenient", "html"):
                kw[key] = _bool(key, value)
            elif key == "output":
                kw["output"] = path_of(value)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        return PipelineConfig(
            languages=languages, inputs=inputs, output=kw.pop("output", base / "out"),
            docalign=DocAlignConfig(**doc_kw), align=AlignConfig(**align_kw),
            filter=FilterPolicy.from_mapping(filt_kw), oov_reference=oov, **kw)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
