"""Flat run configuration shared by every command.

A config file holds ``key = value`` lines; every key is also a command-line
flag of the same name (underscores or dashes). Flags override the file.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

from .alignment import AlignmentConfig
from .baseline import BaselineConfig
from .embedding import TrainerConfig
from .lexicon import PivotConfig, SimulationConfig
from .mtm import SimilarityThresholds
from .synth import CorpusSpec, LexiconSpec


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    seed: int = 1
    workers: int = 1
    # pivots
    top_k: int = 25000
    exclude_top: int = 100
    # simulation
    replicas: int = 100
    shuffle_tokens: bool = True
    # training
    dim: int = 300
    window: int = 5
    negative: int = 5
    min_count: int = 50
    epochs: int = 5
    initial_lr: float = 0.025
    # translation queries
    word_pair_tau: float = 0.97
    expansion_k: int = 10
    expansion_min_score: float = 0.9
    # retrieval and alignment
    max_tf: int = 3
    min_matches: int = 5
    sentence_tau: float = 0.4
    merge_gap_chars: int = 1000
    min_passage_chars: int = 150
    # baseline
    ngram: int = 5
    min_shared: int = 20
    max_gap_chunks: int = 50
    # synthetic data
    n_pivots: int = 1000
    synonym_pairs: int = 250
    alt_fraction: float = 0.1
    n_sources: int = 200
    n_suspects: int = 50
    n_cases: int = 100
    substitution: float = 0.0
    paragraphs: int = 8
    passage_paragraphs: int = 1

    def pivot(self) -> PivotConfig:
        return PivotConfig(self.top_k, self.exclude_top)

    def simulation(self) -> SimulationConfig:
        return SimulationConfig(self.replicas, self.shuffle_tokens, self.seed)

    def trainer(self) -> TrainerConfig:
        return TrainerConfig(self.dim, self.window, self.negative, self.min_count, self.epochs,
                             self.initial_lr, self.seed, self.workers)

    def thresholds(self) -> SimilarityThresholds:
        return SimilarityThresholds(self.word_pair_tau, self.expansion_k, self.expansion_min_score)

    def alignment(self) -> AlignmentConfig:
        return AlignmentConfig(self.sentence_tau, self.word_pair_tau, self.merge_gap_chars,
                               self.min_passage_chars)

    def baseline(self) -> BaselineConfig:
        return BaselineConfig(self.ngram, self.min_shared, self.max_gap_chunks)

    def lexicon_spec(self) -> LexiconSpec:
        return LexiconSpec(n_pivots=self.n_pivots, n_stop=self.exclude_top,
                           synonym_pairs=self.synonym_pairs, alt_fraction=self.alt_fraction,
                           seed=self.seed)

    def corpus_spec(self) -> CorpusSpec:
        return CorpusSpec(n_sources=self.n_sources, n_suspects=self.n_suspects,
                          n_cases=self.n_cases, substitution=self.substitution,
                          paragraphs=self.paragraphs, passage_paragraphs=self.passage_paragraphs,
                          exclude_top=self.exclude_top, seed=self.seed)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def dump(self) -> str:
        return "".join(f"{f.name} = {getattr(self, f.name)}\n" for f in fields(self))


FIELDS = {f.name: f for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    kind = FIELDS[key].type
    try:
        if kind == "bool":
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind}") from None
    return raw


def normalize_key(key: str) -> str:
    return key.strip().replace("-", "_")


def parse_config(text: str) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = line.split("=", 1)
        key = normalize_key(key)
        if key not in FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw.strip())
    return values


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    values = parse_config(Path(path).read_text(encoding="utf-8")) if path else {}
    for key, val in (overrides or {}).items():
        key = normalize_key(key)
        if key not in FIELDS:
            raise ConfigError(f"unknown key {key!r}")
        if val is not None:
            values[key] = _coerce(key, val) if isinstance(val, str) else val
    return RunConfig(**values)
