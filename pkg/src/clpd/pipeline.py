"""End-to-end building blocks behind the command-line interface."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import metrics
from .alignment import PassagePair, detect_collection, detect_pairwise
from .baseline import Baseline
from .config import RunConfig
from .embedding import EmbeddingModel, TrainingStats, build_vocab, train_cbow
from .lexicon import (FrequencyList, Lexicon, build_contexts, select_pivots,
                      simulate_corpus, stoplist)
from .retrieval import (Document, expand_query, extract_keywords, index_documents,
                        load_documents, retrieve_candidates)

log = logging.getLogger(__name__)


def contexts_for(lexicon: Lexicon, freqs: FrequencyList, cfg: RunConfig):
    pivots = select_pivots(freqs, cfg.pivot())
    contexts, skipped = build_contexts(lexicon, pivots)
    return contexts, pivots, skipped


def train_model(contexts: list[list[str]], cfg: RunConfig) -> tuple[EmbeddingModel, TrainingStats]:
    if cfg.replicas < cfg.min_count:
        raise ValueError(f"replicas={cfg.replicas} below min_count={cfg.min_count}: "
                         "every simulated word would fall out of the vocabulary")
    corpus = simulate_corpus(contexts, cfg.simulation())
    vocab = build_vocab(corpus, cfg.min_count)
    return train_cbow(corpus, vocab, cfg.trainer())


def to_detections(passages: Iterable[PassagePair]) -> list[metrics.Case]:
    return [metrics.Case(metrics.CharRegion(p.suspect_id, p.suspect_offset, p.suspect_length),
                         metrics.CharRegion(p.source_id, p.source_offset, p.source_length))
            for p in passages if p.suspect_length > 0 and p.source_length > 0]


class CollectionDetector:
    """Candidate retrieval by query expansion followed by sentence alignment."""

    def __init__(self, model: EmbeddingModel, sources: Sequence[Document], stop: set[str],
                 cfg: RunConfig):
        self.model = model
        self.cfg = cfg
        self.stop = stop
        self.sources = {d.id: d for d in sources}
        self.index = index_documents(sources)
        self._thresholds = cfg.thresholds()
        self._align = cfg.alignment()

    def candidates(self, suspect: Document):
        keywords = extract_keywords(suspect, self.stop, self.cfg.max_tf)
        expanded = expand_query(keywords, self.model, self._thresholds)
        return retrieve_candidates(self.index, expanded, self.cfg.min_matches)

    def detect(self, suspect: Document) -> list[PassagePair]:
        return detect_collection(suspect, self.candidates(suspect), self.sources, self._align)


@dataclass
class DetectionRun:
    detections: dict[str, list[metrics.Case]] = field(default_factory=dict)
    seconds: dict[str, float] = field(default_factory=dict)


def _timed(fn, doc):
    t0 = time.perf_counter()
    out = fn(doc)
    return doc.id, out, time.perf_counter() - t0


def run_detector(detect, suspects: Sequence[Document], workers: int = 1) -> DetectionRun:
    run = DetectionRun()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda d: _timed(detect, d), suspects))
    else:
        results = [_timed(detect, d) for d in suspects]
    for doc_id, passages, secs in sorted(results, key=lambda r: r[0]):
        run.detections[doc_id] = to_detections(passages)
        run.seconds[doc_id] = secs
    return run


def detect_pairs(model: EmbeddingModel, pairs: Sequence[tuple[Document, Document]],
                 cfg: RunConfig) -> dict[str, list[metrics.Case]]:
    align = cfg.alignment()
    out: dict[str, list[metrics.Case]] = {}
    for suspect, source in pairs:
        out.setdefault(suspect.id, []).extend(to_detections(detect_pairwise(suspect, source, model, align)))
    return out


def read_pairs_manifest(path: Path) -> list[tuple[Path, Path]]:
    out = []
    base = path.parent
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected suspect_path<TAB>source_path")
        out.append(tuple(p if p.is_absolute() else base / p for p in map(Path, parts)))
    return out


def write_detections(run: dict[str, list[metrics.Case]], out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for doc_id, dets in run.items():
        (out_dir / f"{doc_id}.xml").write_text(metrics.write_detections(doc_id, dets), encoding="utf-8")


def read_annotation_dir(directory: Path) -> dict[str, list[metrics.Case]]:
    out = {}
    for path in sorted(Path(directory).glob("*.xml")):
        ref, cases = metrics.parse_annotations(path.read_text(encoding="utf-8"))
        out[ref] = cases
    return out


def evaluate(gold: dict[str, list[metrics.Case]],
             detections: dict[str, list[metrics.Case]]) -> tuple[metrics.MetricsReport, list[str]]:
    warnings = [f"no detections file for {d}" for d in sorted(set(gold) - set(detections))]
    warnings += [f"detections for unknown suspect {d}" for d in sorted(set(detections) - set(gold))]
    cases = [c for d in sorted(gold) for c in gold[d]]
    dets = [c for d in sorted(detections) for c in detections[d]]
    return metrics.plagdet(cases, dets), warnings


def load_corpus_dir(corpus: Path):
    """Sources, suspects and gold annotations of a ``synth`` output directory."""
    corpus = Path(corpus)
    sources, w1 = load_documents(corpus / "src")
    suspects, w2 = load_documents(corpus / "susp")
    gold = read_annotation_dir(corpus / "gold")
    for w in w1 + w2:
        log.warning(w)
    return sources, suspects, gold


def run_baseline(lexicon: Lexicon, sources: Sequence[Document], suspects: Sequence[Document],
                 cfg: RunConfig) -> DetectionRun:
    base = Baseline(sources, lexicon, cfg.baseline())
    return run_detector(base.detect, suspects, cfg.workers)


def sweep(lexicon: Lexicon, freqs: FrequencyList, sizes: Sequence[int], corpus: Path,
          cfg: RunConfig) -> list[dict]:
    """Build, train, detect and evaluate once per vocabulary size."""
    if list(sizes) != sorted(sizes):
        raise ValueError("sizes must be ascending")
    sources, suspects, gold = load_corpus_dir(corpus)
    stop = stoplist(freqs, cfg.pivot())
    rows = []
    for size in sizes:
        t0 = time.perf_counter()
        try:
            run_cfg = cfg.replace(top_k=size)
            contexts, _, _ = contexts_for(lexicon, freqs, run_cfg)
            model, _ = train_model(contexts, run_cfg)
            det = CollectionDetector(model, sources, stop, run_cfg)
            run = run_detector(det.detect, suspects, cfg.workers)
            report, _ = evaluate(gold, run.detections)
            rows.append({"size": size, "report": report, "seconds": time.perf_counter() - t0,
                         "error": ""})
        except Exception as e:  # noqa: BLE001 - a failed size is reported, the sweep goes on
            log.error("size %d failed: %s", size, e)
            rows.append({"size": size, "report": None, "seconds": time.perf_counter() - t0,
                         "error": str(e)})
    return rows


def format_sweep(rows: list[dict]) -> str:
    lines = ["size\tprecision\trecall\tgranularity\tplagdet\tseconds"]
    for r in rows:
        if r["report"] is None:
            lines.append(f"{r['size']}\tFAILED\t\t\t\t{r['seconds']:.2f}\t# {r['error']}")
        else:
            lines.append(f"{r['size']}\t{r['report'].row()}\t{r['seconds']:.2f}")
    return "\n".join(lines) + "\n"
