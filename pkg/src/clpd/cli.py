"""Command-line entry point.

Exit codes: 0 success, 1 runtime failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import pipeline
from .config import FIELDS, ConfigError, RunConfig, load_config
from .embedding import EmptyVocabularyError, load_model, save_model
from .lexicon import (LexiconFormatError, format_contexts, parse_frequencies, parse_lexicon,
                      read_contexts, stoplist)
from .metrics import AnnotationFormatError
from .mtm import OOVError, top_k_neighbors
from .retrieval import Document, index_documents, load_documents
from .synth import make_corpus, make_lexicon, write_corpus, write_lexicon_files

log = logging.getLogger("clpd")


class UsageError(Exception):
    pass


def _config_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--out", help="output file or directory")
    p.add_argument("-v", "--verbose", action="store_true")
    group = p.add_argument_group("configuration keys (override the config file)")
    for name, f in FIELDS.items():
        group.add_argument("--" + name.replace("_", "-"), dest=name, default=None, metavar=f.type.upper())
    return p


def _cfg(args) -> RunConfig:
    overrides = {k: getattr(args, k) for k in FIELDS if getattr(args, k, None) is not None}
    return load_config(args.config, overrides)


def _need(path: str | Path) -> Path:
    path = Path(path)
    if not path.exists():
        raise UsageError(f"no such file or directory: {path}")
    return path


def _read(path) -> str:
    return _need(path).read_text(encoding="utf-8")


# --------------------------------------------------------------------------


def cmd_build(args) -> int:
    cfg = _cfg(args)
    lexicon = parse_lexicon(_read(args.lexicon))
    freqs = parse_frequencies(_read(args.freqs))
    contexts, pivots, skipped = pipeline.contexts_for(lexicon, freqs, cfg)
    out = Path(args.out or "contexts.txt")
    out.write_text(format_contexts(contexts), encoding="utf-8")
    print(f"pivots\t{len(pivots)}\ncontexts\t{len(contexts)}\nskipped\t{skipped}")
    return 0


def cmd_train(args) -> int:
    cfg = _cfg(args)
    contexts = read_contexts(_read(args.contexts))
    model, stats = pipeline.train_model(contexts, cfg)
    out = Path(args.out or "model.txt")
    save_model(model, out)
    sidecar = {"epochs": stats.epochs_run, "examples": stats.examples_seen,
               "loss": stats.epoch_loss, "seconds": stats.seconds, "vocabulary": len(model.vocab),
               "config": {k: getattr(cfg, k) for k in FIELDS}}
    Path(str(out) + ".stats.json").write_text(json.dumps(sidecar, indent=2), encoding="utf-8")
    print(f"vocabulary\t{len(model.vocab)}\nseconds\t{stats.seconds:.2f}")
    for i, loss in enumerate(stats.epoch_loss, 1):
        print(f"epoch {i}\tloss {loss:.4f}")
    return 0


def cmd_query(args) -> int:
    model = load_model(_need(args.model))
    try:
        for word, score in top_k_neighbors(model, args.word.casefold(), args.k):
            print(f"{word}\t{score:.6f}")
    except OOVError as e:
        print(str(e), file=sys.stderr)
        return 1
    return 0


def cmd_index(args) -> int:
    docs, warnings = load_documents(_need(args.sources))
    for w in warnings:
        log.warning(w)
    index = index_documents(docs)
    if args.out:
        Path(args.out).write_text(json.dumps(index.to_json()), encoding="utf-8")
    print(f"documents\t{len(index.doc_lengths)}\nterms\t{len(index)}")
    return 0


def _suspects(path) -> list[Document]:
    suspects, warnings = load_documents(_need(path))
    for w in warnings:
        log.warning(w)
    if not suspects:
        if warnings:
            raise RuntimeError("no suspect document could be read")
        raise UsageError(f"no suspect documents in {path}")
    return suspects


def _report_run(run: pipeline.DetectionRun, out: Path) -> None:
    pipeline.write_detections(run.detections, out)
    for doc_id in sorted(run.seconds):
        print(f"{doc_id}\t{len(run.detections[doc_id])} detections\t{run.seconds[doc_id]:.3f}s")


def cmd_detect(args) -> int:
    cfg = _cfg(args)
    model = load_model(_need(args.model))
    sources, warnings = load_documents(_need(args.sources))
    for w in warnings:
        log.warning(w)
    suspects = _suspects(args.suspects)
    stop = stoplist(parse_frequencies(_read(args.freqs)), cfg.pivot()) if args.freqs else set()
    det = pipeline.CollectionDetector(model, sources, stop, cfg)
    _report_run(pipeline.run_detector(det.detect, suspects, cfg.workers), Path(args.out or "detections"))
    return 0


def cmd_detect_pairs(args) -> int:
    cfg = _cfg(args)
    model = load_model(_need(args.model))
    pairs = []
    for sp, tp in pipeline.read_pairs_manifest(_need(args.manifest)):
        pairs.append((Document.from_text(sp.stem, _read(sp)), Document.from_text(tp.stem, _read(tp))))
    if not pairs:
        return 0
    dets = pipeline.detect_pairs(model, pairs, cfg)
    pipeline.write_detections(dets, Path(args.out or "detections"))
    for doc_id, d in sorted(dets.items()):
        print(f"{doc_id}\t{len(d)} detections")
    return 0


def cmd_baseline(args) -> int:
    cfg = _cfg(args)
    lexicon = parse_lexicon(_read(args.lexicon))
    sources, warnings = load_documents(_need(args.sources))
    for w in warnings:
        log.warning(w)
    run = pipeline.run_baseline(lexicon, sources, _suspects(args.suspects), cfg)
    _report_run(run, Path(args.out or "baseline-detections"))
    return 0


def cmd_evaluate(args) -> int:
    gold = pipeline.read_annotation_dir(_need(args.gold))
    dets = pipeline.read_annotation_dir(_need(args.detections))
    report, warnings = pipeline.evaluate(gold, dets)
    for w in warnings:
        log.warning(w)
    table = "precision\trecall\tgranularity\tplagdet\n" + report.row() + "\n"
    print(table, end="")
    if args.out:
        Path(args.out).write_text(table, encoding="utf-8")
    return 0


def cmd_sweep(args) -> int:
    cfg = _cfg(args)
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad --sizes {args.sizes!r}") from None
    if not sizes or sizes != sorted(sizes):
        raise UsageError("--sizes must be a non-empty ascending list")
    lexicon = parse_lexicon(_read(args.lexicon))
    freqs = parse_frequencies(_read(args.freqs))
    rows = pipeline.sweep(lexicon, freqs, sizes, _need(args.corpus), cfg)
    table = pipeline.format_sweep(rows)
    print(table, end="")
    if args.out:
        Path(args.out).write_text(table, encoding="utf-8")
    return 0


def cmd_synth(args) -> int:
    cfg = _cfg(args)
    out = Path(args.out or "synth")
    if args.lexicon:
        if not args.freqs:
            raise UsageError("--lexicon needs --freqs")
        lexicon = parse_lexicon(_read(args.lexicon))
        freqs = parse_frequencies(_read(args.freqs))
    else:
        lexicon, freqs, _ = make_lexicon(cfg.lexicon_spec())
        write_lexicon_files(lexicon, freqs, out)
    if not len(lexicon):
        raise UsageError("lexicon is empty")
    corpus = make_corpus(lexicon, freqs, cfg.corpus_spec())
    write_corpus(corpus, out)
    n_cases = sum(len(c) for c in corpus.cases.values())
    print(f"sources\t{len(corpus.sources)}\nsuspects\t{len(corpus.suspects)}\n"
          f"cases\t{n_cases}\nsubstituted\t{corpus.substituted}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _config_flags()
    parser = argparse.ArgumentParser(prog="clpd", description="Cross-lingual plagiarism detection "
                                     "with simulated multilingual word embeddings.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(fn=fn)
        return p

    p = add("build", cmd_build, "select pivots and write simulated contexts")
    p.add_argument("lexicon")
    p.add_argument("freqs")
    p = add("train", cmd_train, "replicate contexts and train the embedding model")
    p.add_argument("contexts")
    p = add("query", cmd_query, "nearest neighbours of a word")
    p.add_argument("model")
    p.add_argument("word")
    p.add_argument("-k", type=int, default=10)
    p = add("index", cmd_index, "index a source collection")
    p.add_argument("sources")
    p = add("detect", cmd_detect, "detect plagiarism against a source collection")
    p.add_argument("model")
    p.add_argument("sources")
    p.add_argument("suspects")
    p.add_argument("--freqs", help="frequency list; its top exclude_top words form the stoplist")
    p = add("detect-pairs", cmd_detect_pairs, "detect plagiarism in suspect/source pairs")
    p.add_argument("model")
    p.add_argument("manifest")
    p = add("baseline", cmd_baseline, "fingerprint baseline over lexicon-normalized text")
    p.add_argument("lexicon")
    p.add_argument("sources")
    p.add_argument("suspects")
    p = add("evaluate", cmd_evaluate, "precision, recall, granularity and plagdet")
    p.add_argument("gold")
    p.add_argument("detections")
    p = add("sweep", cmd_sweep, "build-train-detect-evaluate over vocabulary sizes")
    p.add_argument("lexicon")
    p.add_argument("freqs")
    p.add_argument("corpus", help="directory written by 'synth'")
    p.add_argument("--sizes", required=True, help="ascending comma-separated top_k values")
    p = add("synth", cmd_synth, "generate a synthetic corpus with gold annotations")
    p.add_argument("--lexicon")
    p.add_argument("--freqs")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    t0 = time.perf_counter()
    try:
        code = args.fn(args)
    except (UsageError, ConfigError, LexiconFormatError, AnnotationFormatError,
            EmptyVocabularyError, FileNotFoundError, ValueError) as e:
        print(f"clpd {args.command}: error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001
        print(f"clpd {args.command}: failed: {e}", file=sys.stderr)
        return 1
    log.info("%s finished in %.2fs", args.command, time.perf_counter() - t0)
    return code


if __name__ == "__main__":
    sys.exit(main())
