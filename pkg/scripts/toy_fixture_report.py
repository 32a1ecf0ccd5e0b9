#!/usr/bin/env python3
"""Translation retrieval on the toy fixture for several replication factors.

    python3 scripts/toy_fixture_report.py --replicas 1 10 50 100 --seeds 1 2 3
"""

import argparse
import time

from clpd.config import RunConfig
from clpd.embedding import build_vocab, train_cbow
from clpd.lexicon import SimulationConfig, simulate_corpus
from clpd.mtm import top_k_neighbors
from clpd.synth import toy_fixture


def evaluate(model, fixture):
    sets = fixture.context_sets()
    top1 = sum(p in model.vocab.index and top_k_neighbors(model, p, 1)[0][0] in m
               for p, m in sets.items()) / len(sets)
    syn = sum(b in {w for w, _ in top_k_neighbors(model, a, 5)} for a, b in fixture.synonym_pairs
              if a in model.vocab.index and b in model.vocab.index)
    return top1, syn / max(1, len(fixture.synonym_pairs))


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--replicas", type=int, nargs="+", default=[1, 10, 100])
    ap.add_argument("--seeds", type=int, nargs="+", default=[1])
    ap.add_argument("--fixture-seed", type=int, default=0)
    ap.add_argument("--show", type=int, default=3, help="pivots whose neighbours are printed")
    args = ap.parse_args()

    fixture = toy_fixture(seed=args.fixture_seed)
    print("replicas\tseed\ttop1\tsynonym_top5\tseconds")
    last = None
    for n in args.replicas:
        for seed in args.seeds:
            t0 = time.perf_counter()
            corpus = simulate_corpus(fixture.contexts, SimulationConfig(replicas=n, rng_seed=seed))
            cfg = RunConfig(seed=seed, min_count=min(50, n))
            model, _ = train_cbow(corpus, build_vocab(corpus, cfg.min_count), cfg.trainer())
            top1, syn = evaluate(model, fixture)
            print(f"{n}\t{seed}\t{top1:.3f}\t{syn:.3f}\t{time.perf_counter() - t0:.1f}")
            last = model
    for pivot in fixture.pivots[:args.show]:
        neigh = ", ".join(f"{w} {s:.3f}" for w, s in top_k_neighbors(last, pivot, 6))
        print(f"\n{pivot}: {neigh}\n  planted: {', '.join(sorted(fixture.context_sets()[pivot]))}")


if __name__ == "__main__":
    main()
