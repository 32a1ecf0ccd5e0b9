from types import SimpleNamespace

import numpy as np
import pytest

from clpd.embedding import TrainerConfig, build_vocab, train_cbow
from clpd.lexicon import SimulationConfig, parse_lexicon, simulate_corpus
from clpd.synth import toy_fixture


@pytest.fixture(scope="session")
def toy():
    return toy_fixture(seed=0)


@pytest.fixture(scope="session")
def toy_model(toy):
    """The standard toy model: 200 pivots x 4 languages, n=100, default trainer."""
    corpus = simulate_corpus(toy.contexts, SimulationConfig(replicas=100, rng_seed=7))
    vocab = build_vocab(corpus, 50)
    model, stats = train_cbow(corpus, vocab, TrainerConfig(rng_seed=7))
    return model, stats


@pytest.fixture
def man_lexicon():
    return parse_lexicon("man\tfr\thomme\nman\tde\tmann\nman\tes\thombre\n")


def tiny_model(words, vectors):
    from clpd.embedding import EmbeddingModel, Vocabulary

    vectors = np.asarray(vectors, dtype=np.float32)
    return EmbeddingModel(Vocabulary(list(words), np.full(len(words), 100)), vectors,
                          np.zeros_like(vectors))


@pytest.fixture(scope="session")
def small_world():
    """A scaled-down synthetic corpus with a model trained on its lexicon."""
    from clpd.config import RunConfig
    from clpd.pipeline import contexts_for, train_model
    from clpd.retrieval import Document
    from clpd.synth import make_corpus, make_lexicon

    cfg = RunConfig(dim=64, n_pivots=400, synonym_pairs=60, alt_fraction=0.1, n_sources=40,
                    n_suspects=10, n_cases=20, top_k=500, substitution=0.0)
    lexicon, freqs, pairs = make_lexicon(cfg.lexicon_spec())
    contexts, _, _ = contexts_for(lexicon, freqs, cfg)
    model, _ = train_model(contexts, cfg)
    corpus = make_corpus(lexicon, freqs, cfg.corpus_spec())
    sources = [Document.from_text(d.id, d.text, d.language) for d in corpus.sources]
    suspects = [Document.from_text(d.id, d.text, d.language) for d in corpus.suspects]
    return SimpleNamespace(cfg=cfg, lexicon=lexicon, freqs=freqs, pairs=pairs, model=model,
                           corpus=corpus, sources=sources, suspects=suspects)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)
