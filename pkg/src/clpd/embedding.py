"""CBOW word embeddings with negative sampling, trained from scratch.

The inner loop is compiled with numba. Randomness comes from the 48-bit style
linear congruential generator used by the original word2vec C code, carried
as a uint64 state, so single-worker runs are bit-reproducible per seed.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from functools import cached_property

import numba
import numpy as np

from .lexicon import SimulatedCorpus

log = logging.getLogger(__name__)

_MUL = np.uint64(25214903917)
_ADD = np.uint64(11)
_SHIFT = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


class EmptyVocabularyError(ValueError):
    pass


class TrainingDivergedError(RuntimeError):
    pass


class ModelFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass
class TrainerConfig:
    dim: int = 300
    window: int = 5
    negative: int = 5
    min_count: int = 50
    epochs: int = 5
    initial_lr: float = 0.025
    rng_seed: int = 1
    workers: int = 1

    def __post_init__(self):
        for name in ("dim", "window", "negative", "min_count", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.epochs < 0 or not self.initial_lr > 0:
            raise ValueError("epochs must be >= 0 and initial_lr > 0")


@dataclass
class Vocabulary:
    words: list[str]
    counts: np.ndarray
    index: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    @property
    def total_tokens(self) -> int:
        return int(self.counts.sum())


@dataclass
class TrainingStats:
    epochs_run: int = 0
    examples_seen: int = 0
    epoch_loss: list[float] = field(default_factory=list)
    seconds: float = 0.0


@dataclass
class EmbeddingModel:
    vocab: Vocabulary
    input_vectors: np.ndarray
    output_vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.input_vectors.shape[1]

    def __contains__(self, word: str) -> bool:
        return word in self.vocab.index

    def vector(self, word: str) -> np.ndarray:
        return self.input_vectors[self.vocab.index[word]]

    @cached_property
    def unit_vectors(self) -> np.ndarray:
        """Input vectors scaled to unit length (float64); zero rows stay zero."""
        v = self.input_vectors.astype(np.float64)
        norms = np.linalg.norm(v, axis=1, keepdims=True)
        return np.divide(v, norms, out=np.zeros_like(v), where=norms > 0)


def build_vocab(corpus: SimulatedCorpus, min_count: int) -> Vocabulary:
    """Words with corpus frequency >= min_count, most frequent first."""
    if len(corpus.ids) == 0:
        raise EmptyVocabularyError("empty corpus")
    counts = np.bincount(corpus.ids, minlength=len(corpus.words))
    kept = [(corpus.words[i], int(c)) for i, c in enumerate(counts) if c >= min_count]
    if not kept:
        raise EmptyVocabularyError(
            f"empty vocabulary: no word occurs {min_count} times (replicas below min_count?)")
    kept.sort(key=lambda p: (-p[1], p[0]))
    return Vocabulary([w for w, _ in kept], np.asarray([c for _, c in kept], dtype=np.int64))


# --------------------------------------------------------------------------
# compiled kernel


@numba.njit(cache=True)
def _next(state):
    state[0] = state[0] * _MUL + _ADD
    return float(state[0] >> _SHIFT) * _INV53


@numba.njit(cache=True)
def _log_sigmoid(x):
    if x >= 0:
        return -math.log1p(math.exp(-x))
    return x - math.log1p(math.exp(x))


@numba.njit(cache=True)
def _sigmoid(x):
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@numba.njit(cache=True)
def cbow_ns_step(syn0, syn1, ctx, n_ctx, targets, labels, n_targets, lr, neu1, neu1e):
    """One CBOW negative-sampling SGD step; returns the example loss.

    The hidden layer is the mean of ``syn0[ctx[:n_ctx]]``. Each target row of
    ``syn1`` is scored against it; label 1 marks the true center word. For
    distinct targets the ``syn1`` update is exactly ``-lr`` times the loss
    gradient; context rows move by ``-lr * n_ctx`` times theirs.
    """
    dim = syn0.shape[1]
    for d in range(dim):
        neu1[d] = 0.0
        neu1e[d] = 0.0
    for j in range(n_ctx):
        row = syn0[ctx[j]]
        for d in range(dim):
            neu1[d] += row[d]
    inv = 1.0 / n_ctx
    for d in range(dim):
        neu1[d] *= inv
    loss = 0.0
    for k in range(n_targets):
        out = syn1[targets[k]]
        f = 0.0
        for d in range(dim):
            f += neu1[d] * out[d]
        if labels[k] == 1:
            loss -= _log_sigmoid(f)
            g = 1.0 - _sigmoid(f)
        else:
            loss -= _log_sigmoid(-f)
            g = -_sigmoid(f)
        for d in range(dim):
            neu1e[d] += g * out[d]
        step = lr * g
        for d in range(dim):
            out[d] += step * neu1[d]
    # each context row takes the full hidden error, as in word2vec.c
    for j in range(n_ctx):
        row = syn0[ctx[j]]
        for d in range(dim):
            row[d] += lr * neu1e[d]
    return loss


@numba.njit(cache=True)
def _train_span(syn0, syn1, ids, offsets, line_lo, line_hi, window, negative, cum,
                lr0, total_words, words_before, stride, state):
    """Train over lines [line_lo, line_hi); returns (loss_sum, examples, words)."""
    dim = syn0.shape[1]
    neu1 = np.empty(dim, dtype=syn0.dtype)
    neu1e = np.empty(dim, dtype=syn0.dtype)
    ctx = np.empty(2 * window, dtype=np.int64)
    targets = np.empty(negative + 1, dtype=np.int64)
    labels = np.zeros(negative + 1, dtype=np.int64)
    labels[0] = 1
    min_lr = lr0 * 1e-4
    loss_sum = 0.0
    examples = 0
    words = 0
    for line in range(line_lo, line_hi):
        lo = offsets[line]
        hi = offsets[line + 1]
        for pos in range(lo, hi):
            progress = (words_before + words * stride) / total_words
            lr = lr0 * (1.0 - progress)
            if lr < min_lr:
                lr = min_lr
            words += 1
            b = 1 + int(_next(state) * window)
            n_ctx = 0
            for c in range(max(lo, pos - b), min(hi, pos + b + 1)):
                if c != pos:
                    ctx[n_ctx] = ids[c]
                    n_ctx += 1
            if n_ctx == 0:
                continue
            center = ids[pos]
            targets[0] = center
            n_t = 1
            for _ in range(negative):
                neg = np.searchsorted(cum, _next(state) * cum[-1], side="right")
                if neg >= len(cum):
                    neg = len(cum) - 1
                if neg == center:
                    continue
                targets[n_t] = neg
                n_t += 1
            loss_sum += cbow_ns_step(syn0, syn1, ctx, n_ctx, targets, labels, n_t, lr, neu1, neu1e)
            examples += 1
    return loss_sum, examples, words


@numba.njit(cache=True, parallel=True)
def _train_parallel(syn0, syn1, ids, offsets, bounds, window, negative, cum, lr0,
                    total_words, words_before, states, losses, counts):
    # hogwild: workers update the shared matrices without locks
    n = len(bounds) - 1
    for w in numba.prange(n):
        loss, ex, _ = _train_span(syn0, syn1, ids, offsets, bounds[w], bounds[w + 1], window,
                                  negative, cum, lr0, total_words, words_before, n, states[w])
        losses[w] = loss
        counts[w] = ex


# --------------------------------------------------------------------------


def negative_sampling_loss(syn0, syn1, ctx, targets, labels) -> float:
    """Reference loss for one example, in plain numpy."""
    h = syn0[np.asarray(ctx)].mean(axis=0)
    f = syn1[np.asarray(targets)] @ h
    signs = np.where(np.asarray(labels) == 1, 1.0, -1.0)
    return float(np.sum(np.logaddexp(0.0, -signs * f)))


def negative_sampling_grads(syn0, syn1, ctx, targets, labels):
    """Analytic gradients of :func:`negative_sampling_loss`.

    Returns ``(grad_syn0, grad_syn1)`` shaped like the inputs.
    """
    ctx = np.asarray(ctx)
    targets = np.asarray(targets)
    h = syn0[ctx].mean(axis=0)
    f = syn1[targets] @ h
    err = 1.0 / (1.0 + np.exp(-f)) - (np.asarray(labels) == 1)
    g0 = np.zeros_like(syn0)
    g1 = np.zeros_like(syn1)
    np.add.at(g1, targets, err[:, None] * h[None, :])
    dh = err @ syn1[targets]
    np.add.at(g0, ctx, dh / len(ctx))
    return g0, g1


def _init_vectors(n: int, dim: int, seed: int):
    rng = np.random.default_rng(seed)
    syn0 = ((rng.random((n, dim)) - 0.5) / dim).astype(np.float32)
    syn1 = np.zeros((n, dim), dtype=np.float32)
    return syn0, syn1


def _encode(corpus: SimulatedCorpus, vocab: Vocabulary):
    """Corpus ids remapped to vocabulary ids; out-of-vocabulary tokens dropped."""
    remap = np.asarray([vocab.index.get(w, -1) for w in corpus.words], dtype=np.int64)
    mapped = remap[corpus.ids] if len(corpus.ids) else np.zeros(0, np.int64)
    keep = mapped >= 0
    line_of = np.repeat(np.arange(len(corpus)), np.diff(corpus.offsets))
    lengths = np.bincount(line_of[keep], minlength=len(corpus))
    offsets = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
    return mapped[keep], offsets


def train_cbow(corpus: SimulatedCorpus, vocab: Vocabulary, cfg: TrainerConfig):
    """Train CBOW with negative sampling. Returns ``(model, stats)``."""
    import time

    t0 = time.perf_counter()
    ids, offsets = _encode(corpus, vocab)
    syn0, syn1 = _init_vectors(len(vocab), cfg.dim, cfg.rng_seed)
    cum = np.cumsum(vocab.counts.astype(np.float64) ** 0.75)
    n_lines = len(offsets) - 1
    n_words = len(ids)
    total = max(1, n_words * cfg.epochs)
    stats = TrainingStats()
    seed = np.uint64(cfg.rng_seed)
    state = np.array([seed], dtype=np.uint64)
    if cfg.workers > 1:
        numba.set_num_threads(min(cfg.workers, numba.config.NUMBA_NUM_THREADS))
        bounds = np.linspace(0, n_lines, cfg.workers + 1).astype(np.int64)
        states = np.array([[seed + np.uint64(w)] for w in range(cfg.workers)], dtype=np.uint64)
    for epoch in range(cfg.epochs):
        before = epoch * n_words
        if cfg.workers == 1:
            loss, examples, _ = _train_span(syn0, syn1, ids, offsets, 0, n_lines, cfg.window,
                                            cfg.negative, cum, cfg.initial_lr, total, before, 1,
                                            state)
        else:
            losses = np.zeros(cfg.workers)
            counts = np.zeros(cfg.workers, dtype=np.int64)
            _train_parallel(syn0, syn1, ids, offsets, bounds, cfg.window, cfg.negative, cum,
                            cfg.initial_lr, total, before, states, losses, counts)
            loss, examples = float(losses.sum()), int(counts.sum())
        mean = loss / max(examples, 1)
        if not math.isfinite(mean) or not np.isfinite(syn0).all():
            raise TrainingDivergedError(
                f"non-finite loss in epoch {epoch + 1}; lower initial_lr ({cfg.initial_lr})")
        stats.epochs_run += 1
        stats.examples_seen += examples
        stats.epoch_loss.append(mean)
        log.info("epoch %d: mean loss %.4f over %d examples", epoch + 1, mean, examples)
    stats.seconds = time.perf_counter() - t0
    return EmbeddingModel(vocab, syn0, syn1), stats


def context_prob(model: EmbeddingModel, word: str) -> np.ndarray:
    """Full softmax p(c | word) over the vocabulary (diagnostic only)."""
    if word not in model.vocab.index:
        raise KeyError(word)
    scores = model.output_vectors.astype(np.float64) @ model.vector(word).astype(np.float64)
    scores -= scores.max()
    p = np.exp(scores)
    return p / p.sum()


# --------------------------------------------------------------------------
# persistence: word2vec text format plus an .npz sidecar for counts and
# output vectors, which the text format cannot carry


def _sidecar(path) -> str:
    return os.fspath(path) + ".npz"


def save_model(model: EmbeddingModel, path) -> None:
    vecs = model.input_vectors
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{vecs.shape[0]} {vecs.shape[1]}\n")
        for word, row in zip(model.vocab.words, vecs):
            fh.write(word + " " + " ".join(f"{x:.9g}" for x in row.tolist()) + "\n")
    with open(_sidecar(path), "wb") as fh:
        np.savez(fh, counts=model.vocab.counts, output_vectors=model.output_vectors)


def load_model(path) -> EmbeddingModel:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2 or not all(h.isdigit() for h in header):
            raise ModelFormatError(1, "header must be '<vocab size> <dim>'")
        n, dim = int(header[0]), int(header[1])
        words: list[str] = []
        vecs = np.zeros((n, dim), dtype=np.float32)
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\n").split(" ")
            if len(words) >= n:
                raise ModelFormatError(lineno, f"more rows than the declared {n}")
            if len(parts) != dim + 1:
                raise ModelFormatError(lineno, f"expected {dim} values, got {len(parts) - 1}")
            try:
                vecs[len(words)] = [float(x) for x in parts[1:]]
            except ValueError as e:
                raise ModelFormatError(lineno, str(e)) from None
            words.append(parts[0])
    if len(words) != n:
        raise ModelFormatError(len(words) + 2, f"expected {n} rows, got {len(words)}")
    counts = np.zeros(n, dtype=np.int64)
    out = np.zeros((n, dim), dtype=np.float32)
    if os.path.exists(_sidecar(path)):
        with np.load(_sidecar(path)) as side:
            if side["output_vectors"].shape == (n, dim):
                counts, out = side["counts"], side["output_vectors"]
    return EmbeddingModel(Vocabulary(words, counts), vecs, out)
