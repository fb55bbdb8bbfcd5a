"""Global-vectors training: AdaGrad on the weighted least-squares objective
over shuffled co-occurrence records."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .cooccur import CooccurrenceStore
from .embedding import EmbeddingSet
from .errors import DivergenceError, DomainError, TrainingError
from .vocab import Vocabulary


@dataclass
class GloveConfig:
    dim: int = 300
    lr: float = 0.25
    epochs: int = 100
    x_max: float = 100.0
    alpha: float = 0.75
    seed: int = 1
    threads: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not self.lr > 0:
            raise ValueError("lr must be positive")


@dataclass
class GloveModel:
    w_main: np.ndarray  # (V, dim) float32
    w_ctx: np.ndarray
    b_main: np.ndarray  # (V,) float32
    b_ctx: np.ndarray
    acc_wm: np.ndarray = field(repr=False, default=None)  # AdaGrad accumulators
    acc_wc: np.ndarray = field(repr=False, default=None)
    acc_bm: np.ndarray = field(repr=False, default=None)
    acc_bc: np.ndarray = field(repr=False, default=None)


def init_glove_model(n_words: int, config: GloveConfig) -> GloveModel:
    """All parameters uniform in [-0.5/dim, 0.5/dim); accumulators start at 1."""
    rng = np.random.default_rng(config.seed)
    dim = config.dim

    def uniform(*shape):
        return (rng.random(shape, dtype=np.float32) - np.float32(0.5)) / np.float32(dim)

    return GloveModel(
        w_main=uniform(n_words, dim),
        w_ctx=uniform(n_words, dim),
        b_main=uniform(n_words),
        b_ctx=uniform(n_words),
        acc_wm=np.ones((n_words, dim), dtype=np.float64),
        acc_wc=np.ones((n_words, dim), dtype=np.float64),
        acc_bm=np.ones(n_words, dtype=np.float64),
        acc_bc=np.ones(n_words, dtype=np.float64),
    )


def glove_weight(x: float, x_max: float, alpha: float) -> float:
    """(x / x_max)^alpha below the cap, 1 at and above it."""
    if x < 0:
        raise ValueError("x must be >= 0")
    if x < x_max:
        return (x / x_max) ** alpha
    return 1.0


def glove_loss(model: GloveModel, record: tuple[int, int, float],
               x_max: float = 100.0, alpha: float = 0.75) -> float:
    """Single-record loss f(x) (wi.wj + bi + bj - ln x)^2."""
    i, j, x = record
    if not x > 0:
        raise DomainError(f"co-occurrence weight must be positive, got {x}")
    dim = model.w_main.shape[1]
    gwi = np.empty(dim, dtype=np.float64)
    gwj = np.empty(dim, dtype=np.float64)
    loss, _ = kernels.glove_loss_and_grads(
        model.w_main[i], model.w_ctx[j],
        float(model.b_main[i]), float(model.b_ctx[j]),
        float(x), float(x_max), float(alpha), gwi, gwj,
    )
    return float(loss)


def _check_finite(model: GloveModel, epoch: int) -> None:
    for arr in (model.w_main, model.w_ctx, model.b_main, model.b_ctx):
        if not np.isfinite(arr).all():
            raise DivergenceError(
                f"non-finite parameters after epoch {epoch} (lr too high?)", epoch=epoch
            )


def train_glove(
    store: CooccurrenceStore, vocab: Vocabulary, config: GloveConfig | None = None
) -> EmbeddingSet:
    """AdaGrad over shuffled records; word vector = main + context row."""
    config = config or GloveConfig()
    if len(store) == 0:
        raise TrainingError("co-occurrence store is empty")
    store.check_vocab(vocab)
    n_words = len(vocab)
    model = init_glove_model(n_words, config)
    n_rec = len(store)
    epoch_losses: list[float] = []
    n_threads = max(1, config.threads)
    for epoch in range(config.epochs):
        order = store.shuffled_order(kernels.mix64(config.seed, epoch) % (2**63))
        if n_threads == 1:
            loss_sum = kernels.glove_epoch(
                model.w_main, model.w_ctx, model.b_main, model.b_ctx,
                model.acc_wm, model.acc_wc, model.acc_bm, model.acc_bc,
                store.i, store.j, store.x, order, 0, n_rec,
                config.lr, config.x_max, config.alpha,
            )
        else:
            bounds = np.linspace(0, n_rec, n_threads + 1, dtype=np.int64)
            results = [0.0] * n_threads
            def work(w: int) -> None:
                results[w] = kernels.glove_epoch(
                    model.w_main, model.w_ctx, model.b_main, model.b_ctx,
                    model.acc_wm, model.acc_wc, model.acc_bm, model.acc_bc,
                    store.i, store.j, store.x, order,
                    int(bounds[w]), int(bounds[w + 1]),
                    config.lr, config.x_max, config.alpha,
                )
            threads = [threading.Thread(target=work, args=(w,)) for w in range(n_threads)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
            loss_sum = sum(results)
        _check_finite(model, epoch + 1)
        epoch_losses.append(float(loss_sum) / n_rec)
    vectors = (model.w_main + model.w_ctx).astype(np.float32)
    return EmbeddingSet(
        words=vocab.words,
        vectors=vectors,
        algorithm="glove",
        metadata={
            "dim": config.dim,
            "lr": config.lr,
            "epochs": config.epochs,
            "x_max": config.x_max,
            "alpha": config.alpha,
            "seed": config.seed,
            "ws": store.ws,
            "vocab_hash": store.vocab_hash,
            "epoch_losses": epoch_losses,
        },
    )
