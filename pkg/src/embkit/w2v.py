"""CBoW (hierarchical softmax) and skip-gram (negative sampling) training
with character n-gram subword rows."""

from __future__ import annotations

import heapq
import threading
from dataclasses import dataclass

import numpy as np

from . import kernels
from .embedding import EmbeddingSet
from .errors import ConfigError, DivergenceError, StructureError, TrainingError
from .pipeline import CleanCorpus
from .subword import SubwordConfig, constituent_rows
from .vocab import Vocabulary, subsample_keep_prob

LR_FLOOR = 1e-4
UNIGRAM_POWER = 0.75


@dataclass
class W2vConfig:
    mode: str = "sg"  # "cbow" or "sg"
    dim: int = 300
    lr: float = 0.25
    epochs: int = 100
    ws: int = 7
    negatives: int = 20
    minn: int = 2
    maxn: int = 7
    n_buckets: int = 2_000_000
    subsample_t: float = 1e-4
    seed: int = 1
    threads: int = 1
    dynamic_window: bool = True
    table_size: int = 10_000_000

    def __post_init__(self):
        if self.mode not in ("cbow", "sg"):
            raise ConfigError(f"mode must be 'cbow' or 'sg', got {self.mode!r}")
        if self.dim < 1 or self.ws < 1 or self.epochs < 1:
            raise ConfigError("dim, ws and epochs must be >= 1")
        if self.mode == "sg" and self.negatives < 1:
            raise ConfigError("sg mode needs negatives >= 1")

    def subword(self) -> SubwordConfig:
        return SubwordConfig(minn=self.minn, maxn=self.maxn, n_buckets=self.n_buckets)


@dataclass
class HuffmanTree:
    """Per-word code bits and inner-node paths of equal length."""

    codes: list[np.ndarray]  # int8 bit arrays, root to leaf
    paths: list[np.ndarray]  # int32 inner-node indices, root to leaf
    n_inner: int

    def code_length(self, word_id: int) -> int:
        return len(self.codes[word_id])

    def flattened(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
        offsets = np.zeros(len(self.codes) + 1, dtype=np.int64)
        for wid, code in enumerate(self.codes):
            offsets[wid + 1] = offsets[wid] + len(code)
        nodes = np.concatenate(self.paths).astype(np.int32) if self.paths else np.zeros(0, np.int32)
        bits = np.concatenate(self.codes).astype(np.int8) if self.codes else np.zeros(0, np.int8)
        max_code = max((len(c) for c in self.codes), default=0)
        return nodes, bits, offsets, max_code


@dataclass
class UnigramTable:
    """Sampling table with P(id) proportional to count^0.75."""

    table: np.ndarray  # int32
    size: int


def build_huffman(vocab: Vocabulary) -> HuffmanTree:
    """Standard Huffman construction over counts; ties pop lower ids first."""
    n = len(vocab)
    if n < 2:
        raise StructureError("Huffman coding needs a vocabulary of at least 2 words")
    # heap entries: (count, node_id); node ids < n are leaves, >= n internal
    heap = [(int(c), wid) for wid, c in enumerate(vocab.counts)]
    heapq.heapify(heap)
    parent = np.zeros(2 * n - 1, dtype=np.int64)
    branch = np.zeros(2 * n - 1, dtype=np.int8)
    next_internal = n
    while len(heap) > 1:
        c1, n1 = heapq.heappop(heap)
        c2, n2 = heapq.heappop(heap)
        parent[n1] = next_internal
        parent[n2] = next_internal
        branch[n1] = 0
        branch[n2] = 1
        heapq.heappush(heap, (c1 + c2, next_internal))
        next_internal += 1
    root = next_internal - 1
    codes: list[np.ndarray] = []
    paths: list[np.ndarray] = []
    for wid in range(n):
        bits: list[int] = []
        nodes: list[int] = []
        node = wid
        while node != root:
            bits.append(int(branch[node]))
            nodes.append(int(parent[node]) - n)  # inner-node row index
            node = int(parent[node])
        bits.reverse()
        nodes.reverse()
        codes.append(np.array(bits, dtype=np.int8))
        paths.append(np.array(nodes, dtype=np.int32))
    return HuffmanTree(codes=codes, paths=paths, n_inner=n - 1)


def hs_word_probability(
    model: EmbeddingSet, tree: HuffmanTree, hidden: np.ndarray, word: int
) -> float:
    """Probability of `word` under the hierarchical softmax given `hidden`.

    Computed from the same path objective the trainer optimizes, so the
    probabilities over the whole vocabulary sum to one by construction.
    """
    if model.output is None:
        raise ValueError("embedding set carries no inner-node vectors")
    hidden = np.asarray(hidden, dtype=np.float64)
    if hidden.shape != (model.output.shape[1],):
        raise ValueError(
            f"hidden vector has shape {hidden.shape}, expected ({model.output.shape[1]},)"
        )
    nodes = tree.paths[word]
    bits = tree.codes[word]
    grad_h = np.empty_like(hidden)
    grad_inner = np.empty((len(nodes), hidden.shape[0]), dtype=np.float64)
    loss = kernels.hs_loss_and_grads(
        hidden, model.output, nodes, bits, grad_h, grad_inner
    )
    return float(np.exp(-loss))


def build_unigram_table(vocab: Vocabulary, size: int) -> UnigramTable:
    """Allocate table slots proportionally to count^0.75 (largest remainder)."""
    n = len(vocab)
    if size < n:
        raise ValueError(f"table size {size} smaller than vocabulary {n}")
    weights = vocab.counts.astype(np.float64) ** UNIGRAM_POWER
    exact = weights / weights.sum() * size
    alloc = np.floor(exact).astype(np.int64)
    shortfall = size - int(alloc.sum())
    if shortfall > 0:
        remainders = exact - alloc
        # largest remainders win; ties go to lower ids
        order = np.lexsort((np.arange(n), -remainders))
        alloc[order[:shortfall]] += 1
    table = np.repeat(np.arange(n, dtype=np.int32), alloc)
    return UnigramTable(table=table, size=size)


def _prepare_corpus(corpus: CleanCorpus, vocab: Vocabulary, config: W2vConfig):
    index = {w: wid for w, _, wid in vocab.entries}
    token_list: list[int] = []
    offsets = [0]
    max_sent = 1
    for sentence in corpus.sentences:
        ids = [index[t] for t in sentence if t in index]
        if ids:
            token_list.extend(ids)
            offsets.append(len(token_list))
            max_sent = max(max_sent, len(ids))
    tokens = np.array(token_list, dtype=np.int32)
    offset_arr = np.array(offsets, dtype=np.int64)
    return tokens, offset_arr, max_sent


def _constituent_arrays(vocab: Vocabulary, config: W2vConfig):
    cfg = config.subword()
    n = len(vocab)
    const_ids: list[int] = []
    const_offsets = np.zeros(n + 1, dtype=np.int64)
    for word, _, wid in vocab.entries:
        rows = constituent_rows(word, wid, n, cfg)
        const_ids.extend(rows)
        const_offsets[wid + 1] = len(const_ids)
    return np.array(const_ids, dtype=np.int32), const_offsets


def _keep_probs(vocab: Vocabulary, config: W2vConfig) -> np.ndarray:
    probs = np.empty(len(vocab), dtype=np.float64)
    for word, count, wid in vocab.entries:
        probs[wid] = subsample_keep_prob(count, vocab.total_tokens, config.subsample_t)
    return probs


def _init_input_matrix(n_rows: int, config: W2vConfig) -> np.ndarray:
    rng = np.random.default_rng(config.seed)
    mat = rng.random((n_rows, config.dim), dtype=np.float32)
    return (mat - np.float32(0.5)) / np.float32(config.dim)


def _check_finite(arrays, epoch: int) -> None:
    for arr in arrays:
        if not np.isfinite(arr).all():
            raise DivergenceError(f"non-finite parameters after epoch {epoch}", epoch=epoch)


def _run_epochs(worker_fn, n_sentences: int, offsets: np.ndarray, config: W2vConfig):
    """Drive epochs, sequentially or hogwild over sentence ranges.

    worker_fn(epoch, s_start, s_stop, processed_base, total_planned, state)
    must return (loss_sum, n_updates, scanned).
    """
    n_threads = max(1, config.threads)
    n_threads = min(n_threads, n_sentences) or 1
    bounds = np.linspace(0, n_sentences, n_threads + 1, dtype=np.int64)
    slice_tokens = [
        int(offsets[bounds[w + 1]] - offsets[bounds[w]]) for w in range(n_threads)
    ]
    epoch_losses: list[float] = []
    processed = [0] * n_threads
    for epoch in range(config.epochs):
        stats = [(0.0, 0, 0)] * n_threads

        def work(w: int) -> None:
            state = kernels.new_state(config.seed, epoch, w)
            planned = max(1, config.epochs * slice_tokens[w])
            stats[w] = worker_fn(
                epoch, int(bounds[w]), int(bounds[w + 1]), processed[w], planned, state
            )

        if n_threads == 1:
            work(0)
        else:
            threads = [threading.Thread(target=work, args=(w,)) for w in range(n_threads)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
        for w in range(n_threads):
            processed[w] += stats[w][2]
        loss_sum = sum(s[0] for s in stats)
        n_updates = sum(s[1] for s in stats)
        epoch_losses.append(loss_sum / n_updates if n_updates else 0.0)
    return epoch_losses


def _common_metadata(config: W2vConfig, vocab: Vocabulary, epoch_losses: list[float]) -> dict:
    return {
        "dim": config.dim,
        "lr": config.lr,
        "epochs": config.epochs,
        "ws": config.ws,
        "minn": config.minn,
        "maxn": config.maxn,
        "n_buckets": config.n_buckets,
        "subsample_t": config.subsample_t,
        "seed": config.seed,
        "dynamic_window": config.dynamic_window,
        "vocab_hash": vocab.checksum(),
        "epoch_losses": epoch_losses,
    }


def train_sg(corpus: CleanCorpus, vocab: Vocabulary, config: W2vConfig) -> EmbeddingSet:
    """Skip-gram with negative sampling over subword-composed input vectors."""
    if config.mode != "sg":
        raise ConfigError("train_sg requires mode='sg'")
    if len(vocab) == 0 or corpus.token_count == 0:
        raise TrainingError("empty vocabulary or corpus")
    tokens, offsets, max_sent = _prepare_corpus(corpus, vocab, config)
    if tokens.shape[0] == 0:
        raise TrainingError("no in-vocabulary tokens in corpus")
    const_ids, const_offsets = _constituent_arrays(vocab, config)
    keep_prob = _keep_probs(vocab, config)
    unigram = build_unigram_table(vocab, max(config.table_size, len(vocab)))
    vec_in = _init_input_matrix(len(vocab) + config.n_buckets, config)
    vec_out = np.zeros((len(vocab), config.dim), dtype=np.float32)

    def worker(epoch, s_start, s_stop, processed_base, planned, state):
        return kernels.sg_epoch(
            tokens, offsets, s_start, s_stop,
            const_ids, const_offsets, keep_prob,
            unigram.table, config.negatives,
            vec_in, vec_out,
            config.ws, config.dynamic_window,
            config.lr, LR_FLOOR, processed_base, planned,
            state, max_sent,
        )

    epoch_losses = _run_epochs(worker, offsets.shape[0] - 1, offsets, config)
    _check_finite((vec_in, vec_out), config.epochs)
    meta = _common_metadata(config, vocab, epoch_losses)
    meta["negatives"] = config.negatives
    meta["table_size"] = unigram.size
    return EmbeddingSet(
        words=vocab.words,
        vectors=vec_in,
        algorithm="sg",
        n_buckets=config.n_buckets,
        minn=config.minn,
        maxn=config.maxn,
        output=vec_out,
        metadata=meta,
    )


def train_cbow(corpus: CleanCorpus, vocab: Vocabulary, config: W2vConfig) -> EmbeddingSet:
    """CBoW with hierarchical softmax over mean-composed context vectors."""
    if config.mode != "cbow":
        raise ConfigError("train_cbow requires mode='cbow'")
    if len(vocab) == 0 or corpus.token_count == 0:
        raise TrainingError("empty vocabulary or corpus")
    tokens, offsets, max_sent = _prepare_corpus(corpus, vocab, config)
    if tokens.shape[0] == 0:
        raise TrainingError("no in-vocabulary tokens in corpus")
    const_ids, const_offsets = _constituent_arrays(vocab, config)
    keep_prob = _keep_probs(vocab, config)
    tree = build_huffman(vocab)
    path_nodes, code_bits, code_offsets, max_code = tree.flattened()
    vec_in = _init_input_matrix(len(vocab) + config.n_buckets, config)
    vec_inner = np.zeros((tree.n_inner, config.dim), dtype=np.float32)

    def worker(epoch, s_start, s_stop, processed_base, planned, state):
        return kernels.cbow_epoch(
            tokens, offsets, s_start, s_stop,
            const_ids, const_offsets, keep_prob,
            path_nodes, code_bits, code_offsets,
            vec_in, vec_inner,
            config.ws, config.dynamic_window,
            config.lr, LR_FLOOR, processed_base, planned,
            state, max_sent, max_code,
        )

    epoch_losses = _run_epochs(worker, offsets.shape[0] - 1, offsets, config)
    _check_finite((vec_in, vec_inner), config.epochs)
    return EmbeddingSet(
        words=vocab.words,
        vectors=vec_in,
        algorithm="cbow",
        n_buckets=config.n_buckets,
        minn=config.minn,
        maxn=config.maxn,
        output=vec_inner,
        metadata=_common_metadata(config, vocab, epoch_losses),
    )


def train(corpus: CleanCorpus, vocab: Vocabulary, config: W2vConfig) -> EmbeddingSet:
    if config.mode == "sg":
        return train_sg(corpus, vocab, config)
    return train_cbow(corpus, vocab, config)
