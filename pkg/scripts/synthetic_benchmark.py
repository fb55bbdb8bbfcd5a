#!/usr/bin/env python3
"""Train all three models on a synthetic two-topic corpus and report how well
each separates the topics (mean intra-topic cosine minus mean inter-topic
cosine), along with the epoch loss trajectory."""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from embkit.cooccur import accumulate_cooccurrence
from embkit.glove import GloveConfig, train_glove
from embkit.pipeline import CleanCorpus
from embkit.vocab import build_vocab
from embkit.w2v import W2vConfig, train_cbow, train_sg


def build_corpus(n_sentences: int, words_per_topic: int, sentence_len: int, seed: int):
    rng = np.random.default_rng(seed)

    def make_words(letters: str, count: int) -> list[str]:
        words: set[str] = set()
        while len(words) < count:
            length = int(rng.integers(3, 7))
            words.add("".join(rng.choice(list(letters), size=length)))
        return sorted(words)

    topic_a = make_words("abcdefghijklm", words_per_topic)
    topic_b = make_words("nopqrstuvwxyz", words_per_topic)
    sentences = []
    for k in range(n_sentences):
        pool = topic_a if k % 2 == 0 else topic_b
        picks = rng.integers(0, len(pool), size=sentence_len)
        sentences.append([pool[int(i)] for i in picks])
    return CleanCorpus.from_sentences(sentences), topic_a, topic_b


def separation(emb, topic_a, topic_b) -> float:
    def unit_rows(words):
        mat = np.stack([emb.word_vector(w) for w in words])
        return mat / np.linalg.norm(mat, axis=1, keepdims=True)

    va, vb = unit_rows(topic_a), unit_rows(topic_b)

    def mean_offdiag(sim):
        n = sim.shape[0]
        return (sim.sum() - np.trace(sim)) / (n * (n - 1))

    intra = 0.5 * (mean_offdiag(va @ va.T) + mean_offdiag(vb @ vb.T))
    return float(intra - (va @ vb.T).mean())


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sentences", type=int, default=2000)
    parser.add_argument("--words-per-topic", type=int, default=50)
    parser.add_argument("--sentence-len", type=int, default=6)
    parser.add_argument("--dim", type=int, default=50)
    parser.add_argument("--epochs", type=int, default=30)
    parser.add_argument("--ws", type=int, default=7)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    corpus, topic_a, topic_b = build_corpus(
        args.sentences, args.words_per_topic, args.sentence_len, args.seed
    )
    vocab = build_vocab(corpus, 1)
    print(f"corpus: {len(corpus.sentences)} sentences, {corpus.token_count} tokens, "
          f"|V|={len(vocab)}")

    runs = []
    t0 = time.perf_counter()
    runs.append(("sg", train_sg(corpus, vocab, W2vConfig(
        mode="sg", dim=args.dim, lr=0.25, epochs=args.epochs, ws=args.ws,
        negatives=10, minn=2, maxn=7, n_buckets=20_000,
        subsample_t=math.inf, seed=args.seed, threads=args.threads,
        table_size=100_000,
    )), time.perf_counter() - t0))

    t0 = time.perf_counter()
    runs.append(("cbow", train_cbow(corpus, vocab, W2vConfig(
        mode="cbow", dim=args.dim, lr=0.25, epochs=args.epochs, ws=args.ws,
        negatives=0, minn=2, maxn=7, n_buckets=20_000,
        subsample_t=math.inf, seed=args.seed, threads=args.threads,
    )), time.perf_counter() - t0))

    store = accumulate_cooccurrence(corpus, vocab, ws=args.ws, threads=args.threads)
    t0 = time.perf_counter()
    runs.append(("glove", train_glove(store, vocab, GloveConfig(
        dim=args.dim, lr=0.05, epochs=args.epochs, seed=args.seed,
        threads=args.threads,
    )), time.perf_counter() - t0))

    print(f"{'model':8s} {'seconds':>8s} {'separation':>11s} {'loss e1':>9s} {'loss eN':>9s}")
    for name, emb, seconds in runs:
        losses = emb.metadata["epoch_losses"]
        print(f"{name:8s} {seconds:8.1f} {separation(emb, topic_a, topic_b):11.3f} "
              f"{losses[0]:9.4f} {losses[-1]:9.4f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
