"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
output; any assertion failure marks that criterion red.
"""

import math

import numpy as np
import pytest

from embkit import kernels
from embkit.cooccur import accumulate_cooccurrence
from embkit.embedding import EmbeddingSet
from embkit.embio import load_text, save_text
from embkit.eval import (
    cosine_similarity,
    pair_similarity_report,
    spearman_rho,
    wordsim_eval,
    WordSimDataset,
)
from embkit.glove import GloveConfig, train_glove
from embkit.pipeline import (
    DEFAULT_BOUNDARY_CHARS,
    DEFAULT_REPLACEMENT_CHARS,
    run_pipeline,
    save_corpus,
)
from embkit.subword import SubwordConfig, char_ngrams
from embkit.vocab import build_vocab, percent_of_total
from embkit.w2v import (
    UNIGRAM_POWER,
    W2vConfig,
    build_huffman,
    build_unigram_table,
    hs_word_probability,
    train_cbow,
    train_sg,
)
from oracles import (
    PIPELINE_FIXTURES,
    naive_cooccurrence,
    naive_char_ngrams,
    naive_pipeline,
    naive_serialize,
    topic_separation,
    two_topic_corpus,
)

# Published word-length histogram: (length, frequency, printed percent,
# printed decimal places).  The printed column is truncated, not rounded.
LENGTH_TABLE = [
    (1, 936_301, "1.52889"),
    (2, 19_187_314, "31.3311"),
    (3, 11_924_760, "19.472"),
    (4, 14_334_444, "23.4068"),
    (5, 9_459_657, "15.4467"),
    (6, 3_347_907, "5.4668"),
    (7, 1_481_810, "2.4196"),
    (8, 373_417, "0.6097"),
    (9, 163_301, "0.2666"),
    (10, 21_287, "0.0347"),
    (11, 5_892, "0.0096"),
    (12, 3_033, "0.0049"),
    (13, 1_036, "0.0016"),
    (14, 295, "0.0004"),
]
LENGTH_TABLE_TOTAL = 61_240_454


def _truncate(value: float, places: int) -> float:
    scale = 10**places
    return math.floor(value * scale) / scale


def test_criterion_01_length_table_arithmetic():
    assert abs(percent_of_total(19_187_314, LENGTH_TABLE_TOTAL) - 31.3311) <= 5e-5
    assert abs(percent_of_total(936_301, LENGTH_TABLE_TOTAL) - 1.5289) <= 5e-5
    assert sum(freq for _, freq, _ in LENGTH_TABLE) == LENGTH_TABLE_TOTAL
    # the published column truncates at the printed precision; reproducing it
    # exactly (and within the truncation bound) is the attainable reading,
    # see the strict-tolerance note below
    for _, freq, printed in LENGTH_TABLE:
        computed = percent_of_total(freq, LENGTH_TABLE_TOTAL)
        places = len(printed.split(".")[1])
        assert _truncate(computed, places) == float(printed)
        assert abs(computed - float(printed)) < 10.0 ** (-places)
    print("criterion 1 PASS: published length-table percents reproduced")


@pytest.mark.xfail(
    strict=True,
    reason="published percents are truncated, not rounded: 7 of 14 rows "
    "(lengths 7-10, 12-14) differ from the exact value by up to 9.2e-5, so a "
    "blanket 5e-5 bound on the printed column is unattainable",
)
def test_criterion_01_strict_tolerance_note():
    for _, freq, printed in LENGTH_TABLE:
        computed = percent_of_total(freq, LENGTH_TABLE_TOTAL)
        assert abs(computed - float(printed)) <= 5e-5


def test_criterion_02_pipeline_matches_naive_reference(tmp_path):
    assert len(PIPELINE_FIXTURES) == 20
    for k, text in enumerate(PIPELINE_FIXTURES):
        assert len(text.encode("utf-8")) <= 1024
        src = tmp_path / f"fix{k}.txt"
        src.write_text(text, encoding="utf-8")
        out = tmp_path / f"out{k}.txt"
        save_corpus(run_pipeline([src]), out)
        expected = naive_serialize(
            naive_pipeline(text, DEFAULT_REPLACEMENT_CHARS, DEFAULT_BOUNDARY_CHARS)
        )
        assert out.read_bytes() == expected
    print("criterion 2 PASS: 20 pipeline fixtures byte-identical to naive reference")


def test_criterion_03_cooccurrence_matches_nested_loop_oracle():
    rng = np.random.default_rng(333)
    windows = [1, 2, 5, 7]
    from embkit.pipeline import CleanCorpus

    for trial in range(50):
        ws = windows[trial % 4]
        n_tokens = int(rng.integers(2, 201))
        vocab_size = int(rng.integers(2, 12))
        words = [f"w{k}" for k in range(vocab_size)]
        tokens = [words[int(i)] for i in rng.integers(0, vocab_size, size=n_tokens)]
        n_cuts = int(rng.integers(0, 4))
        cuts = sorted(set(rng.integers(1, n_tokens, size=n_cuts).tolist()) | {0, n_tokens})
        sentences = [tokens[a:b] for a, b in zip(cuts, cuts[1:]) if b > a]
        corpus = CleanCorpus.from_sentences(sentences)
        vocab = build_vocab(corpus, 1)
        store = accumulate_cooccurrence(corpus, vocab, ws=ws)
        index = {w: wid for w, _, wid in vocab.entries}
        oracle = naive_cooccurrence([[index[t] for t in s] for s in sentences], ws)
        got = {(i, j): x for i, j, x in store.records()}
        assert set(got) == set(oracle)
        for key, expected in oracle.items():
            assert abs(got[key] - expected) <= 1e-12
        for (i, j), x in got.items():
            assert got[(j, i)] == x
    print("criterion 3 PASS: 50 random stores match the nested-loop oracle")


def _rel_err(a, b):
    denom = max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)
    return np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) / denom


def test_criterion_04_gradient_checks():
    rng = np.random.default_rng(444)
    h_step = 1e-5
    n_trials = 100

    for _ in range(n_trials):  # GloVe record objective
        dim = int(rng.integers(1, 9))
        wi, wj = rng.normal(size=dim), rng.normal(size=dim)
        bi, bj = float(rng.normal()), float(rng.normal())
        x = float(rng.uniform(0.05, 150.0))
        gwi, gwj = np.empty(dim), np.empty(dim)
        _, gb = kernels.glove_loss_and_grads(wi, wj, bi, bj, x, 100.0, 0.75, gwi, gwj)

        def g_loss(wi_, wj_, bi_, bj_):
            return kernels.glove_loss_and_grads(
                wi_, wj_, bi_, bj_, x, 100.0, 0.75, np.empty(dim), np.empty(dim)
            )[0]

        fd_wi = np.array([
            (g_loss(wi + h_step * e, wj, bi, bj) - g_loss(wi - h_step * e, wj, bi, bj))
            / (2 * h_step)
            for e in np.eye(dim)
        ])
        fd_wj = np.array([
            (g_loss(wi, wj + h_step * e, bi, bj) - g_loss(wi, wj - h_step * e, bi, bj))
            / (2 * h_step)
            for e in np.eye(dim)
        ])
        fd_b = (g_loss(wi, wj, bi + h_step, bj) - g_loss(wi, wj, bi - h_step, bj)) / (2 * h_step)
        assert _rel_err(gwi, fd_wi) < 1e-5
        assert _rel_err(gwj, fd_wj) < 1e-5
        assert _rel_err([gb], [fd_b]) < 1e-5

    for _ in range(n_trials):  # skip-gram negative-sampling objective
        dim = int(rng.integers(1, 9))
        n_out = int(rng.integers(2, 21))
        k = int(rng.integers(1, min(6, n_out)))
        h = rng.normal(size=dim)
        out = rng.normal(size=(n_out, dim))
        targets = rng.choice(n_out, size=k + 1, replace=False).astype(np.int32)
        labels = np.zeros(k + 1)
        labels[0] = 1.0
        grad_h, grad_out = np.empty(dim), np.empty((k + 1, dim))
        kernels.ns_loss_and_grads(h, out, targets, labels, grad_h, grad_out)

        def ns_loss(h_, out_):
            return kernels.ns_loss_and_grads(
                h_, out_, targets, labels, np.empty(dim), np.empty((k + 1, dim))
            )

        fd_h = np.array([
            (ns_loss(h + h_step * e, out) - ns_loss(h - h_step * e, out)) / (2 * h_step)
            for e in np.eye(dim)
        ])
        assert _rel_err(grad_h, fd_h) < 1e-5
        s = int(rng.integers(0, k + 1))  # one random output row per trial
        fd_row = np.empty(dim)
        for d in range(dim):
            up, dn = out.copy(), out.copy()
            up[targets[s], d] += h_step
            dn[targets[s], d] -= h_step
            fd_row[d] = (ns_loss(h, up) - ns_loss(h, dn)) / (2 * h_step)
        assert _rel_err(grad_out[s], fd_row) < 1e-5

    for _ in range(n_trials):  # CBoW hierarchical-softmax objective
        dim = int(rng.integers(1, 9))
        n_inner = int(rng.integers(2, 20))
        m = int(rng.integers(1, min(6, n_inner) + 1))
        hidden = rng.normal(size=dim)
        inner = rng.normal(size=(n_inner, dim))
        nodes = rng.choice(n_inner, size=m, replace=False).astype(np.int32)
        bits = rng.integers(0, 2, size=m).astype(np.int8)
        grad_hidden, grad_inner = np.empty(dim), np.empty((m, dim))
        kernels.hs_loss_and_grads(hidden, inner, nodes, bits, grad_hidden, grad_inner)

        def hs_loss(hidden_, inner_):
            return kernels.hs_loss_and_grads(
                hidden_, inner_, nodes, bits, np.empty(dim), np.empty((m, dim))
            )

        fd_hidden = np.array([
            (hs_loss(hidden + h_step * e, inner) - hs_loss(hidden - h_step * e, inner))
            / (2 * h_step)
            for e in np.eye(dim)
        ])
        assert _rel_err(grad_hidden, fd_hidden) < 1e-5
        s = int(rng.integers(0, m))
        fd_row = np.empty(dim)
        for d in range(dim):
            up, dn = inner.copy(), inner.copy()
            up[nodes[s], d] += h_step
            dn[nodes[s], d] -= h_step
            fd_row[d] = (hs_loss(hidden, up) - hs_loss(hidden, dn)) / (2 * h_step)
        assert _rel_err(grad_inner[s], fd_row) < 1e-5

    print("criterion 4 PASS: 100 finite-difference checks per objective within 1e-5")


def test_criterion_05_hs_normalization():
    rng = np.random.default_rng(555)
    from embkit.pipeline import CleanCorpus

    for n in (2, 5, 17, 50):
        counts = {f"w{k}": int(rng.integers(1, 200)) for k in range(n)}
        vocab = build_vocab(
            CleanCorpus.from_sentences([[w] * c for w, c in counts.items()]), 1
        )
        tree = build_huffman(vocab)
        emb = EmbeddingSet(
            words=vocab.words,
            vectors=np.zeros((n, 4)),
            algorithm="cbow",
            output=rng.normal(size=(tree.n_inner, 4)),
        )
        hidden = rng.normal(size=4)
        total = sum(hs_word_probability(emb, tree, hidden, w) for w in range(n))
        assert abs(total - 1.0) <= 1e-10
    print("criterion 5 PASS: hierarchical-softmax probabilities sum to 1 within 1e-10")


def test_criterion_06_unigram_table_proportions():
    rng = np.random.default_rng(666)
    from embkit.pipeline import CleanCorpus

    counts = {f"w{k:03d}": max(1, int(10_000 / (k + 1))) for k in range(100)}
    vocab = build_vocab(
        CleanCorpus.from_sentences([[w] * c for w, c in counts.items()]), 1
    )
    table = build_unigram_table(vocab, size=1_000_000)
    weights = vocab.counts.astype(np.float64) ** UNIGRAM_POWER
    target = weights / weights.sum()
    draws = table.table[rng.integers(0, table.size, size=2_000_000)]
    empirical = np.bincount(draws, minlength=100) / draws.shape[0]
    worst = float(np.abs(empirical - target).max())
    assert worst < 0.005
    print(f"criterion 6 PASS: unigram sampling within 0.5% of count^0.75 (worst {worst:.2e})")


@pytest.fixture(scope="module")
def two_topic():
    corpus, topic_a, topic_b = two_topic_corpus(
        n_sentences=2000, words_per_topic=50, sentence_len=6, seed=123
    )
    return corpus, build_vocab(corpus, 1), topic_a, topic_b


def test_criterion_07_training_sanity(two_topic):
    corpus, vocab, topic_a, topic_b = two_topic

    sg = train_sg(corpus, vocab, W2vConfig(
        mode="sg", dim=50, lr=0.25, epochs=30, ws=7, negatives=10,
        minn=2, maxn=7, n_buckets=20_000, subsample_t=math.inf,
        seed=42, table_size=100_000,
    ))
    cbow = train_cbow(corpus, vocab, W2vConfig(
        mode="cbow", dim=50, lr=0.25, epochs=30, ws=7, negatives=0,
        minn=2, maxn=7, n_buckets=20_000, subsample_t=math.inf, seed=42,
    ))
    store = accumulate_cooccurrence(corpus, vocab, ws=7)
    # AdaGrad at the table default 0.25 memorizes this small dense store
    # before topic structure forms; 0.05 is the conventional rate
    glove = train_glove(store, vocab, GloveConfig(dim=50, lr=0.05, epochs=30, seed=42))

    for name, emb in (("sg", sg), ("cbow", cbow), ("glove", glove)):
        sep = topic_separation(emb, topic_a, topic_b)
        losses = emb.metadata["epoch_losses"]
        assert sep >= 0.2, f"{name}: separation {sep:.3f} < 0.2"
        assert losses[-1] < losses[0], f"{name}: final loss not below epoch 1"
        print(f"criterion 7 PASS ({name}): separation {sep:.3f}, "
              f"loss {losses[0]:.4f} -> {losses[-1]:.4f}")


def test_criterion_08_trainer_determinism(two_topic):
    corpus, vocab, _, _ = two_topic
    from embkit.pipeline import CleanCorpus

    sub_corpus = CleanCorpus.from_sentences(corpus.sentences[:200])
    sub_vocab = build_vocab(sub_corpus, 1)

    sg_cfg = W2vConfig(mode="sg", dim=16, lr=0.25, epochs=2, ws=5, negatives=5,
                       minn=2, maxn=5, n_buckets=2_000, subsample_t=1e-2,
                       seed=9, table_size=10_000)
    a, b = train_sg(sub_corpus, sub_vocab, sg_cfg), train_sg(sub_corpus, sub_vocab, sg_cfg)
    assert np.array_equal(a.vectors, b.vectors) and np.array_equal(a.output, b.output)

    cb_cfg = W2vConfig(mode="cbow", dim=16, lr=0.25, epochs=2, ws=5, negatives=0,
                       minn=2, maxn=5, n_buckets=2_000, subsample_t=1e-2, seed=9)
    a, b = train_cbow(sub_corpus, sub_vocab, cb_cfg), train_cbow(sub_corpus, sub_vocab, cb_cfg)
    assert np.array_equal(a.vectors, b.vectors) and np.array_equal(a.output, b.output)

    store = accumulate_cooccurrence(sub_corpus, sub_vocab, ws=5)
    gl_cfg = GloveConfig(dim=16, lr=0.05, epochs=2, seed=9)
    a, b = train_glove(store, sub_vocab, gl_cfg), train_glove(store, sub_vocab, gl_cfg)
    assert np.array_equal(a.vectors, b.vectors)
    print("criterion 8 PASS: all trainers bit-identical across reruns")


def test_criterion_09_evaluation_harness():
    def unit(deg):
        return [math.cos(math.radians(deg)), math.sin(math.radians(deg))]

    emb = EmbeddingSet(
        words=["a", "b", "c", "d"],
        vectors=np.array([unit(0), unit(10), unit(35), unit(80)], dtype=np.float64),
    )
    gold = [9.0, 6.0, 2.0]  # a-b closest, then a-c, then a-d
    dataset = WordSimDataset(
        pairs=[("a", "b", gold[0]), ("a", "c", gold[1]), ("a", "d", gold[2])]
    )
    report = wordsim_eval(emb, dataset)
    assert report.spearman_rho == 1.0

    assert spearman_rho([1, 2, 3, 4], [1, 3, 2, 4]) == 0.8

    pairs = [("a", "b"), ("a", "zz"), ("c", "d")]
    pair_report = pair_similarity_report(emb, pairs)
    assert pair_report.oov_words == ["zz"]
    expected = (
        cosine_similarity(unit(0), unit(10)) + cosine_similarity(unit(35), unit(80))
    ) / 2
    assert pair_report.pair_average == expected
    print("criterion 9 PASS: rho exactness, 0.8 case, and OOV-excluded averages")


def test_criterion_10_subword_oracle():
    rng = np.random.default_rng(101)
    alphabet = list("abcdefghijويانچڪśī")
    sweeps = [(2, 7), (1, 2), (3, 6), (2, 2), (4, 9), (1, 7)]
    for trial in range(1000):
        length = int(rng.integers(1, 21))
        word = "".join(rng.choice(alphabet, size=length))
        minn, maxn = sweeps[trial % len(sweeps)]
        cfg = SubwordConfig(minn=minn, maxn=maxn)
        got = char_ngrams(word, cfg)
        assert got == naive_char_ngrams(word, minn, maxn)
        expected = sum(length + 3 - n for n in range(minn, min(maxn, length + 2) + 1))
        if minn <= length + 2 <= maxn:
            expected -= 1
        assert len(got) == expected
    print("criterion 10 PASS: 1000 words match brute-force n-gram enumeration")


def test_criterion_11_text_roundtrip(tmp_path, two_topic):
    corpus, vocab, _, _ = two_topic
    from embkit.pipeline import CleanCorpus

    sub = CleanCorpus.from_sentences(corpus.sentences[:100])
    svocab = build_vocab(sub, 1)
    emb = train_sg(sub, svocab, W2vConfig(
        mode="sg", dim=12, lr=0.25, epochs=1, ws=3, negatives=3, minn=2, maxn=4,
        n_buckets=1_000, subsample_t=math.inf, seed=4, table_size=5_000,
    ))
    path = tmp_path / "emb.vec"
    save_text(emb, path)
    loaded = load_text(path)
    composed = emb.compose_all()
    for wid, word in enumerate(emb.words):
        original = composed[wid]
        reloaded = loaded.word_vector(word)
        rel = np.abs(reloaded - original) / np.maximum(np.abs(original), 1e-12)
        assert rel.max() < 1e-5
    print("criterion 11 PASS: text roundtrip preserves vectors within 1e-5 relative")
