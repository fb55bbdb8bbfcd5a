"""Intrinsic evaluation: cosine similarity, nearest neighbors, word-pair
reports and rank correlation against human similarity judgments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from .embedding import EmbeddingSet
from .errors import (
    EmptyReportError,
    ParseError,
    UndefinedCorrelationError,
    UndefinedSimilarityError,
    WordNotFoundError,
)


@dataclass
class WordSimDataset:
    pairs: list[tuple[str, str, float]]  # (word_a, word_b, gold score)
    name: str = "wordsim"


@dataclass
class EvalReport:
    neighbors: dict[str, list[tuple[str, float]]] = field(default_factory=dict)
    pair_rows: list[tuple[str, str, float]] = field(default_factory=list)
    pair_average: float | None = None
    spearman_rho: float | None = None
    oov_words: list[str] = field(default_factory=list)


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    uu = float(np.dot(u, u))
    vv = float(np.dot(v, v))
    if uu == 0.0 or vv == 0.0:
        raise UndefinedSimilarityError("cosine similarity of a zero vector is undefined")
    # sqrt of the product keeps exactly-collinear inputs at exactly +/-1
    return float(np.clip(float(np.dot(u, v)) / math.sqrt(uu * vv), -1.0, 1.0))


def word_vector(emb: EmbeddingSet, word: str) -> np.ndarray:
    return emb.word_vector(word)


def nearest_neighbors(emb: EmbeddingSet, query: str, k: int) -> list[tuple[str, float]]:
    """Top-k vocabulary words by cosine to the query's composed vector,
    query word excluded, ties broken by vocabulary id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    qv = emb.word_vector(query)
    qq = float(np.dot(qv, qv))
    if qq == 0.0:
        raise UndefinedSimilarityError(f"{query!r} has a zero vector")
    matrix = emb.compose_all()
    sq = np.einsum("ij,ij->i", matrix, matrix)
    sims = np.full(emb.n_words, -2.0)  # below any real cosine; hides zero rows
    nonzero = sq > 0.0
    # sqrt of the product keeps exact-duplicate vectors at exactly 1.0
    sims[nonzero] = np.clip(
        (matrix[nonzero] @ qv) / np.sqrt(sq[nonzero] * qq), -1.0, 1.0
    )
    qid = emb.id_of(query)
    if qid is not None:
        sims[qid] = -2.0
    order = np.argsort(-sims, kind="stable")  # stable: equal cosines keep id order
    result = []
    for idx in order[: k if qid is None else k + 1]:
        if idx == qid or sims[idx] == -2.0:
            continue
        result.append((emb.words[int(idx)], float(sims[idx])))
        if len(result) == k:
            break
    return result


def pair_similarity_report(
    emb: EmbeddingSet, pairs: list[tuple[str, str]]
) -> EvalReport:
    """Cosine per pair; pairs with an unrepresentable member are excluded
    from the average and their missing words listed."""
    if not pairs:
        raise ValueError("pairs must be non-empty")
    rows: list[tuple[str, str, float]] = []
    oov: list[str] = []
    for a, b in pairs:
        missing = []
        va = vb = None
        try:
            va = emb.word_vector(a)
        except WordNotFoundError:
            missing.append(a)
        try:
            vb = emb.word_vector(b)
        except WordNotFoundError:
            missing.append(b)
        if missing:
            oov.extend(m for m in missing if m not in oov)
            continue
        rows.append((a, b, cosine_similarity(va, vb)))
    if not rows:
        raise EmptyReportError("every pair has an out-of-vocabulary member")
    average = sum(r[2] for r in rows) / len(rows)
    return EvalReport(pair_rows=rows, pair_average=average, oov_words=oov)


def spearman_rho(gold, predicted) -> float:
    """Pearson correlation of average ranks (ties receive averaged ranks)."""
    g = np.asarray(gold, dtype=np.float64)
    p = np.asarray(predicted, dtype=np.float64)
    if g.shape != p.shape or g.ndim != 1:
        raise ValueError("gold and predicted must be equal-length 1-D sequences")
    if g.shape[0] < 2:
        raise ValueError("need at least 2 observations")
    if np.all(g == g[0]) or np.all(p == p[0]):
        raise UndefinedCorrelationError("rank correlation of a constant sequence is undefined")
    rg = rankdata(g, method="average")
    rp = rankdata(p, method="average")
    dg = rg - rg.mean()
    dp = rp - rp.mean()
    num = float(np.dot(dg, dp))
    den = math.sqrt(float(np.dot(dg, dg)) * float(np.dot(dp, dp)))
    return float(min(1.0, max(-1.0, num / den)))


def load_wordsim_tsv(path: str | Path, name: str | None = None) -> WordSimDataset:
    """TSV rows word_a<TAB>word_b<TAB>score; '#' lines are comments."""
    path = Path(path)
    pairs: list[tuple[str, str, float]] = []
    seen: set[frozenset[str]] = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(
                    f"{path}:{lineno}: expected word_a<TAB>word_b<TAB>score", line=lineno
                )
            a, b, score_str = parts
            try:
                score = float(score_str)
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-numeric score", line=lineno) from exc
            if not math.isfinite(score):
                raise ParseError(f"{path}:{lineno}: non-finite score", line=lineno)
            key = frozenset((a, b))
            if key in seen:
                raise ParseError(f"{path}:{lineno}: duplicate pair {a!r}/{b!r}", line=lineno)
            seen.add(key)
            pairs.append((a, b, score))
    return WordSimDataset(pairs=pairs, name=name or path.stem)


def wordsim_eval(emb: EmbeddingSet, dataset: WordSimDataset) -> EvalReport:
    """Spearman rho between gold scores and model cosines; OOV pairs excluded."""
    gold: list[float] = []
    rows: list[tuple[str, str, float]] = []
    oov: list[str] = []
    for a, b, score in dataset.pairs:
        try:
            va = emb.word_vector(a)
            vb = emb.word_vector(b)
        except WordNotFoundError:
            for w in (a, b):
                if w not in emb and w not in oov:
                    oov.append(w)
            continue
        gold.append(score)
        rows.append((a, b, cosine_similarity(va, vb)))
    if not gold:
        raise EmptyReportError("every pair has an out-of-vocabulary member")
    rho = spearman_rho(gold, [r[2] for r in rows])
    return EvalReport(spearman_rho=rho, pair_rows=rows, oov_words=oov)
