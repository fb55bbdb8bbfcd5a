"""Frequency vocabulary, word-length statistics, stop-word candidates and
subsampling probabilities."""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError
from .pipeline import CleanCorpus


@dataclass
class Vocabulary:
    """Words sorted by count descending (ties lexicographic), ids 0..n-1."""

    entries: list[tuple[str, int, int]]  # (word, count, id)
    total_tokens: int  # pre-filter token count
    min_count: int
    _index: dict[str, int] = field(init=False, repr=False)
    _counts: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self._index = {word: wid for word, _, wid in self.entries}
        self._counts = np.array([c for _, c, _ in self.entries], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def id_of(self, word: str) -> int | None:
        return self._index.get(word)

    @property
    def words(self) -> list[str]:
        return [w for w, _, _ in self.entries]

    @property
    def counts(self) -> np.ndarray:
        return self._counts

    def checksum(self) -> int:
        """Stable 64-bit digest of the (word, count) table."""
        h = hashlib.blake2b(digest_size=8)
        for word, count, _ in self.entries:
            h.update(word.encode("utf-8"))
            h.update(b"\x00")
            h.update(count.to_bytes(8, "little"))
        return int.from_bytes(h.digest(), "little")


@dataclass
class LetterNgramStats:
    """Histogram of token lengths in letters (Unicode scalar values)."""

    rows: list[tuple[int, int, float]]  # (length, frequency, percent)
    total: int


@dataclass
class StopWordCandidates:
    ranked: list[tuple[str, int, float]]  # (word, count, relative_frequency)
    cut_n: int


def build_vocab(corpus: CleanCorpus, min_count: int = 5) -> Vocabulary:
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counts = Counter(corpus.tokens())
    kept = sorted(
        ((w, c) for w, c in counts.items() if c >= min_count),
        key=lambda wc: (-wc[1], wc[0]),
    )
    entries = [(w, c, i) for i, (w, c) in enumerate(kept)]
    return Vocabulary(entries=entries, total_tokens=corpus.token_count, min_count=min_count)


def percent_of_total(frequency: int, total: int) -> float:
    return frequency / total * 100.0


def word_length_stats(corpus: CleanCorpus) -> LetterNgramStats:
    lengths = Counter(len(token) for token in corpus.tokens())
    total = corpus.token_count
    rows = [
        (length, freq, percent_of_total(freq, total))
        for length, freq in sorted(lengths.items())
    ]
    return LetterNgramStats(rows=rows, total=total)


def stopword_candidates(vocab: Vocabulary, top_n: int) -> StopWordCandidates:
    """Top-n words by frequency with relative frequencies, for human curation."""
    if top_n < 0:
        raise ValueError("top_n must be >= 0")
    cut = min(top_n, len(vocab))
    total = vocab.total_tokens
    ranked = [(w, c, c / total) for w, c, _ in vocab.entries[:cut]]
    return StopWordCandidates(ranked=ranked, cut_n=cut)


def subsample_keep_prob(word_count: int, total_tokens: int, t: float) -> float:
    """Keep probability min(1, sqrt(t/f)) with f the word's relative frequency."""
    if word_count < 1 or total_tokens < word_count:
        raise ValueError("need 1 <= word_count <= total_tokens")
    if not t > 0:
        raise ValueError("t must be positive")
    f = word_count / total_tokens
    return min(1.0, math.sqrt(t / f))


def save_vocab_tsv(vocab: Vocabulary, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for word, count, _ in vocab.entries:
            fh.write(f"{word}\t{count}\n")


def load_vocab_tsv(path: str | Path, min_count: int = 1) -> Vocabulary:
    """Rebuild a Vocabulary from its TSV export.

    The pre-filter token count is not stored in the TSV, so total_tokens is
    the sum of the retained counts (a lower bound on the original).
    """
    entries: list[tuple[str, int, int]] = []
    seen: set[str] = set()
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(f"expected 'word<TAB>count' at line {lineno}", line=lineno)
            word, count_str = parts
            try:
                count = int(count_str)
            except ValueError as exc:
                raise ParseError(f"non-integer count at line {lineno}", line=lineno) from exc
            if word in seen:
                raise ParseError(f"duplicate word {word!r} at line {lineno}", line=lineno)
            seen.add(word)
            entries.append((word, count, len(entries)))
    total = sum(c for _, c, _ in entries)
    return Vocabulary(entries=entries, total_tokens=total, min_count=min_count)


def save_length_stats_tsv(stats: LetterNgramStats, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("length\tfrequency\tpercent\n")
        for length, freq, percent in stats.rows:
            fh.write(f"{length}\t{freq}\t{percent:.4f}\n")
        fh.write(f"total\t{stats.total}\t100.0000\n")


def save_stopwords_tsv(candidates: StopWordCandidates, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for word, count, relfreq in candidates.ranked:
            fh.write(f"{word}\t{count}\t{relfreq:.8g}\n")
