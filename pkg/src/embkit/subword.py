"""Character n-gram extraction and bucket hashing for subword vectors."""

from __future__ import annotations

from dataclasses import dataclass

FNV_OFFSET_32 = 0x811C9DC5
FNV_PRIME_32 = 0x01000193


@dataclass(frozen=True)
class SubwordConfig:
    minn: int = 2
    maxn: int = 7
    n_buckets: int = 2_000_000
    bow_marker: str = "<"
    eow_marker: str = ">"

    def __post_init__(self):
        if self.minn < 1 or self.maxn < self.minn:
            raise ValueError("need 1 <= minn <= maxn")
        if self.n_buckets < 1:
            raise ValueError("n_buckets must be >= 1")
        if len(self.bow_marker) != 1 or len(self.eow_marker) != 1:
            raise ValueError("markers must be single code points")


def char_ngrams(word: str, config: SubwordConfig | None = None) -> list[str]:
    """All n-grams of the marked form <word> for n in [minn, maxn], shortest
    lengths first, positions left to right within each length.

    The full marked form itself is excluded: the whole word has its own
    vector row.
    """
    config = config or SubwordConfig()
    if not word:
        raise ValueError("word must be non-empty")
    if config.bow_marker in word or config.eow_marker in word:
        raise ValueError(f"word contains marker characters: {word!r}")
    marked = config.bow_marker + word + config.eow_marker
    full = len(marked)
    grams: list[str] = []
    for n in range(config.minn, min(config.maxn, full) + 1):
        if n == full:
            continue  # whole marked form excluded
        for i in range(full - n + 1):
            grams.append(marked[i : i + n])
    return grams


def ngram_bucket(ngram: str, n_buckets: int) -> int:
    """FNV-1a 32-bit over UTF-8 bytes, modulo the bucket count.

    Deterministic and platform-independent by construction.
    """
    if not ngram:
        raise ValueError("ngram must be non-empty")
    h = FNV_OFFSET_32
    for byte in ngram.encode("utf-8"):
        h ^= byte
        h = (h * FNV_PRIME_32) & 0xFFFFFFFF
    return h % n_buckets


def word_bucket_rows(word: str, n_words: int, config: SubwordConfig) -> list[int]:
    """Bucket row indices (offset past the word rows) for a word's n-grams."""
    return [n_words + ngram_bucket(g, config.n_buckets) for g in char_ngrams(word, config)]


def constituent_rows(word: str, word_id: int, n_words: int, config: SubwordConfig) -> list[int]:
    """Input-matrix rows whose mean is the word's training-time vector.

    Words containing marker characters cannot produce n-grams and fall back
    to their own row alone.
    """
    rows = [word_id]
    if config.bow_marker in word or config.eow_marker in word:
        return rows
    rows.extend(word_bucket_rows(word, n_words, config))
    return rows
