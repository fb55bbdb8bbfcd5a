"""Dense embedding matrices with optional subword bucket rows."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import WordNotFoundError
from .subword import SubwordConfig, constituent_rows, word_bucket_rows


@dataclass
class EmbeddingSet:
    """Word rows (ids 0..n-1) followed by n_buckets subword rows.

    A words-only set (n_buckets == 0, e.g. GloVe output or loaded text
    vectors) looks words up directly and cannot represent OOV queries.
    """

    words: list[str]
    vectors: np.ndarray  # (n_words + n_buckets, dim)
    algorithm: str = "external"
    n_buckets: int = 0
    minn: int = 0
    maxn: int = 0
    output: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)
    _index: dict[str, int] = field(init=False, repr=False)
    _composed: np.ndarray | None = field(init=False, repr=False, default=None)

    def __post_init__(self):
        self._index = {w: i for i, w in enumerate(self.words)}
        expected = len(self.words) + self.n_buckets
        if self.vectors.shape[0] != expected:
            raise ValueError(
                f"vector matrix has {self.vectors.shape[0]} rows, expected {expected}"
            )

    @property
    def n_words(self) -> int:
        return len(self.words)

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    @property
    def has_subwords(self) -> bool:
        return self.n_buckets > 0

    def subword_config(self) -> SubwordConfig:
        return SubwordConfig(minn=self.minn, maxn=self.maxn, n_buckets=self.n_buckets)

    def id_of(self, word: str) -> int | None:
        return self._index.get(word)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def word_vector(self, word: str) -> np.ndarray:
        """Composed vector, float64.

        In-vocab subword sets average the word row with its n-gram bucket
        rows, exactly as during training; OOV words average bucket rows
        alone.  Words-only sets raise on OOV.
        """
        if not word:
            raise ValueError("word must be non-empty")
        wid = self._index.get(word)
        if self.n_buckets == 0:
            if wid is None:
                raise WordNotFoundError(f"{word!r} is not in the vocabulary")
            return self.vectors[wid].astype(np.float64)
        cfg = self.subword_config()
        if wid is not None:
            rows = constituent_rows(word, wid, self.n_words, cfg)
            return self.vectors[rows].astype(np.float64).mean(axis=0)
        try:
            rows = word_bucket_rows(word, self.n_words, cfg)
        except ValueError as exc:
            raise WordNotFoundError(f"{word!r} has no usable n-grams") from exc
        if not rows:
            raise WordNotFoundError(f"{word!r} yields no n-grams in [{self.minn}, {self.maxn}]")
        return self.vectors[rows].astype(np.float64).mean(axis=0)

    def compose_all(self) -> np.ndarray:
        """(n_words, dim) float64 matrix of composed vocabulary vectors."""
        if self._composed is None:
            out = np.empty((self.n_words, self.dim), dtype=np.float64)
            if self.n_buckets == 0:
                out[:] = self.vectors[: self.n_words].astype(np.float64)
            else:
                cfg = self.subword_config()
                for wid, word in enumerate(self.words):
                    rows = constituent_rows(word, wid, self.n_words, cfg)
                    out[wid] = self.vectors[rows].astype(np.float64).mean(axis=0)
            self._composed = out
        return self._composed
