"""Symmetric word-word co-occurrence counts with harmonic distance weighting.

Counts are accumulated per sentence into a two-level map, optionally flushed
to sorted on-disk runs, and merged at finalize into id-sorted record arrays.
"""

from __future__ import annotations

import heapq
import struct
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IntegrityError, ParseError
from .pipeline import CleanCorpus
from .vocab import Vocabulary

MAGIC = b"COOC1"
_HEADER = struct.Struct("<QIQ")  # vocab_hash u64, window size u32, record count u64
_RECORD = struct.Struct("<IId")
SHARD_BYTES = 64 * 1024 * 1024
RECORDS_PER_SHARD = SHARD_BYTES // _RECORD.size


@dataclass
class CooccurrenceStore:
    """Ordered (i, j, x) records sorted by (i, j); both directions stored."""

    i: np.ndarray  # uint32
    j: np.ndarray  # uint32
    x: np.ndarray  # float64
    ws: int
    vocab_hash: int
    _keys: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self._keys = (self.i.astype(np.uint64) << np.uint64(32)) | self.j.astype(np.uint64)

    def __len__(self) -> int:
        return int(self.i.shape[0])

    def weight(self, i: int, j: int) -> float:
        key = np.uint64((i << 32) | j)
        pos = int(np.searchsorted(self._keys, key))
        if pos < len(self._keys) and self._keys[pos] == key:
            return float(self.x[pos])
        return 0.0

    def records(self):
        for k in range(len(self)):
            yield int(self.i[k]), int(self.j[k]), float(self.x[k])

    def shuffled_order(self, seed: int) -> np.ndarray:
        return np.random.default_rng(seed).permutation(len(self))

    def check_vocab(self, vocab: Vocabulary) -> None:
        if vocab.checksum() != self.vocab_hash:
            raise IntegrityError(
                "co-occurrence store was built against a different vocabulary"
            )


def _accumulate_chunk(
    sentences: list[list[str]], index: dict[str, int], ws: int
) -> dict[int, dict[int, float]]:
    table: dict[int, dict[int, float]] = {}
    for sentence in sentences:
        ids = [index[t] for t in sentence if t in index]
        n = len(ids)
        for p in range(n):
            wi = ids[p]
            for q in range(p + 1, min(p + ws, n - 1) + 1):
                wj = ids[q]
                w = 1.0 / (q - p)
                row = table.setdefault(wi, {})
                row[wj] = row.get(wj, 0.0) + w
                row = table.setdefault(wj, {})
                row[wi] = row.get(wi, 0.0) + w
    return table


def _table_size(table: dict[int, dict[int, float]]) -> int:
    return sum(len(inner) for inner in table.values())


def _sorted_items(table: dict[int, dict[int, float]]):
    for i in sorted(table):
        inner = table[i]
        for j in sorted(inner):
            yield i, j, inner[j]


def _write_run(path: Path, items, vocab_hash: int, ws: int) -> int:
    count = 0
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(vocab_hash, ws, 0))
        for i, j, x in items:
            fh.write(_RECORD.pack(i, j, x))
            count += 1
        fh.seek(len(MAGIC))
        fh.write(_HEADER.pack(vocab_hash, ws, count))
    return count


def _read_run(path: Path):
    with path.open("rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ParseError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        hdr = fh.read(_HEADER.size)
        vocab_hash, ws, count = _HEADER.unpack(hdr)
        for _ in range(count):
            yield _RECORD.unpack(fh.read(_RECORD.size))


def _run_header(path: Path) -> tuple[int, int, int]:
    with path.open("rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ParseError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        return _HEADER.unpack(fh.read(_HEADER.size))


def _merge_runs(streams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ii: list[int] = []
    jj: list[int] = []
    xx: list[float] = []
    merged = heapq.merge(*streams, key=lambda r: (r[0], r[1]))
    cur_key: tuple[int, int] | None = None
    cur_x = 0.0
    for i, j, x in merged:
        key = (i, j)
        if key == cur_key:
            cur_x += x
        else:
            if cur_key is not None:
                ii.append(cur_key[0])
                jj.append(cur_key[1])
                xx.append(cur_x)
            cur_key = key
            cur_x = x
    if cur_key is not None:
        ii.append(cur_key[0])
        jj.append(cur_key[1])
        xx.append(cur_x)
    return (
        np.array(ii, dtype=np.uint32),
        np.array(jj, dtype=np.uint32),
        np.array(xx, dtype=np.float64),
    )


def accumulate_cooccurrence(
    corpus: CleanCorpus,
    vocab: Vocabulary,
    ws: int,
    threads: int = 1,
    flush_every: int | None = None,
    workdir: str | Path | None = None,
) -> CooccurrenceStore:
    """Harmonically weighted counts: X(i,j) += 1/d for each ordered in-vocab
    pair at distance d <= ws inside a sentence.  Out-of-vocab tokens are
    skipped without consuming a window slot; windows never cross sentences.
    """
    if ws < 1:
        raise ValueError("ws must be >= 1")
    index = {w: wid for w, _, wid in vocab.entries}
    vocab_hash = vocab.checksum()

    n_chunks = max(1, min(threads, len(corpus.sentences))) if corpus.sentences else 1
    bounds = np.linspace(0, len(corpus.sentences), n_chunks + 1, dtype=int)
    chunks = [corpus.sentences[bounds[k] : bounds[k + 1]] for k in range(n_chunks)]

    run_paths: list[Path] = []
    tmpdir: tempfile.TemporaryDirectory | None = None

    def flush(table: dict[int, dict[int, float]]) -> None:
        nonlocal tmpdir
        if workdir is None and tmpdir is None:
            tmpdir = tempfile.TemporaryDirectory(prefix="cooc-runs-")
        base = Path(workdir) if workdir is not None else Path(tmpdir.name)
        base.mkdir(parents=True, exist_ok=True)
        run = base / f"run-{len(run_paths):05d}.cooc"
        _write_run(run, _sorted_items(table), vocab_hash, ws)
        run_paths.append(run)

    try:
        if n_chunks > 1:
            with ThreadPoolExecutor(max_workers=n_chunks) as pool:
                tables = list(
                    pool.map(lambda c: _accumulate_chunk(c, index, ws), chunks)
                )
        else:
            tables = [_accumulate_chunk(chunks[0], index, ws)] if chunks else [{}]

        pending: list = []
        live: dict[int, dict[int, float]] | None = None
        if flush_every is None:
            pending = [_sorted_items(t) for t in tables]
        else:
            # re-merge chunk tables under the flush budget
            live = {}
            size = 0
            for t in tables:
                for i, j, x in _sorted_items(t):
                    row = live.setdefault(i, {})
                    if j not in row:
                        size += 1
                    row[j] = row.get(j, 0.0) + x
                    if size >= flush_every:
                        flush(live)
                        live = {}
                        size = 0
            pending = [_sorted_items(live)]
        streams = pending + [_read_run(p) for p in run_paths]
        ii, jj, xx = _merge_runs(streams)
    finally:
        if tmpdir is not None:
            tmpdir.cleanup()

    return CooccurrenceStore(i=ii, j=jj, x=xx, ws=ws, vocab_hash=vocab_hash)


def iter_shuffled(store: CooccurrenceStore, seed: int):
    """Each record exactly once, in a seed-determined pseudo-random order."""
    for k in store.shuffled_order(seed):
        yield int(store.i[k]), int(store.j[k]), float(store.x[k])


def save_store(store: CooccurrenceStore, directory: str | Path) -> list[Path]:
    """Write the store as shard files of at most 64 MiB each."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    n = len(store)
    n_shards = max(1, -(-n // RECORDS_PER_SHARD))
    for s in range(n_shards):
        lo, hi = s * RECORDS_PER_SHARD, min((s + 1) * RECORDS_PER_SHARD, n)
        path = directory / f"shard-{s:05d}.cooc"
        items = (
            (int(store.i[k]), int(store.j[k]), float(store.x[k])) for k in range(lo, hi)
        )
        _write_run(path, items, store.vocab_hash, store.ws)
        paths.append(path)
    return paths


def load_store(path: str | Path) -> CooccurrenceStore:
    """Load from a shard directory or a single shard file."""
    path = Path(path)
    shard_paths = sorted(path.glob("*.cooc")) if path.is_dir() else [path]
    if not shard_paths:
        raise ParseError(f"no co-occurrence shards found under {path}")
    vocab_hash, ws, _ = _run_header(shard_paths[0])
    for p in shard_paths[1:]:
        vh, w, _ = _run_header(p)
        if vh != vocab_hash or w != ws:
            raise IntegrityError(f"shard {p} disagrees with {shard_paths[0]} on header")
    ii: list[int] = []
    jj: list[int] = []
    xx: list[float] = []
    for p in shard_paths:
        for i, j, x in _read_run(p):
            ii.append(i)
            jj.append(j)
            xx.append(x)
    i_arr = np.array(ii, dtype=np.uint32)
    j_arr = np.array(jj, dtype=np.uint32)
    x_arr = np.array(xx, dtype=np.float64)
    order = np.lexsort((j_arr, i_arr))
    return CooccurrenceStore(
        i=i_arr[order], j=j_arr[order], x=x_arr[order], ws=ws, vocab_hash=vocab_hash
    )
