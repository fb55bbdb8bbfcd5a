"""Embedding persistence: word2vec-style text vectors, a binary checkpoint
sidecar carrying subword rows, and TSV export for external 2-D tooling."""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .embedding import EmbeddingSet
from .errors import ParseError, SerializationError, WordNotFoundError

CHECKPOINT_MAGIC = b"EMB1"
CHECKPOINT_SUFFIX = ".emb1"


def checkpoint_path(text_path: str | Path) -> Path:
    return Path(str(text_path) + CHECKPOINT_SUFFIX)


def _format_row(word: str, vec: np.ndarray) -> str:
    return word + " " + " ".join(f"{v:.6g}" for v in vec) + "\n"


def save_text(emb: EmbeddingSet, path: str | Path, sidecar: bool = True) -> None:
    """Header '<vocab_size> <dim>', then one 'word v1 .. vd' line per word,
    6 significant digits, UTF-8, LF.

    Composed per-word vectors go into the text file; subword bucket rows,
    output parameters and metadata go to a binary sidecar next to it.
    """
    path = Path(path)
    for word in emb.words:
        if any(ch.isspace() for ch in word):
            raise SerializationError(
                f"word {word!r} contains whitespace and cannot be written to the text format"
            )
    composed = emb.compose_all()
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{emb.n_words} {emb.dim}\n")
        for wid, word in enumerate(emb.words):
            fh.write(_format_row(word, composed[wid]))
    if sidecar and (emb.n_buckets > 0 or emb.output is not None):
        save_checkpoint(emb, checkpoint_path(path))


def load_text(path: str | Path) -> EmbeddingSet:
    """Load text-format vectors as a words-only embedding set."""
    path = Path(path)
    words: list[str] = []
    seen: set[str] = set()
    rows: list[np.ndarray] = []
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2:
            raise ParseError(f"{path}:1: header must be '<vocab_size> <dim>'", line=1)
        try:
            n_words, dim = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(f"{path}:1: non-integer header field", line=1) from exc
        lineno = 1
        for line in fh:
            lineno += 1
            fields = line.split()
            if not fields:
                continue
            if len(words) == n_words:
                raise ParseError(
                    f"{path}:{lineno}: more rows than the header's {n_words}", line=lineno
                )
            word = fields[0]
            if word in seen:
                raise ParseError(f"{path}:{lineno}: duplicate word {word!r}", line=lineno)
            if len(fields) - 1 != dim:
                raise ParseError(
                    f"{path}:{lineno}: expected {dim} values, found {len(fields) - 1}",
                    line=lineno,
                )
            try:
                vec = np.array([float(v) for v in fields[1:]], dtype=np.float32)
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-numeric field", line=lineno) from exc
            seen.add(word)
            words.append(word)
            rows.append(vec)
    if len(words) != n_words:
        raise ParseError(
            f"{path}: header promised {n_words} rows but file ends after {len(words)}",
            line=lineno + 1 if rows else 2,
        )
    vectors = np.vstack(rows) if rows else np.zeros((0, dim), dtype=np.float32)
    return EmbeddingSet(
        words=words, vectors=vectors, algorithm="external", metadata={"source": str(path)}
    )


def save_checkpoint(emb: EmbeddingSet, path: str | Path) -> None:
    """Full-precision float32 state: vectors (word + bucket rows), output
    parameters and metadata.  Little-endian throughout."""
    path = Path(path)
    header = {
        "algorithm": emb.algorithm,
        "dim": emb.dim,
        "n_words": emb.n_words,
        "n_buckets": emb.n_buckets,
        "minn": emb.minn,
        "maxn": emb.maxn,
        "words": emb.words,
        "output_rows": 0 if emb.output is None else int(emb.output.shape[0]),
        "metadata": emb.metadata,
    }
    blob = json.dumps(header, ensure_ascii=False).encode("utf-8")
    with path.open("wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(emb.vectors, dtype="<f4").tobytes())
        if emb.output is not None:
            fh.write(np.ascontiguousarray(emb.output, dtype="<f4").tobytes())


def load_checkpoint(path: str | Path) -> EmbeddingSet:
    path = Path(path)
    with path.open("rb") as fh:
        magic = fh.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise ParseError(f"{path}: bad magic {magic!r}, expected {CHECKPOINT_MAGIC!r}")
        (blob_len,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(blob_len).decode("utf-8"))
        n_rows = header["n_words"] + header["n_buckets"]
        dim = header["dim"]
        vec_bytes = fh.read(n_rows * dim * 4)
        if len(vec_bytes) != n_rows * dim * 4:
            raise ParseError(f"{path}: truncated vector block")
        vectors = np.frombuffer(vec_bytes, dtype="<f4").reshape(n_rows, dim).copy()
        output = None
        if header["output_rows"]:
            out_bytes = fh.read(header["output_rows"] * dim * 4)
            if len(out_bytes) != header["output_rows"] * dim * 4:
                raise ParseError(f"{path}: truncated output block")
            output = np.frombuffer(out_bytes, dtype="<f4").reshape(header["output_rows"], dim).copy()
    return EmbeddingSet(
        words=header["words"],
        vectors=vectors,
        algorithm=header["algorithm"],
        n_buckets=header["n_buckets"],
        minn=header["minn"],
        maxn=header["maxn"],
        output=output,
        metadata=header["metadata"],
    )


def load_embedding(path: str | Path) -> EmbeddingSet:
    """Prefer the checkpoint (subword-capable) when present, else text."""
    path = Path(path)
    if path.suffix == CHECKPOINT_SUFFIX:
        return load_checkpoint(path)
    sidecar = checkpoint_path(path)
    if sidecar.exists():
        return load_checkpoint(sidecar)
    return load_text(path)


@dataclass
class ExportReport:
    written: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)
    duplicates: list[str] = field(default_factory=list)


def export_tsv(emb: EmbeddingSet, words: list[str], path: str | Path) -> ExportReport:
    """Word + vector per row for external dimensionality-reduction tooling.

    Unresolvable words are skipped (and reported); repeats are written once.
    """
    path = Path(path)
    report = ExportReport()
    emitted: set[str] = set()
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("word\t" + "\t".join(f"d{k}" for k in range(emb.dim)) + "\n")
        for word in words:
            if word in emitted:
                report.duplicates.append(word)
                continue
            try:
                vec = emb.word_vector(word)
            except (WordNotFoundError, ValueError):
                report.skipped.append(word)
                continue
            fh.write(word + "\t" + "\t".join(f"{v:.6g}" for v in vec) + "\n")
            emitted.add(word)
            report.written.append(word)
    return report
