"""Raw-text preprocessing: noise filtration, symbol replacement, boundary-aware
tokenization and normalization, producing a clean sentence-segmented corpus."""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, CorpusDecodeError

# Punctuation replaced by a single space each.  Deliberately excludes the
# sentence-boundary marks (ASCII and Arabic-script full stop / question mark).
DEFAULT_REPLACEMENT_CHARS = frozenset(
    ",!:;\"'()[]{}<>/\\|@#$%^&*_+=~`-"
    "،"  # Arabic comma
    "؛"  # Arabic semicolon
    "٪"  # Arabic percent sign
    "٫"  # Arabic decimal separator
    "٬"  # Arabic thousands separator
    "٭"  # Arabic five pointed star
    "«»"  # guillemets
    "‘’“”"  # curly quotes
    "–—‐"  # dashes
    "…"  # ellipsis
)

# Sentence terminators; they also act as token separators and are never
# emitted as tokens.
DEFAULT_BOUNDARY_CHARS = frozenset({".", "?", "۔", "؟"})

DEFAULT_NOISE_PATTERNS = ("html_tag", "url", "email", "numeric", "math_symbol")

# Digit runs count as noise only when not attached to an alphanumeric on
# either side; mixed alphanumeric tokens are kept.  [^\W_] matches letters
# and digits of any script.
_NOISE_REGEXES = {
    "html_tag": re.compile(r"<[^<>]+>"),
    "url": re.compile(r"(?:https?://|www\.)\S+"),
    "email": re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}"),
    "numeric": re.compile(r"(?<![^\W_])[0-9٠-٩۰-۹]+(?![^\W_])"),
    "math_symbol": re.compile(
        r"[+=<>^~|±×÷−≈≠≤≥"
        r"√∑∏∫∞]+"
    ),
}


@dataclass
class PipelineConfig:
    replacement_chars: frozenset[str] = DEFAULT_REPLACEMENT_CHARS
    boundary_chars: frozenset[str] = DEFAULT_BOUNDARY_CHARS
    noise_patterns: tuple[str, ...] = DEFAULT_NOISE_PATTERNS
    lowercase: bool = True
    drop_latin_tokens: bool = True

    def validate(self) -> None:
        overlap = set(self.replacement_chars) & set(self.boundary_chars)
        if overlap:
            raise ConfigError(f"replacement and boundary chars overlap: {sorted(overlap)!r}")
        unknown = [p for p in self.noise_patterns if p not in _NOISE_REGEXES]
        if unknown:
            raise ConfigError(f"unknown noise pattern classes: {unknown}")

    @property
    def replacement_table(self) -> dict[int, str]:
        return {ord(c): " " for c in self.replacement_chars}


@dataclass
class CleanCorpus:
    """Ordered sentences of normalized tokens plus provenance."""

    sentences: list[list[str]]
    token_count: int
    source_manifest: list[tuple[str, int]] = field(default_factory=list)

    @classmethod
    def from_sentences(
        cls, sentences: list[list[str]], manifest: list[tuple[str, int]] | None = None
    ) -> "CleanCorpus":
        return cls(
            sentences=sentences,
            token_count=sum(len(s) for s in sentences),
            source_manifest=list(manifest or []),
        )

    def tokens(self):
        for sentence in self.sentences:
            yield from sentence


def _decode(raw: bytes, path: str | None = None) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        where = f" in {path}" if path else ""
        raise CorpusDecodeError(
            f"invalid UTF-8 at byte offset {exc.start}{where}", path=path, offset=exc.start
        ) from exc


def strip_noise(raw: str | bytes, config: PipelineConfig | None = None) -> str:
    """Remove HTML tags, URLs, emails, standalone digit runs and math symbols.

    Each removed span becomes a single space; everything else is untouched.
    """
    config = config or PipelineConfig()
    text = _decode(raw) if isinstance(raw, bytes) else raw
    for name in config.noise_patterns:
        text = _NOISE_REGEXES[name].sub(" ", text)
    return text


def replace_symbols(text: str, config: PipelineConfig | None = None) -> str:
    """Replace every configured punctuation code point with one space each."""
    config = config or PipelineConfig()
    return text.translate(config.replacement_table)


def tokenize(text: str, config: PipelineConfig | None = None) -> list[list[str]]:
    """Split on whitespace runs and boundary chars; each boundary char closes
    the current sentence.  Boundary chars are consumed, not emitted."""
    config = config or PipelineConfig()
    boundary = config.boundary_chars
    sentences: list[list[str]] = []
    sentence: list[str] = []
    token: list[str] = []
    for ch in text:
        if ch in boundary:
            if token:
                sentence.append("".join(token))
                token = []
            if sentence:
                sentences.append(sentence)
                sentence = []
        elif ch.isspace():
            if token:
                sentence.append("".join(token))
                token = []
        else:
            token.append(ch)
    if token:
        sentence.append("".join(token))
    if sentence:
        sentences.append(sentence)
    return sentences


def _is_latin_letter(ch: str) -> bool:
    o = ord(ch)
    if 0x41 <= o <= 0x5A or 0x61 <= o <= 0x7A:
        return True
    if 0xC0 <= o <= 0xFF:
        return o not in (0xD7, 0xF7)
    return 0x100 <= o <= 0x24F or 0x1E00 <= o <= 0x1EFF


def _normalize_token(token: str, config: PipelineConfig) -> str | None:
    if config.lowercase:
        token = "".join(c.lower() if _is_latin_letter(c) else c for c in token)
    if config.drop_latin_tokens and all(_is_latin_letter(c) for c in token):
        return None
    return token


def _process_text(text: str, config: PipelineConfig) -> list[list[str]]:
    text = strip_noise(text, config)
    text = replace_symbols(text, config)
    sentences = []
    for raw_sentence in tokenize(text, config):
        kept = [t for t in (_normalize_token(tok, config) for tok in raw_sentence) if t]
        if kept:
            sentences.append(kept)
    return sentences


def _process_file(path: Path, config: PipelineConfig) -> tuple[list[list[str]], int]:
    raw = path.read_bytes()
    return _process_text(_decode(raw, str(path)), config), len(raw)


def run_pipeline(
    paths: list[str | Path],
    config: PipelineConfig | None = None,
    threads: int = 1,
) -> CleanCorpus:
    """Apply strip_noise -> replace_symbols -> tokenize -> normalization to
    each file, merging results in manifest (argument) order.

    Any unreadable or undecodable file aborts the whole run.
    """
    config = config or PipelineConfig()
    config.validate()
    path_objs = [Path(p) for p in paths]
    if threads > 1 and len(path_objs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda p: _process_file(p, config), path_objs))
    else:
        results = [_process_file(p, config) for p in path_objs]
    sentences: list[list[str]] = []
    manifest: list[tuple[str, int]] = []
    for path, (file_sentences, nbytes) in zip(path_objs, results):
        sentences.extend(file_sentences)
        manifest.append((str(path), nbytes))
    return CleanCorpus.from_sentences(sentences, manifest)


def run_pipeline_on_text(text: str, config: PipelineConfig | None = None) -> CleanCorpus:
    """Pipeline over an in-memory string; used by tests and small tools."""
    config = config or PipelineConfig()
    config.validate()
    return CleanCorpus.from_sentences(_process_text(text, config))


def default_manifest_path(corpus_path: str | Path) -> Path:
    return Path(str(corpus_path) + ".manifest.json")


def save_corpus(
    corpus: CleanCorpus,
    path: str | Path,
    manifest_path: str | Path | None = None,
) -> None:
    """One sentence per line, tokens space-separated, UTF-8, LF endings."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for sentence in corpus.sentences:
            fh.write(" ".join(sentence))
            fh.write("\n")
    manifest = {
        "files": [{"path": p, "bytes": n} for p, n in corpus.source_manifest],
        "sentences": len(corpus.sentences),
        "tokens": corpus.token_count,
    }
    mpath = Path(manifest_path) if manifest_path else default_manifest_path(path)
    mpath.write_text(json.dumps(manifest, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")


def load_corpus(path: str | Path, manifest_path: str | Path | None = None) -> CleanCorpus:
    """Load a serialized corpus; each non-empty line is one sentence."""
    path = Path(path)
    sentences = []
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            tokens = line.split()
            if tokens:
                sentences.append(tokens)
    manifest: list[tuple[str, int]] = []
    mpath = Path(manifest_path) if manifest_path else default_manifest_path(path)
    if mpath.exists():
        meta = json.loads(mpath.read_text(encoding="utf-8"))
        manifest = [(f["path"], f["bytes"]) for f in meta.get("files", [])]
    else:
        manifest = [(str(path), path.stat().st_size)]
    return CleanCorpus.from_sentences(sentences, manifest)
