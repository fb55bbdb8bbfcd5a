"""Command-line interface: preprocess, stats, stopwords, cooccur,
train {cbow|sg|glove}, eval {neighbors|pairs|wordsim}, export."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import cooccur as cooccur_mod
from . import embio, eval as eval_mod, glove as glove_mod, w2v as w2v_mod
from .errors import EmbkitError, ParseError
from .pipeline import (
    DEFAULT_BOUNDARY_CHARS,
    DEFAULT_REPLACEMENT_CHARS,
    PipelineConfig,
    load_corpus,
    run_pipeline,
    save_corpus,
)
from .vocab import (
    build_vocab,
    save_length_stats_tsv,
    save_stopwords_tsv,
    save_vocab_tsv,
    stopword_candidates,
    word_length_stats,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this artifact reserves 2 for data."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config_file(path: str | Path) -> dict[str, str]:
    """key=value lines, '#' comments, keys normalized to underscores."""
    settings: dict[str, str] = {}
    path = Path(path)
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParseError(f"{path}:{lineno}: expected key=value", line=lineno)
        key, _, value = stripped.partition("=")
        settings[key.strip().replace("-", "_")] = value.strip()
    return settings


class Resolver:
    """Explicit flag > config file value > built-in default."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = parse_config_file(args.config) if getattr(args, "config", None) else {}

    def get(self, dest: str, default, cast=None):
        value = getattr(self.args, dest, None)
        if value is not None:
            return value
        if dest in self.config:
            raw = self.config[dest]
            if cast is bool or isinstance(default, bool):
                return _parse_bool(raw)
            if cast is not None:
                return cast(raw)
            if default is not None:
                return type(default)(raw)
            return raw
        return default


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE",
                        help="key=value settings file, overridden by explicit flags")
    parser.add_argument("--seed", type=int, help="RNG seed (default: 1)")
    parser.add_argument("--threads", type=int, help="worker threads (default: 1)")


def build_parser() -> _Parser:
    parser = _Parser(prog="embkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("preprocess", parents=[], help="clean raw text into a corpus file")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="PATH",
                   help="input files and/or directories of UTF-8 text")
    p.add_argument("--out", required=True, help="corpus output path")
    p.add_argument("--manifest", help="manifest sidecar path (default: <out>.manifest.json)")
    p.add_argument("--lowercase", action=argparse.BooleanOptionalAction,
                   help="case-fold Latin ranges (default: true)")
    p.add_argument("--drop-latin", dest="drop_latin", action=argparse.BooleanOptionalAction,
                   help="drop all-Latin tokens (default: true)")
    p.add_argument("--boundary-chars", dest="boundary_chars",
                   help="sentence boundary characters (default: . ? ۔ ؟)")
    p.add_argument("--replacement-chars", dest="replacement_chars",
                   help="characters replaced by spaces (default: common punctuation)")
    _add_common(p)

    p = sub.add_parser("stats", help="word-length histogram and vocabulary TSV")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", help="length-stats TSV path (default: stdout)")
    p.add_argument("--vocab-out", dest="vocab_out", help="vocabulary TSV path")
    p.add_argument("--min-count", dest="min_count", type=int,
                   help="minimum frequency to keep a word (default: 5)")
    _add_common(p)

    p = sub.add_parser("stopwords", help="frequency-ranked stop-word candidates")
    p.add_argument("--corpus", required=True)
    p.add_argument("--top", type=int, help="number of candidates (default: 500)")
    p.add_argument("--out", help="candidates TSV path (default: stdout)")
    p.add_argument("--min-count", dest="min_count", type=int,
                   help="minimum frequency to keep a word (default: 5)")
    _add_common(p)

    p = sub.add_parser("cooccur", help="build the co-occurrence store")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="output shard directory")
    p.add_argument("--ws", type=int, help="window size (default: 7)")
    p.add_argument("--min-count", dest="min_count", type=int,
                   help="minimum frequency to keep a word (default: 5)")
    _add_common(p)

    p = sub.add_parser("train", help="train embeddings")
    tsub = p.add_subparsers(dest="algorithm", metavar="ALGORITHM")
    for algo in ("cbow", "sg"):
        tp = tsub.add_parser(algo, help=f"train {algo} embeddings")
        tp.add_argument("--corpus", required=True)
        tp.add_argument("--out", required=True, help="output .vec path")
        tp.add_argument("--dim", type=int, help="embedding dimension (default: 300)")
        tp.add_argument("--lr", type=float, help="initial learning rate (default: 0.25)")
        tp.add_argument("--epochs", type=int, help="training epochs (default: 100)")
        tp.add_argument("--ws", type=int, help="context window size (default: 7)")
        if algo == "sg":
            tp.add_argument("--neg", type=int, help="negative samples (default: 20)")
        tp.add_argument("--minn", type=int, help="min char n-gram length (default: 2)")
        tp.add_argument("--maxn", type=int, help="max char n-gram length (default: 7)")
        tp.add_argument("--buckets", type=int,
                        help="subword hash buckets (default: 2000000)")
        tp.add_argument("--sample", type=float,
                        help="subsampling threshold t (default: 1e-4)")
        tp.add_argument("--min-count", dest="min_count", type=int,
                        help="minimum frequency to keep a word (default: 5)")
        tp.add_argument("--fixed-window", dest="fixed_window", action="store_true",
                        default=None, help="disable dynamic window sampling")
        if algo == "sg":
            tp.add_argument("--table-size", dest="table_size", type=int,
                            help="unigram table size (default: 10000000)")
        tp.add_argument("--loss-log", dest="loss_log", help="epoch loss TSV path")
        _add_common(tp)
    tp = tsub.add_parser("glove", help="train GloVe embeddings")
    tp.add_argument("--corpus", required=True)
    tp.add_argument("--cooccur", required=True, help="co-occurrence shard directory")
    tp.add_argument("--out", required=True, help="output .vec path")
    tp.add_argument("--dim", type=int, help="embedding dimension (default: 300)")
    tp.add_argument("--lr", type=float, help="initial learning rate (default: 0.25)")
    tp.add_argument("--epochs", type=int, help="training epochs (default: 100)")
    tp.add_argument("--x-max", dest="x_max", type=float,
                    help="weighting cap (default: 100)")
    tp.add_argument("--alpha", type=float, help="weighting exponent (default: 0.75)")
    tp.add_argument("--min-count", dest="min_count", type=int,
                    help="minimum frequency to keep a word (default: 5)")
    tp.add_argument("--loss-log", dest="loss_log", help="epoch loss TSV path")
    _add_common(tp)

    p = sub.add_parser("eval", help="intrinsic evaluation")
    esub = p.add_subparsers(dest="report", metavar="REPORT")
    ep = esub.add_parser("neighbors", help="top-k nearest neighbors of a query word")
    ep.add_argument("--emb", required=True, help=".vec or .emb1 path")
    ep.add_argument("--query", required=True)
    ep.add_argument("--k", type=int, help="neighbors to return (default: 8)")
    _add_common(ep)
    ep = esub.add_parser("pairs", help="cosine report over a word-pair TSV")
    ep.add_argument("--emb", required=True)
    ep.add_argument("--file", required=True, help="TSV word_a<TAB>word_b")
    ep.add_argument("--out", help="report TSV path (default: stdout only)")
    _add_common(ep)
    ep = esub.add_parser("wordsim", help="Spearman rho against gold similarity scores")
    ep.add_argument("--emb", required=True)
    ep.add_argument("--file", required=True, help="TSV word_a<TAB>word_b<TAB>score")
    _add_common(ep)

    p = sub.add_parser("export", help="TSV export for 2-D visualization tooling")
    p.add_argument("--emb", required=True)
    p.add_argument("--words-file", dest="words_file", help="file with one word per line")
    p.add_argument("--word", action="append", dest="word_list", metavar="WORD",
                   help="word to export (repeatable)")
    p.add_argument("--out", required=True, help="output TSV path")
    _add_common(p)

    return parser


def _expand_inputs(inputs: list[str]) -> list[Path]:
    paths: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(q for q in p.rglob("*") if q.is_file()))
        else:
            paths.append(p)
    return paths


def _load_corpus_vocab(res: Resolver, corpus_path: str):
    corpus = load_corpus(corpus_path)
    vocab = build_vocab(corpus, min_count=res.get("min_count", 5))
    return corpus, vocab


def _write_loss_log(path: str | None, losses: list[float]) -> None:
    if not path:
        return
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("epoch\tmean_loss\n")
        for epoch, loss in enumerate(losses, start=1):
            fh.write(f"{epoch}\t{loss:.10g}\n")


def _cmd_preprocess(args) -> int:
    res = Resolver(args)
    config = PipelineConfig(
        replacement_chars=frozenset(res.get("replacement_chars", None, cast=str))
        if res.get("replacement_chars", None, cast=str)
        else DEFAULT_REPLACEMENT_CHARS,
        boundary_chars=frozenset(res.get("boundary_chars", None, cast=str))
        if res.get("boundary_chars", None, cast=str)
        else DEFAULT_BOUNDARY_CHARS,
        lowercase=res.get("lowercase", True),
        drop_latin_tokens=res.get("drop_latin", True),
    )
    paths = _expand_inputs(args.inputs)
    corpus = run_pipeline(paths, config, threads=res.get("threads", 1))
    save_corpus(corpus, args.out, manifest_path=args.manifest)
    print(f"sentences\t{len(corpus.sentences)}")
    print(f"tokens\t{corpus.token_count}")
    return EXIT_OK


def _cmd_stats(args) -> int:
    res = Resolver(args)
    corpus, vocab = _load_corpus_vocab(res, args.corpus)
    stats = word_length_stats(corpus)
    if args.out:
        save_length_stats_tsv(stats, args.out)
    else:
        print("length\tfrequency\tpercent")
        for length, freq, percent in stats.rows:
            print(f"{length}\t{freq}\t{percent:.4f}")
        print(f"total\t{stats.total}\t100.0000")
    if res.get("vocab_out", None, cast=str):
        save_vocab_tsv(vocab, res.get("vocab_out", None, cast=str))
    return EXIT_OK


def _cmd_stopwords(args) -> int:
    res = Resolver(args)
    _, vocab = _load_corpus_vocab(res, args.corpus)
    candidates = stopword_candidates(vocab, res.get("top", 500))
    if args.out:
        save_stopwords_tsv(candidates, args.out)
    else:
        for word, count, relfreq in candidates.ranked:
            print(f"{word}\t{count}\t{relfreq:.8g}")
    return EXIT_OK


def _cmd_cooccur(args) -> int:
    res = Resolver(args)
    corpus, vocab = _load_corpus_vocab(res, args.corpus)
    store = cooccur_mod.accumulate_cooccurrence(
        corpus, vocab, ws=res.get("ws", 7), threads=res.get("threads", 1)
    )
    paths = cooccur_mod.save_store(store, args.out)
    print(f"records\t{len(store)}")
    print(f"shards\t{len(paths)}")
    return EXIT_OK


def _cmd_train(args) -> int:
    res = Resolver(args)
    if not getattr(args, "algorithm", None):
        raise _UsageError("train requires an algorithm: cbow, sg or glove")
    corpus, vocab = _load_corpus_vocab(res, args.corpus)
    if args.algorithm == "glove":
        store = cooccur_mod.load_store(args.cooccur)
        config = glove_mod.GloveConfig(
            dim=res.get("dim", 300),
            lr=res.get("lr", 0.25),
            epochs=res.get("epochs", 100),
            x_max=res.get("x_max", 100.0),
            alpha=res.get("alpha", 0.75),
            seed=res.get("seed", 1),
            threads=res.get("threads", 1),
        )
        emb = glove_mod.train_glove(store, vocab, config)
    else:
        config = w2v_mod.W2vConfig(
            mode=args.algorithm,
            dim=res.get("dim", 300),
            lr=res.get("lr", 0.25),
            epochs=res.get("epochs", 100),
            ws=res.get("ws", 7),
            negatives=res.get("neg", 20) if args.algorithm == "sg" else 0,
            minn=res.get("minn", 2),
            maxn=res.get("maxn", 7),
            n_buckets=res.get("buckets", 2_000_000),
            subsample_t=res.get("sample", 1e-4),
            seed=res.get("seed", 1),
            threads=res.get("threads", 1),
            dynamic_window=not res.get("fixed_window", False),
            table_size=res.get("table_size", 10_000_000) if args.algorithm == "sg" else 10_000_000,
        )
        emb = w2v_mod.train(corpus, vocab, config)
    embio.save_text(emb, args.out)
    _write_loss_log(res.get("loss_log", None, cast=str), emb.metadata["epoch_losses"])
    losses = emb.metadata["epoch_losses"]
    print(f"vectors\t{args.out}")
    if losses:
        print(f"final_mean_loss\t{losses[-1]:.10g}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    res = Resolver(args)
    if not getattr(args, "report", None):
        raise _UsageError("eval requires a report: neighbors, pairs or wordsim")
    emb = embio.load_embedding(args.emb)
    if args.report == "neighbors":
        neighbors = eval_mod.nearest_neighbors(emb, args.query, k=res.get("k", 8))
        for rank, (word, cos) in enumerate(neighbors, start=1):
            print(f"{rank}\t{word}\t{cos:.6f}")
        return EXIT_OK
    if args.report == "pairs":
        pairs = _load_pairs_tsv(args.file)
        report = eval_mod.pair_similarity_report(emb, pairs)
        lines = [f"{a}\t{b}\t{cos:.6f}" for a, b, cos in report.pair_rows]
        lines.append(f"average\t\t{report.pair_average:.6f}")
        for word in report.oov_words:
            lines.append(f"oov\t{word}\t")
        text = "\n".join(lines)
        print(text)
        if args.out:
            Path(args.out).write_text(text + "\n", encoding="utf-8")
        return EXIT_OK
    dataset = eval_mod.load_wordsim_tsv(args.file)
    report = eval_mod.wordsim_eval(emb, dataset)
    print(f"spearman\t{report.spearman_rho:.6f}")
    print(f"pairs_used\t{len(report.pair_rows)}")
    for word in report.oov_words:
        print(f"oov\t{word}")
    return EXIT_OK


def _cmd_export(args) -> int:
    emb = embio.load_embedding(args.emb)
    words: list[str] = []
    if args.words_file:
        for line in Path(args.words_file).read_text(encoding="utf-8").splitlines():
            token = line.strip()
            if token:
                words.append(token)
    if args.word_list:
        words.extend(args.word_list)
    report = embio.export_tsv(emb, words, args.out)
    print(f"written\t{len(report.written)}")
    if report.skipped:
        print("skipped\t" + "\t".join(report.skipped))
    if report.duplicates:
        print("duplicates\t" + "\t".join(report.duplicates))
    return EXIT_OK


def _load_pairs_tsv(path: str | Path) -> list[tuple[str, str]]:
    pairs: list[tuple[str, str]] = []
    path = Path(path)
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise ParseError(f"{path}:{lineno}: expected word_a<TAB>word_b", line=lineno)
        pairs.append((parts[0], parts[1]))
    return pairs


class _UsageError(Exception):
    pass


_COMMANDS = {
    "preprocess": _cmd_preprocess,
    "stats": _cmd_stats,
    "stopwords": _cmd_stopwords,
    "cooccur": _cmd_cooccur,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "export": _cmd_export,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"embkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EmbkitError, OSError) as exc:
        print(f"embkit: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
