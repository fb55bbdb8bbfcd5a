#!/usr/bin/env python3
"""Exercise the whole CLI on a small generated corpus: preprocess raw text,
emit statistics and stop-word candidates, build co-occurrence shards, train
all three models, and run every evaluation report."""

from __future__ import annotations

import argparse
import sys
import tempfile
from pathlib import Path

import numpy as np

from embkit.cli import main as embkit


RAW_TEMPLATE = [
    "ويا اچي ڪالهه {a}. اچي {b} ويا ڪالهه؟",
    "<b>اشتهار</b> {a} دنيا {b} اچي. ڏسو http://example.org/page هتي {a}.",
    "ڪالهه {b} 123 اچي {a} دنيا. اي ميل test@example.com ويا.",
]


def make_raw_corpus(raw_dir: Path, seed: int) -> None:
    rng = np.random.default_rng(seed)
    fillers = ["سياري", "بهار", "آچر", "سومر", "ڪرڪيٽ", "راند", "ڳاڙهو", "نيرو"]
    raw_dir.mkdir(parents=True, exist_ok=True)
    for f in range(3):
        lines = []
        for _ in range(120):
            template = RAW_TEMPLATE[int(rng.integers(0, len(RAW_TEMPLATE)))]
            a, b = rng.choice(fillers, size=2, replace=False)
            lines.append(template.format(a=a, b=b))
        (raw_dir / f"source{f}.txt").write_text("\n".join(lines), encoding="utf-8")


def run(argv: list) -> None:
    argv = [str(a) for a in argv]
    print(f"\n$ embkit {' '.join(argv)}")
    code = embkit(argv)
    if code != 0:
        sys.exit(f"command failed with exit code {code}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", help="working directory (default: temp dir)")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    ctx = (
        tempfile.TemporaryDirectory(prefix="embkit-demo-")
        if not args.workdir
        else None
    )
    base = Path(args.workdir) if args.workdir else Path(ctx.name)
    raw = base / "raw"
    make_raw_corpus(raw, args.seed)

    corpus = base / "corpus.txt"
    run(["preprocess", "--in", raw, "--out", corpus])
    run(["stats", "--corpus", corpus, "--min-count", "1",
         "--out", base / "length_stats.tsv", "--vocab-out", base / "vocab.tsv"])
    run(["stopwords", "--corpus", corpus, "--min-count", "1", "--top", "5"])
    run(["cooccur", "--corpus", corpus, "--out", base / "cooc", "--ws", "5",
         "--min-count", "1"])

    fast = ["--min-count", "1", "--dim", "24", "--epochs", "10", "--ws", "5",
            "--buckets", "5000", "--sample", "1", "--seed", str(args.seed)]
    run(["train", "sg", "--corpus", corpus, "--out", base / "sg.vec",
         "--neg", "5", "--table-size", "50000",
         "--loss-log", base / "sg_loss.tsv", *fast])
    run(["train", "cbow", "--corpus", corpus, "--out", base / "cbow.vec", *fast])
    run(["train", "glove", "--corpus", corpus, "--cooccur", base / "cooc",
         "--out", base / "glove.vec", "--min-count", "1", "--dim", "24",
         "--epochs", "15", "--lr", "0.05", "--seed", str(args.seed)])

    run(["eval", "neighbors", "--emb", base / "sg.vec", "--query", "سياري",
         "--k", "5"])
    pairs = base / "pairs.tsv"
    pairs.write_text("سياري\tبهار\nآچر\tسومر\nڪرڪيٽ\tراند\n", encoding="utf-8")
    run(["eval", "pairs", "--emb", base / "sg.vec", "--file", pairs])
    ws = base / "wordsim.tsv"
    ws.write_text(
        "سياري\tبهار\t8.0\nآچر\tسومر\t7.0\nڪرڪيٽ\tراند\t6.0\nسياري\tراند\t2.0\n",
        encoding="utf-8",
    )
    run(["eval", "wordsim", "--emb", base / "sg.vec", "--file", ws])
    run(["export", "--emb", base / "sg.vec", "--word", "سياري", "--word", "بهار",
         "--word", "ڪرڪيٽ", "--out", base / "viz.tsv"])

    print(f"\nartifacts left in {base}" if args.workdir else "\ndone (temp dir cleaned up)")
    if ctx:
        ctx.cleanup()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
