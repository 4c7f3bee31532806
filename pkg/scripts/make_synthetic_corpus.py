#!/usr/bin/env python3
"""Generate the planted-effect corpus pair (papers.jsonl / reviews.jsonl).

The backbone literature is pre-cutoff (trains the n-gram backend and
anchors journal impact factors); focal papers are post-cutoff with a
known injection intensity that drives perplexity, venue extremes,
review disparity, and interdisciplinary referencing.

Usage:
    python scripts/make_synthetic_corpus.py --out data/ --papers 10000 --seed 7
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from scippl.synthdata import CUTOFF, JIF_YEAR, write_planted_corpus  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data", help="output directory")
    parser.add_argument("--papers", type=int, default=10_000,
                        help="number of focal papers")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    write_planted_corpus(outdir / "papers.jsonl", outdir / "reviews.jsonl",
                         n_papers=args.papers, seed=args.seed)
    print(f"wrote {outdir / 'papers.jsonl'} and {outdir / 'reviews.jsonl'}")
    print(f"suggested flags: --cutoff {CUTOFF} --jif-year {JIF_YEAR}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
