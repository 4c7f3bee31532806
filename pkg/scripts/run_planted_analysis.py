#!/usr/bin/env python3
"""End-to-end demonstration on a generated planted corpus.

Generates the corpus, ingests, trains the n-gram backend on pre-cutoff
papers, scores the post-cutoff papers, and runs the full analysis
battery, leaving CSVs and SVG charts in the output directory.

Usage:
    python scripts/run_planted_analysis.py --out runs/demo --papers 10000
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from scippl.cli import main as cli  # noqa: E402
from scippl.synthdata import CUTOFF, JIF_YEAR, write_planted_corpus  # noqa: E402

PIPELINES = (
    ["analyze", "jif"],
    ["analyze", "extreme-share", "--flag", "jif-top"],
    ["analyze", "extreme-share", "--flag", "jif-bottom"],
    ["analyze", "extreme-share", "--flag", "delay-long"],
    ["analyze", "extreme-share", "--flag", "delay-short"],
    ["analyze", "extreme-share", "--flag", "retracted"],
    ["analyze", "extreme-share", "--flag", "review"],
    ["analyze", "disparity"],
    ["analyze", "delay"],
    ["analyze", "uncertainty"],
    ["analyze", "word-ratio"],
    ["analyze", "jif-citation"],
    ["analyze", "interdisciplinarity"],
    ["analyze", "group-share", "--label", "funders"],
    ["analyze", "group-share", "--label", "doc-type"],
    ["analyze", "group-share", "--label", "retracted"],
    ["analyze", "reference-age"],
    ["report"],
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs/demo")
    parser.add_argument("--papers", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    write_planted_corpus(outdir / "papers.jsonl", outdir / "reviews.jsonl",
                         n_papers=args.papers, seed=args.seed)
    print(f"[{time.time() - t0:5.1f}s] corpus generated", file=sys.stderr)
    base = ["--papers", str(outdir / "papers.jsonl"),
            "--reviews", str(outdir / "reviews.jsonl"),
            "--out", str(outdir / "out"), "--cutoff", CUTOFF,
            "--jif-year", str(JIF_YEAR), "--seed", str(args.seed), "--svg"]
    for cmd in (["ingest"], ["train-lm"], ["score"], *PIPELINES):
        rc = cli(base + list(cmd))
        print(f"[{time.time() - t0:5.1f}s] {' '.join(cmd)} -> {rc}",
              file=sys.stderr)
        if rc != 0:
            return rc
    print(f"done in {time.time() - t0:.1f}s; outputs in {outdir / 'out'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
