"""Command line for the logprob exporter.

ppl-export --input papers.jsonl --model <name-or-path> --output logprobs.jsonl
           [--batch-size 8] [--max-length N] [--device cpu] [--model-id ID]
"""

from __future__ import annotations

import argparse
import logging
import sys

from .export import ExportJob, export_logprobs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ppl-export", description=__doc__)
    parser.add_argument("--input", required=True, help="papers.jsonl path")
    parser.add_argument("--model", required=True,
                        help="causal LM name or local checkpoint path")
    parser.add_argument("--output", required=True, help="logprobs.jsonl path")
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument("--max-length", type=int, default=None,
                        help="cap on scored tokens per document")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--model-id", default=None,
                        help="model_id written to the wire format "
                             "(defaults to --model)")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    job = ExportJob(input_path=args.input, model_name=args.model,
                    output_path=args.output, batch_size=args.batch_size,
                    max_length=args.max_length, device=args.device,
                    model_id=args.model_id)
    try:
        report = export_logprobs(job)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"exported {report.exported} documents "
          f"({report.skipped_empty} skipped, {report.truncated} truncated)",
          file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
