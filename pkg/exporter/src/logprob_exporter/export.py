"""Per-token log-probability extraction from a causal language model.

Reads papers.jsonl, scores each abstract under the model, and emits
logprobs.jsonl: one object per document with the model tokenizer's
tokens and the natural-log probability of each token conditioned on its
preceding context.  Values are written as full-precision decimal text.

BOS convention: when the tokenizer defines a BOS token it is prepended
as context, so every abstract token gets a conditional log-probability.
Without a BOS the first token has no context; it is omitted from both
the token list and the logprob list, and the line records
first_token_dropped = true.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import torch

logger = logging.getLogger("logprob_exporter")


@dataclass
class ExportJob:
    input_path: str
    model_name: str
    output_path: str
    batch_size: int = 8
    max_length: Optional[int] = None
    device: str = "cpu"
    model_id: Optional[str] = None     # defaults to model_name

    def resolved_model_id(self) -> str:
        return self.model_id or self.model_name


@dataclass
class ExportReport:
    exported: int = 0
    skipped_empty: int = 0
    truncated: int = 0
    perplexities: dict = field(default_factory=dict)


def load_model(job: ExportJob):
    from transformers import AutoModelForCausalLM, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(job.model_name)
    model = AutoModelForCausalLM.from_pretrained(job.model_name)
    model.to(job.device)
    model.eval()
    return model, tokenizer


def _read_documents(path: str) -> Iterable[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def _context_window(model, job: ExportJob) -> int:
    limit = getattr(model.config, "n_positions", None) or \
        getattr(model.config, "max_position_embeddings", None) or 1024
    if job.max_length:
        limit = min(limit, job.max_length)
    return int(limit)


@torch.no_grad()
def _score_batch(model, tokenizer, batch_ids: List[List[int]], device: str):
    """Per-token logprobs for right-padded sequences (full ids incl. BOS)."""
    pad_id = tokenizer.pad_token_id
    if pad_id is None:
        pad_id = tokenizer.eos_token_id or 0
    width = max(len(ids) for ids in batch_ids)
    input_ids = torch.full((len(batch_ids), width), pad_id, dtype=torch.long)
    mask = torch.zeros((len(batch_ids), width), dtype=torch.long)
    for row, ids in enumerate(batch_ids):
        input_ids[row, :len(ids)] = torch.tensor(ids, dtype=torch.long)
        mask[row, :len(ids)] = 1
    input_ids = input_ids.to(device)
    mask = mask.to(device)
    logits = model(input_ids=input_ids, attention_mask=mask).logits
    logprobs = torch.log_softmax(logits[:, :-1].float(), dim=-1)
    targets = input_ids[:, 1:].unsqueeze(-1)
    gathered = logprobs.gather(2, targets).squeeze(-1)
    out = []
    for row, ids in enumerate(batch_ids):
        out.append(gathered[row, :len(ids) - 1].double().cpu().tolist())
    return out


def export_logprobs(job: ExportJob) -> ExportReport:
    """Run the export job; returns a report with exporter-side perplexities."""
    model, tokenizer = load_model(job)
    window = _context_window(model, job)
    has_bos = tokenizer.bos_token_id is not None
    report = ExportReport()
    model_id = job.resolved_model_id()

    pending: List[tuple] = []   # (doc_id, token_strings, full_ids, truncated)

    def flush(out_fh):
        if not pending:
            return
        rows = _score_batch(model, tokenizer, [p[2] for p in pending],
                            job.device)
        for (doc_id, tokens, _ids, was_truncated), lps in zip(pending, rows):
            if not lps:
                report.skipped_empty += 1
                continue
            clipped = [min(v, 0.0) for v in lps]
            ppl = math.exp(-math.fsum(clipped) / len(clipped))
            record = {"doc_id": doc_id, "model_id": model_id,
                      "tokens": tokens, "logprobs": clipped}
            if not has_bos:
                record["first_token_dropped"] = True
            out_fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            report.exported += 1
            report.truncated += was_truncated
            report.perplexities[doc_id] = ppl
        pending.clear()

    with open(job.output_path, "w", encoding="utf-8") as out_fh:
        for obj in _read_documents(job.input_path):
            doc_id = obj.get("doc_id", "")
            abstract = str(obj.get("abstract", "") or "")
            if not abstract.strip():
                report.skipped_empty += 1
                continue
            ids = tokenizer(abstract, add_special_tokens=False)["input_ids"]
            if not ids:
                report.skipped_empty += 1
                continue
            budget = window - 1 if has_bos else window
            truncated = 0
            if len(ids) > budget:
                logger.warning("document %s truncated from %d to %d tokens",
                               doc_id, len(ids), budget)
                ids = ids[:budget]
                truncated = 1
            token_strings = tokenizer.convert_ids_to_tokens(ids)
            if has_bos:
                full = [tokenizer.bos_token_id] + list(ids)
            else:
                # no BOS: the first token has no context and is dropped
                full = list(ids)
                token_strings = token_strings[1:]
            pending.append((doc_id, token_strings, full, truncated))
            if len(pending) >= job.batch_size:
                flush(out_fh)
        flush(out_fh)
    logger.info("exported %d documents (%d skipped, %d truncated)",
                report.exported, report.skipped_empty, report.truncated)
    return report
