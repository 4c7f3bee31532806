"""Builds a tiny local causal-LM checkpoint for exporter tests.

A word-level tokenizer over a small vocabulary plus a 2-layer GPT-2
style model with seeded random weights, saved once per session and
loaded through the standard from_pretrained path.
"""

import json

import pytest
import torch
from tokenizers import Tokenizer, models, pre_tokenizers
from transformers import GPT2Config, GPT2LMHeadModel, PreTrainedTokenizerFast

WORDS = [f"term{i:03d}" for i in range(180)] + ["alpha", "beta", "gamma",
                                                "delta", "epsilon"]


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    ckpt = tmp_path_factory.mktemp("tiny-lm")
    vocab = {"[PAD]": 0, "[UNK]": 1, "[BOS]": 2, "[EOS]": 3}
    for w in WORDS:
        vocab[w] = len(vocab)
    tok = Tokenizer(models.WordLevel(vocab, unk_token="[UNK]"))
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    fast = PreTrainedTokenizerFast(tokenizer_object=tok, unk_token="[UNK]",
                                   pad_token="[PAD]", bos_token="[BOS]",
                                   eos_token="[EOS]")
    fast.save_pretrained(ckpt)
    torch.manual_seed(1234)
    config = GPT2Config(vocab_size=len(vocab), n_positions=64, n_embd=32,
                        n_layer=2, n_head=2, bos_token_id=2, eos_token_id=3,
                        pad_token_id=0)
    GPT2LMHeadModel(config).save_pretrained(ckpt)
    return str(ckpt)


@pytest.fixture()
def papers_file(tmp_path):
    """20 scoreable documents plus edge cases."""
    rng = torch.Generator().manual_seed(9)
    lines = []
    for i in range(20):
        length = 8 + int(torch.randint(0, 24, (1,), generator=rng))
        idx = torch.randint(0, len(WORDS), (length,), generator=rng)
        abstract = " ".join(WORDS[j] for j in idx)
        lines.append(json.dumps({"doc_id": f"doc{i:02d}", "title": "t",
                                 "abstract": abstract,
                                 "pub_date": "2024-02-01",
                                 "journal_id": "j", "doc_type": "research"}))
    lines.append(json.dumps({"doc_id": "empty", "abstract": "",
                             "pub_date": "2024-02-01"}))
    lines.append(json.dumps({"doc_id": "long", "title": "t",
                             "abstract": " ".join(WORDS[i % len(WORDS)]
                                                  for i in range(300)),
                             "pub_date": "2024-02-01"}))
    path = tmp_path / "papers.jsonl"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
