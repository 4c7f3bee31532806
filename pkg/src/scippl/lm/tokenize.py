"""Tokenizers.

The n-gram backend uses lowercased word tokens with punctuation kept as
separate single-character tokens; lexical analyses use word tokens with
punctuation stripped.  Perplexities are only comparable within one
model_id, so each backend owns its tokenizer.
"""

from __future__ import annotations

import re
from typing import List

_WORD_OR_PUNCT = re.compile(r"\w+|[^\w\s]", re.UNICODE)
_WORD_ONLY = re.compile(r"\w+", re.UNICODE)


def word_punct_tokens(text: str) -> List[str]:
    """Lowercased words plus punctuation marks as their own tokens."""
    return _WORD_OR_PUNCT.findall(text.lower())


def word_tokens(text: str) -> List[str]:
    """Lowercased words only; punctuation dropped."""
    return _WORD_ONLY.findall(text.lower())
