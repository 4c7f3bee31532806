"""Language-model backends: Kneser-Ney n-grams, scoring, imports, stability."""

from .ngram import BOS, EOS, UNK, KneserNeyModel, train_ngram
from .scoring import (
    ImportResult,
    ScoredDocument,
    UnscoreableDocumentError,
    import_token_logprobs,
    perplexity,
    score_document,
    score_tokens,
)
from .stability import StabilityCurve, load_synonym_lexicon, synonym_stability
from .tokenize import word_punct_tokens, word_tokens

__all__ = [
    "BOS", "EOS", "UNK",
    "KneserNeyModel", "train_ngram",
    "ScoredDocument", "ImportResult", "UnscoreableDocumentError",
    "perplexity", "score_document", "score_tokens", "import_token_logprobs",
    "StabilityCurve", "load_synonym_lexicon", "synonym_stability",
    "word_punct_tokens", "word_tokens",
]
