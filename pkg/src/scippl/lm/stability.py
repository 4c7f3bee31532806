"""Synonym-replacement stability of perplexity.

For k = 1..max_k, replace k randomly chosen lexicon-covered words per
document per repetition, rescore, and record the absolute perplexity
change.  A quadratic in k is fitted to all recorded points and the
standard deviation of the original perplexities is kept as the
reference scale.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..stats.regression import fit_linear
from .ngram import KneserNeyModel
from .scoring import perplexity


def load_synonym_lexicon(lines: Iterable[str]) -> Dict[str, Tuple[str, ...]]:
    """Parse synonyms.tsv: one tab-separated lowercase group per line."""
    lexicon: Dict[str, Tuple[str, ...]] = {}
    for line in lines:
        words = tuple(w.strip().lower() for w in line.rstrip("\n").split("\t") if w.strip())
        if len(words) < 2:
            continue
        for w in words:
            lexicon[w] = words
    return lexicon


@dataclass
class StabilityCurve:
    ks: List[int]
    mean_abs_delta: List[float]
    quad_coefficients: Tuple[float, float, float]  # intercept, linear, quadratic
    reference_sd: float
    skipped: int = 0
    samples: List[tuple] = field(default_factory=list)  # (doc_id, rep, k, delta)
    mutations: List[tuple] = field(default_factory=list)  # (doc_id, rep, k, tokens)


def synonym_stability(model: KneserNeyModel,
                      token_seqs: Dict[str, Sequence[str]],
                      lexicon: Dict[str, Tuple[str, ...]],
                      max_k: int = 10, reps: int = 3, seed: int = 0,
                      record_mutations: bool = False) -> StabilityCurve:
    """Measure |delta PPL| under k synonym replacements, k = 1..max_k.

    token_seqs maps doc_id to the tokenized document.  Documents without
    any lexicon-covered token are skipped for that repetition and
    counted.  Deterministic under the seed.
    """
    if max_k < 1:
        raise ValueError("max_k must be >= 1")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    rng = random.Random(seed)
    base_ppl: Dict[str, float] = {}
    for doc_id, toks in token_seqs.items():
        base_ppl[doc_id] = perplexity(model.sequence_logprobs(list(toks)))
    ref_sd = float(np.std(list(base_ppl.values()), ddof=1)) if len(base_ppl) > 1 else 0.0

    deltas_by_k: Dict[int, List[float]] = {k: [] for k in range(1, max_k + 1)}
    samples: List[tuple] = []
    mutations: List[tuple] = []
    skipped = 0
    for doc_id in sorted(token_seqs):
        toks = list(token_seqs[doc_id])
        covered = [i for i, t in enumerate(toks)
                   if t in lexicon and len(lexicon[t]) > 1]
        for rep in range(reps):
            if not covered:
                skipped += 1
                continue
            for k in range(1, max_k + 1):
                positions = rng.sample(covered, min(k, len(covered)))
                mutated = list(toks)
                for pos in positions:
                    group = lexicon[mutated[pos]]
                    choices = [w for w in group if w != mutated[pos]]
                    mutated[pos] = rng.choice(choices)
                new_ppl = perplexity(model.sequence_logprobs(mutated))
                delta = abs(new_ppl - base_ppl[doc_id])
                deltas_by_k[k].append(delta)
                samples.append((doc_id, rep, k, delta))
                if record_mutations:
                    mutations.append((doc_id, rep, k, tuple(mutated)))

    ks = [k for k in range(1, max_k + 1) if deltas_by_k[k]]
    means = [float(np.mean(deltas_by_k[k])) for k in ks]
    quad = (math.nan, math.nan, math.nan)
    if samples and len({s[2] for s in samples}) >= 3:
        xs = np.array([s[2] for s in samples], dtype=float)
        ys = np.array([s[3] for s in samples], dtype=float)
        design = np.column_stack([np.ones_like(xs), xs, xs * xs])
        fit = fit_linear(ys, design)
        quad = tuple(float(c) for c in fit.coefficients)
    return StabilityCurve(ks=ks, mean_abs_delta=means, quad_coefficients=quad,
                          reference_sd=ref_sd, skipped=skipped,
                          samples=samples, mutations=mutations)
