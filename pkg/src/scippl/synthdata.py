"""Synthetic planted-effect corpus generator.

Produces a papers.jsonl / reviews.jsonl pair with a known ground truth:
each focal paper carries an injection intensity z in [0, 1] that drives

  * the share of rare (out-of-training) tokens in its abstract, so
    perplexity under a model trained on the pre-cutoff backbone
    increases with z;
  * assignment to prestige-extreme journals (both ends), so top and
    bottom JIF shares rise with z;
  * review-rating spread, reviewer confidence, and acceptance delay
    spread;
  * the rate of interdisciplinary references (with intradisciplinary
    references as the exposure);
  * funder membership (speculative funder up, conservative funder down),
    retraction odds, and review-article odds.

The backbone (pre-cutoff literature, common tokens only) doubles as the
language-model training corpus and as the JIF denominator population.
"""

from __future__ import annotations

import datetime
import json
from dataclasses import dataclass
from typing import Dict, List

import numpy as np

N_JOURNALS = 150
TOP_TIER = 12
BOTTOM_TIER = 12
N_GROUPS = 8
BACKBONE_PER_JOURNAL = 24           # 12 in 2022, 12 in 2023 H1
COMMON_VOCAB = 800
RARE_VOCAB = 2500
ABSTRACT_LEN = 40

CUTOFF = "2023-06"                  # last pre-focal month
JIF_YEAR = 2024

UNCERTAIN_WORDS = ("perhaps", "maybe", "likely", "might")
FILLER_WORDS = ("solid", "clear", "result", "method", "sound", "figure",
                "baseline", "correct", "useful", "complete", "strong", "exact")

GROUPS = [f"G{g}" for g in range(N_GROUPS)]


@dataclass
class PlantedTruth:
    intensity: Dict[str, float]
    journal_tier: Dict[str, str]    # journal_id -> top / middle / bottom


def _journal_prestige(rng: np.random.Generator) -> np.ndarray:
    prestige = np.empty(N_JOURNALS)
    prestige[:TOP_TIER] = 12.0 * rng.uniform(0.9, 1.1, TOP_TIER)
    prestige[TOP_TIER:N_JOURNALS - BOTTOM_TIER] = rng.uniform(0.8, 1.2,
                                                              N_JOURNALS - TOP_TIER - BOTTOM_TIER)
    prestige[N_JOURNALS - BOTTOM_TIER:] = 0.08 * rng.uniform(0.9, 1.1, BOTTOM_TIER)
    return prestige


def _zipf_weights(n: int) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1) ** 1.05
    return w / w.sum()


def generate_planted_corpus(n_papers: int = 10_000, seed: int = 7):
    """Returns (paper_lines, review_lines, PlantedTruth)."""
    rng = np.random.default_rng(seed)
    common = [f"tok{i:04d}" for i in range(COMMON_VOCAB)]
    rare = [f"rare{i:04d}" for i in range(RARE_VOCAB)]
    common_w = _zipf_weights(COMMON_VOCAB)
    journals = [f"J{j:03d}" for j in range(N_JOURNALS)]
    prestige = _journal_prestige(rng)
    home_group = {journals[j]: GROUPS[j % N_GROUPS] for j in range(N_JOURNALS)}
    tier = {}
    for j, journal in enumerate(journals):
        if j < TOP_TIER:
            tier[journal] = "top"
        elif j >= N_JOURNALS - BOTTOM_TIER:
            tier[journal] = "bottom"
        else:
            tier[journal] = "middle"

    def common_text(length: int) -> str:
        idx = rng.choice(COMMON_VOCAB, size=length, p=common_w)
        return " ".join(common[i] for i in idx)

    paper_lines: List[str] = []

    # ---- backbone: pre-cutoff literature, the LM training set
    backbone_ids: List[str] = []
    backbone_group: Dict[str, str] = {}
    backbone_journal: Dict[str, str] = {}
    for j, journal in enumerate(journals):
        for i in range(BACKBONE_PER_JOURNAL):
            doc_id = f"bb-{journal}-{i:02d}"
            year = 2022 if i < BACKBONE_PER_JOURNAL // 2 else 2023
            month = (i % 6) + 1 if year == 2023 else (i % 12) + 1
            day = int(rng.integers(1, 28))
            group = home_group[journal]
            backbone_ids.append(doc_id)
            backbone_group[doc_id] = group
            backbone_journal[doc_id] = journal
            paper_lines.append(json.dumps({
                "doc_id": doc_id, "title": common_text(6),
                "abstract": common_text(int(rng.integers(30, 50))),
                "pub_date": f"{year}-{month:02d}-{day:02d}",
                "journal_id": journal, "doc_type": "research",
                "retracted": False, "field_groups": [group],
                "funders": [], "reference_ids": [],
            }, sort_keys=True))

    bb_by_group: Dict[str, List[int]] = {g: [] for g in GROUPS}
    for k, doc_id in enumerate(backbone_ids):
        bb_by_group[backbone_group[doc_id]].append(k)
    bb_prestige = np.array([prestige[journals.index(backbone_journal[d])]
                            for d in backbone_ids])

    def pick_refs(pool: List[int], count: int) -> List[str]:
        if count <= 0 or not pool:
            return []
        weights = bb_prestige[pool]
        weights = weights / weights.sum()
        take = min(count, len(pool))
        chosen = rng.choice(len(pool), size=take, replace=False, p=weights)
        return [backbone_ids[pool[c]] for c in chosen]

    # ---- focal papers: post-cutoff, planted intensities
    review_lines: List[str] = []
    intensity: Dict[str, float] = {}
    mid_journals = [j for j in journals if tier[j] == "middle"]
    top_journals = [j for j in journals if tier[j] == "top"]
    bottom_journals = [j for j in journals if tier[j] == "bottom"]
    for i in range(n_papers):
        doc_id = f"p{i:06d}"
        z = float(rng.uniform())
        intensity[doc_id] = z

        rare_p = 0.02 + 0.25 * z
        n_tokens = ABSTRACT_LEN + int(rng.integers(-5, 6))
        is_rare = rng.uniform(size=n_tokens) < rare_p
        common_idx = rng.choice(COMMON_VOCAB, size=n_tokens, p=common_w)
        rare_idx = rng.integers(0, RARE_VOCAB, size=n_tokens)
        words = [rare[rare_idx[t]] if is_rare[t] else common[common_idx[t]]
                 for t in range(n_tokens)]
        abstract = " ".join(words)

        # journal: extremes with probability increasing in z
        if rng.uniform() < 0.05 + 0.45 * z:
            journal = str(rng.choice(top_journals if rng.uniform() < 0.5
                                     else bottom_journals))
        else:
            journal = str(rng.choice(mid_journals))

        group = str(rng.choice(GROUPS))
        n_intra = int(rng.integers(3, 9))
        inter_rate = 0.30 * np.exp(1.1 * z)
        n_inter = int(rng.poisson(inter_rate * n_intra))
        intra_pool = bb_by_group[group]
        inter_pool = [k for g in GROUPS if g != group for k in bb_by_group[g]]
        refs = pick_refs(intra_pool, n_intra) + pick_refs(inter_pool, n_inter)

        funders = []
        if rng.uniform() < 0.01 + 0.09 * z:
            funders.append("SPEC")        # speculative agency
        if rng.uniform() < 0.02 + 0.09 * (1.0 - z):
            funders.append("CONS")        # conservative agency
        if rng.uniform() < 0.05:
            funders.append("FLAT")

        doc_type = "review" if rng.uniform() < 0.02 + 0.12 * (1.0 - z) else "research"
        retracted = bool(rng.uniform() < 0.002 + 0.02 * z)
        month = int(rng.integers(1, 13))
        day = int(rng.integers(1, 28))
        paper_lines.append(json.dumps({
            "doc_id": doc_id, "title": common_text(6), "abstract": abstract,
            "pub_date": f"2024-{month:02d}-{day:02d}",
            "journal_id": journal, "doc_type": doc_type,
            "retracted": retracted, "field_groups": [group],
            "funders": sorted(funders), "reference_ids": refs,
        }, sort_keys=True))

        # reviews: spread grows with z, confidence falls with z
        n_rev = int(rng.integers(3, 6))
        sd = 0.5 + 2.2 * z
        ratings = np.clip(rng.normal(5.0 + 1.2 * z, sd, n_rev), 1.0, 10.0)
        confidences = np.clip(rng.normal(4.0 - 1.2 * z, 0.6, n_rev), 1.0, 5.0)
        delay = int(np.exp(rng.normal(np.log(90.0), 0.25 + 0.75 * z)))
        received = datetime.date(2023, 1, 1) + datetime.timedelta(
            days=int(rng.integers(0, 300)))
        accepted = received + datetime.timedelta(days=max(delay, 1))
        comments = []
        for _ in range(2):
            wordlist = [str(rng.choice(UNCERTAIN_WORDS))
                        if rng.uniform() < 0.02 + 0.10 * z
                        else str(rng.choice(FILLER_WORDS)) for _ in range(15)]
            comments.append(" ".join(wordlist))
        review_lines.append(json.dumps({
            "doc_id": doc_id,
            "ratings": [round(float(r), 2) for r in ratings],
            "confidences": [round(float(c), 2) for c in confidences],
            "comments": comments,
            "received_date": received.isoformat(),
            "accepted_date": accepted.isoformat(),
        }, sort_keys=True))

    truth = PlantedTruth(intensity=intensity, journal_tier=tier)
    return paper_lines, review_lines, truth


def write_planted_corpus(papers_path, reviews_path, n_papers: int = 10_000,
                         seed: int = 7) -> PlantedTruth:
    paper_lines, review_lines, truth = generate_planted_corpus(n_papers, seed)
    with open(papers_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(paper_lines) + "\n")
    with open(reviews_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(review_lines) + "\n")
    return truth
