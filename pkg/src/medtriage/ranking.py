"""Disease ranking: TF-IDF + cosine similarity and Okapi BM25 over the corpus index.

Both models score a query set of canonical symptoms against every disease.
TF-IDF uses unsmoothed idf = ln(N/df) (our df >= 1 invariant rules out division
by zero); BM25 uses its usual smoothed idf. Scores are model scores, not
calibrated probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .corpus import CorpusError, CorpusIndex


class RankerModel(str, Enum):
    TFIDF_COSINE = "tfidf-cosine"
    BM25 = "bm25"

    @classmethod
    def parse(cls, value: "str | RankerModel") -> "RankerModel":
        if isinstance(value, cls):
            return value
        aliases = {"tfidf": cls.TFIDF_COSINE, "tfidf-cosine": cls.TFIDF_COSINE, "bm25": cls.BM25}
        try:
            return aliases[value.lower()]
        except KeyError:
            raise ValueError(f"unknown ranking model: {value!r}") from None


@dataclass(frozen=True)
class RankerParams:
    model: RankerModel = RankerModel.TFIDF_COSINE
    k1: float = 1.5
    b: float = 0.75

    def __post_init__(self):
        object.__setattr__(self, "model", RankerModel.parse(self.model))
        if self.k1 <= 0:
            raise ValueError(f"k1 must be positive, got {self.k1}")
        if not 0 <= self.b <= 1:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


@dataclass(frozen=True)
class RankedDisease:
    disease_id: str
    score: float
    rank: int
    zero_score: bool = False


def idf(index: CorpusIndex, term: str) -> float:
    """ln(N / df); anti-monotone in df, 0 for a term present in every disease."""
    if term not in index.df:
        raise CorpusError(f"unknown term: {term}")
    return math.log(index.n_docs / index.df[term])


def tfidf_vector(index: CorpusIndex, disease_id: str) -> dict[str, float]:
    """Sparse tf*idf weights for one disease; zero-weight terms are not stored.

    Terms are visited in sorted order so weights and downstream score sums are
    bit-identical across processes (set iteration order is not).
    """
    if disease_id not in index.doc_len:
        raise CorpusError(f"unknown disease: {disease_id}")
    vector = {}
    for term in sorted(index.postings):
        if disease_id in index.postings[term]:
            weight = index.tf[(disease_id, term)] * idf(index, term)
            if weight > 0:
                vector[term] = weight
    return vector


def query_vector(index: CorpusIndex, terms: Iterable[str]) -> dict[str, float]:
    """Query symptoms as a unit-tf vector weighted by idf; unindexed terms dropped."""
    vector = {}
    for term in sorted(set(terms)):
        if term in index.df:
            weight = idf(index, term)
            if weight > 0:
                vector[term] = weight
    return vector


def cosine(q: dict[str, float], d: dict[str, float]) -> float:
    """dot(q, d) / (|q| * |d|); 0.0 when either vector has zero norm.

    Sums run in sorted-term order for cross-process reproducibility.
    """
    if not q or not d:
        return 0.0
    dot = sum(q[t] * d[t] for t in sorted(q) if t in d)
    norm_q = math.sqrt(sum(q[t] * q[t] for t in sorted(q)))
    norm_d = math.sqrt(sum(d[t] * d[t] for t in sorted(d)))
    if norm_q == 0.0 or norm_d == 0.0:
        return 0.0
    return dot / (norm_q * norm_d)


def bm25_idf(index: CorpusIndex, term: str) -> float:
    df = index.df[term]
    return math.log(1 + (index.n_docs - df + 0.5) / (df + 0.5))


def bm25(index: CorpusIndex, query: Iterable[str], disease_id: str,
         params: RankerParams = RankerParams(RankerModel.BM25)) -> float:
    """Okapi BM25 score of one disease; query terms absent from the index add 0."""
    if disease_id not in index.doc_len:
        raise CorpusError(f"unknown disease: {disease_id}")
    doc_len = index.doc_len[disease_id]
    score = 0.0
    for term in sorted(set(query)):
        tf = index.tf.get((disease_id, term), 0)
        if tf == 0 or term not in index.df:
            continue
        norm = params.k1 * (1 - params.b + params.b * doc_len / index.avg_doc_len)
        score += bm25_idf(index, term) * (tf * (params.k1 + 1)) / (tf + norm)
    return score


def rank(index: CorpusIndex, query: Iterable[str],
         params: RankerParams = RankerParams(), k: int = 10) -> list[RankedDisease]:
    """Top-k diseases for the query, scores non-increasing, names breaking ties.

    Zero-score diseases appear only when fewer than k diseases score above
    zero, and carry the zero_score flag.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if index.n_docs == 0:
        raise CorpusError("empty index")
    terms = set(query)
    if params.model is RankerModel.TFIDF_COSINE:
        q = query_vector(index, terms)
        scored = [(cosine(q, tfidf_vector(index, d)), d) for d in index.doc_len]
    else:
        scored = [(bm25(index, terms, d, params), d) for d in index.doc_len]
    scored.sort(key=lambda pair: (-pair[0], index.names[pair[1]]))
    top = scored[: min(k, index.n_docs)]
    return [
        RankedDisease(disease_id=d, score=s, rank=i, zero_score=(s == 0.0))
        for i, (s, d) in enumerate(top, 1)
    ]


def normalize_scores(ranking: list[RankedDisease]) -> list[RankedDisease]:
    """Optional display normalization: scale scores to sum to 1 across the list."""
    total = sum(r.score for r in ranking)
    if total <= 0:
        return list(ranking)
    return [
        RankedDisease(r.disease_id, r.score / total, r.rank, r.zero_score) for r in ranking
    ]
