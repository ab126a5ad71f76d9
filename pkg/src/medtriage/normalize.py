"""Symptom normalization: tokenization, synonym expansion, and Jaccard merging.

Raw scraped symptom strings become a canonical vocabulary in three steps:
tokenize, expand each token set with one hop of synonyms, then single-link
merge every pair whose expanded sets overlap at or above the threshold.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import RawSymptom, SymptomVocabulary, VocabEntry, slugify

DEFAULT_MERGE_THRESHOLD = 0.75

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_stopwords: frozenset[str] | None = None


class LexiconError(Exception):
    """Raised when a synonym lexicon file is missing or malformed."""


def load_stopwords() -> frozenset[str]:
    global _stopwords
    if _stopwords is None:
        text = resources.files("medtriage").joinpath("data/stopwords.txt").read_text("utf-8")
        _stopwords = frozenset(
            line.strip() for line in text.splitlines()
            if line.strip() and not line.startswith("#")
        )
    return _stopwords


def tokenize(text: str, stopwords: frozenset[str] | None = None) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop stopwords; order preserved."""
    if stopwords is None:
        stopwords = load_stopwords()
    return [t for t in _TOKEN_RE.findall(text.lower()) if t not in stopwords]


@dataclass
class SynonymLexicon:
    """token -> synonym-token-set map, merged from one or more lexicon files."""

    entries: dict[str, frozenset[str]] = field(default_factory=dict)
    sources: dict[str, set[str]] = field(default_factory=dict)

    def synonyms(self, token: str) -> frozenset[str]:
        return self.entries.get(token, frozenset())

    def add(self, token: str, synonyms: Iterable[str], source: str = "") -> None:
        syns = frozenset(s for s in synonyms if s and s != token)
        if not syns:
            return
        self.entries[token] = self.entries.get(token, frozenset()) | syns
        if source:
            self.sources.setdefault(token, set()).add(source)

    @classmethod
    def load(cls, *paths: str | Path) -> "SynonymLexicon":
        """Merge lexicon files ("token: syn1, syn2" lines) by set union per token."""
        lexicon = cls()
        for path in paths:
            path = Path(path)
            if not path.exists():
                raise LexiconError(f"synonym lexicon not found: {path}")
            for i, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if ":" not in line:
                    raise LexiconError(f"{path}:{i}: expected 'token: syn1, syn2, ...'")
                head, tail = line.split(":", 1)
                keys = _TOKEN_RE.findall(head.lower())
                if len(keys) != 1:
                    raise LexiconError(f"{path}:{i}: lexicon key must be a single token")
                syns = [s for part in tail.split(",") for s in _TOKEN_RE.findall(part.lower())]
                lexicon.add(keys[0], syns, source=path.name)
        return lexicon


def expand_tokens(tokens: Sequence[str], lexicon: SynonymLexicon) -> frozenset[str]:
    """One level of synonym expansion: the tokens plus each token's synonyms."""
    expanded = set(tokens)
    for token in tokens:
        expanded |= lexicon.synonyms(token)
    return frozenset(expanded)


def jaccard(a: frozenset[str] | set[str], b: frozenset[str] | set[str]) -> float:
    """|a & b| / |a | b|; two empty sets count as identical (1.0)."""
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def make_raw_symptom(
    text: str, lexicon: SynonymLexicon, stopwords: frozenset[str] | None = None
) -> RawSymptom:
    tokens = tuple(tokenize(text, stopwords))
    return RawSymptom(text=text, tokens=tokens, expanded_tokens=expand_tokens(tokens, lexicon))


def merge_symptoms(raw: Sequence[RawSymptom], threshold: float = DEFAULT_MERGE_THRESHOLD) -> SymptomVocabulary:
    """Single-link merge of raw symptoms into a canonical vocabulary.

    Two raw symptoms land in the same cluster exactly when their expanded token
    sets have Jaccard >= threshold, transitively (connected components). Each
    cluster's representative is its shortest member text (ties: lexicographically
    smallest); its token set is the union over members. The result is independent
    of the input order.
    """
    if not 0 < threshold <= 1:
        raise ValueError(f"merge threshold must be in (0, 1], got {threshold}")

    distinct: list[RawSymptom] = []
    seen: set[str] = set()
    for symptom in raw:
        if symptom.text not in seen:
            seen.add(symptom.text)
            distinct.append(symptom)
    distinct.sort(key=lambda s: s.text)

    parent = list(range(len(distinct)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(distinct)):
        for j in range(i + 1, len(distinct)):
            if jaccard(distinct[i].expanded_tokens, distinct[j].expanded_tokens) >= threshold:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri

    clusters: dict[int, list[RawSymptom]] = {}
    for i, symptom in enumerate(distinct):
        clusters.setdefault(find(i), []).append(symptom)

    drafts = []
    for members in clusters.values():
        representative = min(members, key=lambda s: (len(s.text), s.text)).text
        expanded = frozenset().union(*(m.expanded_tokens for m in members))
        drafts.append((representative, expanded, tuple(sorted(m.text for m in members))))
    drafts.sort(key=lambda d: (len(d[0]), d[0]))

    taken: set[str] = set()
    entries = []
    raw_to_canonical: dict[str, str] = {}
    for representative, expanded, members in drafts:
        base = slugify(representative)
        cid, n = base, 2
        while cid in taken:
            cid = f"{base}-{n}"
            n += 1
        taken.add(cid)
        entries.append(VocabEntry(id=cid, representative=representative,
                                  expanded_tokens=expanded, members=members))
        for text in members:
            raw_to_canonical[text] = cid
    entries.sort(key=lambda e: e.id)

    return SymptomVocabulary(
        entries=entries, raw_to_canonical=raw_to_canonical, merge_threshold=threshold
    )
