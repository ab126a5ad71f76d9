"""Disease corpus data model: records, symptom vocabulary, and the searchable index.

A disease is one document; its canonical symptoms are the document's terms.
The JSONL dataset file written here is the contract between the dataset
builder and the chat/serve front ends.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path


class CorpusError(Exception):
    """Raised when corpus data violates the data-model contract."""


class SourceKind(str, Enum):
    SCRAPED_NHP = "scraped-nhp"
    PREDEFINED = "predefined"
    FIXTURE = "fixture"


@dataclass(frozen=True)
class Source:
    kind: SourceKind
    url: str = ""


@dataclass
class DiseaseRecord:
    """One disease with its scraped and canonicalized symptoms."""

    id: str
    name: str
    raw_symptoms: list[str] = field(default_factory=list)
    canonical_symptoms: set[str] = field(default_factory=set)
    description: str = ""
    treatment: str = ""
    source: Source = Source(SourceKind.FIXTURE)


@dataclass(frozen=True)
class RawSymptom:
    """A scraped symptom string with its normalized and synonym-expanded tokens."""

    text: str
    tokens: tuple[str, ...]
    expanded_tokens: frozenset[str]


@dataclass(frozen=True)
class VocabEntry:
    id: str
    representative: str
    expanded_tokens: frozenset[str]
    members: tuple[str, ...] = ()


@dataclass
class SymptomVocabulary:
    """Canonical symptom list plus the raw-text -> canonical-id mapping."""

    entries: list[VocabEntry]
    raw_to_canonical: dict[str, str]
    merge_threshold: float

    def __post_init__(self):
        self._by_id = {e.id: e for e in self.entries}

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, canonical_id: str) -> bool:
        return canonical_id in self._by_id

    def entry(self, canonical_id: str) -> VocabEntry:
        return self._by_id[canonical_id]

    def representative(self, canonical_id: str) -> str:
        return self._by_id[canonical_id].representative

    def validate(self) -> list[str]:
        """Return invariant violations (empty list when the vocabulary is sound)."""
        violations = []
        for raw, cid in self.raw_to_canonical.items():
            if cid not in self._by_id:
                violations.append(f"raw symptom {raw!r} maps to unknown canonical id {cid!r}")
        reps = [e.representative for e in self.entries]
        if len(reps) != len(set(reps)):
            violations.append("canonical representative texts are not pairwise distinct")
        # merge stability: canonical expanded sets are unions over members, so
        # overlap can exceed the threshold even though every raw pair was below it
        from .normalize import jaccard  # local import avoids a cycle

        for i, a in enumerate(self.entries):
            for b in self.entries[i + 1:]:
                if jaccard(a.expanded_tokens, b.expanded_tokens) >= self.merge_threshold:
                    violations.append(
                        f"entries {a.id!r} and {b.id!r} are not merge-stable at "
                        f"threshold {self.merge_threshold}"
                    )
        return violations


@dataclass
class CorpusIndex:
    """Inverted index over canonical symptoms.

    Immutable after construction; safe to share across concurrent readers.
    """

    n_docs: int
    postings: dict[str, frozenset[str]]
    df: dict[str, int]
    tf: dict[tuple[str, str], int]
    avg_doc_len: float
    doc_len: dict[str, int]
    names: dict[str, str]

    def diseases(self) -> list[str]:
        return sorted(self.doc_len)


_SLUG_RE = re.compile(r"[^a-z0-9]+")


def slugify(text: str) -> str:
    slug = _SLUG_RE.sub("-", text.lower()).strip("-")
    return slug or "x"


def assign_disease_ids(records: list[DiseaseRecord]) -> None:
    """Assign slug ids derived from the sorted disease names (stable across runs)."""
    taken: set[str] = set()
    for record in sorted(records, key=lambda r: (r.name.casefold(), r.name)):
        base = slugify(record.name)
        slug, n = base, 2
        while slug in taken:
            slug = f"{base}-{n}"
            n += 1
        taken.add(slug)
        record.id = slug


def validate_record(record: DiseaseRecord, vocab: SymptomVocabulary) -> list[str]:
    """Check one record against the model invariants; violations are data, not errors."""
    violations = []
    if not record.name.strip():
        violations.append("empty name")
    canonical = record.canonical_symptoms
    if not isinstance(canonical, (set, frozenset)):
        seen = list(canonical)
        if len(seen) != len(set(seen)):
            violations.append("duplicate canonical symptom")
        canonical = set(seen)
    for cid in sorted(canonical):
        if cid not in vocab:
            violations.append(f"dangling symptom id: {cid}")
    return violations


def build_index(records: list[DiseaseRecord]) -> CorpusIndex:
    """Build the inverted index over canonical symptoms (one disease = one document)."""
    if not records:
        raise CorpusError("empty corpus")
    postings: dict[str, set[str]] = {}
    tf: dict[tuple[str, str], int] = {}
    doc_len: dict[str, int] = {}
    names: dict[str, str] = {}
    for record in records:
        if record.id in doc_len:
            raise CorpusError(f"duplicate disease id: {record.id}")
        doc_len[record.id] = len(record.canonical_symptoms)
        names[record.id] = record.name
        for cid in sorted(record.canonical_symptoms):
            postings.setdefault(cid, set()).add(record.id)
            tf[(record.id, cid)] = 1
    n_docs = len(records)
    return CorpusIndex(
        n_docs=n_docs,
        postings={t: frozenset(ids) for t, ids in postings.items()},
        df={t: len(ids) for t, ids in postings.items()},
        tf=tf,
        avg_doc_len=sum(doc_len.values()) / n_docs,
        doc_len=doc_len,
        names=names,
    )


# --- dataset file (JSONL, one record per line, sorted by id) ---


def record_to_obj(record: DiseaseRecord) -> dict:
    return {
        "id": record.id,
        "name": record.name,
        "raw_symptoms": list(record.raw_symptoms),
        "canonical_symptoms": sorted(record.canonical_symptoms),
        "description": record.description,
        "treatment": record.treatment,
        "source": {"kind": record.source.kind.value, "url": record.source.url},
    }


def record_from_obj(obj: dict) -> DiseaseRecord:
    try:
        return DiseaseRecord(
            id=obj["id"],
            name=obj["name"],
            raw_symptoms=list(obj["raw_symptoms"]),
            canonical_symptoms=set(obj["canonical_symptoms"]),
            description=obj.get("description", ""),
            treatment=obj.get("treatment", ""),
            source=Source(SourceKind(obj["source"]["kind"]), obj["source"].get("url", "")),
        )
    except (KeyError, ValueError) as exc:
        raise CorpusError(f"malformed dataset record: {exc}") from exc


def write_dataset(records: list[DiseaseRecord], path: str | Path) -> None:
    lines = [
        json.dumps(record_to_obj(r), ensure_ascii=False, sort_keys=True, separators=(",", ":"))
        for r in sorted(records, key=lambda r: r.id)
    ]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_dataset(path: str | Path) -> list[DiseaseRecord]:
    records = []
    for i, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path}:{i}: invalid JSON: {exc}") from exc
        records.append(record_from_obj(obj))
    return sorted(records, key=lambda r: r.id)


# --- vocabulary sidecar (single JSON document next to the dataset) ---


def vocabulary_path_for(dataset_path: str | Path) -> Path:
    p = Path(dataset_path)
    return p.with_name(p.stem + ".vocab.json")


def write_vocabulary(vocab: SymptomVocabulary, path: str | Path) -> None:
    obj = {
        "merge_threshold": vocab.merge_threshold,
        "canonical": [
            {
                "id": e.id,
                "representative": e.representative,
                "expanded_tokens": sorted(e.expanded_tokens),
                "members": list(e.members),
            }
            for e in vocab.entries
        ],
        "raw_to_canonical": dict(sorted(vocab.raw_to_canonical.items())),
    }
    Path(path).write_text(
        json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )


def read_vocabulary(path: str | Path) -> SymptomVocabulary:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        entries = [
            VocabEntry(
                id=e["id"],
                representative=e["representative"],
                expanded_tokens=frozenset(e["expanded_tokens"]),
                members=tuple(e.get("members", ())),
            )
            for e in obj["canonical"]
        ]
        return SymptomVocabulary(
            entries=entries,
            raw_to_canonical=dict(obj["raw_to_canonical"]),
            merge_threshold=float(obj["merge_threshold"]),
        )
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise CorpusError(f"malformed vocabulary file {path}: {exc}") from exc


@dataclass
class Corpus:
    """Loaded, validated, indexed corpus shared by the chat and HTTP front ends."""

    records: list[DiseaseRecord]
    vocabulary: SymptomVocabulary
    index: CorpusIndex

    def __post_init__(self):
        self.by_id = {r.id: r for r in self.records}


def assemble_corpus(records: list[DiseaseRecord], vocab: SymptomVocabulary) -> Corpus:
    problems = []
    for record in records:
        problems += [f"{record.id}: {v}" for v in validate_record(record, vocab)]
    if problems:
        raise CorpusError("invalid corpus: " + "; ".join(problems))
    return Corpus(records=records, vocabulary=vocab, index=build_index(records))


def load_corpus(dataset_path: str | Path, vocab_path: str | Path | None = None) -> Corpus:
    dataset_path = Path(dataset_path)
    if not dataset_path.exists():
        raise CorpusError(f"dataset file not found: {dataset_path}")
    vocab_file = Path(vocab_path) if vocab_path else vocabulary_path_for(dataset_path)
    if not vocab_file.exists():
        raise CorpusError(f"vocabulary sidecar not found: {vocab_file}")
    records = read_dataset(dataset_path)
    vocab = read_vocabulary(vocab_file)
    return assemble_corpus(records, vocab)
