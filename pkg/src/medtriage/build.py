"""Dataset build pipeline: scrape, normalize, index, and write the corpus files."""

from __future__ import annotations

from pathlib import Path

from .corpus import (
    Corpus,
    DiseaseRecord,
    SymptomVocabulary,
    assemble_corpus,
    vocabulary_path_for,
    write_dataset,
    write_vocabulary,
)
from .normalize import SynonymLexicon, make_raw_symptom, merge_symptoms
from .report import BuildReport
from .scraper import ScrapeConfig, scrape_corpus


def normalize_records(
    records: list[DiseaseRecord], lexicon: SynonymLexicon, merge_threshold: float
) -> SymptomVocabulary:
    """Build the vocabulary from every raw symptom and fill canonical_symptoms in place."""
    raw = [
        make_raw_symptom(text, lexicon)
        for record in records
        for text in record.raw_symptoms
    ]
    vocab = merge_symptoms(raw, merge_threshold)
    for record in records:
        record.canonical_symptoms = {
            vocab.raw_to_canonical[text] for text in record.raw_symptoms
        }
    return vocab


def build_dataset(
    scrape_config: ScrapeConfig,
    lexicon_paths: list[str | Path],
    merge_threshold: float,
    out_path: str | Path,
) -> tuple[Corpus, BuildReport]:
    """Run the full pipeline and write the dataset file plus its vocabulary sidecar."""
    lexicon = SynonymLexicon.load(*lexicon_paths)
    records, warnings = scrape_corpus(scrape_config)
    vocab = normalize_records(records, lexicon, merge_threshold)
    corpus = assemble_corpus(records, vocab)

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_dataset(records, out_path)
    write_vocabulary(vocab, vocabulary_path_for(out_path))

    raw_count = sum(len(r.raw_symptoms) for r in records)
    distinct = len({text for r in records for text in r.raw_symptoms})
    report = BuildReport(
        diseases_total=len(records),
        diseases_scraped=len(records) - len(warnings),
        unresolved=len(warnings),
        raw_symptom_count=raw_count,
        distinct_raw_texts=distinct,
        canonical_count=len(vocab),
        merges_performed=distinct - len(vocab),
        warnings=list(warnings),
    )
    return corpus, report
