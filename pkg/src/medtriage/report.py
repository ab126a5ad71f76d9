"""Dataset build reporting: summary text, a delimited frequency table, and figures."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .corpus import Corpus  # noqa: E402


@dataclass
class BuildReport:
    diseases_total: int = 0
    diseases_scraped: int = 0
    unresolved: int = 0
    raw_symptom_count: int = 0
    distinct_raw_texts: int = 0
    canonical_count: int = 0
    merges_performed: int = 0
    warnings: list[str] = field(default_factory=list)

    def summary_lines(self) -> list[str]:
        lines = [
            f"diseases: {self.diseases_total}",
            f"diseases scraped from list source: {self.diseases_scraped}",
            f"unresolved diseases: {self.unresolved}",
            f"raw symptom strings: {self.raw_symptom_count} ({self.distinct_raw_texts} distinct)",
            f"canonical symptoms: {self.canonical_count}",
            f"merges performed: {self.merges_performed}",
        ]
        if self.warnings:
            lines.append("warnings:")
            lines.extend(f"  - {w}" for w in self.warnings)
        else:
            lines.append("warnings: none")
        return lines


def _df_table(corpus: Corpus) -> list[tuple[str, int]]:
    rows = [
        (corpus.vocabulary.representative(cid), df)
        for cid, df in corpus.index.df.items()
    ]
    rows.sort(key=lambda r: (-r[1], r[0]))
    return rows


def plot_symptom_frequencies(corpus: Corpus, path: Path, top_n: int = 15) -> None:
    rows = _df_table(corpus)[:top_n]
    rows.reverse()  # most frequent on top of the barh chart
    fig, ax = plt.subplots(figsize=(8, 0.4 * max(len(rows), 4) + 1.2))
    ax.barh([r[0] for r in rows], [r[1] for r in rows], color="#2b7bba")
    ax.set_xlabel("diseases containing the symptom (document frequency)")
    ax.set_title(f"Top {len(rows)} canonical symptoms")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_symptoms_per_disease(corpus: Corpus, path: Path) -> None:
    records = sorted(corpus.records, key=lambda r: r.name.casefold())
    names = [r.name for r in records]
    counts = [len(r.canonical_symptoms) for r in records]
    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(names)), 4.5))
    ax.bar(names, counts, color="#b54d42")
    ax.set_ylabel("canonical symptoms")
    ax.set_title("Symptoms per disease")
    ax.tick_params(axis="x", rotation=60)
    for label in ax.get_xticklabels():
        label.set_horizontalalignment("right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(report: BuildReport, corpus: Corpus, out_dir: str | Path,
                 figures: bool = True) -> list[Path]:
    """Write report.txt, symptom_frequencies.csv, and the figures; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    report_path = out_dir / "report.txt"
    report_path.write_text("\n".join(report.summary_lines()) + "\n", encoding="utf-8")
    written.append(report_path)

    csv_path = out_dir / "symptom_frequencies.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["symptom", "document_frequency"])
        writer.writerows(_df_table(corpus))
    written.append(csv_path)

    if figures:
        freq_path = out_dir / "symptom_document_frequency.png"
        plot_symptom_frequencies(corpus, freq_path)
        written.append(freq_path)
        per_disease_path = out_dir / "symptoms_per_disease.png"
        plot_symptoms_per_disease(corpus, per_disease_path)
        written.append(per_disease_path)
    return written
