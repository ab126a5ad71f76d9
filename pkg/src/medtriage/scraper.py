"""Disease/symptom acquisition: list-page parsing, page resolution, infobox extraction.

Two resolver backends: a fixture map (fully offline, used by tests and the
checked-in corpus) and the encyclopedia's own title-search endpoint for live
use, with on-disk caching and a global politeness delay across workers.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable
from urllib.parse import quote

from .corpus import DiseaseRecord, Source, SourceKind, assign_disease_ids
from .htmldoc import Node, parse_html

DEFAULT_USER_AGENT = "medtriage/0.1 (+disease-symptom corpus builder)"
SEARCH_URL = (
    "https://en.wikipedia.org/w/api.php?action=opensearch&limit=1&format=json&search={query}"
)
DEFAULT_LIST_REGION = ".all-disease"

_FOOTNOTE_RE = re.compile(r"\[\d+\]")
_SEGMENT_BREAKERS = {"li", "br", "p", "div", "ul", "ol"}
_SKIPPED_SUBTREES = {"sup", "style", "script"}


class ScrapeError(Exception):
    """Fatal scraping problem (unreadable list source, bad config)."""


class ListRegionNotFoundError(ScrapeError):
    pass


class UnresolvedDiseaseError(ScrapeError):
    """A disease name could not be resolved to an article page."""


class FetchError(ScrapeError):
    """Network fetch kept failing after retries."""


def _clean(text: str) -> str:
    return " ".join(text.split())


def _strip_footnotes(text: str) -> str:
    return _FOOTNOTE_RE.sub("", text)


# --- list page ---


def parse_disease_list(html: str, selector: str = DEFAULT_LIST_REGION) -> list[str]:
    """Anchor texts of the page's disease-index region, deduplicated case-insensitively.

    `selector` is "#some-id" for an element id or ".some-class" (or a bare
    name) for a class. Links outside the region are never returned.
    """
    root = parse_html(html)
    if selector.startswith("#"):
        region = root.find(id_=selector[1:])
        tried = f"id={selector[1:]!r}"
    else:
        cls = selector.lstrip(".")
        region = root.find(class_=cls)
        tried = f"class={cls!r}"
    if region is None:
        raise ListRegionNotFoundError(f"list region not found; selectors tried: {tried}")
    names, seen = [], set()
    for anchor in region.find_all("a"):
        name = _clean(anchor.text())
        key = name.casefold()
        if name and key not in seen:
            seen.add(key)
            names.append(name)
    return names


def merge_with_predefined(scraped: list[str], predefined: list[str]) -> list[str]:
    """Case-insensitive union: scraped order first, then predefined-only names."""
    result, seen = [], set()
    for name in list(scraped) + list(predefined):
        name = _clean(name)
        key = name.casefold()
        if name and key not in seen:
            seen.add(key)
            result.append(name)
    return result


def load_predefined(path: str | Path) -> list[str]:
    """Plain-text disease list, one name per line, '#' comments."""
    path = Path(path)
    if not path.exists():
        raise ScrapeError(f"predefined disease list not found: {path}")
    names = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            names.append(line)
    return names


# --- infobox extraction ---


@dataclass
class InfoboxExtract:
    page_title: str
    symptoms_field_raw: str
    symptoms: list[str]
    fetched_at: str = ""
    source_url: str = ""


def _cell_segments(cell: Node) -> list[str]:
    """Text of a value cell split at list-item boundaries; citation subtrees dropped."""
    stack: list[Node | str] = list(reversed(cell.children))
    parts: list[str] = []
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
            continue
        if item.tag in _SKIPPED_SUBTREES:
            continue
        if item.tag in _SEGMENT_BREAKERS:
            parts.append("\x00")
        stack.extend(reversed(item.children))
    return "".join(parts).split("\x00")


def _split_field(cell: Node) -> list[str]:
    values = []
    for segment in _cell_segments(cell):
        for piece in re.split(r"[,;]", _strip_footnotes(segment)):
            piece = _clean(piece)
            if piece:
                values.append(piece)
    return values


def _infobox_cells(root: Node) -> dict[str, Node]:
    table = None
    for candidate in root.find_all("table"):
        if "infobox" in candidate.classes():
            table = candidate
            break
    if table is None:
        return {}
    cells: dict[str, Node] = {}
    for row in table.find_all("tr"):
        header = row.find("th")
        value = row.find("td")
        if header is None or value is None:
            continue
        key = _clean(header.text()).lower()
        if key and key not in cells:
            cells[key] = value
    return cells


def extract_infobox_symptoms(html: str, page_title: str = "", source_url: str = "",
                             fetched_at: str = "") -> InfoboxExtract:
    """Pull the infobox "Symptoms" row and split it into individual symptom strings.

    Splits on commas, semicolons, and list items; strips tags and
    bracketed citation markers; a missing infobox or Symptoms row yields an
    empty list, never an error.
    """
    cells = _infobox_cells(parse_html(html))
    symptoms = _split_field(cells["symptoms"]) if "symptoms" in cells else []
    return InfoboxExtract(
        page_title=page_title,
        symptoms_field_raw=", ".join(symptoms),
        symptoms=symptoms,
        fetched_at=fetched_at,
        source_url=source_url,
    )


def extract_treatment(html_or_root: str | Node) -> str:
    """Infobox "Treatment" (falling back to "Medication") row text, "" if absent."""
    root = parse_html(html_or_root) if isinstance(html_or_root, str) else html_or_root
    cells = _infobox_cells(root)
    for key in ("treatment", "medication"):
        if key in cells:
            return ", ".join(_split_field(cells[key]))
    return ""


def first_paragraph(html_or_root: str | Node) -> str:
    """First non-empty article paragraph, markup and citation markers stripped."""
    root = parse_html(html_or_root) if isinstance(html_or_root, str) else html_or_root
    for p in root.find_all("p"):
        text = _clean(_strip_footnotes(p.text()))
        if text:
            return text
    return ""


# --- page resolution ---


@dataclass
class ResolvedPage:
    title: str
    url: str
    html: str


def _requests_transport(url: str, user_agent: str) -> str:
    import requests

    response = requests.get(url, headers={"User-Agent": user_agent}, timeout=30)
    response.raise_for_status()
    return response.text


def normalized_name(name: str) -> str:
    return _clean(name).casefold()


@dataclass
class PageResolver:
    """Maps disease names to article pages.

    backend "fixture-map" reads checked-in documents and performs zero network
    operations; "title-search" asks the encyclopedia's title-search endpoint,
    fetches the top hit, and caches it under cache_dir keyed by the normalized
    name. Live fetches are rate limited globally: consecutive fetches are at
    least politeness_delay seconds apart, across all worker threads.
    """

    backend: str = "fixture-map"
    fixture_map_path: str | Path | None = None
    fixture_dir: str | Path | None = None
    cache_dir: str | Path | None = None
    politeness_delay: float = 1.0
    user_agent: str = DEFAULT_USER_AGENT
    max_attempts: int = 3
    transport: Callable[[str, str], str] | None = None
    sleep: Callable[[float], None] = time.sleep
    clock: Callable[[], float] = time.monotonic
    fetch_count: int = 0

    def __post_init__(self):
        if self.backend not in ("fixture-map", "title-search"):
            raise ScrapeError(f"unknown resolver backend: {self.backend}")
        self._lock = threading.Lock()
        self._last_fetch: float | None = None
        self._map: dict[str, str] | None = None

    # fixture backend

    def _fixture_map(self) -> dict[str, str]:
        if self._map is None:
            if self.fixture_map_path is None:
                raise ScrapeError("fixture-map backend needs fixture_map_path")
            path = Path(self.fixture_map_path)
            if not path.exists():
                raise ScrapeError(f"resolver map not found: {path}")
            mapping = {}
            for line in path.read_text(encoding="utf-8").splitlines():
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                name, _, slug = line.partition("\t")
                if slug:
                    mapping[normalized_name(name)] = slug.strip()
            self._map = mapping
        return self._map

    # live backend plumbing

    def _wait_politely(self) -> None:
        with self._lock:
            now = self.clock()
            if self._last_fetch is not None:
                gap = self.politeness_delay - (now - self._last_fetch)
                if gap > 0:
                    self.sleep(gap)
                    now = self._last_fetch + self.politeness_delay
            self._last_fetch = now

    def fetch(self, url: str) -> str:
        """Politely fetch a URL with up to max_attempts tries (exponential backoff)."""
        transport = self.transport or _requests_transport
        last: Exception | None = None
        for attempt in range(1, self.max_attempts + 1):
            self._wait_politely()
            try:
                body = transport(url, self.user_agent)
                self.fetch_count += 1
                return body
            except Exception as exc:
                last = exc
                if attempt < self.max_attempts:
                    self.sleep(0.5 * 2 ** (attempt - 1))
        raise FetchError(f"fetch failed after {self.max_attempts} attempts: {url}: {last}")

    def _cache_paths(self, name: str) -> tuple[Path, Path]:
        if self.cache_dir is None:
            raise ScrapeError("title-search backend needs cache_dir")
        digest = hashlib.sha256(normalized_name(name).encode("utf-8")).hexdigest()
        base = Path(self.cache_dir) / digest
        return base.with_suffix(".html"), base.with_suffix(".meta")


def resolve_page(name: str, resolver: PageResolver) -> ResolvedPage:
    """Resolve a disease name to its article page (fixture document or live fetch)."""
    if not name.strip():
        raise ScrapeError("cannot resolve an empty disease name")

    if resolver.backend == "fixture-map":
        slug = resolver._fixture_map().get(normalized_name(name))
        if slug is None:
            raise UnresolvedDiseaseError(f"unresolved disease: {name}")
        if resolver.fixture_dir is None:
            raise ScrapeError("fixture-map backend needs fixture_dir")
        page_path = Path(resolver.fixture_dir) / f"{slug}.html"
        if not page_path.exists():
            raise UnresolvedDiseaseError(f"unresolved disease: {name} (missing {page_path})")
        return ResolvedPage(title=name, url=f"fixture://{slug}",
                            html=page_path.read_text(encoding="utf-8"))

    html_path, meta_path = resolver._cache_paths(name)
    if html_path.exists() and meta_path.exists():
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        return ResolvedPage(title=meta.get("title", name), url=meta.get("url", ""),
                            html=html_path.read_text(encoding="utf-8"))

    body = resolver.fetch(SEARCH_URL.format(query=quote(name)))
    try:
        _, titles, _, urls = json.loads(body)
    except (ValueError, TypeError) as exc:
        raise FetchError(f"malformed title-search response for {name!r}: {exc}") from exc
    if not titles or not urls:
        raise UnresolvedDiseaseError(f"unresolved disease: {name}")
    title, url = titles[0], urls[0]

    html = resolver.fetch(url)
    html_path.parent.mkdir(parents=True, exist_ok=True)
    html_path.write_text(html, encoding="utf-8")
    meta = {
        "url": url,
        "title": title,
        "fetched_at": datetime.now(timezone.utc).isoformat(),
    }
    meta_path.write_text(json.dumps(meta, sort_keys=True), encoding="utf-8")
    return ResolvedPage(title=title, url=url, html=html)


# --- whole-corpus orchestration ---


@dataclass
class ScrapeConfig:
    list_source: str
    resolver: PageResolver
    predefined_path: str | Path | None = None
    list_region: str = DEFAULT_LIST_REGION
    concurrency: int = 1


def scrape_corpus(config: ScrapeConfig) -> tuple[list[DiseaseRecord], list[str]]:
    """Run list parsing, name merging, resolution, and extraction for every disease.

    Returns pre-normalization records (canonical_symptoms empty) sorted by
    name, plus per-disease warnings. Resolution misses yield a record with no
    symptoms rather than aborting the batch; an unreachable list source is fatal.
    """
    source = config.list_source
    if source.startswith(("http://", "https://")):
        list_html = config.resolver.fetch(source)
    else:
        path = Path(source)
        if not path.exists():
            raise ScrapeError(f"disease list source not found: {path}")
        list_html = path.read_text(encoding="utf-8")

    scraped = parse_disease_list(list_html, config.list_region)
    scraped_keys = {normalized_name(n) for n in scraped}
    predefined = load_predefined(config.predefined_path) if config.predefined_path else []
    names = merge_with_predefined(scraped, predefined)

    def source_for(name: str, url: str) -> Source:
        if config.resolver.backend == "fixture-map":
            return Source(SourceKind.FIXTURE, url)
        if normalized_name(name) in scraped_keys:
            return Source(SourceKind.SCRAPED_NHP, url)
        return Source(SourceKind.PREDEFINED, url)

    def build(name: str) -> tuple[DiseaseRecord, str | None]:
        try:
            page = resolve_page(name, config.resolver)
        except (UnresolvedDiseaseError, FetchError) as exc:
            record = DiseaseRecord(id="", name=name, source=source_for(name, ""))
            return record, str(exc)
        root = parse_html(page.html)
        cells = _infobox_cells(root)
        symptoms = _split_field(cells["symptoms"]) if "symptoms" in cells else []
        record = DiseaseRecord(
            id="",
            name=name,
            raw_symptoms=symptoms,
            description=first_paragraph(root),
            treatment=extract_treatment(root),
            source=source_for(name, page.url),
        )
        return record, None

    if config.concurrency > 1:
        with ThreadPoolExecutor(max_workers=config.concurrency) as pool:
            outcomes = list(pool.map(build, names))
    else:
        outcomes = [build(name) for name in names]

    records = [record for record, _ in outcomes]
    warnings = [warning for _, warning in outcomes if warning]
    records.sort(key=lambda r: (r.name.casefold(), r.name))
    assign_disease_ids(records)
    return records, warnings
