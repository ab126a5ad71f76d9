import json
import random

import pytest

from conftest import LIST_PAGE, PAGES_DIR, fixture_resolver, fixture_scrape_config
from medtriage.scraper import (
    FetchError,
    InfoboxExtract,
    ListRegionNotFoundError,
    PageResolver,
    ScrapeError,
    UnresolvedDiseaseError,
    extract_infobox_symptoms,
    extract_treatment,
    first_paragraph,
    load_predefined,
    merge_with_predefined,
    parse_disease_list,
    resolve_page,
    scrape_corpus,
)

LIST_ORDER = [
    "Dengue fever", "Malaria", "Typhoid fever", "Cholera", "Tuberculosis",
    "Influenza", "Common cold", "Measles", "Chickenpox", "Hepatitis A",
    "Asthma", "Migraine",
]


def _refuse_network(url, user_agent):
    raise AssertionError(f"network transport used in fixture mode: {url}")


class TestParseDiseaseList:
    def test_fixture_names_in_page_order(self):
        html = LIST_PAGE.read_text(encoding="utf-8")
        assert parse_disease_list(html) == LIST_ORDER

    def test_navigation_links_excluded(self):
        html = LIST_PAGE.read_text(encoding="utf-8")
        names = parse_disease_list(html)
        assert "Home" not in names
        assert "Privacy policy" not in names

    def test_empty_region(self):
        assert parse_disease_list('<div class="all-disease"></div>') == []

    def test_case_insensitive_dedup_keeps_first(self):
        html = '<div class="all-disease"><a>Dengue</a><a>dengue</a><a>Rabies</a></div>'
        assert parse_disease_list(html) == ["Dengue", "Rabies"]

    def test_missing_region_reports_selector(self):
        with pytest.raises(ListRegionNotFoundError, match="all-disease"):
            parse_disease_list("<html><body><p>nothing</p></body></html>")

    def test_id_selector(self):
        html = '<ul id="index"><li><a>Cholera</a></li></ul>'
        assert parse_disease_list(html, selector="#index") == ["Cholera"]

    def test_garbage_input_does_not_crash(self):
        with pytest.raises(ListRegionNotFoundError):
            parse_disease_list("<<<>>>\x00\x01 not html at all </table")


class TestMergeWithPredefined:
    def test_union_order(self):
        assert merge_with_predefined(["A", "B"], ["B", "C"]) == ["A", "B", "C"]

    def test_empty_scraped(self):
        assert merge_with_predefined([], ["C"]) == ["C"]

    def test_empty_predefined(self):
        assert merge_with_predefined(["A"], []) == ["A"]

    def test_case_insensitive(self):
        assert merge_with_predefined(["Dengue fever"], ["dengue FEVER", "Rabies"]) == [
            "Dengue fever", "Rabies",
        ]

    def test_load_predefined_skips_comments(self, tmp_path):
        path = tmp_path / "predef.txt"
        path.write_text("# comment\nRabies\n\n  Mumps  \n", encoding="utf-8")
        assert load_predefined(path) == ["Rabies", "Mumps"]


class TestResolvePage:
    def test_fixture_hit(self):
        resolver = fixture_resolver()
        page = resolve_page("Dengue fever", resolver)
        assert page.url == "fixture://dengue-fever"
        assert "Dengue fever" in page.html

    def test_fixture_name_normalization(self):
        resolver = fixture_resolver()
        page = resolve_page("  dengue   FEVER ", resolver)
        assert page.url == "fixture://dengue-fever"

    def test_fixture_miss(self):
        resolver = fixture_resolver()
        with pytest.raises(UnresolvedDiseaseError, match="unresolved disease"):
            resolve_page("Imaginaryitis", resolver)

    def test_fixture_mode_is_hermetic(self):
        resolver = fixture_resolver(transport=_refuse_network)
        resolve_page("Malaria", resolver)
        assert resolver.fetch_count == 0

    def test_empty_name_rejected(self):
        with pytest.raises(ScrapeError):
            resolve_page("   ", fixture_resolver())


def _fake_live_transport(page_html="<html><p>stub</p></html>"):
    calls = []

    def transport(url, user_agent):
        calls.append(url)
        if "action=opensearch" in url:
            return json.dumps(["q", ["Dengue fever"], [""],
                               ["https://en.example.org/wiki/Dengue_fever"]])
        return page_html

    return transport, calls


class TestLiveResolver:
    def make_resolver(self, tmp_path, transport, **overrides):
        sleeps = []
        settings = dict(
            backend="title-search",
            cache_dir=tmp_path / "cache",
            transport=transport,
            sleep=sleeps.append,
            politeness_delay=1.0,
        )
        settings.update(overrides)
        return PageResolver(**settings), sleeps

    def test_search_then_fetch_then_cache(self, tmp_path):
        transport, calls = _fake_live_transport("<html><body>dengue page</body></html>")
        resolver, _ = self.make_resolver(tmp_path, transport)
        page = resolve_page("Dengue fever", resolver)
        assert page.title == "Dengue fever"
        assert page.url.endswith("/wiki/Dengue_fever")
        assert len(calls) == 2  # one search, one page fetch

        again = resolve_page("Dengue fever", resolver)
        assert len(calls) == 2  # cache hit: zero new network calls
        assert again.html == page.html
        assert resolver.fetch_count == 2

    def test_cache_files_are_byte_identical(self, tmp_path):
        transport, _ = _fake_live_transport()
        resolver, _ = self.make_resolver(tmp_path, transport)
        resolve_page("Dengue fever", resolver)
        html_files = list((tmp_path / "cache").glob("*.html"))
        meta_files = list((tmp_path / "cache").glob("*.meta"))
        assert len(html_files) == 1 and len(meta_files) == 1
        first = html_files[0].read_bytes()
        resolve_page("Dengue fever", resolver)
        assert html_files[0].read_bytes() == first
        meta = json.loads(meta_files[0].read_text(encoding="utf-8"))
        assert set(meta) == {"url", "title", "fetched_at"}

    def test_no_search_result_is_unresolved(self, tmp_path):
        def transport(url, user_agent):
            return json.dumps(["q", [], [], []])

        resolver, _ = self.make_resolver(tmp_path, transport)
        with pytest.raises(UnresolvedDiseaseError):
            resolve_page("Nothingitis", resolver)

    def test_retries_then_succeeds(self, tmp_path):
        attempts = []

        def flaky(url, user_agent):
            attempts.append(url)
            if len(attempts) < 3:
                raise OSError("connection reset")
            return json.dumps(["q", [], [], []])

        resolver, sleeps = self.make_resolver(tmp_path, flaky)
        with pytest.raises(UnresolvedDiseaseError):
            resolve_page("Flaky disease", resolver)
        assert len(attempts) == 3
        assert 0.5 in sleeps and 1.0 in sleeps  # exponential backoff

    def test_gives_up_after_three_attempts(self, tmp_path):
        def always_down(url, user_agent):
            raise OSError("no route to host")

        resolver, _ = self.make_resolver(tmp_path, always_down)
        with pytest.raises(FetchError, match="3 attempts"):
            resolve_page("Downitis", resolver)

    def test_politeness_delay_between_fetches(self, tmp_path):
        transport, _ = _fake_live_transport()
        waited = []
        now = [100.0]

        def fake_sleep(seconds):
            waited.append(seconds)
            now[0] += seconds

        resolver, _ = self.make_resolver(tmp_path, transport, sleep=fake_sleep,
                                         clock=lambda: now[0], politeness_delay=2.0)
        resolve_page("Dengue fever", resolver)
        # second fetch happens immediately after the first: full delay enforced
        assert waited and min(waited) > 0
        assert max(waited) <= 2.0
        assert sum(waited) >= 2.0


def oracle_symptoms(slug: str) -> list[str]:
    path = PAGES_DIR / f"{slug}.symptoms.txt"
    return [line for line in path.read_text(encoding="utf-8").splitlines() if line]


ALL_SLUGS = sorted(p.stem for p in PAGES_DIR.glob("*.html"))


class TestInfoboxExtraction:
    @pytest.mark.parametrize("slug", ALL_SLUGS)
    def test_fixture_pages_match_oracle_files(self, slug):
        html = (PAGES_DIR / f"{slug}.html").read_text(encoding="utf-8")
        extract = extract_infobox_symptoms(html)
        assert extract.symptoms == oracle_symptoms(slug)

    def test_no_infobox_is_empty_not_error(self):
        extract = extract_infobox_symptoms("<html><body><p>plain page</p></body></html>")
        assert extract.symptoms == []
        assert extract.symptoms_field_raw == ""

    def test_no_symptoms_row(self):
        html = '<table class="infobox"><tr><th>Treatment</th><td>Rest</td></tr></table>'
        assert extract_infobox_symptoms(html).symptoms == []

    def test_footnote_marker_stripped(self):
        html = '<table class="infobox"><tr><th>Symptoms</th><td>Often none[1]</td></tr></table>'
        assert extract_infobox_symptoms(html).symptoms == ["Often none"]

    def test_sup_citations_dropped(self):
        html = ('<table class="infobox"><tr><th>Symptoms</th>'
                '<td>Fever<sup class="reference">[12]</sup>, rash</td></tr></table>')
        assert extract_infobox_symptoms(html).symptoms == ["Fever", "rash"]

    def test_list_items_split(self):
        html = ('<table class="infobox"><tr><th>Symptoms</th>'
                "<td><ul><li>Fever</li><li>Dry cough</li></ul></td></tr></table>")
        assert extract_infobox_symptoms(html).symptoms == ["Fever", "Dry cough"]

    def test_and_is_not_a_delimiter(self):
        html = ('<table class="infobox"><tr><th>Symptoms</th>'
                "<td>muscle and joint pain, rash</td></tr></table>")
        assert extract_infobox_symptoms(html).symptoms == ["muscle and joint pain", "rash"]

    def test_header_match_is_case_insensitive(self):
        html = '<table class="infobox"><tr><th>SYMPTOMS</th><td>Fever</td></tr></table>'
        assert extract_infobox_symptoms(html).symptoms == ["Fever"]

    def test_raw_field_mirrors_symptoms(self):
        html = '<table class="infobox"><tr><th>Symptoms</th><td>Fever; rash</td></tr></table>'
        extract = extract_infobox_symptoms(html)
        assert extract.symptoms == ["Fever", "rash"]
        assert extract.symptoms_field_raw == "Fever, rash"

    def test_determinism(self):
        html = (PAGES_DIR / "dengue-fever.html").read_text(encoding="utf-8")
        assert extract_infobox_symptoms(html) == extract_infobox_symptoms(html)

    def test_treatment_row(self):
        html = (PAGES_DIR / "dengue-fever.html").read_text(encoding="utf-8")
        assert extract_treatment(html) == (
            "Supportive care, intravenous fluids, blood transfusions"
        )

    def test_medication_fallback(self):
        html = (PAGES_DIR / "migraine.html").read_text(encoding="utf-8")
        assert extract_treatment(html) == "Ibuprofen, paracetamol"

    def test_treatment_absent_is_empty(self):
        html = (PAGES_DIR / "common-cold.html").read_text(encoding="utf-8")
        assert extract_treatment(html) == ""

    def test_first_paragraph_skips_blank(self):
        html = (PAGES_DIR / "asthma.html").read_text(encoding="utf-8")
        assert first_paragraph(html).startswith("Asthma is a common long-term")


class TestParserFuzz:
    def test_random_bytes_never_crash(self):
        rng = random.Random(1337)
        snippets = [b"<table", b"<tr>", b"<th>Symptoms</th>", b"<td>", b"</", b">",
                    b'class="infobox"', b"<a href=", b"<ul><li>", b"&amp;", b"<!--"]
        for _ in range(300):
            blob = bytearray(rng.randbytes(rng.randint(0, 256)))
            for _ in range(rng.randint(0, 4)):
                blob += rng.choice(snippets) + rng.randbytes(rng.randint(0, 32))
            text = bytes(blob).decode("utf-8", errors="replace")
            extract_infobox_symptoms(text)
            try:
                parse_disease_list(text)
            except ListRegionNotFoundError:
                pass


class TestScrapeCorpus:
    def test_full_fixture_run(self):
        records, warnings = scrape_corpus(fixture_scrape_config())
        assert warnings == []
        assert len(records) == 12
        assert [r.name for r in records] == sorted(LIST_ORDER, key=str.casefold)
        by_id = {r.id: r for r in records}
        for slug in ALL_SLUGS:
            assert by_id[slug].raw_symptoms == oracle_symptoms(slug)
        # ids follow sorted names, descriptions and treatments captured
        assert by_id["dengue-fever"].description.startswith("Dengue fever is a mosquito-borne")
        assert by_id["common-cold"].treatment == ""

    def test_fixture_mode_zero_network(self):
        config = fixture_scrape_config(resolver=fixture_resolver(transport=_refuse_network))
        records, _ = scrape_corpus(config)
        assert len(records) == 12
        assert config.resolver.fetch_count == 0

    def test_unmapped_disease_warns_but_continues(self, tmp_path):
        partial_map = tmp_path / "map.txt"
        lines = [
            line
            for line in (fixture_scrape_config().resolver.fixture_map_path
                         ).read_text(encoding="utf-8").splitlines()
            if not line.startswith("Cholera\t")
        ]
        partial_map.write_text("\n".join(lines) + "\n", encoding="utf-8")
        config = fixture_scrape_config(
            resolver=fixture_resolver(fixture_map_path=partial_map)
        )
        records, warnings = scrape_corpus(config)
        assert len(records) == 12
        assert any("Cholera" in w for w in warnings)
        cholera = next(r for r in records if r.name == "Cholera")
        assert cholera.raw_symptoms == []

    def test_missing_list_source_is_fatal(self, tmp_path):
        config = fixture_scrape_config(list_source=str(tmp_path / "gone.html"))
        with pytest.raises(ScrapeError, match="list source not found"):
            scrape_corpus(config)

    def test_predefined_only_name_gets_predefined_kind(self, tmp_path):
        predef = tmp_path / "predef.txt"
        predef.write_text("Dengue fever\n", encoding="utf-8")
        empty_list = tmp_path / "list.html"
        empty_list.write_text('<div class="all-disease"></div>', encoding="utf-8")
        transport, _ = _fake_live_transport(
            (PAGES_DIR / "dengue-fever.html").read_text(encoding="utf-8")
        )
        config = fixture_scrape_config(
            list_source=str(empty_list),
            predefined_path=predef,
            resolver=PageResolver(backend="title-search", cache_dir=tmp_path / "cache",
                                  transport=transport, sleep=lambda s: None),
        )
        records, warnings = scrape_corpus(config)
        assert warnings == []
        assert records[0].source.kind.value == "predefined"

    def test_concurrent_run_matches_serial(self):
        serial, _ = scrape_corpus(fixture_scrape_config())
        concurrent, _ = scrape_corpus(fixture_scrape_config(concurrency=4))
        assert serial == concurrent
