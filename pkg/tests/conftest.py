import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).resolve().parent
REPO_DIR = TESTS_DIR.parent
FIXTURES = REPO_DIR / "fixtures"
GOLDEN = TESTS_DIR / "golden"

LIST_PAGE = FIXTURES / "list" / "nhp_list.html"
PAGES_DIR = FIXTURES / "pages"
RESOLVER_MAP = FIXTURES / "resolver_map.txt"
PREDEFINED = FIXTURES / "predefined_diseases.txt"
LEXICON_FILE = FIXTURES / "lexicon" / "test_lexicon.txt"

sys.path.insert(0, str(TESTS_DIR))  # makes `import oracles` work everywhere

from medtriage.build import build_dataset  # noqa: E402
from medtriage.dialogue import TriageEngine  # noqa: E402
from medtriage.normalize import SynonymLexicon  # noqa: E402
from medtriage.scraper import PageResolver, ScrapeConfig  # noqa: E402


def fixture_resolver(**overrides) -> PageResolver:
    settings = dict(
        backend="fixture-map",
        fixture_map_path=RESOLVER_MAP,
        fixture_dir=PAGES_DIR,
    )
    settings.update(overrides)
    return PageResolver(**settings)


def fixture_scrape_config(**overrides) -> ScrapeConfig:
    settings = dict(
        list_source=str(LIST_PAGE),
        resolver=fixture_resolver(),
        predefined_path=PREDEFINED,
    )
    settings.update(overrides)
    return ScrapeConfig(**settings)


@pytest.fixture(scope="session")
def built_dataset(tmp_path_factory):
    """Fixture corpus built once per test session: (corpus, report, dataset path)."""
    out = tmp_path_factory.mktemp("dataset") / "corpus.jsonl"
    corpus, report = build_dataset(
        fixture_scrape_config(), [LEXICON_FILE], 0.75, out
    )
    return corpus, report, out


@pytest.fixture(scope="session")
def corpus(built_dataset):
    return built_dataset[0]


@pytest.fixture(scope="session")
def lexicon():
    return SynonymLexicon.load(LEXICON_FILE)


@pytest.fixture()
def engine(corpus, lexicon):
    return TriageEngine(corpus, lexicon)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            name = getattr(report, "nodeid", "")
            if "test_acceptance.py::test_criterion_" in name:
                label = name.split("::", 1)[1]
                status = "PASS" if outcome == "passed" else "FAIL"
                lines.append((label, status))
    if lines:
        terminalreporter.section("acceptance criteria")
        for label, status in sorted(lines):
            terminalreporter.write_line(f"{status}  {label}")
