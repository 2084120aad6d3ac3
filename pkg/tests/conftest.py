import json

import pytest

from geolect.ingest import IngestSettings, process_lines
from geolect.lexicon import load_lexicon, read_lexicon

import corpora

SMALL_LEXICON = """\
# test lexicon
cold\tcatarro, constipado, gripe, resfriado
swimming pool\talberca, pileta, piscina
aluminum paper\tpapel albal, albal, papel de aluminio, papel de plata
"""


@pytest.fixture(scope="session")
def lexicon():
    return read_lexicon()


@pytest.fixture(scope="session")
def small_lexicon():
    return load_lexicon(SMALL_LEXICON)


@pytest.fixture(scope="session")
def fixture_lines():
    return [json.dumps(r, ensure_ascii=False) for r in corpora.fixture_records()]


@pytest.fixture(scope="session")
def fixture_model(lexicon, fixture_lines):
    model, _ = process_lines(fixture_lines, lexicon, corpora.GRID, IngestSettings())
    return model


@pytest.fixture(scope="session")
def two_region_model(lexicon):
    lines = [json.dumps(r, ensure_ascii=False) for r in corpora.two_region_records()]
    model, _ = process_lines(lines, lexicon, corpora.GRID, IngestSettings())
    return model


# -- acceptance verdicts ----------------------------------------------------------------

_VERDICTS = []


@pytest.fixture
def verdict():
    """Record a PASS/FAIL line for an acceptance criterion, then assert it."""

    def _record(criterion, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
        _VERDICTS.append(line)
        print(line)
        assert ok, line

    return _record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
