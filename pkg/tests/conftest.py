"""Shared fixtures and the acceptance summary report.

Every test in test_acceptance.py is echoed at the end of the run as one
``[PASS]``/``[FAIL]`` line, together with any values the test recorded
through the ``record_property`` fixture.
"""
from __future__ import annotations

from pathlib import Path

import pytest

from semdisc import build_index, ingest_registry, load_lexicon, load_taxonomy

DATA = Path(__file__).parent / "data"

_ACCEPTANCE: list[tuple[str, str, str]] = []


@pytest.fixture(scope="session")
def demo_lexicon():
    return load_lexicon(DATA / "lexicon.tsv")


@pytest.fixture(scope="session")
def demo_taxonomy():
    return load_taxonomy(DATA / "taxonomy.txt")


@pytest.fixture(scope="session")
def demo_records():
    return ingest_registry(DATA / "services.jsonl")


@pytest.fixture(scope="session")
def demo_index(demo_records, demo_lexicon):
    return build_index(demo_records, demo_lexicon)


@pytest.fixture(scope="session")
def mini_lexicon():
    return load_lexicon(DATA / "mini_lexicon.tsv")


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    if report.passed:
        status = "PASS"
    elif report.skipped:
        status = "SKIP"
    else:
        status = "FAIL"
    notes = "; ".join(f"{key}={value}" for key, value in report.user_properties)
    _ACCEPTANCE.append((report.nodeid.split("::")[-1], status, notes))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, notes in _ACCEPTANCE:
        line = f"[{status}] {name}"
        if notes:
            line += f"  ({notes})"
        terminalreporter.write_line(line)
