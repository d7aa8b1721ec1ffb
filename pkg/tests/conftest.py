import os
import sys

import pytest

from misere.classifier import enumerate_quotients

HERE = os.path.dirname(__file__)
DATA = os.path.join(HERE, "data")
GOLDEN = os.path.join(HERE, "golden")


def data_path(name):
    return os.path.join(DATA, name)


@pytest.fixture(scope="session")
def census12():
    return enumerate_quotients(12)


@pytest.fixture(scope="session")
def order12_text():
    with open(data_path("order12.txt")) as fh:
        return fh.read()


ACCEPTANCE_LINES = []


def acceptance(label, ok, detail=""):
    """Record and print one pass/fail line for an acceptance criterion."""
    line = f"{label}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line, file=sys.__stdout__, flush=True)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
