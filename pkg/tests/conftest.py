"""Shared hooks: acceptance criteria report one PASS/FAIL line each."""

import pytest

_RESULTS = []


class CriterionRecorder:
    def __init__(self, number, title):
        self.number = number
        self.title = title

    def check(self, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} criterion {self.number:>2}: {self.title} | {detail}"
        _RESULTS.append(line)
        print(line)
        assert passed, line


@pytest.fixture
def criterion():
    return CriterionRecorder


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_RESULTS, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
        terminalreporter.write_line(line)
