import time
from contextlib import contextmanager

import pytest

_RESULTS = {}


class Criterion:
    def __init__(self, number, title):
        self.number = number
        self.title = title
        self.notes = []
        self.elapsed = 0.0

    def note(self, text):
        self.notes.append(text)


@pytest.fixture
def criterion():
    """Context manager that times one acceptance criterion and records its outcome."""

    @contextmanager
    def run(number, title, limit=None):
        c = Criterion(number, title)
        start = time.perf_counter()
        ok = False
        try:
            yield c
            c.elapsed = time.perf_counter() - start
            if limit is not None:
                c.note(f"{c.elapsed:.3f}s (limit {limit}s)")
                assert c.elapsed < limit, f"criterion {number} took {c.elapsed:.3f}s, limit {limit}s"
            ok = True
        finally:
            if not c.elapsed:
                c.elapsed = time.perf_counter() - start
            _RESULTS[number] = (ok, c)

    return run


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        ok, c = _RESULTS[number]
        status = "PASS" if ok else "FAIL"
        detail = "; ".join(c.notes)
        terminalreporter.write_line(f"[{status}] {number}. {c.title}" + (f"  ({detail})" if detail else ""))
