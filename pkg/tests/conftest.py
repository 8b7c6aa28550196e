import time

import pytest

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


class Criterion:
    def __init__(self, number: int, title: str):
        self.number = number
        self.title = title
        self.details: list[str] = []
        self.start = time.perf_counter()

    def note(self, text: str):
        self.details.append(text)

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    number, title = marker.args
    c = Criterion(number, title)
    yield c
    failed = getattr(request.node, "rep_call", None)
    ok = failed is not None and failed.passed
    detail = "; ".join(c.details + [f"{c.elapsed:.2f}s"])
    _ACCEPTANCE[number] = (ok, f"{title} [{detail}]")


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    if rep.when == "call":
        item.rep_call = rep
    return rep


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, text = _ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  #{number:>2}  {text}")
