import pytest

from eomq import _backend

VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[VERDICTS] = []


@pytest.fixture(params=sorted(_backend.BACKENDS))
def backend(request):
    previous = _backend.BACKEND
    _backend.use(request.param)
    yield request.param
    _backend.use(previous)


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    seen = []
    log = request.config.stash[VERDICTS]

    def record(num, title, ok, detail=""):
        line = f"criterion {num:>2}  {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip()
        seen.append(num)
        log.append((num, line))
        print(line)
        assert ok, line

    yield record
    if not seen:
        num = int(request.node.name.split("_")[1].lstrip("c"))
        log.append((num, f"criterion {num:>2}  FAIL  raised before a verdict"))


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
