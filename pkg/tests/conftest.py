import pytest

_lines = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_lines] = []


@pytest.fixture
def verdict(request):
    """Record a one-line pass/fail verdict shown in the terminal summary."""
    lines = request.config.stash[_lines]

    def record(number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        lines.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_lines, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
