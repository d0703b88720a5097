import pytest

ACCEPTANCE: dict = {}


def record(key: str, title: str, passed: bool, detail: str = "") -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {key}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE[key] = line
    print(line)


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int("".join(c for c in k if c.isdigit()) or 0), k)):
        terminalreporter.write_line(ACCEPTANCE[key])
