import pytest

CRITERIA: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def criterion():
    """Record the outcome of an acceptance criterion for the summary block."""

    def record(number: int, title: str, passed: bool, detail: str = ""):
        CRITERIA[number] = (title, bool(passed), detail)
        print(f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        title, ok, detail = CRITERIA[k]
        terminalreporter.write_line(f"{k}. {'PASS' if ok else 'FAIL'}  {title}  ({detail})")
