import pytest

from acceptance_report import RESULTS


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        ok, title, detail = RESULTS[num]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {num:2d}  {title}: {detail}")


@pytest.fixture
def report():
    def record(num, title, ok, detail=""):
        RESULTS[num] = (bool(ok), title, detail)
        print(f"{'PASS' if ok else 'FAIL'}  criterion {num}  {title}: {detail}")
        assert ok, f"criterion {num} ({title}) not met: {detail}"
    return record
