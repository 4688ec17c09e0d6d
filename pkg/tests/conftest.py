import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# criterion id -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k[1:])):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{key} {'PASS' if passed else 'FAIL'}  {detail}")
