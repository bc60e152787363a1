import sys
from contextlib import contextmanager
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> (title, passed, detail)
ACCEPTANCE = {}


@contextmanager
def criterion(number, title):
    """Record PASS/FAIL for an acceptance criterion around its assertions."""
    note = {"detail": ""}
    try:
        yield note
    except BaseException as e:
        ACCEPTANCE[number] = (title, False, f"{type(e).__name__}: {e}".splitlines()[0])
        raise
    ACCEPTANCE[number] = (title, True, note["detail"])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        line = f"{number:>2}. {'PASS' if passed else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
