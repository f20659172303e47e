import sys
from pathlib import Path

import pytest

from okb.formats import parse_certificate, parse_term

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
sys.path.insert(0, str(ROOT / "scripts"))
sys.path.insert(0, str(Path(__file__).resolve().parent))

VARS = ("x", "y", "z", "q", "r", "u", "v", "w", "x0", "y0")


def T(text):
    """Shorthand term parser for tests: x y z q r u v w are variables."""
    return parse_term(text, VARS)


@pytest.fixture(scope="session")
def div_cert():
    return parse_certificate((FIXTURES / "division.cert.json").read_bytes())


# -- acceptance reporting ----------------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): an acceptance criterion")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when not in ("setup", "call"):
        return
    number, title = mark.args
    failed = call.excinfo is not None
    if call.when == "call" or failed:
        detail = "" if not failed else f" ({call.excinfo.typename}: {str(call.excinfo.value).splitlines()[0][:160] if str(call.excinfo.value) else ''})"
        _CRITERIA[number] = f"{'FAIL' if failed else 'PASS'} criterion {number:>2}: {title}{detail}"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[number])
