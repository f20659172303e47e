"""Run only the acceptance gate and exit with its status.

    python3 scripts/run_acceptance.py [extra pytest args]
"""

import sys
from pathlib import Path

import pytest

if __name__ == "__main__":
    gate = Path(__file__).resolve().parent.parent / "tests" / "test_acceptance.py"
    sys.exit(pytest.main([str(gate), "-q", *sys.argv[1:]]))
