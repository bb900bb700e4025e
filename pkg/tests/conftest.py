import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def report(capsys):
    """Print a line straight to the terminal, bypassing capture."""

    def emit(line):
        with capsys.disabled():
            print(line)

    return emit
