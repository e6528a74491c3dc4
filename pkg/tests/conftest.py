import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from docsurrogate.imaging import BinaryImage  # noqa: E402


def binimg(rows):
    """BinaryImage from nested 0/1 lists, 1 = foreground."""
    return BinaryImage(np.array(rows, dtype=bool))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance verdict lines so they land in the test log."""
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
