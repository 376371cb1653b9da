import numpy as np
import pytest
from hypothesis import settings

from dbcforest.screening import rank_by_confidence

settings.register_profile("default", deadline=None, print_blob=True)
settings.load_profile("default")

# correctness of the twelve ranked instances in the worked example
EXAMPLE_CORRECT = [1, 1, 1, 1, 0, 0, 1, 0, 0, 1, 0, 0]
# strictly decreasing confidences so rank k has confidence EXAMPLE_CONF[k - 1]
EXAMPLE_CONF = [0.99, 0.95, 0.92, 0.90, 0.85, 0.80, 0.78, 0.70, 0.65, 0.60, 0.55, 0.50]


@pytest.fixture
def example_ranked():
    return rank_by_confidence(confidence=EXAMPLE_CONF, correct=EXAMPLE_CORRECT,
                              ids=np.arange(1, 13))


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
