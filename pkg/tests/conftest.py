import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from khibound.heegaard_builder import random_curve_system  # noqa: E402


@pytest.fixture(scope="session")
def small_systems():
    """Random systems with at most 12 vertices, for the isomorphism oracle."""
    rng = random.Random(7)
    out = []
    while len(out) < 80:
        cs = random_curve_system(rng, max_genus=3, max_moves=4)
        if len(cs.vertices) <= 12:
            out.append(cs)
    return out


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
