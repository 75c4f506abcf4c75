import json
import os
import sys
import time
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from lossy_fbl.figures import FIGURES, RateFigure, compute_figure

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

sys.path.insert(0, os.path.dirname(__file__))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def figure_rows():
    """Every figure computed once: {name: (rows, seconds)}."""
    out = {}
    for name, fig in FIGURES.items():
        t0 = time.perf_counter()
        rows = compute_figure(fig, threads=4 if isinstance(fig, RateFigure) else 1)
        out[name] = (rows, time.perf_counter() - t0)
    return out


@pytest.fixture(scope="session")
def standard_grid():
    return json.loads((FIXTURES / "standard_grid.json").read_text())


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip("."))):
            terminalreporter.write_line(line)
