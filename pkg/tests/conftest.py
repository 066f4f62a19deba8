import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from oracles import EX65_A, EX65_B  # noqa: E402
from scdkit.polyhedral import PolyhedralSet  # noqa: E402
from scdkit.problem import GeneralizedEquation, named_map  # noqa: E402

PROBLEMS = Path(__file__).resolve().parents[1] / "problems"


@pytest.fixture
def ex65_set():
    return PolyhedralSet(EX65_A, EX65_B)


@pytest.fixture
def ex65(ex65_set):
    return GeneralizedEquation(named_map("ex65", 2), ex65_set)


@pytest.fixture
def halfline():
    """x + N_{R_-}(x) on the real line."""
    return GeneralizedEquation(named_map("identity", 1), PolyhedralSet([[1.0]], [0.0]))


@st.composite
def random_bases(draw, n=None):
    """Random 2n x n matrices; full rank with probability one."""
    if n is None:
        n = draw(st.integers(1, 8))
    seed = draw(st.integers(0, 2**32 - 1))
    return np.random.default_rng(seed).normal(size=(2 * n, n))


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
