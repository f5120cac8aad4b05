import numpy as np
import pytest

from quarttrace.model import ModeSpec, SolverConfig

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def mode1():
    """gamma = 2, alpha = 1/4: the first mode of gamma_k = 1 + k^4."""
    return ModeSpec(1, 2.0, 0.25)


@pytest.fixture
def cfg():
    return SolverConfig()


@pytest.fixture
def small_cfg():
    return SolverConfig(J_max=20, galerkin_dim=40, ladder=(10, 20))


@pytest.fixture
def cos2pi():
    return lambda t: np.cos(2 * np.pi * np.asarray(t, dtype=float))


@pytest.fixture
def acceptance_log():
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""
    def log(line: str):
        ACCEPTANCE_LINES.append(line)
        print(line)
    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
