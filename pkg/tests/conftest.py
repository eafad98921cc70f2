from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)
SINGLE = {"I": _I, "X": _X, "Y": _Y, "Z": _Z}


def kron_pauli(text: str, sign: complex = 1) -> np.ndarray:
    """Dense Pauli for a string whose first letter is qubit 0 (little endian: qubit 0 is rightmost factor)."""
    out = np.ones((1, 1), dtype=complex)
    for c in text:
        out = np.kron(SINGLE[c], out)
    return sign * out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria record one summary line each; printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
