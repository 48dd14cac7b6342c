from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("ci", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

# criterion id -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def random_cloud(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    return rng.uniform(-scale, scale, size=(n, 2))


def random_polyhedral_functionals(rng: np.random.Generator) -> np.ndarray:
    """Two to four random functionals; any two independent ones give a bounded ball."""
    k = int(rng.integers(2, 5))
    ang = np.sort(rng.uniform(0, np.pi, size=k))
    ang[1] = ang[0] + max(ang[1] - ang[0], 0.3)
    return rng.uniform(0.5, 2.0, size=(k, 1)) * np.column_stack([np.cos(ang), np.sin(ang)])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")
