import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

REFERENCE_MOMENTA = ((0.0, 0.0, 1.0), (0.2, 0.3, 0.95), (1.5, 0.35, 0.94))
REFERENCE_TARGETS = ((0.0, 1.0, -math.pi), (0.03, 0.5, 2.9), (1.8, 2.3, 0.2))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


class PairCache:
    """Matched (elastica, geodesic) pairs keyed by (target, xi); shared across test modules."""

    def __init__(self):
        self._pairs = {}

    def put(self, target, xi, pair):
        self._pairs[(tuple(target), float(xi))] = pair

    def get(self, target, xi=1.0):
        from se2curves import ModelParams, SE2Element, match_elastica_to_geodesic

        key = (tuple(target), float(xi))
        if key not in self._pairs:
            self._pairs[key] = match_elastica_to_geodesic(SE2Element(*target), ModelParams(xi))
        return self._pairs[key]


_CACHE = PairCache()


@pytest.fixture(scope="session")
def pairs():
    return _CACHE


ACCEPTANCE_LINES: list[str] = []


class criterion:
    """Context manager that records one PASS/FAIL line for an acceptance criterion."""

    def __init__(self, number: int, title: str):
        self.number, self.title, self.details = number, title, []

    def note(self, text: str):
        self.details.append(text)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        detail = "; ".join(self.details)
        if exc is not None:
            detail = (detail + "; " if detail else "") + f"{exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        line = f"[{status}] criterion {self.number}: {self.title}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return False


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
