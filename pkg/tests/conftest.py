import sys
from functools import lru_cache

import pytest

from twistlat.catalog import isometry_from_name, lattice_from_name
from twistlat.twist import twist_data

# (lattice, isometry) pairs used across the suite
CASES = [
    ("A:1", "identity"),
    ("A:2", "identity"),
    ("Z:1", "identity"),
    ("A:1", "negation"),
    ("Z:1", "negation"),
    ("Z:2", "negation"),
    ("Z:2", "perm:(1 2)"),
    ("A:2", "coxeter"),
    ("A:2", "negation"),
    ("Z:3", "perm:(1 2 3)"),
    ("D:4", "coxeter"),
    ("D:4", "perm:(1 3 4)"),
    ("A:3", "coxeter"),
]


@lru_cache(maxsize=None)
def twist(lattice: str, sigma: str):
    lat = lattice_from_name(lattice)
    return twist_data(lat, isometry_from_name(sigma, lat))


@pytest.fixture
def tw():
    return twist


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)
