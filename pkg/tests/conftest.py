import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from polardirac.clifford import basis_for
from polardirac.sources import PlaneWaveSpec, field_from_specs

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""
    lines = request.config.stash.setdefault(_LINES, [])

    def record(number: int, summary: str, checks: dict, elapsed: float, limit: float):
        failed = [name for name, ok in checks.items() if not ok]
        if elapsed >= limit:
            failed.append(f"runtime {elapsed:.2f} s >= {limit} s")
        status = "PASS" if not failed else "FAIL"
        line = f"{status} criterion {number}: {summary} [{elapsed:.2f} s / {limit} s]"
        if failed:
            line += " failed: " + "; ".join(failed)
        lines.append(line)
        print(line)
        assert not failed, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


def random_field(dim: int, seed: int, mass: float = 1.3, modes: int = 2, q: float = 0.6):
    """Superposition of on-shell plane waves with a constant background potential."""
    rng = np.random.default_rng(seed)
    basis = basis_for(dim)
    specs = []
    for k in range(modes):
        amp = complex(rng.normal(), rng.normal()) if k else 1.0
        axis = rng.normal(size=3) if dim == 4 else None
        specs.append(PlaneWaveSpec.from_spatial(mass, 0.7 * rng.normal(size=dim - 1), 1, amp, axis))
    return field_from_specs(specs, basis, A0=0.3 * rng.normal(size=dim), q=q)


@pytest.fixture
def make_field():
    return random_field
