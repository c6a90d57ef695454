import numpy as np
import pytest

from fano_sim.model import SystemParams

# (gamma_a/gamma_b, delta/gamma_bar, n_bar) for the six
# reference trajectories; a-c symmetric, d-f asymmetric.
REFERENCE_CASES = {
    "a": (1.0, 10.0, 0.06),
    "b": (1.0, 0.1, 0.06),
    "c": (1.0, 0.1, 100.0),
    "d": (10.0, 10.0, 0.06),
    "e": (10.0, 0.1, 0.06),
    "f": (10.0, 0.1, 100.0),
}


def reference_params(panel: str) -> SystemParams:
    ratio, delta, n_bar = REFERENCE_CASES[panel]
    return SystemParams.dimensionless(gamma_ratio=ratio, delta_over_gamma=delta, n_bar=n_bar)


@pytest.fixture(params=sorted(REFERENCE_CASES))
def reference_case(request):
    return request.param, reference_params(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def random_params(rng, field_mode="polarized"):
    """Admissible parameter set with gamma_bar = 1."""
    return SystemParams.dimensionless(
        gamma_ratio=float(10 ** rng.uniform(-1, 1)),
        delta_over_gamma=float(10 ** rng.uniform(-2, 1)),
        n_bar=float(10 ** rng.uniform(-2, 2)),
        p=float(rng.uniform(-1, 1)),
        field_mode=field_mode,
    )


_VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_VERDICTS] = []


@pytest.fixture
def verdict(request):
    """Record one acceptance line; printed again in the terminal summary."""
    lines = request.config.stash[_VERDICTS]

    def record(number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {detail}"
        lines.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
