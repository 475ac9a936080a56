import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from backsec.model import SystemChannels, SystemParams
from backsec.montecarlo import GeometryParams, generate_channels

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=30,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture
def params():
    return SystemParams.reference_defaults()


def default_channels(seed: int, trial: int = 0, **overrides) -> tuple[SystemChannels, SystemParams]:
    p = SystemParams.reference_defaults(**overrides)
    return generate_channels(p, GeometryParams(), seed, trial), p


def scalar_channels(hpe=1.0, hte=1.0) -> SystemChannels:
    one = np.ones((1, 1))
    return SystemChannels(one, one, one, hpe * one, hte * one)


def scalar_params(**kw) -> SystemParams:
    base = dict(
        m_tx=1, n_rx=1, l_tag=1, k_eve=1, total_power=3.0,
        sigma2_reader=1.0, sigma2_eve=1.0, alpha=0.0, beta=0.0,
    )
    base.update(kw)
    return SystemParams(**base)


def random_psd(rng, m, scale=1.0):
    g = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return scale * (g @ g.conj().T) / m


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[num])
