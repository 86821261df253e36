import numpy as np
import pytest

from deltamix import (
    DriveConfiguration,
    DriveField,
    RelaxationRates,
    effective_linewidths,
)


def pytest_terminal_summary(terminalreporter):
    """Show the per-criterion acceptance lines even when all tests pass
    (pytest captures in-test prints otherwise)."""
    import sys

    lines = []
    for name, module in sys.modules.items():
        if name.endswith("test_acceptance") and module is not None:
            lines = getattr(module, "RESULT_LINES", [])
            if lines:
                break
    RESULT_LINES = lines
    if RESULT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in RESULT_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def figure_rates():
    """gamma13 = 3, gamma23 = 1, no dephasing (shared by both figures)."""
    return RelaxationRates(gamma13=3.0, gamma23=1.0)


@pytest.fixture
def figure_linewidths(figure_rates):
    return effective_linewidths(figure_rates)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


def random_drive(rng, max_weak=2.0, max_control=8.0, max_detuning=5.0):
    """A random valid drive set with moderate magnitudes."""
    return DriveConfiguration(
        drive_d=DriveField(rng.uniform(0.0, max_weak), rng.uniform(-np.pi, np.pi)),
        control_c=DriveField(rng.uniform(0.0, max_control), rng.uniform(-np.pi, np.pi)),
        signal_s=DriveField(rng.uniform(0.0, max_weak), rng.uniform(-np.pi, np.pi)),
        delta_d=rng.uniform(-max_detuning, max_detuning),
    )


def random_rates(rng):
    return RelaxationRates(
        gamma13=rng.uniform(0.2, 3.0),
        gamma23=rng.uniform(0.0, 2.0),
        gphi2=rng.uniform(0.0, 1.0),
        gphi3=rng.uniform(0.0, 1.0),
    )
