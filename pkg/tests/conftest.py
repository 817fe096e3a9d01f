import numpy as np
import pytest

from goldenep import AffineBifunction, BoxSet, GeneratorConfig, ProblemInstance, generate


def scalar_instance(x_start=1.0, xbar_start=None):
    """f(x, y) = x (y - x) on [-2, 5]; unique solution 0."""
    f = AffineBifunction([[1.0]], [[0.0]], [0.0])
    xbar = x_start if xbar_start is None else xbar_start
    return ProblemInstance(f, BoxSet.uniform(-2, 5, 1), [x_start], [xbar])


@pytest.fixture
def scalar():
    return scalar_instance()


@pytest.fixture(scope="session")
def small_instances():
    return [generate(GeneratorConfig(dimension=5, seed=s)) for s in range(4)]


@pytest.fixture
def rng():
    return np.random.default_rng(20181001)


def random_point(rng, box):
    return rng.uniform(box.lower, box.upper)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
