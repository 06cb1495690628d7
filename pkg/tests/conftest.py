"""Shared fixtures.  Expensive greedy runs are session-scoped so the
acceptance module and the unit tests reuse the same decompositions."""

import numpy as np
import pytest

from dafd.engine import EngineConfig, run_afd
from dafd.experiments import example1_projection, example2_signal
from dafd.kernels import szego_boundary
from dafd.signals import BoundarySignal, boundary_z

FULL_N = 4096


def monomial(power: int, n_samples: int) -> BoundarySignal:
    """Boundary samples of z**power."""
    return BoundarySignal(boundary_z(n_samples) ** power)


def kernel_combination(params, coeffs, n_samples, r_max=0.995) -> BoundarySignal:
    acc = np.zeros(n_samples, dtype=np.complex128)
    for a, c in zip(params, coeffs):
        acc += c * szego_boundary(a, n_samples, r_max).samples
    return BoundarySignal(acc)


@pytest.fixture(scope="session")
def ex1_real():
    from dafd.experiments import example1_samples

    return example1_samples(FULL_N)


@pytest.fixture(scope="session")
def ex1_fplus():
    fplus, _ = example1_projection(FULL_N)
    return fplus


@pytest.fixture(scope="session")
def ex1_c0():
    _, c0 = example1_projection(FULL_N)
    return c0


@pytest.fixture(scope="session")
def ex2_signal():
    return example2_signal(FULL_N)


@pytest.fixture(scope="session")
def ex1_double10(ex1_fplus):
    return run_afd(ex1_fplus, "double", EngineConfig(max_terms=10))


@pytest.fixture(scope="session")
def ex1_core12(ex1_fplus):
    return run_afd(ex1_fplus, "core", EngineConfig(max_terms=12))


@pytest.fixture(scope="session")
def ex2_double10(ex2_signal):
    return run_afd(ex2_signal, "double", EngineConfig(max_terms=10))


@pytest.fixture(scope="session")
def ex2_core8(ex2_signal):
    return run_afd(ex2_signal, "core", EngineConfig(max_terms=8))
