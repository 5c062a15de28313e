"""
Test configuration and fixtures for fracplap.

The reference discretization is n = 64 interior nodes on (−1, 1) with
s = 0.4 (0.25 for p = 3); kernels are assembled once per session.
"""

import numpy as np
import pytest

from fracplap.discretization import (
    Domain1D,
    GridFunction,
    KernelMatrix,
    OperatorContext,
    assemble_kernel,
    build_grid,
)
from fracplap.spectral import EigenPair, SolverOptions, solve_first, solve_second
from fracplap.spectral.oracle import oracle_spectrum_p2
from test_helpers import EXPONENTS, N_NODES, ORDERS, make_context


@pytest.fixture(scope="session")
def domain() -> Domain1D:
    """Uniform grid with 64 interior nodes on (−1, 1)."""
    return build_grid(-1.0, 1.0, N_NODES)


@pytest.fixture(scope="session")
def nested_domain() -> Domain1D:
    """Grid with n + 1 divisible by 4, as tabulated weights require."""
    return build_grid(-1.0, 1.0, 63)


@pytest.fixture(scope="session")
def kernels(domain: Domain1D) -> dict[float, KernelMatrix]:
    """Kernels for every tested exponent p."""
    return {p: assemble_kernel(domain, ORDERS[p], p) for p in EXPONENTS}


@pytest.fixture(scope="session")
def kernel2(kernels: dict[float, KernelMatrix]) -> KernelMatrix:
    return kernels[2.0]


@pytest.fixture(scope="session")
def ctx2(kernel2: KernelMatrix) -> OperatorContext:
    """p = 2, h ≡ 1."""
    return make_context(kernel2)


@pytest.fixture(scope="session")
def options() -> SolverOptions:
    return SolverOptions()


@pytest.fixture(scope="session")
def first2(ctx2: OperatorContext, options: SolverOptions) -> EigenPair:
    """First eigenpair for p = 2, h ≡ 1."""
    return solve_first(ctx2, options)


@pytest.fixture(scope="session")
def oracle2(ctx2: OperatorContext) -> list[tuple[float, GridFunction]]:
    """Dense generalized spectrum for p = 2, h ≡ 1."""
    return oracle_spectrum_p2(ctx2)


@pytest.fixture(scope="session")
def lambda2_numeric(ctx2: OperatorContext, first2: EigenPair, options: SolverOptions) -> float:
    return solve_second(ctx2, opts=options, first=first2).lambda2


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
