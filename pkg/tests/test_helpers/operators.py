"""Reference discretization used across the test-suite."""

import numpy as np
import numpy.typing as npt

from fracplap.discretization import Domain1D, GridFunction, KernelMatrix, OperatorContext
from fracplap.weights import WeightSpec, weight_values

S = 0.4
N_NODES = 64
EXPONENTS = (1.5, 2.0, 3.0)
# s·p < 1 on the 1-D grid
ORDERS = {1.5: S, 2.0: S, 3.0: 0.25}


def make_context(kernel: KernelMatrix, weight: WeightSpec | None = None) -> OperatorContext:
    """OperatorContext for a weight spec, h ≡ 1 by default."""
    weight = weight or WeightSpec.constant()
    values = weight_values(weight, kernel.domain)
    return OperatorContext(kernel=kernel, weight=GridFunction(domain=kernel.domain, values=values))


def smooth_profile(domain: Domain1D) -> npt.NDArray[np.float64]:
    """cos(πx/2) on (−1, 1), vanishing at the boundary."""
    return np.cos(0.5 * np.pi * domain.nodes)
