"""Tests for grids, boundary distance and quadrature."""

import numpy as np
import pytest

from fracplap.core.errors import ValidationError
from fracplap.discretization import (
    Domain1D,
    GridFunction,
    build_grid,
    distance_to_boundary,
    integrate,
)


class TestBuildGrid:
    """Test construction of uniform interior-node grids."""

    def test_nodes_and_spacing(self) -> None:
        """Test that nodes are the interior points of n + 1 equal cells."""
        domain = build_grid(0.0, 1.0, 3)
        assert domain.cell_weight == pytest.approx(0.25)
        np.testing.assert_allclose(domain.nodes, [0.25, 0.5, 0.75])

    @pytest.mark.parametrize(("left", "right", "n"), [(1.0, 0.0, 8), (0.0, 0.0, 8), (0.0, 1.0, 1)])
    def test_invalid_grid_rejected(self, left: float, right: float, n: int) -> None:
        """Test that degenerate intervals and n < 2 are rejected."""
        with pytest.raises(ValidationError):
            build_grid(left, right, n)

    def test_reflect_reverses_nodes(self) -> None:
        """Test reflection about the midpoint."""
        domain = build_grid(-1.0, 1.0, 4)
        np.testing.assert_array_equal(domain.reflect(np.arange(4.0)), [3.0, 2.0, 1.0, 0.0])


class TestDistanceAndQuadrature:
    """Test ρ and the midpoint quadrature."""

    def test_distance_is_symmetric_and_positive(self, domain: Domain1D) -> None:
        """Test that ρ is positive and symmetric on a symmetric interval."""
        rho = distance_to_boundary(domain)
        assert np.all(rho > 0.0)
        np.testing.assert_allclose(rho, rho[::-1])
        assert rho.max() <= 1.0

    def test_integrate_constant(self, domain: Domain1D) -> None:
        """Test ∫1 equals n·w."""
        assert integrate(np.ones(domain.n), domain) == pytest.approx(domain.n * domain.cell_weight)

    def test_integrate_smooth_function(self) -> None:
        """Test second-order accuracy on a function vanishing at the boundary."""
        errors = []
        for n in (63, 127):
            domain = build_grid(-1.0, 1.0, n)
            values = np.cos(0.5 * np.pi * domain.nodes)
            errors.append(abs(integrate(values, domain) - 4.0 / np.pi))
        assert errors[1] < errors[0] / 3.0

    def test_integrate_rejects_wrong_length(self, domain: Domain1D) -> None:
        """Test that a vector of the wrong length is rejected."""
        with pytest.raises(ValidationError):
            integrate(np.ones(domain.n + 1), domain)


class TestGridFunction:
    """Test the immutable nodal vector model."""

    def test_values_are_read_only(self, domain: Domain1D) -> None:
        """Test that stored values cannot be modified in place."""
        u = GridFunction(domain=domain, values=np.ones(domain.n))
        with pytest.raises(ValueError):
            u.values[0] = 2.0

    def test_length_mismatch(self, domain: Domain1D) -> None:
        """Test that a length mismatch fails validation."""
        with pytest.raises(ValueError, match="domain has n=64"):
            GridFunction(domain=domain, values=np.ones(3))

    def test_negation_and_sup_norm(self, domain: Domain1D) -> None:
        """Test negation, scaling and the sup norm."""
        u = GridFunction(domain=domain, values=np.linspace(-2.0, 1.0, domain.n))
        assert (-u).sup_norm == pytest.approx(2.0)
        assert u.scaled(0.5).sup_norm == pytest.approx(1.0)

    def test_domain_rejects_reversed_interval(self) -> None:
        """Test the model-level interval validator."""
        with pytest.raises(ValueError, match="left < right"):
            Domain1D(left=1.0, right=-1.0, n=8)
