"""Tests for the discrete Gagliardo energy and derived operators."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fracplap.core.errors import ValidationError
from fracplap.discretization import (
    Domain1D,
    GramSolver,
    KernelMatrix,
    apply_A,
    apply_H,
    assemble_kernel,
    build_grid,
    dual_norm,
    e_norm,
    embedding_constant,
    energy,
    energy_gradient,
    energy_matrix,
    hardy_ratio,
    hessian,
    norm,
    pairing,
    phi,
    seminorm_qh,
    weighted_mass,
)
from fracplap.discretization.gagliardo import (
    dual_norm_by_ascent,
    picone_slack,
    truncation_slack,
)
from fracplap.weights import WeightSpec
from test_helpers import EXPONENTS, N_NODES, S, make_context, smooth_profile

vectors = arrays(
    np.float64,
    N_NODES,
    elements=st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False),
).filter(lambda v: np.max(np.abs(v)) > 1e-3)


class TestAssembleKernel:
    """Test kernel assembly and its parameter checks."""

    def test_kernel_is_symmetric(self, kernel2: KernelMatrix) -> None:
        """Test K = Kᵀ, zero diagonal and positive tails."""
        np.testing.assert_array_equal(kernel2.K, kernel2.K.T)
        assert np.all(np.diag(kernel2.K) == 0.0)
        assert np.all(kernel2.tail > 0.0)

    def test_kernel_is_read_only(self, kernel2: KernelMatrix) -> None:
        """Test that assembled arrays cannot be modified."""
        with pytest.raises(ValueError, match="read-only"):
            kernel2.K[0, 1] = 0.0

    @pytest.mark.parametrize(
        ("s", "p", "message"),
        [(0.0, 2.0, "0 < s < 1"), (1.0, 2.0, "0 < s < 1"), (0.4, 1.0, "p > 1"), (0.6, 2.0, "s\\*p < 1")],
    )
    def test_invalid_parameters(self, domain: Domain1D, s: float, p: float, message: str) -> None:
        """Test that the violated inequality is named."""
        with pytest.raises(ValidationError, match=message):
            assemble_kernel(domain, s, p)


class TestEnergyIdentities:
    """Test identities tying E, A and the Gram matrix together."""

    @settings(max_examples=25, deadline=None)
    @given(values=vectors)
    def test_pairing_with_A_is_energy(self, kernels: dict[float, KernelMatrix], values: np.ndarray) -> None:
        """Test ⟨A(u), u⟩ = E(u) for every p."""
        for kernel in kernels.values():
            assert pairing(apply_A(values, kernel), values, kernel.domain) == pytest.approx(
                energy(values, kernel), rel=1e-12
            )

    @settings(max_examples=25, deadline=None)
    @given(values=vectors, factor=st.floats(-4.0, 4.0).filter(lambda t: abs(t) > 1e-2))
    def test_energy_is_p_homogeneous(
        self, kernels: dict[float, KernelMatrix], values: np.ndarray, factor: float
    ) -> None:
        """Test E(tu) = |t|^p E(u)."""
        for p, kernel in kernels.items():
            assert energy(factor * values, kernel) == pytest.approx(
                abs(factor) ** p * energy(values, kernel), rel=1e-12
            )

    @settings(max_examples=25, deadline=None)
    @given(u=vectors, v=vectors)
    def test_A_is_monotone(
        self, kernels: dict[float, KernelMatrix], u: np.ndarray, v: np.ndarray
    ) -> None:
        """Test ⟨A(u) − A(v), u − v⟩ ≥ 0."""
        for kernel in kernels.values():
            gap = pairing(apply_A(u, kernel) - apply_A(v, kernel), u - v, kernel.domain)
            assert gap >= -1e-12 * max(energy(u, kernel) + energy(v, kernel), 1.0)

    def test_quadratic_energy_matches_gram(self, kernel2: KernelMatrix, rng: np.random.Generator) -> None:
        """Test E(u) = uᵀMu for p = 2."""
        u = rng.standard_normal(kernel2.n)
        assert energy(u, kernel2) == pytest.approx(float(u @ energy_matrix(kernel2) @ u), rel=1e-12)

    @pytest.mark.parametrize("p", EXPONENTS)
    def test_gradient_matches_finite_differences(
        self, kernels: dict[float, KernelMatrix], p: float, rng: np.random.Generator
    ) -> None:
        """Test energy_gradient against central differences of (1/p)E."""
        kernel = kernels[p]
        u = rng.standard_normal(kernel.n)
        gradient = energy_gradient(u, kernel)
        eps = 1e-6
        for i in (0, kernel.n // 3, kernel.n - 1):
            step = np.zeros(kernel.n)
            step[i] = eps
            numeric = (energy(u + step, kernel) - energy(u - step, kernel)) / (2.0 * eps * p)
            assert gradient[i] == pytest.approx(numeric, rel=1e-5)

    def test_hessian_matches_gradient_differences(
        self, kernels: dict[float, KernelMatrix], rng: np.random.Generator
    ) -> None:
        """Test the Jacobian of the gradient for p = 3."""
        kernel = kernels[3.0]
        u = rng.standard_normal(kernel.n)
        direction = rng.standard_normal(kernel.n)
        eps = 1e-6
        numeric = (
            energy_gradient(u + eps * direction, kernel) - energy_gradient(u - eps * direction, kernel)
        ) / (2.0 * eps)
        np.testing.assert_allclose(hessian(u, kernel) @ direction, numeric, rtol=1e-5, atol=1e-8)

    def test_phi_is_odd(self) -> None:
        """Test φ_p(−t) = −φ_p(t) and φ_p(t) = |t|^{p−1} for t > 0."""
        t = np.linspace(-2.0, 2.0, 9)
        np.testing.assert_allclose(phi(-t, 3.0), -phi(t, 3.0))
        assert float(phi(2.0, 1.5)) == pytest.approx(2.0**0.5)


class TestDualNorm:
    """Test the dual norm on the discrete W₀^{s,p}."""

    def test_gram_value_of_A(self, kernel2: KernelMatrix, rng: np.random.Generator) -> None:
        """Test ‖A(u)‖_* = ‖u‖ for p = 2."""
        u = rng.standard_normal(kernel2.n)
        assert dual_norm(apply_A(u, kernel2), kernel2).value == pytest.approx(norm(u, kernel2), rel=1e-10)

    def test_ascent_agrees_with_gram(self, kernel2: KernelMatrix, rng: np.random.Generator) -> None:
        """Test the ascent cross-check against the closed form."""
        F = rng.standard_normal(kernel2.n)
        exact = dual_norm(F, kernel2).value
        assert dual_norm_by_ascent(F, kernel2).value == pytest.approx(exact, rel=1e-6)

    @pytest.mark.parametrize("p", [1.5, 3.0])
    def test_dual_of_A_is_norm_power(
        self, kernels: dict[float, KernelMatrix], p: float, rng: np.random.Generator
    ) -> None:
        """Test ‖A(u)‖_* = ‖u‖^{p−1}, attained at v = u."""
        kernel = kernels[p]
        u = smooth_profile(kernel.domain) + 0.1 * rng.standard_normal(kernel.n)
        result = dual_norm(apply_A(u, kernel), kernel)
        assert result.method == "ascent"
        assert result.value == pytest.approx(norm(u, kernel) ** (p - 1.0), rel=1e-4)

    def test_zero_functional(self, kernel2: KernelMatrix) -> None:
        """Test that the zero functional has dual norm zero."""
        assert dual_norm(np.zeros(kernel2.n), kernel2).value == 0.0

    def test_gram_solver_inverts_matrix(self, kernel2: KernelMatrix, rng: np.random.Generator) -> None:
        """Test M · solve(b) = b."""
        gram = GramSolver(kernel2)
        b = rng.standard_normal(kernel2.n)
        np.testing.assert_allclose(gram.matrix @ gram.solve(b), b, rtol=1e-9, atol=1e-9)


class TestInequalities:
    """Test truncation, Picone, Hardy and embedding inequalities."""

    @settings(max_examples=25, deadline=None)
    @given(values=vectors)
    def test_truncation_slack_nonnegative(self, kernels: dict[float, KernelMatrix], values: np.ndarray) -> None:
        """Test ⟨A(v), v₊⟩ ≥ E(v₊) globally and pair by pair."""
        for kernel in kernels.values():
            global_slack, pairwise = truncation_slack(values, kernel)
            assert global_slack >= -1e-10 * max(energy(values, kernel), 1.0)
            assert pairwise >= -1e-12

    @pytest.mark.parametrize("p", EXPONENTS)
    def test_picone_slack_nonnegative(self, p: float, rng: np.random.Generator) -> None:
        """Test the discrete Picone inequality for w > 0 and e ≥ 0."""
        w = rng.random(N_NODES) + 0.01
        e = rng.random(N_NODES)
        assert picone_slack(w, e, 1e-3, p) >= -1e-10

    def test_hardy_ratio_stable_under_refinement(self) -> None:
        """Test that the Hardy ratio of a fixed profile settles as h → 0."""
        ratios = []
        for n in (N_NODES, 2 * N_NODES):
            kernel = assemble_kernel(build_grid(-1.0, 1.0, n), S, 2.0)
            ratios.append(hardy_ratio(smooth_profile(kernel.domain), kernel))
        assert ratios[1] == pytest.approx(ratios[0], rel=0.1)

    def test_hardy_ratio_rejects_zero(self, kernel2: KernelMatrix) -> None:
        """Test that u = 0 is rejected."""
        with pytest.raises(ValidationError, match="u = 0"):
            hardy_ratio(np.zeros(kernel2.n), kernel2)

    def test_embedding_bounds_random_vectors(self, kernel2: KernelMatrix, rng: np.random.Generator) -> None:
        """Test |u|_q ≤ C‖u‖ with the empirical embedding constant."""
        constant = embedding_constant(2.0, kernel2)
        w = kernel2.cell_weight
        for _ in range(5):
            u = rng.standard_normal(kernel2.n)
            lq = float(np.sqrt(w * np.sum(u**2)))
            assert lq <= constant * norm(u, kernel2) * (1.0 + 1e-8)


class TestWeightedTerms:
    """Test the weighted operator H and the weighted seminorm."""

    def test_H_pairs_to_weighted_mass(self, kernel2: KernelMatrix) -> None:
        """Test ⟨H(u), u⟩ = ∫h|u|^p for a singular weight."""
        ctx = make_context(kernel2, WeightSpec.power(0.3))
        u = smooth_profile(kernel2.domain)
        assert pairing(apply_H(u, ctx), u, kernel2.domain) == pytest.approx(
            weighted_mass(u, ctx.h, 2.0, kernel2.domain), rel=1e-12
        )

    def test_seminorm_uses_absolute_weight(self, kernel2: KernelMatrix) -> None:
        """Test that a sign-changing weight gives the |h|-seminorm."""
        signed = make_context(kernel2, WeightSpec.power(0.0, negative_region=(-0.5, 0.5)))
        plain = make_context(kernel2)
        u = smooth_profile(kernel2.domain)
        assert seminorm_qh(u, signed) == pytest.approx(seminorm_qh(u, plain), rel=1e-12)
        assert seminorm_qh(2.0 * u, plain) == pytest.approx(2.0 * seminorm_qh(u, plain), rel=1e-12)

    def test_e_norm(self, kernel2: KernelMatrix) -> None:
        """Test (|λ|² + ‖u‖²)^{1/2}."""
        u = smooth_profile(kernel2.domain)
        assert e_norm(0.0, u, kernel2) == pytest.approx(norm(u, kernel2))
        assert e_norm(-3.0, np.zeros(kernel2.n), kernel2) == pytest.approx(3.0)
