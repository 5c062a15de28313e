"""Tests for the first and second eigenpairs and the p = 2 oracle."""

import numpy as np
import pytest

from fracplap.core.errors import ValidationError
from fracplap.discretization import (
    GridFunction,
    KernelMatrix,
    OperatorContext,
    energy,
    weighted_mass,
)
from fracplap.spectral import (
    EigenPair,
    OddPath,
    SolverOptions,
    check_simplicity,
    default_path,
    oracle_spectrum_p2,
    refine_path,
    residual,
    sign_parts_mass,
    solve_first,
    solve_second,
)
from fracplap.spectral.first import project
from fracplap.weights import WeightSpec
from test_helpers import EXPONENTS, make_context


class TestFirstEigenpair:
    """Test the constrained minimization for (λ₁, e₁)."""

    def test_matches_dense_oracle(
        self, first2: EigenPair, oracle2: list[tuple[float, GridFunction]]
    ) -> None:
        """Test λ₁ against the smallest generalized eigenvalue."""
        assert first2.lam == pytest.approx(oracle2[0][0], rel=1e-6)

    def test_residual_and_normalization(self, first2: EigenPair, ctx2: OperatorContext) -> None:
        """Test the eigen-equation residual and the constraint."""
        assert first2.residual < 1e-8
        assert residual(first2, ctx2) < 1e-8
        assert first2.normalization == pytest.approx(1.0, abs=1e-9)

    def test_eigenfunction_positive(self, first2: EigenPair) -> None:
        """Test e₁ > 0 at every node."""
        assert np.all(first2.u.values > 0.0)

    def test_minimizer_beats_random_admissible(
        self, first2: EigenPair, ctx2: OperatorContext, rng: np.random.Generator
    ) -> None:
        """Test E(e₁) ≤ E(v) for random v on the constraint set."""
        for _ in range(100):
            v = project(rng.standard_normal(ctx2.domain.n), ctx2)
            assert first2.lam <= energy(v, ctx2.kernel) * (1.0 + 1e-12)

    def test_weight_scaling(self, kernel2: KernelMatrix, first2: EigenPair) -> None:
        """Test that 4h divides λ₁ by 4 and rescales e₁ by 4^{−1/2}."""
        scaled = OperatorContext(
            kernel=kernel2,
            weight=GridFunction(domain=kernel2.domain, values=4.0 * np.ones(kernel2.n)),
        )
        pair = solve_first(scaled)
        assert pair.lam == pytest.approx(first2.lam / 4.0, rel=1e-8)
        np.testing.assert_allclose(pair.u.values, first2.u.values / 2.0, rtol=1e-5, atol=1e-8)

    @pytest.mark.parametrize("p", [1.5, 3.0])
    def test_other_exponents_converge(self, kernels: dict[float, KernelMatrix], p: float) -> None:
        """Test positivity and normalization for p ≠ 2."""
        ctx = make_context(kernels[p])
        pair = solve_first(ctx, SolverOptions(tol=1e-6))
        assert pair.residual <= 1e-6
        assert np.all(pair.u.values > 0.0)
        assert weighted_mass(pair.u, ctx.h, p, ctx.domain) == pytest.approx(1.0, abs=1e-9)

    def test_sign_changing_weight(self, kernel2: KernelMatrix) -> None:
        """Test a weight that is negative on (0, 1)."""
        ctx = make_context(kernel2, WeightSpec.power(0.0, negative_region=(0.0, 1.0)))
        pair = solve_first(ctx)
        assert pair.lam > 0.0
        assert pair.normalization == pytest.approx(1.0, abs=1e-9)

    def test_nonpositive_weight_rejected(self, kernel2: KernelMatrix) -> None:
        """Test that h ≤ 0 everywhere is rejected."""
        ctx = OperatorContext(
            kernel=kernel2,
            weight=GridFunction(domain=kernel2.domain, values=-np.ones(kernel2.n)),
        )
        with pytest.raises(ValidationError, match="h > 0"):
            solve_first(ctx)


class TestResidual:
    """Test the eigenpair residual."""

    def test_oracle_pair_is_exact(
        self, ctx2: OperatorContext, oracle2: list[tuple[float, GridFunction]]
    ) -> None:
        """Test that oracle pairs have negligible residual."""
        for lam, u in oracle2[:3]:
            pair = EigenPair(lam=lam, u=u, residual=0.0, normalization=1.0)
            assert residual(pair, ctx2) <= 1e-8

    def test_perturbed_pair_detected(
        self, first2: EigenPair, ctx2: OperatorContext, rng: np.random.Generator
    ) -> None:
        """Test that 1% noise raises the residual above 10·tol."""
        noisy = project(first2.u.values * (1.0 + 0.01 * rng.standard_normal(ctx2.domain.n)), ctx2)
        pair = first2.model_copy(update={"u": GridFunction(domain=ctx2.domain, values=noisy)})
        assert residual(pair, ctx2) > 10.0 * SolverOptions().tol

    def test_zero_function_rejected(self, ctx2: OperatorContext) -> None:
        """Test that (0, 0) violates the normalization."""
        pair = EigenPair(
            lam=0.0, u=GridFunction(domain=ctx2.domain, values=np.zeros(ctx2.domain.n)), residual=0.0, normalization=0.0
        )
        with pytest.raises(ValidationError, match="normalization"):
            residual(pair, ctx2)


class TestSimplicity:
    """Test repeated-run agreement of the first eigenfunction."""

    @pytest.mark.slow
    def test_ten_trials_agree(self, ctx2: OperatorContext) -> None:
        """Test simplicity over 10 seeded signed starts."""
        report = check_simplicity(ctx2, trials=10, threads=2)
        assert report.simple is True
        assert report.max_distance <= 1e-6
        assert len(report.lambdas) == 10

    def test_single_trial(self, ctx2: OperatorContext) -> None:
        """Test that one trial is trivially simple."""
        assert check_simplicity(ctx2, trials=1).simple is True

    @pytest.mark.slow
    def test_sign_changing_weight(self, kernel2: KernelMatrix) -> None:
        """Test simplicity for a sign-changing weight."""
        ctx = make_context(kernel2, WeightSpec.power(0.3, negative_region=(0.5, 1.0)))
        assert check_simplicity(ctx, trials=4).simple is True


class TestOracle:
    """Test the dense p = 2 spectrum."""

    def test_rejects_other_exponents(self, kernels: dict[float, KernelMatrix]) -> None:
        """Test that p ≠ 2 is rejected."""
        with pytest.raises(ValidationError, match="p = 2"):
            oracle_spectrum_p2(make_context(kernels[3.0]))

    def test_sorted_and_normalized(
        self, ctx2: OperatorContext, oracle2: list[tuple[float, GridFunction]]
    ) -> None:
        """Test ascending order and ∫h u² = 1."""
        lambdas = [lam for lam, _ in oracle2]
        assert lambdas == sorted(lambdas)
        assert len(lambdas) == ctx2.domain.n
        for _, u in oracle2[:5]:
            assert weighted_mass(u, ctx2.h, 2.0, ctx2.domain) == pytest.approx(1.0)

    def test_higher_eigenvectors_change_sign(
        self, ctx2: OperatorContext, oracle2: list[tuple[float, GridFunction]]
    ) -> None:
        """Test that every eigenvector beyond the first has both sign parts."""
        for _, u in oracle2[1:6]:
            positive, negative = sign_parts_mass(u, ctx2)
            assert positive > 0.0
            assert negative > 0.0


class TestSecondEigenvalue:
    """Test the odd-path minimax."""

    @pytest.mark.slow
    def test_within_two_percent_of_oracle(
        self, lambda2_numeric: float, oracle2: list[tuple[float, GridFunction]]
    ) -> None:
        """Test λ₂ against the second oracle eigenvalue."""
        assert lambda2_numeric == pytest.approx(oracle2[1][0], rel=0.02)

    @pytest.mark.slow
    @pytest.mark.parametrize("p", EXPONENTS)
    def test_strictly_above_first_and_sign_changing(
        self, kernels: dict[float, KernelMatrix], p: float
    ) -> None:
        """Test λ₂ > λ₁ and a sign-changing maximizer."""
        ctx = make_context(kernels[p])
        opts = SolverOptions(tol=1e-6)
        first = solve_first(ctx, opts)
        result = solve_second(ctx, opts=opts, first=first)
        assert result.lambda2 > first.lam
        values = result.maximizer.values
        assert values.max() > 1e-6
        assert values.min() < -1e-6

    def test_default_path_is_odd_and_normalized(
        self, ctx2: OperatorContext, first2: EigenPair
    ) -> None:
        """Test the initial great circle."""
        path = default_path(ctx2, first2, m=8)
        assert path.m == 8
        for point in path.points:
            assert weighted_mass(point, ctx2.h, 2.0, ctx2.domain) == pytest.approx(1.0, abs=1e-9)
        np.testing.assert_array_equal(path.points[5].values, -path.points[1].values)

    def test_refinement_doubles_points(self, ctx2: OperatorContext, first2: EigenPair) -> None:
        """Test that refine_path doubles m and keeps oddness."""
        refined = refine_path(default_path(ctx2, first2, m=8), ctx2)
        assert refined.m == 16
        np.testing.assert_array_equal(refined.points[9].values, -refined.points[1].values)

    def test_odd_path_validation(self, ctx2: OperatorContext, first2: EigenPair) -> None:
        """Test that broken symmetry is rejected."""
        u = first2.u
        with pytest.raises(ValueError, match="Odd symmetry"):
            OddPath(points=[u, u, u, u])
        with pytest.raises(ValueError, match="even number"):
            OddPath(points=[u, -u])


class TestIsolation:
    """Test that no eigenvalue lies strictly between λ₁ and λ₂."""

    @pytest.mark.slow
    def test_constant_weight(
        self, first2: EigenPair, lambda2_numeric: float, oracle2: list[tuple[float, GridFunction]]
    ) -> None:
        """Test the gap (λ₁(1 + 10⁻⁶), λ₂(1 − 0.02)) for h ≡ 1."""
        lo, hi = first2.lam * (1.0 + 1e-6), lambda2_numeric * (1.0 - 0.02)
        assert not [lam for lam, _ in oracle2 if lo < lam < hi]

    @pytest.mark.slow
    def test_singular_weight(self, kernel2: KernelMatrix) -> None:
        """Test the gap for h = ρ^{−0.3}."""
        ctx = make_context(kernel2, WeightSpec.power(0.3))
        first = solve_first(ctx)
        lambda2 = solve_second(ctx, first=first).lambda2
        spectrum = oracle_spectrum_p2(ctx)
        assert spectrum[0][0] == pytest.approx(first.lam, rel=1e-6)
        lo, hi = first.lam * (1.0 + 1e-6), lambda2 * (1.0 - 0.02)
        assert not [lam for lam, _ in spectrum if lo < lam < hi]
