"""Tests for Fredholm problems, hypotheses, truncation and small solutions."""

import numpy as np
import pytest

from fracplap.core.errors import (
    NearResonanceError,
    SingularSystemError,
    ValidationError,
)
from fracplap.discretization import (
    Domain1D,
    GridFunction,
    KernelMatrix,
    OperatorContext,
    energy,
)
from fracplap.nonlinear import (
    Hypothesis,
    LambdaCoupling,
    RHSSpec,
    RHSTerm,
    Solution,
    TruncationSpec,
    build_truncation,
    check_hypotheses,
    check_truncation,
    deduplicate,
    evaluate_rhs,
    find_small_solutions,
    growth_constant,
    linear_fredholm,
    modified_energy,
    residual,
    solve_fredholm,
    subspace_basis,
)
from fracplap.spectral import SolverOptions
from fracplap.weights import SpaceParams
from test_helpers import S, make_context, smooth_profile

PARAMS = SpaceParams(N=1, p=2.0, s=S)
SUBLINEAR = RHSSpec(terms=[RHSTerm(coef=1.0, q=1.5)])
CUBIC = RHSSpec(terms=[RHSTerm(coef=-1.0, q=4.0)])


class TestFredholm:
    """Test A(u) − λhφ_p(u) = f below and between the first two eigenvalues."""

    @pytest.mark.parametrize("position", ["below", "between"])
    def test_agrees_with_linear_solve(
        self,
        ctx2: OperatorContext,
        domain: Domain1D,
        oracle2: list[tuple[float, GridFunction]],
        position: str,
    ) -> None:
        """Test residual < 10⁻⁸ and agreement with the dense solve to 10⁻⁸."""
        lambda1, lambda2 = oracle2[0][0], oracle2[1][0]
        lam = 0.5 * lambda1 if position == "below" else 0.5 * (lambda1 + lambda2)
        forcing = smooth_profile(domain)
        solution = solve_fredholm(lam, forcing, ctx2, lambda1=lambda1, lambda2=lambda2)
        reference = linear_fredholm(lam, forcing, ctx2)
        assert solution.residual < 1e-8
        np.testing.assert_allclose(solution.u.values, reference.u.values, rtol=0.0, atol=1e-8 * reference.u.sup_norm)

    def test_residual_of_rhs_spec(
        self, ctx2: OperatorContext, kernel2: KernelMatrix, domain: Domain1D, oracle2: list[tuple[float, GridFunction]]
    ) -> None:
        """Test that the generic residual sees the coupled problem as solved."""
        lam = 0.5 * oracle2[0][0]
        forcing = GridFunction(domain=domain, values=smooth_profile(domain))
        solution = linear_fredholm(lam, forcing, ctx2)
        rhs = RHSSpec(lambda_coupling=LambdaCoupling(lam=lam), forcing=forcing)
        _, value = residual(solution.u, rhs, kernel2)
        assert value < 1e-8

    def test_singular_linear_system(
        self, ctx2: OperatorContext, domain: Domain1D, oracle2: list[tuple[float, GridFunction]]
    ) -> None:
        """Test that λ = λ₁ is detected by the condition number."""
        with pytest.raises(SingularSystemError, match="condition number"):
            linear_fredholm(oracle2[0][0], smooth_profile(domain), ctx2)

    def test_near_resonance_guard(
        self, ctx2: OperatorContext, domain: Domain1D, oracle2: list[tuple[float, GridFunction]]
    ) -> None:
        """Test that |λ − λ₁| ≤ 10⁻³λ₁ is refused."""
        lambda1 = oracle2[0][0]
        with pytest.raises(NearResonanceError, match="near-resonant"):
            solve_fredholm(lambda1 * (1.0 + 5e-4), smooth_profile(domain), ctx2, lambda1=lambda1)

    @pytest.mark.parametrize("factor", [-1.0, 0.0])
    def test_nonpositive_lambda(self, ctx2: OperatorContext, domain: Domain1D, factor: float) -> None:
        """Test that λ ≤ 0 is rejected."""
        with pytest.raises(ValidationError, match="λ > 0"):
            solve_fredholm(factor, smooth_profile(domain), ctx2, lambda1=1.0)

    def test_above_second_eigenvalue(
        self, ctx2: OperatorContext, domain: Domain1D, oracle2: list[tuple[float, GridFunction]]
    ) -> None:
        """Test that λ ≥ λ₂ is rejected."""
        lambda1, lambda2 = oracle2[0][0], oracle2[1][0]
        with pytest.raises(ValidationError, match="λ < λ₂"):
            solve_fredholm(1.01 * lambda2, smooth_profile(domain), ctx2, lambda1=lambda1, lambda2=lambda2)

    def test_forcing_length_checked(self, ctx2: OperatorContext) -> None:
        """Test that a forcing of the wrong size is rejected."""
        with pytest.raises(ValidationError, match="Forcing has 3 values"):
            linear_fredholm(1.0, np.ones(3), ctx2)

    @pytest.mark.slow
    def test_p3_below_first_eigenvalue(self, kernels: dict[float, KernelMatrix], domain: Domain1D) -> None:
        """Test the minimization branch for p = 3."""
        ctx = make_context(kernels[3.0])
        opts = SolverOptions(tol=1e-8)
        solution = solve_fredholm(0.5, smooth_profile(domain), ctx, opts=opts, lambda1=2.0)
        assert solution.method == "minimization"
        assert solution.residual <= 1e-8


class TestHypotheses:
    """Test (F1)–(F6) on model right-hand sides."""

    def test_sublinear_term(self, domain: Domain1D) -> None:
        """Test (F4)–(F6) and the sampled t0, t1 for f = |t|^{−1/2}t."""
        for which in (Hypothesis.F4, Hypothesis.F5, Hypothesis.F6):
            assert check_hypotheses(SUBLINEAR, which, domain, PARAMS).holds
        report = check_hypotheses(SUBLINEAR, "F4", domain, PARAMS)
        assert report.t0 == pytest.approx(1e2)
        assert report.t1 is not None
        assert 0.35 < report.t1 < 1.0 / 2.25
        assert report.ratio_slope == pytest.approx(-0.5, abs=1e-6)

    def test_cubic_term(self, domain: Domain1D) -> None:
        """Test that f = −|t|²t satisfies (F1)–(F3) and fails (F5)."""
        for which in (Hypothesis.F1, Hypothesis.F2, Hypothesis.F3):
            assert check_hypotheses(CUBIC, which, domain, PARAMS).holds
        report = check_hypotheses(CUBIC, Hypothesis.F5, domain, PARAMS)
        assert not report.holds
        assert report.ratio_slope == pytest.approx(2.0, abs=1e-6)

    def test_even_term_fails_f6(self, domain: Domain1D) -> None:
        """Test that |t|^{q−1} without sign is not odd."""
        rhs = RHSSpec(terms=[RHSTerm(coef=1.0, q=1.5, odd=False)])
        report = check_hypotheses(rhs, Hypothesis.F6, domain, PARAMS)
        assert not report.holds
        assert "even" in report.violations[0]
        assert report.t1 is None

    def test_forcing_fails_f3(self, domain: Domain1D) -> None:
        """Test that a nonzero forcing breaks f(x, 0) = 0."""
        rhs = RHSSpec(terms=[RHSTerm(coef=-1.0, q=4.0)], forcing=GridFunction(domain=domain, values=np.ones(domain.n)))
        report = check_hypotheses(rhs, Hypothesis.F3, domain, PARAMS)
        assert not report.holds
        assert any("forcing" in violation for violation in report.violations)

    def test_critical_growth_fails_f1(self, domain: Domain1D) -> None:
        """Test that q ≥ p_s* is reported."""
        rhs = RHSSpec(terms=[RHSTerm(coef=1.0, q=12.0)])
        report = check_hypotheses(rhs, Hypothesis.F1, domain, PARAMS)
        assert not report.holds
        assert "p_s*" in report.violations[0]


class TestTruncation:
    """Test the modified nonlinearity."""

    def test_identities_hold(self, kernel2: KernelMatrix) -> None:
        """Test the inner and outer identities, oddness, sign and growth."""
        truncation = build_truncation(SUBLINEAR, TruncationSpec(t1=0.4), kernel2)
        checks = check_truncation(truncation)
        assert checks.all_hold, checks
        assert truncation.t2 == pytest.approx(0.1)

    def test_modified_energy_of_zero(self, kernel2: KernelMatrix) -> None:
        """Test Φ̃(0) = 0 and Φ̃ = E/p − ∫γ|u|^p far from zero."""
        truncation = build_truncation(SUBLINEAR, TruncationSpec(t1=0.4), kernel2)
        assert modified_energy(np.zeros(kernel2.n), truncation, kernel2) == 0.0
        u = np.full(kernel2.n, 1.0)
        expected = energy(u, kernel2) / 2.0 - kernel2.cell_weight * kernel2.n * truncation.gamma
        assert modified_energy(u, truncation, kernel2) == pytest.approx(expected)

    def test_growth_constant(self) -> None:
        """Test C₁ = 2t₂|η′|/q + 1 + 2t₂γ|η′| + pγ."""
        assert growth_constant(0.1, 0.2, 2.0, 1.5) == pytest.approx(1.875 * 2.0 / 1.5 + 1.0 + 0.2 * 1.875 * 2.0 + 0.4)

    def test_t1_too_large(self, kernel2: KernelMatrix) -> None:
        """Test that F ≥ |t|^p must hold below t1."""
        with pytest.raises(ValidationError, match="F5"):
            build_truncation(SUBLINEAR, TruncationSpec(t1=1.0), kernel2)

    def test_even_rhs_rejected(self, kernel2: KernelMatrix) -> None:
        """Test that a non-odd right-hand side is rejected."""
        rhs = RHSSpec(terms=[RHSTerm(coef=1.0, q=1.5, odd=False)])
        with pytest.raises(ValidationError, match="F6"):
            build_truncation(rhs, TruncationSpec(t1=0.4), kernel2)

    def test_gamma_out_of_range(self, kernel2: KernelMatrix) -> None:
        """Test γ < min(1, 1/(pC^p))."""
        with pytest.raises(ValidationError, match="γ must satisfy"):
            build_truncation(SUBLINEAR, TruncationSpec(t1=0.4, gamma=5.0), kernel2)

    @pytest.mark.parametrize(("t1", "t2", "t0"), [(0.4, 0.3, 1.0), (0.4, None, 0.2)])
    def test_level_order(self, t1: float, t2: float | None, t0: float) -> None:
        """Test 0 < t2 < t1/2 and t1 < t0."""
        with pytest.raises(ValueError, match="Truncation requires"):
            TruncationSpec(t1=t1, t2=t2, t0=t0)


class TestSmallSolutions:
    """Test the search for infinitely many small solutions."""

    @pytest.mark.slow
    def test_three_distinct_pairs(self, ctx2: OperatorContext, domain: Domain1D) -> None:
        """Test negative energies sorted upward, |u|_∞ < t1 and distinct ± pairs."""
        t1 = check_hypotheses(SUBLINEAR, Hypothesis.F5, domain, PARAMS).t1
        assert t1 is not None
        spec = TruncationSpec(t1=t1)
        truncation = build_truncation(SUBLINEAR, spec, ctx2.kernel)
        solutions = find_small_solutions(SUBLINEAR, spec, ctx2, n_levels=4, truncation=truncation)
        assert len(solutions) >= 3
        energies = [solution.energy for solution in solutions]
        assert energies == sorted(energies)
        assert all(value < 0.0 for value in energies)
        for solution in solutions:
            assert solution.u.sup_norm < t1
            assert solution.residual < SolverOptions().tol
            assert solution.untruncated_residual is not None
            assert solution.solves_original is (solution.untruncated_residual < SolverOptions().tol)
            if solution.u.sup_norm <= truncation.t2:
                assert solution.solves_original
        assert len(deduplicate(solutions)) == len(solutions)

    def test_forcing_rejected(self, ctx2: OperatorContext, domain: Domain1D) -> None:
        """Test that a right-hand side violating (F5)/(F6) is refused."""
        rhs = SUBLINEAR.model_copy(update={"forcing": GridFunction(domain=domain, values=np.ones(domain.n))})
        with pytest.raises(ValidationError, match="preconditions fail"):
            find_small_solutions(rhs, TruncationSpec(t1=0.4), ctx2, n_levels=2)

    def test_deduplicate_identifies_negatives(self, first2_solution: Solution) -> None:
        """Test that u and −u count once."""
        mirrored = first2_solution.model_copy(update={"u": -first2_solution.u})
        assert len(deduplicate([first2_solution, mirrored, first2_solution])) == 1

    def test_subspace_dimension_checked(self, kernel2: KernelMatrix) -> None:
        """Test 1 ≤ n ≤ kernel.n."""
        assert subspace_basis(kernel2, 3).shape == (kernel2.n, 3)
        with pytest.raises(ValidationError, match="Subspace dimension"):
            subspace_basis(kernel2, 0)


@pytest.fixture
def first2_solution(ctx2: OperatorContext, domain: Domain1D) -> Solution:
    return linear_fredholm(1.0, smooth_profile(domain), ctx2)


class TestNodalRHS:
    """Test f, its primitive F and ∂f/∂t bound to the grid."""

    def test_primitive_and_derivative(self, domain: Domain1D) -> None:
        """Test F' = f and f' = df by central differences."""
        rhs = RHSSpec(
            terms=[RHSTerm(coef=2.0, q=3.0), RHSTerm(coef=-0.5, q=2.5, odd=False)],
            lambda_coupling=LambdaCoupling(lam=1.5),
        )
        nodal = evaluate_rhs(rhs, domain, 2.0)
        t = np.linspace(0.2, 1.4, domain.n)
        eps = 1e-6
        np.testing.assert_allclose((nodal.F(t + eps) - nodal.F(t - eps)) / (2 * eps), nodal.f(t), rtol=1e-6)
        np.testing.assert_allclose((nodal.f(t + eps) - nodal.f(t - eps)) / (2 * eps), nodal.df(t), rtol=1e-5)

    def test_odd_terms(self, domain: Domain1D) -> None:
        """Test f(x, −t) = −f(x, t) without forcing or even terms."""
        nodal = evaluate_rhs(CUBIC, domain, 2.0)
        t = smooth_profile(domain)
        np.testing.assert_allclose(nodal.f(-t), -nodal.f(t))
        assert CUBIC.is_odd

    def test_forcing_enters_f(self, domain: Domain1D) -> None:
        """Test f(x, 0) = forcing."""
        forcing = GridFunction(domain=domain, values=smooth_profile(domain))
        nodal = evaluate_rhs(RHSSpec(forcing=forcing), domain, 2.0)
        np.testing.assert_array_equal(nodal.f(np.zeros(domain.n)), forcing.values)

    def test_forcing_grid_checked(self, domain: Domain1D, nested_domain: Domain1D) -> None:
        """Test that forcing on another grid is rejected."""
        forcing = GridFunction(domain=nested_domain, values=np.ones(nested_domain.n))
        with pytest.raises(ValidationError, match="different grid"):
            evaluate_rhs(RHSSpec(forcing=forcing), domain, 2.0)
