"""
Command runners behind the fracplap CLI.

Each runner takes the resolved configuration, writes its artifacts into one
directory per command and returns the JSON payload it printed. A runner
returns the exit code through RunOutcome so inconclusive verdicts can be
reported without raising after the artifacts are written.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from fracplap.bifurcation import (
    Branch,
    continue_branch,
    detect_bifurcation,
    initial_point,
    mirror_branch,
)
from fracplap.core.config import ExperimentConfig, WeightConfig
from fracplap.core.errors import InconclusiveError, NotFoundError, ValidationError
from fracplap.core.logging_config import get_logger
from fracplap.discretization import (
    Domain1D,
    GridFunction,
    OperatorContext,
    assemble_kernel,
)
from fracplap.nonlinear import (
    Hypothesis,
    build_truncation,
    check_hypotheses,
    check_truncation,
    find_small_solutions,
    solve_fredholm,
)
from fracplap.regularity import (
    check_trace_inequalities,
    compute_qtilde,
    degiorgi_trace,
    find_kstar,
    recursion_exponents,
)
from fracplap.reporting import (
    json_text,
    read_csv_column,
    render_report,
    write_csv,
    write_json,
    write_markdown,
)
from fracplap.spectral import (
    check_simplicity,
    default_path,
    oracle_spectrum_p2,
    sign_parts_mass,
    solve_first,
    solve_second,
)
from fracplap.spectral.first import eigen_residual
from fracplap.weights import (
    Verdict,
    WeightClass,
    check_Aq,
    check_Ar,
    check_continuity_class,
    check_tildeWq,
    check_Wq,
    lorentz_membership,
    weight_values,
)

logger = get_logger(__name__)

_CLASS_CHECKS = {
    WeightClass.AR: check_Ar,
    WeightClass.AQ: check_Aq,
    WeightClass.WQ: check_Wq,
    WeightClass.TILDE_WQ: check_tildeWq,
    WeightClass.CONTINUITY: check_continuity_class,
}


@dataclass
class RunContext:
    """Resolved configuration, its hash and where artifacts go."""

    config: ExperimentConfig
    digest: str
    output_dir: Path
    threads: int = 1
    oracle: bool = False
    solution: Path | None = None
    column: str = "u"

    def directory(self, command: str) -> Path:
        return self.output_dir / command


@dataclass
class RunOutcome:
    payload: dict[str, Any]
    stdout: str
    exit_code: int = 0
    files: list[Path] = field(default_factory=list)


def build_context(config: ExperimentConfig, weight: WeightConfig | None = None) -> OperatorContext:
    """Kernel on the configured grid with the eigenvalue weight h."""
    config.require_solver_grid()
    domain = config.domain.build()
    kernel = assemble_kernel(domain, config.operator.s, config.operator.p)
    spec = (weight or config.weight).build(domain)
    h = GridFunction(domain=domain, values=weight_values(spec, domain))
    return OperatorContext(kernel=kernel, weight=h)


def _finish(
    run: RunContext,
    command: str,
    payload: dict[str, Any],
    files: list[Path],
    exit_code: int = 0,
) -> RunOutcome:
    directory = run.directory(command)
    files.append(write_json(directory / f"{command}.json", payload, run.digest))
    summary = render_report(f"{command}.md", config=run.config, result=payload)
    files.append(write_markdown(directory / "summary.md", summary, run.digest))
    return RunOutcome(
        payload=payload,
        stdout=json_text(payload, run.digest),
        exit_code=exit_code,
        files=files,
    )


def run_check_weight(run: RunContext) -> RunOutcome:
    config = run.config
    block = config.check_weight
    weight = config.weight.build(config.domain.build())
    if block.weight_class == WeightClass.LORENTZ:
        lorentz = config.lorentz()
        lorentz_report = lorentz_membership(weight, lorentz, numeric=block.numeric)
        payload = lorentz_report.to_cli_dict()
        payload.update(
            p0=lorentz.p0,
            q0=lorentz.q0,
            integrals=lorentz_report.integrals,
            diagnostic=lorentz_report.diagnostic,
        )
        inconclusive = lorentz_report.verdict == Verdict.INCONCLUSIVE
    else:
        report = _CLASS_CHECKS[block.weight_class](weight, config.operator.space(block.q))
        payload = report.to_cli_dict()
        payload.update(r_max=report.r_max, diagnostic=report.diagnostic)
        inconclusive = False
    payload.update(beta=weight.beta, kind=weight.kind.value)
    if inconclusive:
        logger.warning(f"Lorentz verdict inconclusive: {payload['diagnostic']}")
    exit_code = InconclusiveError.exit_code if inconclusive else 0
    return _finish(run, "check-weight", payload, [], exit_code=exit_code)


def run_eigen(run: RunContext) -> RunOutcome:
    config = run.config
    block = config.eigen
    ctx = build_context(config)
    if (run.oracle or block.oracle) and ctx.p != 2.0:
        raise ValidationError(f"--oracle is supported for p = 2 only, got p={ctx.p}")
    opts = config.solver.options()
    first = solve_first(ctx, opts)
    path = default_path(ctx, first, m=block.path_points)
    second = solve_second(ctx, path, opts, first, climbing=block.climbing)
    maximizer = second.maximizer
    positive, negative = sign_parts_mass(maximizer, ctx)
    payload: dict[str, Any] = {
        "lambda1": first.lam,
        "residual1": first.residual,
        "normalization1": first.normalization,
        "iterations1": first.iterations,
        "lambda2": second.lambda2,
        "residual2": eigen_residual(second.lambda2, np.asarray(maximizer.values), ctx),
        "path_points": second.path.m,
        "path_converged": second.converged,
        "iterations2": second.iterations,
        "positive_part_mass": positive,
        "negative_part_mass": negative,
    }
    if block.simplicity_trials:
        simplicity = check_simplicity(ctx, block.simplicity_trials, opts, run.threads)
        payload.update(simple=simplicity.simple, simplicity_distance=simplicity.max_distance)

    directory = run.directory("eigen")
    nodes = ctx.domain.nodes
    rows = list(zip(nodes, first.u.values, maximizer.values, strict=True))
    files = [write_csv(directory / "eigenfunctions.csv", ["x", "e1", "u2"], rows, run.digest)]
    if run.oracle or block.oracle:
        spectrum = oracle_spectrum_p2(ctx)
        files.append(
            write_csv(
                directory / "oracle_spectrum.csv",
                ["index", "lambda"],
                [(index + 1, lam) for index, (lam, _) in enumerate(spectrum)],
                run.digest,
            )
        )
        payload.update(oracle_lambda1=spectrum[0][0], oracle_lambda2=spectrum[1][0])
    return _finish(run, "eigen", payload, files)


def _read_solution(path: Path, column: str, domain: Domain1D) -> GridFunction:
    """Nodal values from a solution CSV whose x column matches the grid."""
    try:
        x = read_csv_column(path, "x")
        values = read_csv_column(path, column)
    except (OSError, ValueError) as error:
        raise ValidationError(f"Cannot read solution file {path}: {error}") from error
    nodes = domain.nodes
    if x.shape != nodes.shape or not np.allclose(x, nodes, rtol=0.0, atol=1e-12 * domain.length):
        raise ValidationError(
            f"Solution grid in {path} ({x.size} nodes) does not match the configured grid "
            f"(n={domain.n} on ({domain.left}, {domain.right}))"
        )
    return GridFunction(domain=domain, values=values)


def run_bounds(run: RunContext) -> RunOutcome:
    config = run.config
    if run.solution is None:
        raise ValidationError("bounds needs a solution file")
    config.require_solver_grid()
    block = config.bounds
    u = _read_solution(run.solution, run.column, config.domain.build())
    params = config.operator.space()
    spec = block.spec()
    q_tilde = compute_qtilde(spec, params)
    k_star = find_kstar(u, q_tilde, block.n_max)
    trace = degiorgi_trace(u, k_star, q_tilde, block.n_max)
    checks = check_trace_inequalities(u, trace)
    exponents = recursion_exponents(spec, params, block.q_bar)
    payload: dict[str, Any] = {
        "q_tilde": q_tilde,
        "k_star": k_star,
        "bound": trace.bound,
        "sup_norm": u.sup_norm,
        "certified": u.sup_norm <= trace.bound,
        "converged": trace.converged,
        "checks": checks.model_dump(),
        "exponents": exponents.model_dump(),
    }
    rows = [
        (index, level, mass)
        for index, (level, mass) in enumerate(zip(trace.levels, trace.masses, strict=True))
    ]
    files = [
        write_csv(run.directory("bounds") / "degiorgi_trace.csv", ["n", "level", "mass"], rows, run.digest)
    ]
    return _finish(run, "bounds", payload, files)


def _solve_fredholm(run: RunContext) -> RunOutcome:
    config = run.config
    block = config.solve
    ctx = build_context(config)
    forcing = config.rhs.forcing_function(ctx.domain)
    if forcing is None:
        raise ValidationError("Fredholm mode needs rhs.forcing or rhs.forcing_constant")
    solution = solve_fredholm(
        block.lam, forcing, ctx, config.solver.options(), block.lambda1, block.lambda2
    )
    payload: dict[str, Any] = {"mode": "fredholm", "lambda": block.lam, "method": solution.method}
    payload.update(solution.summary())
    rows = list(zip(ctx.domain.nodes, solution.u.values, strict=True))
    files = [write_csv(run.directory("solve") / "solution.csv", ["x", "u"], rows, run.digest)]
    return _finish(run, "solve", payload, files)


def _solve_small(run: RunContext) -> RunOutcome:
    config = run.config
    block = config.solve
    if config.rhs.coupling:
        raise ValidationError("Small-solution mode takes no λ-coupling term")
    ctx = build_context(config)
    rhs = config.rhs.build(ctx.domain)
    t1 = block.t1
    if t1 is None:
        t1 = check_hypotheses(rhs, Hypothesis.F5, ctx.domain, config.operator.space()).t1
        if t1 is None:
            raise ValidationError("No admissible t1 on the sampled range; set solve.t1")
    spec = block.truncation(t1)
    truncation = build_truncation(rhs, spec, ctx.kernel)
    checks = check_truncation(truncation)
    solutions = find_small_solutions(
        rhs, spec, ctx, block.n_levels, config.solver.options(), run.threads, truncation
    )
    if not solutions:
        raise NotFoundError(f"No small solution found over {block.n_levels} levels")
    payload: dict[str, Any] = {
        "mode": "small",
        "t1": truncation.t1,
        "t2": truncation.t2,
        "gamma": truncation.gamma,
        "growth_constant": truncation.growth,
        "embedding_constant": truncation.embedding,
        "truncation_checks": checks.model_dump(),
        "solutions": [
            {
                "level": solution.level,
                "energy": solution.energy,
                "residual": solution.residual,
                "untruncated_residual": solution.untruncated_residual,
                "solves_original": solution.solves_original,
                "sup_norm": solution.u.sup_norm,
            }
            for solution in solutions
        ],
    }
    header = ["x"] + [f"u_{index + 1}" for index in range(len(solutions))]
    columns = [ctx.domain.nodes] + [solution.u.values for solution in solutions]
    rows = list(zip(*columns, strict=True))
    files = [write_csv(run.directory("solve") / "small_solutions.csv", header, rows, run.digest)]
    return _finish(run, "solve", payload, files)


def run_solve(run: RunContext) -> RunOutcome:
    if run.config.solve.mode == "fredholm":
        return _solve_fredholm(run)
    return _solve_small(run)


def _branch_rows(branch: Branch, direction: int) -> list[tuple[Any, ...]]:
    return [
        (direction, index, point.lam, point.norm, point.u.sup_norm, point.residual, point.step)
        for index, point in enumerate(branch.points)
    ]


def run_bifurcate(run: RunContext) -> RunOutcome:
    config = run.config
    block = config.bifurcate
    if not config.rhs.coupling:
        raise ValidationError("bifurcate needs rhs.coupling = true")
    ctx = build_context(config, config.rhs.coupling_weight)
    rhs = config.rhs.build(ctx.domain)
    opts = config.solver.options()
    pair = solve_first(ctx, opts)
    start = initial_point(rhs, pair, ctx.kernel, block.epsilon, 1, opts)
    branch = continue_branch(rhs, start, block.steps, ctx.kernel, block.step, block.lambda2, opts)
    rows = _branch_rows(branch, 1)
    if block.both_directions:
        rows += _branch_rows(mirror_branch(branch, rhs, ctx.kernel), -1)
    report = detect_bifurcation(branch, pair.lam)
    payload: dict[str, Any] = report.model_dump()
    payload.update(status=branch.status.value, points=len(branch.points), step=branch.step)
    header = ["direction", "index", "lambda", "norm", "sup_norm", "residual", "step"]
    files = [write_csv(run.directory("bifurcate") / "branch.csv", header, rows, run.digest)]
    exit_code = 0 if report.conclusive else InconclusiveError.exit_code
    return _finish(run, "bifurcate", payload, files, exit_code=exit_code)


RUNNERS = {
    "check-weight": run_check_weight,
    "eigen": run_eigen,
    "bounds": run_bounds,
    "solve": run_solve,
    "bifurcate": run_bifurcate,
}


def run_command(command: str, run: RunContext) -> RunOutcome:
    """Dispatch one command; inconclusive verdicts come back as exit code 4."""
    try:
        runner = RUNNERS[command]
    except KeyError as error:
        raise ValidationError(f"Unknown command {command!r}") from error
    return runner(run)
