import logging

from evodg.registry import register
from .functions import (
    convergence_grid,
    convergence_report,
    degree_pairs,
    solution_frame,
    solve_problem,
    time_refinement_report,
)
from modules.problems.functions import get_problem

logger = logging.getLogger(__name__)


@register(
    name="solve",
    description="Solve one problem at (N, M, p, q), write (t, x, u_h, v_h) samples and print the three errors.",
)
def decorated_solve(config) -> int:
    config.validate()
    problem = get_problem(config.problem)
    N = config.N or problem.default_sweep[0]
    M = config.M or N
    result = solve_problem(problem, N, M, config.p, config.q, config.rho, config.T)

    out = config.out or "solution.csv"
    solution_frame(result).to_csv(out, index=False, float_format="%.12g", lineterminator="\n")
    logger.info("Wrote solution samples to %s", out)

    e = result.errors
    print(f"E_sup={e['E_sup']:.3e}, E_Qrho={e['E_Qrho']:.3e}, E_rho={e['E_rho']:.3e}")
    return 0


@register(
    name="convergence",
    description=(
        "Convergence table over a sweep of N = M, over M at fixed N when --N is given, "
        "or the (p, q) rate matrix with --rate-matrix."
    ),
)
def decorated_convergence(config) -> int:
    config.validate()
    if config.rate_matrix:
        frame = convergence_grid(
            config.problem, degree_pairs(config.degrees), config.sweep, config.rho, config.T, config.jobs
        )
        text = frame.to_csv(lineterminator="\n")
    elif config.N:
        sweep = config.sweep or get_problem(config.problem).default_sweep
        report = time_refinement_report(config.problem, config.p, config.q, config.N, sweep, config.rho, config.T)
        text = report.to_csv()
    else:
        report = convergence_report(
            config.problem, config.p, config.q, config.sweep, config.rho, config.T, config.jobs
        )
        text = report.to_csv()

    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        logger.info("Wrote convergence table to %s", config.out)
    else:
        print(text, end="")
    return 0
