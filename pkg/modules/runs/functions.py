"""
Single solves and convergence sweeps of the registered benchmark problems.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from evodg.core import SlabMarcher
from modules.errors.functions import ErrorField, ErrorReport, measure, rate_matrix
from modules.problems.functions import BenchmarkProblem, get_problem
from modules.space1d.functions import SpatialSystem1D, evaluate
from modules.temporal.functions import TimeMesh, Trajectory

logger = logging.getLogger(__name__)


@dataclass
class SolveResult:
    problem: BenchmarkProblem
    system: SpatialSystem1D
    mesh: TimeMesh
    trajectory: Trajectory
    errors: Dict[str, float]


def solve_problem(
    problem: BenchmarkProblem,
    N: int,
    M: int,
    p: int,
    q: int,
    rho: Optional[float] = None,
    T: Optional[float] = None,
) -> SolveResult:
    rho = problem.rho if rho is None else rho
    T = problem.T if T is None else T
    system = problem.spatial_system(N, p)
    mesh = TimeMesh.uniform(T, M, rho, q)
    marcher = SlabMarcher(system, mesh)
    trajectory = marcher.march(problem.load_provider(system), problem.initial_state(system))
    field = ErrorField(system, trajectory, problem.exact_u, problem.exact_v)
    errors = measure(field, marcher.bases)
    logger.info(
        "%s N=%d M=%d p=%d q=%d: E_sup=%.3e E_Qrho=%.3e E_rho=%.3e",
        problem.name, N, M, p, q, errors["E_sup"], errors["E_Qrho"], errors["E_rho"],
    )
    return SolveResult(problem, system, mesh, trajectory, errors)


def solution_frame(result: SolveResult) -> pd.DataFrame:
    """(t, x, u_h, v_h) at every time breakpoint (left limits) and every cell breakpoint."""
    x = result.system.cells
    frames = []
    for m, t in enumerate(result.mesh.breakpoints):
        u, v = evaluate(result.system, result.trajectory.left_limit(m), x)
        frames.append(pd.DataFrame({"t": np.full(x.size, t), "x": x, "u_h": u, "v_h": v}))
    return pd.concat(frames, ignore_index=True)


def _run_level(args: Tuple[str, int, int, int, float, float]) -> Tuple[int, Dict[str, float]]:
    name, N, p, q, rho, T = args
    start = time.perf_counter()
    result = solve_problem(get_problem(name), N, N, p, q, rho, T)
    logger.debug("Level N=M=%d finished in %.2fs", N, time.perf_counter() - start)
    return N, result.errors


def convergence_report(
    name: str,
    p: int,
    q: int,
    sweep: Optional[Sequence[int]] = None,
    rho: Optional[float] = None,
    T: Optional[float] = None,
    jobs: int = 1,
) -> ErrorReport:
    """Errors for N = M over the sweep, in ascending N whatever the completion order."""
    problem = get_problem(name)
    sweep = sorted(sweep or problem.default_sweep)
    for N in sweep:
        problem.check_cells(N)
    rho = problem.rho if rho is None else rho
    T = problem.T if T is None else T
    tasks = [(name, N, p, q, rho, T) for N in sweep]

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_level, tasks))
    else:
        results = [_run_level(task) for task in tasks]

    report = ErrorReport(problem=name, p=p, q=q)
    for N, errors in sorted(results, key=lambda item: item[0]):
        report.add(N, errors)
    return report


def time_refinement_report(
    name: str,
    p: int,
    q: int,
    N: int,
    sweep: Sequence[int],
    rho: Optional[float] = None,
    T: Optional[float] = None,
) -> ErrorReport:
    """Errors for a fixed spatial mesh of N cells over a sweep of slab counts M."""
    problem = get_problem(name)
    problem.check_cells(N)
    report = ErrorReport(problem=name, p=p, q=q, level_name="M")
    for M in sorted(sweep):
        result = solve_problem(problem, N, M, p, q, rho, T)
        report.add(M, result.errors)
    return report


def degree_pairs(degrees: int) -> List[Tuple[int, int]]:
    return [(p, q) for p in range(1, degrees + 1) for q in range(1, degrees + 1)]


def convergence_grid(
    name: str,
    pairs: Iterable[Tuple[int, int]],
    sweep: Optional[Sequence[int]] = None,
    rho: Optional[float] = None,
    T: Optional[float] = None,
    jobs: int = 1,
) -> pd.DataFrame:
    """Finest-pair rates of E(U - U_h) for every (p, q) pair."""
    reports = {(p, q): convergence_report(name, p, q, sweep, rho, T, jobs) for p, q in pairs}
    return rate_matrix(reports)
