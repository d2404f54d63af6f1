# -*- coding: utf-8 -*-
import logging
from pathlib import Path

import numpy as np

from .. import config
from ..core.hopf_solver import evaluate_batch
from ..exceptions import ExportError, ProblemFileError
from ..export import contour_levels, write_contours_csv, write_slice_csv
from ..models import SliceJob
from .common import (
    add_problem_argument,
    add_solver_arguments,
    float_list,
    int_list,
    load,
    require,
    solver_config,
)

logger = logging.getLogger(__name__)


def add_parser(subparsers):
    parser = subparsers.add_parser("slice", help="evaluate phi on a 2-D slice and write CSV files")
    add_problem_argument(parser)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--axes", type=int_list, help="varying axes i,j (0-based, default 0,1)")
    parser.add_argument("--range", type=float_list, help="coordinate range lo,hi for both axes")
    parser.add_argument("--samples", type=int, help="samples per axis")
    parser.add_argument("--times", type=float_list, help="comma-separated times")
    parser.add_argument("--fixed", type=float_list, help="values of the remaining coordinates")
    parser.add_argument("--contour-step", type=float, help="write level lines at multiples of this step")
    parser.add_argument("--warm-start", action="store_true", help="start each point from its neighbour")
    parser.add_argument("--workers", type=int, default=config.WORKERS)
    add_solver_arguments(parser)
    parser.set_defaults(handler=cmd_slice)


def _slice_job(args, problem) -> SliceJob:
    defaults = problem.slice
    value_range = args.range or defaults.get("range") or float_list(config.SLICE_RANGE)
    if len(value_range) != 2:
        raise ProblemFileError(f"range needs two numbers, got {value_range}", field="range")
    samples = args.samples or defaults.get("samples", config.SLICE_SAMPLES)
    fixed = args.fixed if args.fixed is not None else defaults.get("fixed")
    return SliceJob(
        dimension=problem.dimension,
        axes=tuple(args.axes or defaults.get("axes", (0, 1))),
        fixed=fixed,
        ranges=(tuple(value_range), tuple(value_range)),
        samples=(samples, samples),
        times=tuple(args.times or defaults.get("times", (0.0,))),
    )


def cmd_slice(args) -> int:
    """Один CSV на каждое время; строки в порядке обхода сетки по строкам."""
    problem = load(args)
    hamiltonian = require(problem, "hamiltonian")
    initial = require(problem, "initial")
    cfg = solver_config(args, problem.solver)
    job = _slice_job(args, problem)
    contour_step = args.contour_step or problem.slice.get("contour_step")

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ExportError(f"cannot create output directory {out}: {e}") from e

    points = job.points()
    first, second = job.axis_values()
    shape = (first.size, second.size)
    total_unconverged = 0
    for t in job.times:
        logger.info(f"Evaluating {len(points)} slice points at t={t:g}")
        results = evaluate_batch(
            points, t, hamiltonian, initial, cfg, workers=args.workers, warm_start=args.warm_start
        )
        phi = np.array([ev.value for ev in results])
        grad_norm = np.array([np.linalg.norm(ev.gradient) for ev in results])
        converged = np.array([ev.converged for ev in results])
        total_unconverged += int(np.count_nonzero(~converged))

        path = out / f"slice_t{t:g}.csv"
        try:
            write_slice_csv(
                path, points[:, job.axes[0]], points[:, job.axes[1]], phi, grad_norm, converged
            )
            if contour_step:
                values = phi.reshape(shape)
                write_contours_csv(
                    out / f"slice_t{t:g}_contours.csv",
                    values,
                    first,
                    second,
                    contour_levels(values, contour_step),
                )
        except OSError as e:
            raise ExportError(f"cannot write {path}: {e}") from e
        print(path)

    if total_unconverged:
        logger.warning(f"{total_unconverged} slice points did not converge")
    return 0
