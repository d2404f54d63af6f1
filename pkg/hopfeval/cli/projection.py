# -*- coding: utf-8 -*-
import logging

import numpy as np

from ..core.closest_point import closest
from ..core.level_sets import boundary_residual
from .common import add_problem_argument, add_solver_arguments, dump_json, float_list, load, query_point, require, solver_config

logger = logging.getLogger(__name__)


def add_parser(subparsers):
    parser = subparsers.add_parser("project", help="closest point and distance to a convex shape or union")
    add_problem_argument(parser)
    parser.add_argument("--x", "--y", dest="x", type=float_list, required=True, help="exterior query point")
    parser.add_argument("--json", action="store_true", help="print a JSON record")
    add_solver_arguments(parser)
    parser.set_defaults(handler=cmd_project)


def cmd_project(args) -> int:
    problem = load(args)
    shape = require(problem, "shape")
    cfg = solver_config(args, problem.solver)
    y = query_point(args.x, problem)

    result = closest(y, shape, cfg)
    logger.info(f"Closest point found in {result.newton_iters} Newton steps, distance {result.distance:.6g}")
    residual = boundary_residual(shape, result.point)
    record = {
        "distance": result.distance,
        "point": result.point,
        "newton_iters": result.newton_iters,
        "branch": result.branch,
        "tie": result.tie,
        "boundary_residual": residual,
    }
    if args.json:
        print(dump_json(record))
        return 0

    print(f"distance:  {result.distance:.12g}")
    print(f"point:     {np.array2string(result.point, precision=10, separator=', ')}")
    print(f"newton:    {result.newton_iters}")
    if result.branch is not None:
        print(f"branch:    {result.branch}")
        print(f"tie:       {result.tie}")
    print(f"residual:  {residual:.3e}")
    return 0
