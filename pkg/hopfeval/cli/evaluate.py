# -*- coding: utf-8 -*-
import logging
import time

import numpy as np

from ..core.hopf_solver import recover_control, solve
from ..exceptions import NonuniqueControlError
from .common import (
    add_problem_argument,
    add_solver_arguments,
    dump_json,
    float_list,
    load,
    query_point,
    require,
    solver_config,
)

logger = logging.getLogger(__name__)


def add_parser(subparsers):
    parser = subparsers.add_parser("eval", help="evaluate phi(x, t) and its gradient at one point")
    add_problem_argument(parser)
    parser.add_argument("--x", type=float_list, required=True, help="query point, comma-separated")
    parser.add_argument("--t", type=float, required=True, help="time t >= 0")
    parser.add_argument("--json", action="store_true", help="print a JSON record")
    parser.add_argument("--strict", action="store_true", help="exit with status 1 if not converged")
    add_solver_arguments(parser)
    parser.set_defaults(handler=cmd_eval)


def _control(gradient, hamiltonian):
    if not np.all(np.isfinite(gradient)):
        return None, "undefined"
    try:
        return recover_control(gradient, hamiltonian), "unique"
    except NonuniqueControlError as e:
        logger.debug(f"Control not recovered: {e}")
        return None, "nonunique"


def cmd_eval(args) -> int:
    """Вычисление в одной точке с выводом значения, градиента и управления."""
    problem = load(args)
    hamiltonian = require(problem, "hamiltonian")
    initial = require(problem, "initial")
    cfg = solver_config(args, problem.solver)
    x = query_point(args.x, problem)

    started = time.perf_counter()
    ev = solve(x, args.t, hamiltonian, initial, cfg)
    wall_time = time.perf_counter() - started
    control, control_status = _control(ev.gradient, hamiltonian)

    record = {
        "value": ev.value,
        "gradient": ev.gradient,
        "control": control,
        "control_status": control_status,
        "iters": ev.iters,
        "converged": ev.converged,
        "wall_time": wall_time,
    }
    if "branch" in ev.subproblem_stats:
        record["branch"] = ev.subproblem_stats["branch"]
        record["tie"] = ev.subproblem_stats["tie"]

    if args.json:
        print(dump_json(record))
    else:
        print(f"value:     {ev.value:.12g}")
        print(f"gradient:  {np.array2string(ev.gradient, precision=10, separator=', ')}")
        if control is None:
            print(f"control:   {control_status}")
        else:
            print(f"control:   {np.array2string(control, precision=10, separator=', ')}")
        print(f"iters:     {ev.iters}")
        print(f"converged: {ev.converged}")
        print(f"wall time: {wall_time:.3e} s")

    if not ev.converged:
        logger.warning(f"Evaluation at t={args.t} did not converge after {ev.iters} iterations")
        if args.strict:
            return 1
    return 0
