# -*- coding: utf-8 -*-
"""Общие аргументы и разбор значений командной строки."""

import argparse
import json
from typing import List

import numpy as np

from ..exceptions import ProblemFileError
from ..models import SolverConfig
from ..problem_file import Problem, load_problem


def float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got '{text}'")


def int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got '{text}'")


def add_problem_argument(parser: argparse.ArgumentParser):
    parser.add_argument("--problem", required=True, help="path to a JSON problem file")
    parser.add_argument("--dimension", type=int, help="override the dimension of the problem file")


def add_solver_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--lambda", dest="lam", type=float, help="split Bregman lambda")
    parser.add_argument("--tol", type=float, help="squared-norm stopping threshold")
    parser.add_argument("--max-iters", type=int, help="iteration cap")
    parser.add_argument("--relaxation", type=float, help="over-relaxation factor in (0, 2)")
    parser.add_argument(
        "--balance-iters", type=int, help="iterations with residual-balanced lambda, 0 keeps lambda fixed"
    )


def solver_config(args, base: SolverConfig) -> SolverConfig:
    changes = {
        key: getattr(args, key)
        for key in ("lam", "tol", "max_iters", "relaxation", "balance_iters")
        if getattr(args, key, None) is not None
    }
    return base.replace(**changes) if changes else base


def load(args) -> Problem:
    return load_problem(args.problem).build(getattr(args, "dimension", None))


def query_point(values: List[float], problem: Problem) -> np.ndarray:
    x = np.array(values, dtype=float)
    if x.size != problem.dimension:
        raise ProblemFileError(
            f"--x has {x.size} coordinates, the problem has dimension {problem.dimension}",
            field="x",
        )
    return x


def require(problem: Problem, attribute: str):
    value = getattr(problem, attribute)
    if value is None:
        raise ProblemFileError("missing required field", field=attribute)
    return value


def dump_json(payload) -> str:
    def default(obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, np.generic):
            return obj.item()
        raise TypeError(f"cannot serialize {type(obj).__name__}")

    return json.dumps(payload, default=default)
