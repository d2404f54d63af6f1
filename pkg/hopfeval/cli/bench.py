# -*- coding: utf-8 -*-
"""Замер среднего времени на вычисление.

(x, t) равномерно в [−10, 10]ⁿ × [0, 10], генератор PCG64 с заданным seed.
Флаг flush-to-zero для денормализованных чисел на результат не влияет и
здесь не выставляется.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import List, Optional

import numpy as np

from .. import config
from ..core.hopf_solver import solve
from ..problem_file import hamiltonian_from_name, load_problem
from .common import add_problem_argument, add_solver_arguments, dump_json, int_list, require, solver_config

logger = logging.getLogger(__name__)

X_RANGE = (-10.0, 10.0)
T_RANGE = (0.0, 10.0)


@dataclass
class BenchRow:
    n: int
    hamiltonian: str
    samples: int
    mean_seconds: float
    convergence_rate: float
    workers: int = 1
    throughput: Optional[float] = None
    speedup: Optional[float] = None


def draw_samples(n: int, samples: int, seed: int):
    rng = np.random.Generator(np.random.PCG64(seed))
    xs = rng.uniform(X_RANGE[0], X_RANGE[1], size=(samples, n))
    ts = rng.uniform(T_RANGE[0], T_RANGE[1], size=samples)
    return xs, ts


def run_chunk(xs: np.ndarray, ts: np.ndarray, hamiltonian, initial, cfg):
    """Возвращает (число сошедшихся, затраченное время)."""
    converged = 0
    started = time.perf_counter()
    for x, t in zip(xs, ts):
        converged += solve(x, t, hamiltonian, initial, cfg).converged
    return converged, time.perf_counter() - started


def _parallel(xs, ts, hamiltonian, initial, cfg, workers: int):
    chunks = [idx for idx in np.array_split(np.arange(len(xs)), workers) if len(idx)]
    started = time.perf_counter()
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = [
            executor.submit(run_chunk, xs[idx], ts[idx], hamiltonian, initial, cfg) for idx in chunks
        ]
        converged = sum(future.result()[0] for future in futures)
    return converged, time.perf_counter() - started


def bench_one(n: int, label: str, hamiltonian, initial, cfg, samples: int, seed: int, workers: int) -> BenchRow:
    xs, ts = draw_samples(n, samples, seed)
    converged, elapsed = run_chunk(xs, ts, hamiltonian, initial, cfg)
    row = BenchRow(
        n=n,
        hamiltonian=label,
        samples=samples,
        mean_seconds=elapsed / samples,
        convergence_rate=converged / samples,
    )
    if workers > 1:
        par_converged, par_elapsed = _parallel(xs, ts, hamiltonian, initial, cfg, workers)
        row.workers = workers
        row.throughput = samples / par_elapsed
        row.speedup = elapsed / par_elapsed
        if par_converged != converged:
            logger.warning(f"n={n}: parallel pass converged on {par_converged} points, serial on {converged}")
    logger.info(
        f"n={n} H={label}: {row.mean_seconds:.3e} s/call, "
        f"converged {100 * row.convergence_rate:.1f}%"
    )
    return row


def add_parser(subparsers):
    parser = subparsers.add_parser("bench", help="time per evaluation over seeded random samples")
    add_problem_argument(parser)
    parser.add_argument("--n", type=int_list, help="dimensions, comma-separated")
    parser.add_argument("--hamiltonians", help="Hamiltonian names l1,l2,linf,D,A (default: from the file)")
    parser.add_argument("--samples", type=int, help=f"samples per dimension (default {config.BENCH_SAMPLES})")
    parser.add_argument("--workers", type=int, help="parallel workers")
    parser.add_argument("--seed", type=int, help=f"PCG64 seed (default {config.BENCH_SEED})")
    parser.add_argument("--json", action="store_true", help="print JSON rows")
    add_solver_arguments(parser)
    parser.set_defaults(handler=cmd_bench)


def cmd_bench(args) -> int:
    problem_file = load_problem(args.problem)
    settings = problem_file.data.get("bench", {})
    dimensions = args.n or settings.get("n") or [args.dimension or problem_file.dimension]
    names = args.hamiltonians.split(",") if args.hamiltonians else settings.get("hamiltonians")
    samples = args.samples or settings.get("samples", config.BENCH_SAMPLES)
    workers = args.workers or settings.get("workers", config.WORKERS)
    seed = args.seed if args.seed is not None else settings.get("seed", config.BENCH_SEED)

    rows: List[BenchRow] = []
    for n in dimensions:
        problem = problem_file.build(n)
        initial = require(problem, "initial")
        cfg = solver_config(args, problem.solver)
        if names:
            hamiltonians = [(name, hamiltonian_from_name(name, n)) for name in names]
        else:
            hamiltonian = require(problem, "hamiltonian")
            hamiltonians = [(hamiltonian.kind, hamiltonian)]
        for label, hamiltonian in hamiltonians:
            rows.append(bench_one(n, label, hamiltonian, initial, cfg, samples, seed, workers))

    if args.json:
        print(dump_json([asdict(row) for row in rows]))
        return 0

    header = f"{'n':>4}  {'H':<6} {'s/call':>10}  {'conv%':>6}"
    if workers > 1:
        header += f"  {'workers':>7}  {'calls/s':>10}  {'speedup':>7}"
    print(header)
    for row in rows:
        line = f"{row.n:>4}  {row.hamiltonian:<6} {row.mean_seconds:>10.3e}  {100 * row.convergence_rate:>6.1f}"
        if row.speedup is not None:
            line += f"  {row.workers:>7}  {row.throughput:>10.3e}  {row.speedup:>7.2f}"
        print(line)
    return 0
