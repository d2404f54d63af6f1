# -*- coding: utf-8 -*-
"""Ближайшая точка и расстояние до выпуклого множества через эйкональное уравнение.

ψ(y, s): решение задачи с H = ‖·‖₂ и начальными данными L (функцией
уровня множества). Нулевое множество ψ(·, s) состоит из точек на расстоянии
s от множества, поэтому расстояние s̄ равно корню ψ(y, ·). По s функция ψ
выпукла и убывает, ∂ψ/∂s = −‖∇ₓψ‖₂.
"""

import logging
from typing import Optional

import numpy as np

from .. import config
from ..exceptions import BracketError, InvalidQueryError, NonconvergenceError
from ..models import ClosestPointResult, ConvexShape, L1Norm, L2Norm, SolverConfig, UnionOf
from .hopf_solver import evaluate
from .level_sets import LevelSetData, build_level_set, circumradius, is_exterior

logger = logging.getLogger(__name__)

# Нижняя граница стартового значения s₀
MIN_START_TIME = 1e-3

_EIKONAL = L2Norm()


def eikonal_value(y, s: float, level_set: LevelSetData, cfg: Optional[SolverConfig] = None):
    """ψ(y, s) и ∇ₓψ(y, s) одним вызовом split Bregman."""
    if not s > 0:
        raise InvalidQueryError(f"eikonal time must be positive, got s={s}")
    return evaluate(y, s, _EIKONAL, level_set, cfg)


def _start_time(y: np.ndarray, level_set: LevelSetData) -> float:
    """s₀ = L(y)/‖∇L(y)‖₂, нижняя оценка s̄ из выпуклости L."""
    center = level_set.center
    offset = y if center is None else y - center
    upper = float(np.linalg.norm(offset)) + circumradius(level_set.shape, y.size)
    slope = np.linalg.norm(level_set.level_gradient(y))
    s0 = float(level_set.level(y)) / slope if slope > 0 else upper
    return float(np.clip(s0, MIN_START_TIME, upper))


def _solve_boundary_time(y: np.ndarray, level_set: LevelSetData, cfg: SolverConfig):
    """Ньютон по s с защитой бисекцией; возвращает (s̄, Evaluation, итерации)."""
    if not float(level_set.level(y)) > 0:
        raise InvalidQueryError("closest-point queries must lie strictly outside the shape")

    lo, hi = 0.0, None
    growths = 0
    s = _start_time(y, level_set)
    ev = eikonal_value(y, s, level_set, cfg)
    for it in range(1, cfg.boundary_max_iters + 1):
        psi = ev.value
        if abs(psi) <= cfg.boundary_tol:
            return s, ev, it
        if psi > 0:
            lo = s
        else:
            hi = s

        slope = float(np.linalg.norm(ev.gradient))
        candidate = s + psi / slope if slope > 0 else np.nan
        if hi is None:
            if not np.isfinite(candidate) or candidate <= lo:
                growths += 1
                if growths > cfg.bracket_growth_cap:
                    raise BracketError(
                        f"no sign change of psi after {cfg.bracket_growth_cap} bracket doublings"
                    )
                candidate = 2.0 * s
        elif not (np.isfinite(candidate) and lo < candidate < hi):
            logger.debug(f"Newton step left the bracket [{lo:.6g}, {hi:.6g}]; bisecting")
            candidate = 0.5 * (lo + hi)

        s = candidate
        ev = eikonal_value(y, s, level_set, cfg.replace(warm_start=ev.state))

    raise NonconvergenceError(
        f"boundary time search did not reach |psi| <= {cfg.boundary_tol} "
        f"in {cfg.boundary_max_iters} iterations"
    )


def find_boundary_time(y, level_set: LevelSetData, cfg: Optional[SolverConfig] = None) -> float:
    """s̄ > 0 с |ψ(y, s̄)| ≤ boundary_tol."""
    y = np.asarray(y, dtype=float)
    s, _, _ = _solve_boundary_time(y, level_set, cfg or SolverConfig())
    return s


def closest(y, shape: ConvexShape, cfg: Optional[SolverConfig] = None, level_set: Optional[LevelSetData] = None) -> ClosestPointResult:
    """π_Ω(y) = y − s̄·∇ₓψ(y, s̄)/‖∇ₓψ(y, s̄)‖₂."""
    if isinstance(shape, UnionOf):
        return closest_union(y, shape, cfg)
    cfg = cfg or SolverConfig()
    y = np.asarray(y, dtype=float)
    level_set = level_set or build_level_set(shape)

    s, ev, iters = _solve_boundary_time(y, level_set, cfg)
    gradient = ev.gradient
    point = y - s * gradient / np.linalg.norm(gradient)
    logger.debug(f"Closest point found at distance {s:.6g} after {iters} Newton steps")
    return ClosestPointResult(
        distance=float(s), point=point, gradient_at_root=gradient, newton_iters=iters
    )


def closest_union(y, union: UnionOf, cfg: Optional[SolverConfig] = None, executor=None) -> ClosestPointResult:
    """Минимум по членам объединения; tie отмечает другие члены в пределах TIE_TOL.

    executor: необязательный concurrent.futures.Executor для членов.
    """
    y = np.asarray(y, dtype=float)
    inside = [i for i, member in enumerate(union.members) if not is_exterior(member, y)]
    if inside:
        raise InvalidQueryError(f"query lies inside or on union members {inside}")

    if executor is None:
        results = [closest(y, member, cfg) for member in union.members]
    else:
        futures = [executor.submit(closest, y, member, cfg) for member in union.members]
        results = [future.result() for future in futures]

    distances = np.array([r.distance for r in results])
    branch = int(np.argmin(distances))
    best = distances[branch]
    tie = bool(np.count_nonzero(distances <= best + config.TIE_TOL) > 1)
    if tie:
        logger.info(f"Equidistant union members at distance {best:.6g}; keeping member {branch}")

    chosen = results[branch]
    return ClosestPointResult(
        distance=chosen.distance,
        point=chosen.point,
        gradient_at_root=chosen.gradient_at_root,
        newton_iters=chosen.newton_iters,
        branch=branch,
        tie=tie,
    )


def distance_field_manhattan(y, shape: ConvexShape, t: float, cfg: Optional[SolverConfig] = None) -> float:
    """φ(y, t) для H = ‖·‖₁ и J, равной функции уровня множества.

    Знак классифицирует y относительно t-окрестности множества в норме,
    двойственной к ℓ1: < 0 внутри, 0 на границе, > 0 снаружи.
    """
    return evaluate(y, t, L1Norm(), build_level_set(shape), cfg).value
