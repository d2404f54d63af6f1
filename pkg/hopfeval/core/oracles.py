# -*- coding: utf-8 -*-
"""Эталонные решения: замкнутые формулы и перебор по сетке.

Формулы для движения внутрь (H = −‖·‖₁, H = −‖·‖₂) описывают невыпуклые
гамильтонианы; решатель их не принимает, они служат только эталонами.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from ..exceptions import GridTooCoarseError, InvalidQueryError
from ..models import (
    DiagQuadratic,
    EllipsoidLevel,
    L1Norm,
    L2Norm,
    MinHamiltonian,
    MinInitial,
    ShiftedQuadratic,
)
from .hopf_solver import hopf_objective
from .prox_ops import shrink1, shrink2, stretch1, stretch2

logger = logging.getLogger(__name__)

# Число узлов сетки по оси: грубый проход и уточнения
COARSE_POINTS = {1: 20001, 2: 1001, 3: 121}
REFINE_POINTS = {1: 2001, 2: 401, 3: 81}
# Полуширина окна уточнения в шагах предыдущей сетки
REFINE_CELLS = 2


def _check_query(x, t: float, semi_axes=None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise InvalidQueryError(f"oracle query must be a vector, got shape {x.shape}")
    if not t >= 0:
        raise InvalidQueryError(f"oracles are valid for t >= 0, got t={t}")
    if semi_axes is not None and np.size(semi_axes) != x.size:
        raise InvalidQueryError(
            f"semi_axes has length {np.size(semi_axes)}, query point has {x.size}"
        )
    return x


def ellipsoid_l1(x, t: float, semi_axes) -> Tuple[float, np.ndarray]:
    """J = ½(Σ x_i²/a_i² − 1), H = ‖·‖₁: значение и градиент."""
    x = _check_query(x, t, semi_axes)
    a = np.asarray(semi_axes, dtype=float)
    shrunk = shrink1(x, t)
    value = -0.5 + 0.5 * np.sum((shrunk / a) ** 2)
    return float(value), shrunk / a**2


def sphere_l2_outward(x, t: float) -> float:
    """J = ½(‖x‖² − 1), H = ‖·‖₂."""
    x = _check_query(x, t)
    r = np.linalg.norm(x)
    if r > t:
        return float(0.5 * (r - t) ** 2 - 0.5)
    return -0.5


def sphere_l2_outward_gradient(x, t: float) -> np.ndarray:
    x = _check_query(x, t)
    return shrink2(x, t)


def ellipsoid_l1_inward(x, t: float, semi_axes) -> float:
    """H = −‖·‖₁: фронт движется внутрь и исчезает при t ≥ max a_i."""
    x = _check_query(x, t, semi_axes)
    a = np.asarray(semi_axes, dtype=float)
    return float(-0.5 + 0.5 * np.sum((np.abs(x) + t) ** 2 / a**2))


def ellipsoid_l1_inward_gradient(x, t: float, semi_axes) -> np.ndarray:
    x = _check_query(x, t, semi_axes)
    return stretch1(x, t) / np.asarray(semi_axes, dtype=float) ** 2


def sphere_l2_inward(x, t: float) -> float:
    """H = −‖·‖₂; нулевое множество ‖x‖₂ = 1 − t при t ≤ 1, пусто при t > 1."""
    x = _check_query(x, t)
    return float(0.5 * (np.linalg.norm(x) + t) ** 2 - 0.5)


def sphere_l2_inward_gradient(x, t: float) -> np.ndarray:
    x = _check_query(x, t)
    return stretch2(x, t)


@dataclass(frozen=True)
class OracleCase:
    """Замкнутое решение вместе с задачей, которую оно решает.

    hamiltonian=None означает невыпуклый H (движение внутрь).
    """

    name: str
    initial: object
    hamiltonian: object
    value_fn: Callable[[np.ndarray, float], float]
    gradient_fn: Optional[Callable[[np.ndarray, float], np.ndarray]]
    region: str
    dimension: int

    def _valid(self, x, t: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size != self.dimension or not t >= 0:
            raise InvalidQueryError(f"{self.name}: query outside validity region ({self.region})")
        return x

    def value(self, x, t: float) -> float:
        return self.value_fn(self._valid(x, t), t)

    def gradient(self, x, t: float) -> np.ndarray:
        if self.gradient_fn is None:
            raise InvalidQueryError(f"{self.name}: no closed-form gradient")
        return self.gradient_fn(self._valid(x, t), t)


def oracle_cases(semi_axes) -> dict:
    """Набор эталонов для полуосей semi_axes (размерность = их длина)."""
    a = np.asarray(semi_axes, dtype=float)
    n = a.size
    ellipsoid = EllipsoidLevel(a)
    sphere = EllipsoidLevel(np.ones(n))
    cases = [
        OracleCase(
            name="ellipsoid_l1",
            initial=ellipsoid,
            hamiltonian=L1Norm(),
            value_fn=lambda x, t: ellipsoid_l1(x, t, a)[0],
            gradient_fn=lambda x, t: ellipsoid_l1(x, t, a)[1],
            region="any x, t >= 0",
            dimension=n,
        ),
        OracleCase(
            name="sphere_l2_outward",
            initial=sphere,
            hamiltonian=L2Norm(),
            value_fn=sphere_l2_outward,
            gradient_fn=sphere_l2_outward_gradient,
            region="any x, t >= 0",
            dimension=n,
        ),
        OracleCase(
            name="ellipsoid_l1_inward",
            initial=ellipsoid,
            hamiltonian=None,
            value_fn=lambda x, t: ellipsoid_l1_inward(x, t, a),
            gradient_fn=lambda x, t: ellipsoid_l1_inward_gradient(x, t, a),
            region="any x, t >= 0; gradient is a subgradient choice where x_i = 0",
            dimension=n,
        ),
        OracleCase(
            name="sphere_l2_inward",
            initial=sphere,
            hamiltonian=None,
            value_fn=sphere_l2_inward,
            gradient_fn=sphere_l2_inward_gradient,
            region="any x, t >= 0; gradient undefined at x = 0",
            dimension=n,
        ),
    ]
    return {case.name: case for case in cases}


ORACLE_CASES = oracle_cases(np.ones(8))


# ---------------------------------------------------------------------------
# Перебор
# ---------------------------------------------------------------------------


def _default_radius(x: np.ndarray, J) -> float:
    """Полуширина грубой сетки, заведомо содержащая минимизатор."""
    radius = float(np.sum(np.abs(x))) + 1.0
    if isinstance(J, EllipsoidLevel):
        radius /= min(1.0, float(np.min(J.semi_axes)) ** 2)
    elif isinstance(J, DiagQuadratic):
        radius /= min(1.0, float(np.min(J.inverse_weights)))
    elif isinstance(J, ShiftedQuadratic):
        radius += float(np.sum(np.abs(J.shift)))
    return 1.5 * radius


def _grid_pass(objective, center: np.ndarray, half_width: float, count: int):
    axes = [np.linspace(c - half_width, c + half_width, count) for c in center]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    values = objective(mesh)
    index = np.unravel_index(int(np.argmin(values)), values.shape)
    on_edge = any(i in (0, count - 1) for i in index)
    return mesh[index].copy(), float(values[index]), on_edge


def _minimize_objective(x, t, H, J, grid_radius, grid_step, refinements):
    n = x.size
    radius = _default_radius(x, J) if grid_radius is None else float(grid_radius)
    if grid_step is None:
        count = COARSE_POINTS[n]
    else:
        count = int(np.ceil(2.0 * radius / grid_step)) + 1
    objective = lambda v: hopf_objective(v, x, t, H, J)

    center = np.zeros(n)
    point, value, on_edge = _grid_pass(objective, center, radius, count)
    if on_edge:
        raise GridTooCoarseError(
            f"incumbent {point} lies on the boundary of the search box of radius {radius:g}"
        )
    step = 2.0 * radius / (count - 1)
    for _ in range(refinements):
        half_width = REFINE_CELLS * step
        point, value, _ = _grid_pass(objective, point, half_width, REFINE_POINTS[n])
        step = 2.0 * half_width / (REFINE_POINTS[n] - 1)
    return value, point


def brute_force_hopf(
    x,
    t: float,
    H,
    J,
    grid_radius: Optional[float] = None,
    grid_step: Optional[float] = None,
    refinements: int = 2,
) -> Tuple[float, np.ndarray]:
    """Перебор Хопф-функционала по кубической сетке (n ≤ 3): (φ(x, t), минимизатор).

    Для минимума по J берётся минимум φ по членам, для минимума по H берётся
    минимум функционала по членам (т.е. максимум φ).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or not 1 <= x.size <= 3:
        raise InvalidQueryError(f"brute force supports 1 <= n <= 3, got shape {x.shape}")
    if not t > 0:
        raise InvalidQueryError(f"brute force needs t > 0, got t={t}")

    if isinstance(J, MinInitial):
        branches = [brute_force_hopf(x, t, H, member, grid_radius, grid_step, refinements) for member in J.members]
        return min(branches, key=lambda branch: branch[0])
    if isinstance(H, MinHamiltonian):
        branches = [_minimize_objective(x, t, member, J, grid_radius, grid_step, refinements) for member in H.members]
        value, point = min(branches, key=lambda branch: branch[0])
        return -value, point

    value, point = _minimize_objective(x, t, H, J, grid_radius, grid_step, refinements)
    return -value, point

