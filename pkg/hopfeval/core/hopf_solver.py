# -*- coding: utf-8 -*-
"""Вычисление φ(x, t) и ∇ₓφ(x, t) по формуле Хопфа методом split Bregman.

φ(x, t) = −min_v { J*(v) + t·H(v) − ⟨x, v⟩ }.

Итерация (λ > 0):
    v ← prox_{(1/λ)∂J*}(d − b + x/λ)
    d ← prox_{(t/λ)∂H}(v + b)
    b ← b + v − d

В шагах d и b вместо v берётся αv + (1 − α)d (сверхрелаксация), а λ в
первых итерациях подстраивается так, чтобы невязки ‖d − v‖ и λ‖Δd‖ были
соизмеримы. При α = 1 и balance_iters = 0 получается исходная схема.
"""

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence

import numpy as np

from .. import config
from ..exceptions import (
    DimensionMismatchError,
    InvalidQueryError,
    NondifferentiableError,
    NonuniqueControlError,
    UnsupportedVariantError,
    ZeroInputError,
)
from ..models import (
    DiagQuadratic,
    EllipsoidLevel,
    Evaluation,
    HalfSqL1,
    HalfSqL2,
    HalfSqLinf,
    L1Norm,
    L2Norm,
    LinfNorm,
    MinHamiltonian,
    MinInitial,
    NormA,
    ShiftedQuadratic,
    SolverConfig,
)
from .problem_spec import eval_conjugate, eval_hamiltonian, eval_initial, grad_hamiltonian, grad_initial
from .prox_ops import (
    prox_half_l1_sq,
    prox_half_linf_sq,
    prox_linf,
    prox_norm_A,
    prox_quadratic,
    shrink1,
    shrink2,
)

logger = logging.getLogger(__name__)


def _hamiltonian_prox(H, z: np.ndarray, alpha: float) -> np.ndarray:
    """prox_{α∂H}(z) = z − π_{αC}(z), C: форма Вульфа H."""
    if isinstance(H, L1Norm):
        return shrink1(z, alpha)
    if isinstance(H, L2Norm):
        return shrink2(z, alpha)
    if isinstance(H, LinfNorm):
        return prox_linf(z, alpha)
    if isinstance(H, NormA):
        return prox_norm_A(z, alpha, H.spectral)
    raise UnsupportedVariantError(f"no proximal map for Hamiltonian {H!r}")


def _conjugate_prox(J, z: np.ndarray, alpha: float) -> np.ndarray:
    """prox_{α∂J*}(z)."""
    if hasattr(J, "conjugate_prox"):
        return J.conjugate_prox(z, alpha)
    if isinstance(J, HalfSqL2):
        return z / (1.0 + alpha)
    if isinstance(J, HalfSqL1):
        return prox_half_linf_sq(z, alpha)
    if isinstance(J, HalfSqLinf):
        return prox_half_l1_sq(z, alpha).point
    if isinstance(J, DiagQuadratic):
        return prox_quadratic(z, alpha, J.inverse_weights)
    if isinstance(J, EllipsoidLevel):
        return prox_quadratic(z, alpha, J.semi_axes**2)
    if isinstance(J, ShiftedQuadratic):
        return (z + alpha * J.sign * J.shift) / (1.0 + alpha)
    raise UnsupportedVariantError(f"no conjugate proximal map for initial data {J!r}")


def _conjugate_value(J, v):
    if hasattr(J, "conjugate"):
        return J.conjugate(v)
    return eval_conjugate(J, v)


def _check_dimensions(x: np.ndarray, *specs) -> None:
    for spec in specs:
        dim = spec.dimension
        if dim is not None and dim != x.size:
            raise DimensionMismatchError(
                f"{type(spec).__name__} has dimension {dim}, query point has {x.size}"
            )


def hopf_objective(v, x, t: float, H, J):
    """J*(v) + t·H(v) − ⟨x, v⟩; v может быть пакетом формы (..., n)."""
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=float)
    return _conjugate_value(J, v) + t * eval_hamiltonian(H, v) - v @ x


def _balance_lambda(lam: float, b: np.ndarray, primal_sq: float, dual_sq: float):
    """Подстройка λ по невязкам ‖d − v‖ и λ‖Δd‖; b = y/λ пересчитывается вместе с λ."""
    ratio = config.SOLVER_BALANCE_RATIO**2
    factor = config.SOLVER_BALANCE_FACTOR
    dual_sq = lam * lam * dual_sq
    if primal_sq > ratio * dual_sq:
        return lam * factor, b / factor
    if dual_sq > ratio * primal_sq:
        return lam / factor, b * factor
    return lam, b


def evaluate(x, t: float, H, J, cfg: Optional[SolverConfig] = None) -> Evaluation:
    """Одна задача Хопфа: выпуклые H и J, t > 0."""
    cfg = cfg or SolverConfig()
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatchError(f"query point must be a vector, got shape {x.shape}")
    if not t > 0:
        raise InvalidQueryError(f"evaluate needs t > 0, got t={t}; use solve() for t = 0")
    if isinstance(H, MinHamiltonian) or isinstance(J, MinInitial):
        raise UnsupportedVariantError(
            "evaluate takes convex H and J; use evaluate_min_hamiltonian / evaluate_min_initial"
        )
    _check_dimensions(x, H, J)

    lam = cfg.lam
    if cfg.warm_start is not None:
        v, d, b = (np.array(part, dtype=float) for part in cfg.warm_start)
        if v.shape != x.shape or d.shape != x.shape or b.shape != x.shape:
            raise DimensionMismatchError("warm start does not match the query dimension")
    else:
        v = x.copy()
        d = x.copy()
        b = np.zeros_like(x)

    relax = cfg.relaxation
    trace = logger.isEnabledFor(logging.DEBUG)

    converged = False
    residuals = (np.inf, np.inf, np.inf)
    iters = 0
    for iters in range(1, cfg.max_iters + 1):
        v_next = _conjugate_prox(J, d - b + x / lam, 1.0 / lam)
        mixed = relax * v_next + (1.0 - relax) * d
        d_next = _hamiltonian_prox(H, mixed + b, t / lam)
        b = b + mixed - d_next

        dv = v_next - v
        dd = d_next - d
        gap = d_next - v_next
        residuals = (dv @ dv, dd @ dd, gap @ gap)
        v, d = v_next, d_next

        if trace:
            logger.debug(
                f"iter {iters}: |dv|^2={residuals[0]:.3e} |dd|^2={residuals[1]:.3e} "
                f"|d-v|^2={residuals[2]:.3e} lambda={lam:.3g}"
            )
        if max(residuals) <= cfg.tol:
            converged = True
            break
        if iters <= cfg.balance_iters:
            lam, b = _balance_lambda(lam, b, residuals[2], residuals[1])

    if not converged:
        logger.warning(
            f"Split Bregman did not converge in {cfg.max_iters} iterations "
            f"(residuals {residuals[0]:.3e}, {residuals[1]:.3e}, {residuals[2]:.3e})"
        )

    value = -float(hopf_objective(d, x, t, H, J))
    return Evaluation(
        value=value,
        gradient=d,
        iters=iters,
        converged=converged,
        subproblem_stats={"residuals": tuple(float(r) for r in residuals), "lambda": lam},
        # множитель λb не зависит от λ; состояние приводится к cfg.lam
        state=(v, d, b * (lam / cfg.lam)),
    )


def _select_branch(evaluations: List[Evaluation], pick) -> Evaluation:
    values = np.array([ev.value for ev in evaluations])
    index = int(pick(values))
    best = values[index]
    others = np.delete(values, index)
    tie = bool(others.size and np.any(np.abs(others - best) <= config.TIE_TOL))
    if tie:
        logger.debug(f"Branch tie at value {best:.6g}; keeping branch {index}")
    stats = dict(evaluations[index].subproblem_stats)
    stats.update({"branch": index, "branch_values": values.tolist(), "tie": tie})
    return dataclasses.replace(
        evaluations[index],
        converged=all(ev.converged for ev in evaluations),
        subproblem_stats=stats,
    )


def evaluate_min_initial(x, t: float, H, J_list: Sequence, cfg: Optional[SolverConfig] = None) -> Evaluation:
    """J = min_i J_i: φ = min_i φ_i (минимум по независимым задачам)."""
    J_list = list(J_list)
    if not J_list:
        raise UnsupportedVariantError("evaluate_min_initial needs at least one initial datum")
    evaluations = [evaluate(x, t, H, J, cfg) for J in J_list]
    return _select_branch(evaluations, np.argmin)


def evaluate_min_hamiltonian(x, t: float, H_list: Sequence, J, cfg: Optional[SolverConfig] = None) -> Evaluation:
    """H = min_i H_i: φ = max_i φ_i."""
    H_list = list(H_list)
    if not H_list:
        raise UnsupportedVariantError("evaluate_min_hamiltonian needs at least one Hamiltonian")
    evaluations = [evaluate(x, t, H, J, cfg) for H in H_list]
    return _select_branch(evaluations, np.argmax)


def recover_control(grad, H) -> np.ndarray:
    """Оптимальное управление β = ∇H(∇ₓφ)."""
    try:
        return grad_hamiltonian(H, grad)
    except (NondifferentiableError, ZeroInputError) as e:
        raise NonuniqueControlError(f"optimal control is not unique: {e}") from e


def _initial_evaluation(x: np.ndarray, J) -> Evaluation:
    try:
        gradient = grad_initial(J, x)
    except NondifferentiableError:
        gradient = np.full_like(x, np.nan)
    return Evaluation(value=float(eval_initial(J, x)), gradient=gradient, iters=0, converged=True)


def solve(x, t: float, H, J, cfg: Optional[SolverConfig] = None) -> Evaluation:
    """Единая точка входа: t = 0, минимумы по J или по H, обычная задача."""
    x = np.asarray(x, dtype=float)
    if t < 0:
        raise InvalidQueryError(f"time must be nonnegative, got t={t}")
    if isinstance(J, MinInitial) and isinstance(H, MinHamiltonian):
        raise UnsupportedVariantError(
            "a minimum over initial data cannot be combined with a minimum over Hamiltonians"
        )
    if t == 0:
        _check_dimensions(x, H, J)
        return _initial_evaluation(x, J)
    if isinstance(J, MinInitial):
        return evaluate_min_initial(x, t, H, J.members, cfg)
    if isinstance(H, MinHamiltonian):
        return evaluate_min_hamiltonian(x, t, H.members, J, cfg)
    return evaluate(x, t, H, J, cfg)


def _evaluate_chunk(points: np.ndarray, t: float, H, J, cfg: SolverConfig, warm_start: bool):
    results = []
    previous = None
    plain = not isinstance(H, MinHamiltonian) and not isinstance(J, MinInitial) and t > 0
    for x in points:
        point_cfg = cfg
        if warm_start and plain and previous is not None:
            point_cfg = cfg.replace(warm_start=previous.state)
        previous = solve(x, t, H, J, point_cfg)
        results.append(previous)
    return results


def evaluate_batch(
    points,
    t: float,
    H,
    J,
    cfg: Optional[SolverConfig] = None,
    workers: int = 1,
    warm_start: bool = False,
) -> List[Evaluation]:
    """Независимые вычисления для строк points (m × n), порядок сохраняется.

    При workers > 1 строки делятся на непрерывные куски по процессам;
    warm_start действует внутри куска.
    """
    cfg = cfg or SolverConfig()
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if workers <= 1 or len(points) < 2:
        return _evaluate_chunk(points, t, H, J, cfg, warm_start)

    chunks = [chunk for chunk in np.array_split(points, workers) if len(chunk)]
    logger.debug(f"Evaluating {len(points)} points in {len(chunks)} chunks")
    results: List[Evaluation] = []
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = [
            executor.submit(_evaluate_chunk, chunk, t, H, J, cfg, warm_start) for chunk in chunks
        ]
        for future in futures:
            results.extend(future.result())
    return results
