# -*- coding: utf-8 -*-
"""Проксимальные операторы и проекции на выпуклые множества.

Обозначение: prox_{α∂f}(z) = argmin_w { α f(w) + ½‖w − z‖² }.
Все функции чистые: входные массивы не изменяются.
"""

import logging
from typing import Callable, Optional, Protocol

import numpy as np

from .. import config
from ..exceptions import MultivaluedError, NonconvergenceError
from ..models import ProxResult, SpectralMatrix

logger = logging.getLogger(__name__)


class SmoothFunction(Protocol):
    """Гладкая выпуклая функция с градиентом и гессианом."""

    def value(self, y: np.ndarray) -> float: ...

    def gradient(self, y: np.ndarray) -> np.ndarray: ...

    def hessian(self, y: np.ndarray) -> np.ndarray: ...


# ---------------------------------------------------------------------------
# Явные формулы
# ---------------------------------------------------------------------------


def shrink1(z: np.ndarray, alpha: float) -> np.ndarray:
    """Мягкий порог: prox_{α∂‖·‖₁}."""
    z = np.asarray(z, dtype=float)
    return np.sign(z) * np.maximum(np.abs(z) - alpha, 0.0)


def shrink2(z: np.ndarray, alpha: float) -> np.ndarray:
    """Радиальное сжатие: prox_{α∂‖·‖₂}. На границе ‖z‖ = α возвращает 0."""
    z = np.asarray(z, dtype=float)
    norm = np.linalg.norm(z)
    if norm <= alpha:
        return np.zeros_like(z)
    return z * (1.0 - alpha / norm)


def huber(z: np.ndarray, alpha: float) -> float:
    """Значение min_y ½‖y − z‖² + α‖y‖₂.

    Первая ветка равна ½‖z‖² (квадрат нормы), а не ½‖z‖.
    """
    norm = float(np.linalg.norm(z))
    if norm <= alpha:
        return 0.5 * norm**2
    return alpha * norm - 0.5 * alpha**2


def prox_quadratic(
    z: np.ndarray,
    alpha: float,
    weights: np.ndarray,
    orthogonal_factor: Optional[np.ndarray] = None,
) -> np.ndarray:
    """prox для f = ½⟨w, Aw⟩, A = P·diag(weights)·Pᵀ: (I + αA)⁻¹z."""
    z = np.asarray(z, dtype=float)
    if orthogonal_factor is None:
        return z / (1.0 + alpha * weights)
    u = z @ orthogonal_factor
    return (u / (1.0 + alpha * weights)) @ orthogonal_factor.T


def stretch1(z: np.ndarray, alpha: float) -> np.ndarray:
    """x_i + α·sign(x_i), ноль остаётся нулём."""
    z = np.asarray(z, dtype=float)
    return z + alpha * np.sign(z)


def stretch2(z: np.ndarray, alpha: float) -> np.ndarray:
    """z + α·z/‖z‖₂; в нуле оператор многозначен."""
    z = np.asarray(z, dtype=float)
    norm = np.linalg.norm(z)
    if norm == 0:
        raise MultivaluedError("stretch2 is multivalued at the origin")
    return z + alpha * z / norm


# ---------------------------------------------------------------------------
# Параметрический поиск по точкам излома
# ---------------------------------------------------------------------------


def _breakpoint_profile(z: np.ndarray):
    """Точки излома {0} ∪ {|z_i|} и значения h(μ) = ‖shrink1(z, μ)‖₁ в них.

    Возвращает (breaks, h, above), где above[k] равно числу |z_i| > breaks[k],
    то есть модуль наклона h на отрезке [breaks[k], breaks[k+1]].
    """
    a = np.sort(np.abs(z))
    breaks = np.unique(a)
    if breaks[0] > 0:
        breaks = np.concatenate(([0.0], breaks))
    n = a.size
    csum = np.concatenate(([0.0], np.cumsum(a)))
    not_above = np.searchsorted(a, breaks, side="right")
    above = n - not_above
    h = (csum[-1] - csum[not_above]) - above * breaks
    return breaks, h, above


def project_l1_ball(z: np.ndarray, alpha: float) -> ProxResult:
    """Проекция на шар {‖w‖₁ ≤ α}; множитель μ̄ решает ‖shrink1(z, μ̄)‖₁ = α."""
    z = np.asarray(z, dtype=float)
    if np.sum(np.abs(z)) <= alpha:
        return ProxResult(point=z.copy(), multiplier=0.0)

    breaks, h, above = _breakpoint_profile(z)
    # h убывает: ищем последний излом с h ≥ α
    k = int(np.searchsorted(-h, -alpha, side="right")) - 1
    mu = breaks[k] + (h[k] - alpha) / above[k]
    return ProxResult(point=shrink1(z, mu), multiplier=float(mu))


def prox_linf(z: np.ndarray, alpha: float) -> np.ndarray:
    """prox_{α∂‖·‖∞}(z) = z − π_{αC}(z), C: единичный ℓ1-шар."""
    z = np.asarray(z, dtype=float)
    return z - project_l1_ball(z, alpha).point


def prox_half_l1_sq(z: np.ndarray, alpha: float) -> ProxResult:
    """prox_{α∂(½‖·‖₁²)}(z) = shrink1(z, β̄), где β̄ = α‖shrink1(z, β̄)‖₁."""
    z = np.asarray(z, dtype=float)
    if not np.any(z):
        return ProxResult(point=np.zeros_like(z), multiplier=0.0)

    breaks, h, above = _breakpoint_profile(z)
    g = alpha * h - breaks
    # g убывает, g(0) > 0, g(max|z_i|) < 0
    k = int(np.searchsorted(-g, 0.0, side="right")) - 1
    beta = breaks[k] + g[k] / (alpha * above[k] + 1.0)
    return ProxResult(point=shrink1(z, beta), multiplier=float(beta))


def prox_half_linf_sq(z: np.ndarray, alpha: float) -> np.ndarray:
    """prox_{α∂(½‖·‖∞²)} через тождество Моро с сопряжённой ½‖·‖₁².

    Для 2-однородной f* верно α·prox_{(1/α)f*}(z/α) = prox_{(1/α)f*}(z),
    поэтому дополнение берётся при параметре 1/α.
    """
    z = np.asarray(z, dtype=float)
    return z - prox_half_l1_sq(z, 1.0 / alpha).point


def moreau_complement(
    prox_conj_scaled: Callable[[np.ndarray, float], np.ndarray],
    z: np.ndarray,
    alpha: float,
) -> np.ndarray:
    """prox_{α∂f}(z) = z − α·prox_{(1/α)∂f*}(z/α).

    prox_conj_scaled(w, beta) должен вычислять prox_{β∂f*}(w).
    """
    z = np.asarray(z, dtype=float)
    return z - alpha * prox_conj_scaled(z / alpha, 1.0 / alpha)


# ---------------------------------------------------------------------------
# Эллипсоид и норма ‖·‖_A
# ---------------------------------------------------------------------------


def project_ellipsoid(
    w: np.ndarray,
    semi_axes: np.ndarray,
    orthogonal_factor: Optional[np.ndarray] = None,
    tol: float = config.ELLIPSOID_NEWTON_TOL,
    max_iters: int = config.ELLIPSOID_NEWTON_MAX_ITERS,
) -> ProxResult:
    """Проекция на {x : Σ((Pᵀx)_i/d_i)² ≤ 1}.

    Ньютон по r(μ) = Σ d_i²u_i²/(d_i² + μ)² − 1 из μ₀ = 0; r выпукла и убывает
    при μ ≥ 0, поэтому итерации монотонны.
    """
    w = np.asarray(w, dtype=float)
    u = w if orthogonal_factor is None else w @ orthogonal_factor
    d2 = semi_axes * semi_axes
    if np.sum(u * u / d2) <= 1.0:
        return ProxResult(point=w.copy(), multiplier=0.0, newton_iters=0)

    du2 = d2 * u * u
    mu = 0.0
    for it in range(1, max_iters + 1):
        denom = d2 + mu
        r = np.sum(du2 / denom**2) - 1.0
        dr = -2.0 * np.sum(du2 / denom**3)
        mu_next = max(mu - r / dr, 0.0)
        step = abs(mu_next - mu)
        mu = mu_next
        if step <= tol:
            break
    else:
        logger.error(f"Ellipsoid projection diverged after {max_iters} Newton steps")
        raise NonconvergenceError(
            f"ellipsoid multiplier Newton did not converge in {max_iters} iterations"
        )

    point = d2 * u / (d2 + mu)
    if orthogonal_factor is not None:
        point = point @ orthogonal_factor.T
    return ProxResult(point=point, multiplier=float(mu), newton_iters=it)


def prox_norm_A(z: np.ndarray, alpha: float, spectral: SpectralMatrix) -> np.ndarray:
    """prox_{α∂‖·‖_A}(z) = z − π_{αE_A}(z), E_A = {y : ⟨y, A⁻¹y⟩ ≤ 1}."""
    z = np.asarray(z, dtype=float)
    semi_axes = alpha * np.sqrt(spectral.eigenvalues)
    return z - project_ellipsoid(z, semi_axes, spectral.orthogonal_factor).point


# ---------------------------------------------------------------------------
# Гладкие функции: Ньютон
# ---------------------------------------------------------------------------


def _damped_newton(residual, jacobian, w0, tol, step_tol, max_iters, max_halvings):
    """Демпфированный Ньютон для F(w) = 0 с делением шага пополам."""
    w = w0
    res = residual(w)
    res_norm = np.linalg.norm(res)
    for it in range(1, max_iters + 1):
        if res_norm <= tol:
            return w, it - 1
        step = np.linalg.solve(jacobian(w), -res)
        scale = 1.0
        candidate = w + step
        cand_res = residual(candidate)
        cand_norm = np.linalg.norm(cand_res)
        halvings = 0
        while cand_norm > res_norm and halvings < max_halvings:
            scale *= 0.5
            candidate = w + scale * step
            cand_res = residual(candidate)
            cand_norm = np.linalg.norm(cand_res)
            halvings += 1
        w, res, res_norm = candidate, cand_res, cand_norm
        if scale * np.linalg.norm(step) <= step_tol:
            return w, it
    if res_norm <= tol:
        return w, max_iters
    raise NonconvergenceError(
        f"Newton did not converge in {max_iters} iterations (residual {res_norm:.3e})"
    )


def prox_smooth_newton(
    f: SmoothFunction,
    z: np.ndarray,
    alpha: float,
    tol: float = config.PROX_NEWTON_TOL,
    step_tol: float = config.PROX_NEWTON_STEP_TOL,
    max_iters: int = config.PROX_NEWTON_MAX_ITERS,
    max_halvings: int = config.PROX_NEWTON_MAX_HALVINGS,
) -> ProxResult:
    """Решает α∇f(w) + w − z = 0 демпфированным Ньютоном из w₀ = z."""
    z = np.asarray(z, dtype=float)
    eye = np.eye(z.size)
    point, iters = _damped_newton(
        residual=lambda w: alpha * f.gradient(w) + w - z,
        jacobian=lambda w: alpha * f.hessian(w) + eye,
        w0=z.copy(),
        tol=tol,
        step_tol=step_tol,
        max_iters=max_iters,
        max_halvings=max_halvings,
    )
    return ProxResult(point=point, newton_iters=iters)


def conjugate_newton(
    f: SmoothFunction,
    v: np.ndarray,
    y0: Optional[np.ndarray] = None,
    tol: float = config.PROX_NEWTON_TOL,
    max_iters: int = config.PROX_NEWTON_MAX_ITERS,
    max_halvings: int = config.PROX_NEWTON_MAX_HALVINGS,
):
    """f*(v) = ⟨v, ȳ⟩ − f(ȳ), где ∇f(ȳ) = v. Возвращает (значение, ȳ)."""
    v = np.asarray(v, dtype=float)
    if y0 is None:
        y0 = v.copy()
    y, _ = _damped_newton(
        residual=lambda y: f.gradient(y) - v,
        jacobian=f.hessian,
        w0=np.asarray(y0, dtype=float),
        tol=tol,
        step_tol=0.0,
        max_iters=max_iters,
        max_halvings=max_halvings,
    )
    return float(v @ y - f.value(y)), y
