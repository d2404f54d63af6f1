# -*- coding: utf-8 -*-
"""Гладкие функции уровня L (и сопряжённые L*) для выпуклых множеств.

Функция уровня отрицательна внутри множества, равна нулю на границе и
положительна снаружи. Для эйконального решателя она играет роль начальных
данных J, поэтому каждая LevelSetData умеет вычислять J*(v) и prox_{α∂J*}.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .. import config
from ..exceptions import NondifferentiableError, SpecValidationError, UnsupportedVariantError
from ..models import ConvexShape, Ellipsoid, PNormBall, QuadOverNorm, UnionOf
from .prox_ops import conjugate_newton, moreau_complement, prox_quadratic, prox_smooth_newton

logger = logging.getLogger(__name__)

PRIMAL = "primal"
DUAL = "dual"


class NormPower:
    """f(y) = coef·(scale·‖y‖_p)^k + offset."""

    def __init__(self, p: float, k: float, scale: float = 1.0, coef: float = 1.0, offset: float = 0.0):
        self.p = float(p)
        self.k = float(k)
        self.scale = float(scale)
        self.coef = float(coef)
        self.offset = float(offset)

    def __repr__(self):
        return (
            f"NormPower(p={self.p:g}, k={self.k:g}, scale={self.scale:g}, "
            f"coef={self.coef:g}, offset={self.offset:g})"
        )

    def _norm(self, y):
        return np.linalg.norm(y, ord=self.p, axis=-1)

    def value(self, y):
        return self.coef * (self.scale * self._norm(y)) ** self.k + self.offset

    def gradient(self, y: np.ndarray) -> np.ndarray:
        n = self._norm(y)
        if n == 0:
            return np.zeros_like(y, dtype=float)
        u = np.abs(y) / n
        grad_norm = np.sign(y) * u ** (self.p - 1.0)
        m = self.scale * n
        return self.coef * self.k * self.scale * m ** (self.k - 1.0) * grad_norm

    def hessian(self, y: np.ndarray) -> np.ndarray:
        n = self._norm(y)
        size = y.size
        if n == 0:
            if self.k > 2:
                return np.zeros((size, size))
            if self.k == 2 and self.p == 2:
                return 2.0 * self.coef * self.scale**2 * np.eye(size)
            raise NondifferentiableError(f"{self!r} has no Hessian at the origin")

        u = np.abs(y) / n
        g = np.sign(y) * u ** (self.p - 1.0)
        hess_norm = (self.p - 1.0) / n * (np.diag(u ** (self.p - 2.0)) - np.outer(g, g))
        m = self.scale * n
        return (
            self.coef
            * self.k
            * self.scale
            * (
                (self.k - 1.0) * m ** (self.k - 2.0) * self.scale * np.outer(g, g)
                + m ** (self.k - 1.0) * hess_norm
            )
        )

    def conjugate_function(self) -> "NormPower":
        """Замкнутая форма f*: степень двойственной нормы с показателем k/(k−1)."""
        q = self.p / (self.p - 1.0)
        k_dual = self.k / (self.k - 1.0)
        coef_dual = (1.0 - 1.0 / self.k) * (self.coef * self.k) ** (-1.0 / (self.k - 1.0))
        return NormPower(q, k_dual, 1.0 / self.scale, coef_dual, -self.offset)


class QuadraticLevel:
    """L(y) = ½(Σ((Pᵀy)_i/d_i)² − 1) для эллипсоида с полуосями d."""

    def __init__(self, semi_axes: np.ndarray, orthogonal_factor: Optional[np.ndarray] = None):
        self.semi_axes = semi_axes
        self.orthogonal_factor = orthogonal_factor
        self.weights = 1.0 / semi_axes**2

    def _rotate(self, y):
        return y if self.orthogonal_factor is None else y @ self.orthogonal_factor

    def _unrotate(self, u):
        return u if self.orthogonal_factor is None else u @ self.orthogonal_factor.T

    def value(self, y):
        u = self._rotate(y)
        return 0.5 * (np.sum(self.weights * u * u, axis=-1) - 1.0)

    def gradient(self, y: np.ndarray) -> np.ndarray:
        return self._unrotate(self.weights * self._rotate(y))

    def hessian(self, y: np.ndarray) -> np.ndarray:
        if self.orthogonal_factor is None:
            return np.diag(self.weights)
        p = self.orthogonal_factor
        return (p * self.weights) @ p.T

    def conjugate(self, v):
        u = self._rotate(v)
        return 0.5 * np.sum(self.semi_axes**2 * u * u, axis=-1) + 0.5

    def conjugate_prox(self, z: np.ndarray, alpha: float) -> np.ndarray:
        return prox_quadratic(z, alpha, self.semi_axes**2, self.orthogonal_factor)


class QuadOverNormLevel:
    """L(x) = (G(x)^{2m} − 1)/(2m), G(x) = ⟨x, Ax⟩/‖x‖₂; L(0) = −1/(2m)."""

    def __init__(self, shape: QuadOverNorm):
        self.matrix = shape.spectral.matrix()
        self.eigenvalues = shape.spectral.eigenvalues
        self.m = shape.exponent

    def _parts(self, x):
        r = np.linalg.norm(x)
        ax = self.matrix @ x
        q = x @ ax
        return r, ax, q

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim > 1:
            return np.array([self.value(row) for row in x.reshape(-1, x.shape[-1])]).reshape(
                x.shape[:-1]
            )
        r, _, q = self._parts(x)
        g = 0.0 if r == 0 else q / r
        return (g ** (2 * self.m) - 1.0) / (2 * self.m)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        r, ax, q = self._parts(x)
        if r == 0:
            return np.zeros_like(x)
        g = q / r
        grad_g = 2.0 * ax / r - q * x / r**3
        return g ** (2 * self.m - 1) * grad_g

    def hessian(self, x: np.ndarray) -> np.ndarray:
        n = x.size
        r, ax, q = self._parts(x)
        if r == 0:
            return np.zeros((n, n))
        g = q / r
        grad_g = 2.0 * ax / r - q * x / r**3
        hess_g = (
            2.0 * self.matrix / r
            - 2.0 * (np.outer(ax, x) + np.outer(x, ax)) / r**3
            - q * np.eye(n) / r**3
            + 3.0 * q * np.outer(x, x) / r**5
        )
        two_m = 2 * self.m
        return (two_m - 1) * g ** (two_m - 2) * np.outer(grad_g, grad_g) + g ** (two_m - 1) * hess_g

    def conjugate_guess(self, v: np.ndarray) -> np.ndarray:
        """Начальная точка для ∇L(y) = v по радиальной модели G ≈ ρ⟨θ, Aθ⟩."""
        norm = np.linalg.norm(v)
        theta = v / norm
        a = theta @ self.matrix @ theta
        rho = (norm / a) ** (1.0 / (2 * self.m - 1)) / a
        return rho * theta

    def conjugate(self, v):
        v = np.asarray(v, dtype=float)
        if v.ndim > 1:
            return np.array([self.conjugate(row) for row in v.reshape(-1, v.shape[-1])]).reshape(
                v.shape[:-1]
            )
        if not np.any(v):
            return 1.0 / (2 * self.m)
        value, _ = conjugate_newton(self, v, y0=self.conjugate_guess(v))
        return value


@dataclass(frozen=True, eq=False)
class LevelSetData:
    """Функция уровня выпуклого множества вместе с её сопряжённой.

    side=PRIMAL: ньютоновский prox берётся по L, prox L* получается по Моро.
    side=DUAL: ньютоновский prox берётся прямо по L*.
    """

    shape: ConvexShape
    exponent: float
    side: str
    function: object
    conjugate_function: Optional[object] = None

    @property
    def center(self) -> Optional[np.ndarray]:
        return getattr(self.shape, "center", None)

    @property
    def dimension(self) -> Optional[int]:
        return self.shape.dimension

    def _local(self, y):
        y = np.asarray(y, dtype=float)
        return y if self.center is None else y - self.center

    def level(self, y):
        return self.function.value(self._local(y))

    def level_gradient(self, y: np.ndarray) -> np.ndarray:
        return self.function.gradient(self._local(y))

    def conjugate(self, v):
        v = np.asarray(v, dtype=float)
        if self.conjugate_function is not None:
            value = self.conjugate_function.value(v)
        else:
            value = self.function.conjugate(v)
        if self.center is not None:
            value = value + v @ self.center
        return value

    def conjugate_prox(self, z: np.ndarray, alpha: float) -> np.ndarray:
        """prox_{α∂J*}(z) для J(x) = L(x − c): prox_{α∂L*}(z − αc)."""
        z = np.asarray(z, dtype=float)
        if self.center is not None:
            z = z - alpha * self.center

        if hasattr(self.function, "conjugate_prox"):
            return self.function.conjugate_prox(z, alpha)
        if self.side == DUAL:
            return prox_smooth_newton(self.conjugate_function, z, alpha).point
        return moreau_complement(
            lambda w, beta: prox_smooth_newton(self.function, w, beta).point, z, alpha
        )


def build_level_set(
    shape: ConvexShape, exponent: Optional[float] = None, side: Optional[str] = None
) -> LevelSetData:
    """Строит функцию уровня по правилам выбора стороны.

    p-шар при p ≥ 2 и QuadOverNorm: прямая L с m ≥ 1 (по умолчанию 2);
    p-шар при 1 < p < 2: двойственная L* с ½ < m ≤ 1 (по умолчанию 0.75).
    """
    if isinstance(shape, UnionOf):
        raise UnsupportedVariantError("unions have no single level-set function; use members")

    if isinstance(shape, Ellipsoid):
        function = QuadraticLevel(shape.semi_axes, shape.orthogonal_factor)
        return LevelSetData(shape, 1.0, PRIMAL, function)

    if isinstance(shape, QuadOverNorm):
        m = shape.exponent if exponent is None else float(exponent)
        if m < 2:
            raise SpecValidationError(f"QuadOverNorm level set needs m >= 2, got {m}")
        if m != shape.exponent:
            shape = QuadOverNorm(shape.spectral, m, shape.center)
        return LevelSetData(shape, m, PRIMAL, QuadOverNormLevel(shape))

    if isinstance(shape, PNormBall):
        if side is None:
            side = PRIMAL if shape.p >= 2 else DUAL
        if side == PRIMAL:
            m = config.PRIMAL_EXPONENT if exponent is None else float(exponent)
            if shape.p < 2 or m < 1:
                raise SpecValidationError(
                    f"primal level set needs p >= 2 and m >= 1, got p={shape.p:g}, m={m:g}"
                )
        elif side == DUAL:
            m = config.DUAL_EXPONENT if exponent is None else float(exponent)
            if shape.p > 2 or not 0.5 < m <= 1:
                raise SpecValidationError(
                    f"dual level set needs p <= 2 and 1/2 < m <= 1, got p={shape.p:g}, m={m:g}"
                )
        else:
            raise SpecValidationError(f"unknown level-set side {side!r}")

        k = 2.0 * m
        function = NormPower(shape.p, k, 1.0 / shape.radius, 1.0 / k, -1.0 / k)
        return LevelSetData(shape, m, side, function, function.conjugate_function())

    raise UnsupportedVariantError(f"unknown shape {shape!r}")


def boundary_residual(shape: ConvexShape, point) -> float:
    """Калибровочная функция множества минус 1 (для шара: ‖x − c‖_p − r)."""
    if isinstance(shape, UnionOf):
        return min(boundary_residual(member, point) for member in shape.members)
    x = np.asarray(point, dtype=float)
    center = getattr(shape, "center", None)
    if center is not None:
        x = x - center
    if isinstance(shape, PNormBall):
        return float(np.linalg.norm(x, ord=shape.p) - shape.radius)
    if isinstance(shape, Ellipsoid):
        u = x if shape.orthogonal_factor is None else x @ shape.orthogonal_factor
        return float(np.sqrt(np.sum((u / shape.semi_axes) ** 2)) - 1.0)
    if isinstance(shape, QuadOverNorm):
        r = np.linalg.norm(x)
        if r == 0:
            return -1.0
        return float(x @ shape.spectral.matrix() @ x / r - 1.0)
    raise UnsupportedVariantError(f"unknown shape {shape!r}")


def is_exterior(shape: ConvexShape, y) -> bool:
    return boundary_residual(shape, y) > 0


def circumradius(shape: ConvexShape, dimension: Optional[int] = None) -> float:
    """Радиус шара с центром в center, содержащего множество."""
    if isinstance(shape, PNormBall):
        n = shape.dimension or dimension
        if n is None or shape.p <= 2:
            return shape.radius
        return shape.radius * n ** (0.5 - 1.0 / shape.p)
    if isinstance(shape, Ellipsoid):
        return float(np.max(shape.semi_axes))
    if isinstance(shape, QuadOverNorm):
        return float(1.0 / np.min(shape.spectral.eigenvalues))
    raise UnsupportedVariantError(f"unknown shape {shape!r}")
