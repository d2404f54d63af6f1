# -*- coding: utf-8 -*-
"""Декларативные описания задач: гамильтонианы, начальные данные, выпуклые
множества, параметры решателя и результаты.

Все объекты неизменяемы после создания; массивы numpy внутри помечаются как
read-only, поэтому значения можно свободно передавать между потоками и
процессами.
"""

import dataclasses
from dataclasses import dataclass, field
from typing import Any, ClassVar, Dict, Optional, Tuple, Union

import numpy as np

from . import config
from .exceptions import SpecValidationError

ORTHOGONALITY_TOL = 1e-10


def as_vector(values, name: str = "vector") -> np.ndarray:
    """Приводит значения к неизменяемому одномерному массиву float64."""
    arr = np.array(values, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise SpecValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise SpecValidationError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


def _positive_vector(values, name: str) -> np.ndarray:
    arr = as_vector(values, name)
    if arr.size == 0:
        raise SpecValidationError(f"{name} must not be empty")
    if np.any(arr <= 0):
        raise SpecValidationError(f"{name} must be strictly positive")
    return arr


def _optional_center(center, dimension: Optional[int]) -> Optional[np.ndarray]:
    if center is None:
        return None
    arr = as_vector(center, "center")
    if dimension is not None and arr.size != dimension:
        raise SpecValidationError(
            f"center has dimension {arr.size}, expected {dimension}"
        )
    return arr


@dataclass(frozen=True, eq=False)
class SpectralMatrix:
    """Симметричная положительно определённая матрица в виде A = P·diag(λ)·Pᵀ.

    orthogonal_factor=None означает P = I (диагональная матрица).
    """

    eigenvalues: np.ndarray
    orthogonal_factor: Optional[np.ndarray] = None

    def __post_init__(self):
        eigenvalues = _positive_vector(self.eigenvalues, "eigenvalues")
        object.__setattr__(self, "eigenvalues", eigenvalues)

        if self.orthogonal_factor is None:
            return

        factor = np.array(self.orthogonal_factor, dtype=float)
        n = eigenvalues.size
        if factor.shape != (n, n):
            raise SpecValidationError(
                f"orthogonal_factor must be {n}x{n}, got {factor.shape}"
            )
        if np.max(np.abs(factor.T @ factor - np.eye(n))) > ORTHOGONALITY_TOL:
            raise SpecValidationError("orthogonal_factor is not orthogonal (PᵀP != I)")
        reconstructed = (factor * eigenvalues) @ factor.T
        if np.max(np.abs(reconstructed - reconstructed.T)) > ORTHOGONALITY_TOL:
            raise SpecValidationError("reconstructed matrix is not symmetric")
        factor.setflags(write=False)
        object.__setattr__(self, "orthogonal_factor", factor)

    @classmethod
    def from_matrix(cls, matrix) -> "SpectralMatrix":
        """Спектральное разложение сырой матрицы (выполняется один раз при разборе)."""
        a = np.array(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise SpecValidationError(f"matrix must be square, got shape {a.shape}")
        if np.max(np.abs(a - a.T)) > ORTHOGONALITY_TOL * max(1.0, np.max(np.abs(a))):
            raise SpecValidationError("matrix must be symmetric")
        eigenvalues, factor = np.linalg.eigh(0.5 * (a + a.T))
        if np.any(eigenvalues <= 0):
            raise SpecValidationError("matrix must be positive definite")
        return cls(eigenvalues=eigenvalues, orthogonal_factor=factor)

    @classmethod
    def diagonal(cls, diagonal) -> "SpectralMatrix":
        return cls(eigenvalues=diagonal)

    @property
    def dimension(self) -> int:
        return self.eigenvalues.size

    def rotate(self, v: np.ndarray) -> np.ndarray:
        """Pᵀv по последней оси."""
        if self.orthogonal_factor is None:
            return v
        return v @ self.orthogonal_factor

    def unrotate(self, u: np.ndarray) -> np.ndarray:
        """P·u по последней оси."""
        if self.orthogonal_factor is None:
            return u
        return u @ self.orthogonal_factor.T

    def matrix(self) -> np.ndarray:
        if self.orthogonal_factor is None:
            return np.diag(self.eigenvalues)
        p = self.orthogonal_factor
        return (p * self.eigenvalues) @ p.T

    def scaled(self, factor: float) -> "SpectralMatrix":
        return SpectralMatrix(self.eigenvalues * factor, self.orthogonal_factor)


# ---------------------------------------------------------------------------
# Гамильтонианы
# ---------------------------------------------------------------------------


class Hamiltonian:
    """Положительно 1-однородный гамильтониан H(p)."""

    kind: ClassVar[str] = ""

    @property
    def dimension(self) -> Optional[int]:
        return None


@dataclass(frozen=True, eq=False)
class L1Norm(Hamiltonian):
    kind: ClassVar[str] = "l1"


@dataclass(frozen=True, eq=False)
class L2Norm(Hamiltonian):
    kind: ClassVar[str] = "l2"


@dataclass(frozen=True, eq=False)
class LinfNorm(Hamiltonian):
    kind: ClassVar[str] = "linf"


@dataclass(frozen=True, eq=False)
class NormA(Hamiltonian):
    """H(p) = √⟨p, Ap⟩."""

    spectral: SpectralMatrix
    kind: ClassVar[str] = "norm_a"

    @property
    def dimension(self) -> Optional[int]:
        return self.spectral.dimension


def _check_members(members, base, name: str) -> Tuple:
    members = tuple(members)
    if not members:
        raise SpecValidationError(f"{name} requires at least one member")
    dims = set()
    for member in members:
        if not isinstance(member, base):
            raise SpecValidationError(f"{name} member {member!r} has wrong type")
        if getattr(member, "members", None) is not None:
            raise SpecValidationError(f"{name} cannot be nested")
        if member.dimension is not None:
            dims.add(member.dimension)
    if len(dims) > 1:
        raise SpecValidationError(f"{name} members disagree on dimension: {sorted(dims)}")
    return members


@dataclass(frozen=True, eq=False)
class MinHamiltonian(Hamiltonian):
    """H = min_i H_i (неглубокий список, без вложенности)."""

    members: Tuple[Hamiltonian, ...]
    kind: ClassVar[str] = "min"

    def __post_init__(self):
        object.__setattr__(
            self, "members", _check_members(self.members, Hamiltonian, "MinHamiltonian")
        )

    @property
    def dimension(self) -> Optional[int]:
        for member in self.members:
            if member.dimension is not None:
                return member.dimension
        return None


HamiltonianSpec = Union[L1Norm, L2Norm, LinfNorm, NormA, MinHamiltonian]


# ---------------------------------------------------------------------------
# Начальные данные
# ---------------------------------------------------------------------------


class InitialData:
    """Выпуклые начальные данные J с явным сопряжённым J*."""

    kind: ClassVar[str] = ""

    @property
    def dimension(self) -> Optional[int]:
        return None


@dataclass(frozen=True, eq=False)
class HalfSqL2(InitialData):
    kind: ClassVar[str] = "half_sq_l2"


@dataclass(frozen=True, eq=False)
class HalfSqL1(InitialData):
    kind: ClassVar[str] = "half_sq_l1"


@dataclass(frozen=True, eq=False)
class HalfSqLinf(InitialData):
    kind: ClassVar[str] = "half_sq_linf"


@dataclass(frozen=True, eq=False)
class DiagQuadratic(InitialData):
    """J(x) = ½⟨x, D⁻¹x⟩, где d_i образуют диагональ D."""

    inverse_weights: np.ndarray
    kind: ClassVar[str] = "diag_quadratic"

    def __post_init__(self):
        object.__setattr__(
            self, "inverse_weights", _positive_vector(self.inverse_weights, "inverse_weights")
        )

    @property
    def dimension(self) -> Optional[int]:
        return self.inverse_weights.size


@dataclass(frozen=True, eq=False)
class EllipsoidLevel(InitialData):
    """J(x) = ½(Σ x_i²/a_i² − 1): функция уровня эллипсоида."""

    semi_axes: np.ndarray
    kind: ClassVar[str] = "ellipsoid_level"

    def __post_init__(self):
        object.__setattr__(self, "semi_axes", _positive_vector(self.semi_axes, "semi_axes"))

    @property
    def dimension(self) -> Optional[int]:
        return self.semi_axes.size


@dataclass(frozen=True, eq=False)
class ShiftedQuadratic(InitialData):
    """J(x) = ½‖x‖² + σ⟨b, x⟩, σ ∈ {+1, −1}."""

    shift: np.ndarray
    sign: int = 1
    kind: ClassVar[str] = "shifted_quadratic"

    def __post_init__(self):
        object.__setattr__(self, "shift", as_vector(self.shift, "shift"))
        if self.sign not in (1, -1):
            raise SpecValidationError(f"sign must be +1 or -1, got {self.sign}")

    @property
    def dimension(self) -> Optional[int]:
        return self.shift.size


@dataclass(frozen=True, eq=False)
class MinInitial(InitialData):
    """J = min_i J_i."""

    members: Tuple[InitialData, ...]
    kind: ClassVar[str] = "min"

    def __post_init__(self):
        object.__setattr__(
            self, "members", _check_members(self.members, InitialData, "MinInitial")
        )

    @property
    def dimension(self) -> Optional[int]:
        for member in self.members:
            if member.dimension is not None:
                return member.dimension
        return None


InitialDataSpec = Union[
    HalfSqL2, HalfSqL1, HalfSqLinf, DiagQuadratic, EllipsoidLevel, ShiftedQuadratic, MinInitial
]


# ---------------------------------------------------------------------------
# Выпуклые множества (формы Вульфа) для поиска ближайшей точки
# ---------------------------------------------------------------------------


class ConvexShape:
    kind: ClassVar[str] = ""

    @property
    def dimension(self) -> Optional[int]:
        return None


@dataclass(frozen=True, eq=False)
class PNormBall(ConvexShape):
    """{x : ‖x − c‖_p ≤ radius}, 1 < p < ∞."""

    p: float
    radius: float = 1.0
    center: Optional[np.ndarray] = None
    kind: ClassVar[str] = "p_norm_ball"

    def __post_init__(self):
        if not (1.0 < float(self.p) < np.inf):
            raise SpecValidationError(f"p must lie in (1, inf), got {self.p}")
        if not self.radius > 0:
            raise SpecValidationError(f"radius must be positive, got {self.radius}")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "center", _optional_center(self.center, None))

    @property
    def dimension(self) -> Optional[int]:
        return None if self.center is None else self.center.size


@dataclass(frozen=True, eq=False)
class Ellipsoid(ConvexShape):
    """{x : Σ ((Pᵀ(x − c))_i / d_i)² ≤ 1}."""

    semi_axes: np.ndarray
    orthogonal_factor: Optional[np.ndarray] = None
    center: Optional[np.ndarray] = None
    kind: ClassVar[str] = "ellipsoid"

    def __post_init__(self):
        semi_axes = _positive_vector(self.semi_axes, "semi_axes")
        object.__setattr__(self, "semi_axes", semi_axes)
        # Проверку ортогональности делегируем SpectralMatrix
        spectral = SpectralMatrix(semi_axes, self.orthogonal_factor)
        object.__setattr__(self, "orthogonal_factor", spectral.orthogonal_factor)
        object.__setattr__(self, "center", _optional_center(self.center, semi_axes.size))

    @property
    def dimension(self) -> Optional[int]:
        return self.semi_axes.size


@dataclass(frozen=True, eq=False)
class QuadOverNorm(ConvexShape):
    """{x : ⟨x, Ax⟩ ≤ ‖x‖₂} (после сдвига на center)."""

    spectral: SpectralMatrix
    exponent: float = 2.0
    center: Optional[np.ndarray] = None
    kind: ClassVar[str] = "quad_over_norm"

    def __post_init__(self):
        eig = self.spectral.eigenvalues
        if np.max(eig) > 2.0 * np.min(eig):
            raise SpecValidationError(
                "QuadOverNorm requires max eigenvalue <= 2 * min eigenvalue"
            )
        if self.exponent < 2:
            raise SpecValidationError(f"exponent must be >= 2, got {self.exponent}")
        object.__setattr__(self, "exponent", float(self.exponent))
        object.__setattr__(
            self, "center", _optional_center(self.center, self.spectral.dimension)
        )

    @property
    def dimension(self) -> Optional[int]:
        return self.spectral.dimension


@dataclass(frozen=True, eq=False)
class UnionOf(ConvexShape):
    members: Tuple[ConvexShape, ...]
    kind: ClassVar[str] = "union"

    def __post_init__(self):
        object.__setattr__(self, "members", _check_members(self.members, ConvexShape, "UnionOf"))

    @property
    def dimension(self) -> Optional[int]:
        for member in self.members:
            if member.dimension is not None:
                return member.dimension
        return None


# ---------------------------------------------------------------------------
# Параметры и результаты
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SolverConfig:
    """Параметры split Bregman и поиска корня по времени."""

    lam: float = config.SOLVER_LAMBDA
    tol: float = config.SOLVER_TOL
    max_iters: int = config.SOLVER_MAX_ITERS
    # α ∈ (0, 2): v в обновлениях d и b заменяется на αv + (1 − α)d
    relaxation: float = config.SOLVER_RELAXATION
    # число первых итераций, на которых λ подстраивается по невязкам; 0 фиксирует λ
    balance_iters: int = config.SOLVER_BALANCE_ITERS
    # (v⁰, d⁰, b⁰); None означает v⁰ = d⁰ = x, b⁰ = 0
    warm_start: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = None
    boundary_tol: float = config.BOUNDARY_TOL
    boundary_max_iters: int = config.BOUNDARY_NEWTON_MAX_ITERS
    bracket_growth_cap: int = config.BRACKET_GROWTH_CAP

    def __post_init__(self):
        if not self.lam > 0:
            raise SpecValidationError(f"lambda must be positive, got {self.lam}")
        if not self.tol > 0:
            raise SpecValidationError(f"tol must be positive, got {self.tol}")
        if int(self.max_iters) < 1:
            raise SpecValidationError(f"max_iters must be >= 1, got {self.max_iters}")
        if not 0 < self.relaxation < 2:
            raise SpecValidationError(f"relaxation must lie in (0, 2), got {self.relaxation}")
        if int(self.balance_iters) < 0:
            raise SpecValidationError(f"balance_iters must be >= 0, got {self.balance_iters}")
        if not self.boundary_tol > 0:
            raise SpecValidationError(f"boundary_tol must be positive, got {self.boundary_tol}")

    def replace(self, **changes) -> "SolverConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True, eq=False)
class Evaluation:
    value: float
    gradient: np.ndarray
    iters: int
    converged: bool
    subproblem_stats: Dict[str, Any] = field(default_factory=dict)
    state: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = None


@dataclass(frozen=True, eq=False)
class ProxResult:
    point: np.ndarray
    multiplier: Optional[float] = None
    newton_iters: Optional[int] = None


@dataclass(frozen=True, eq=False)
class ClosestPointResult:
    distance: float
    point: np.ndarray
    gradient_at_root: np.ndarray
    newton_iters: int
    branch: Optional[int] = None
    tie: bool = False


@dataclass(frozen=True, eq=False)
class SliceJob:
    """Двумерный срез: оси axes меняются, остальные координаты фиксированы."""

    dimension: int
    axes: Tuple[int, int] = (0, 1)
    fixed: Optional[np.ndarray] = None
    ranges: Tuple[Tuple[float, float], Tuple[float, float]] = ((-20.0, 20.0), (-20.0, 20.0))
    samples: Tuple[int, int] = (config.SLICE_SAMPLES, config.SLICE_SAMPLES)
    times: Tuple[float, ...] = (0.0,)

    def __post_init__(self):
        n = int(self.dimension)
        i, j = (int(a) for a in self.axes)
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise SpecValidationError(f"slice axes {self.axes} are invalid for dimension {n}")
        object.__setattr__(self, "axes", (i, j))
        fixed = np.zeros(n) if self.fixed is None else np.array(self.fixed, dtype=float)
        if fixed.shape != (n,):
            raise SpecValidationError(f"fixed coordinates must have length {n}")
        fixed.setflags(write=False)
        object.__setattr__(self, "fixed", fixed)
        for lo, hi in self.ranges:
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise SpecValidationError(f"slice range ({lo}, {hi}) must be finite with lo < hi")
        if any(int(k) < 2 for k in self.samples):
            raise SpecValidationError(f"slice sample counts must be >= 2, got {self.samples}")
        object.__setattr__(self, "samples", tuple(int(k) for k in self.samples))
        if any(not t >= 0 for t in self.times):
            raise SpecValidationError(f"slice times must be nonnegative, got {self.times}")
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))

    def axis_values(self) -> Tuple[np.ndarray, np.ndarray]:
        return tuple(
            np.linspace(lo, hi, k) for (lo, hi), k in zip(self.ranges, self.samples)
        )

    def points(self) -> np.ndarray:
        """Точки среза в порядке строк: первая ось внешняя."""
        first, second = self.axis_values()
        grid_1, grid_2 = np.meshgrid(first, second, indexing="ij")
        points = np.tile(self.fixed, (grid_1.size, 1))
        points[:, self.axes[0]] = grid_1.ravel()
        points[:, self.axes[1]] = grid_2.ravel()
        return points
