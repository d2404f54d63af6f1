# -*- coding: utf-8 -*-
"""Чтение файлов задач (JSON).

Файл задаёт размерность, гамильтониан, начальные данные, множество для
поиска ближайшей точки и переопределения параметров решателя. Векторные
поля принимают список, число (заполнение всей размерности) или имя
пресета ("ones", "D"). Пресеты зависят от размерности, поэтому описания
строятся заново для каждого n (см. ProblemFile.build).
"""

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from .exceptions import HopfError, ProblemFileError
from .models import (
    DiagQuadratic,
    Ellipsoid,
    EllipsoidLevel,
    HalfSqL1,
    HalfSqL2,
    HalfSqLinf,
    L1Norm,
    L2Norm,
    LinfNorm,
    MinHamiltonian,
    MinInitial,
    NormA,
    PNormBall,
    QuadOverNorm,
    ShiftedQuadratic,
    SolverConfig,
    SpectralMatrix,
    UnionOf,
)
from .core.problem_spec import preset_a, preset_d

logger = logging.getLogger(__name__)

# Короткие имена гамильтонианов (используются в bench --hamiltonians)
HAMILTONIAN_NAMES = ("l1", "l2", "linf", "D", "A")

SOLVER_KEYS = {
    "lambda": "lam",
    "tol": "tol",
    "max_iters": "max_iters",
    "relaxation": "relaxation",
    "balance_iters": "balance_iters",
}


@dataclass(frozen=True, eq=False)
class Problem:
    dimension: int
    hamiltonian: Any = None
    initial: Any = None
    shape: Any = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    slice: Dict[str, Any] = field(default_factory=dict)
    bench: Dict[str, Any] = field(default_factory=dict)


class _Reader:
    """Строит описания из разобранного JSON, помня исходный текст для номеров строк."""

    def __init__(self, text: str, dimension: int):
        self.text = text
        self.n = dimension

    def line_of(self, key: str) -> Optional[int]:
        match = re.search(r'"' + re.escape(key) + r'"\s*:', self.text)
        if match is None:
            return None
        return self.text.count("\n", 0, match.start()) + 1

    def fail(self, message: str, key: str):
        raise ProblemFileError(message, field=key, line=self.line_of(key))

    def require(self, node: dict, key: str):
        if not isinstance(node, dict):
            self.fail(f"expected an object containing '{key}'", key)
        if key not in node:
            self.fail("missing required field", key)
        return node[key]

    def vector(self, value, key: str) -> np.ndarray:
        if isinstance(value, str):
            if value == "ones":
                return np.ones(self.n)
            if value == "D":
                return preset_d(self.n)
            self.fail(f"unknown vector preset '{value}' (expected 'ones' or 'D')", key)
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return np.full(self.n, float(value))
        if isinstance(value, list):
            arr = np.array(value, dtype=float)
            if arr.shape != (self.n,):
                self.fail(f"expected {self.n} numbers, got shape {arr.shape}", key)
            return arr
        self.fail(f"expected a list, a number or a preset name, got {value!r}", key)

    def spectral(self, node: dict, key: str) -> SpectralMatrix:
        scale = float(node.get("scale", 1.0))
        if "preset" in node:
            preset = node["preset"]
            if preset == "D":
                spectral = SpectralMatrix.diagonal(preset_d(self.n))
            elif preset == "A":
                spectral = preset_a(self.n)
            elif preset == "I":
                spectral = SpectralMatrix.diagonal(np.ones(self.n))
            else:
                self.fail(f"unknown matrix preset '{preset}' (expected 'D', 'A' or 'I')", "preset")
        elif "matrix" in node:
            spectral = SpectralMatrix.from_matrix(node["matrix"])
        elif "eigenvalues" in node:
            spectral = SpectralMatrix(
                self.vector(node["eigenvalues"], "eigenvalues"), node.get("orthogonal_factor")
            )
        elif "diagonal" in node:
            spectral = SpectralMatrix.diagonal(self.vector(node["diagonal"], "diagonal"))
        else:
            self.fail("expected one of 'preset', 'matrix', 'eigenvalues', 'diagonal'", key)
        if spectral.dimension != self.n:
            self.fail(f"matrix has dimension {spectral.dimension}, expected {self.n}", key)
        return spectral.scaled(scale) if scale != 1.0 else spectral

    def members(self, node: dict, key: str, build):
        members = self.require(node, "members")
        if not isinstance(members, list) or not members:
            self.fail("expected a nonempty list", "members")
        return [build(member, key) for member in members]

    def hamiltonian(self, node, key: str = "hamiltonian"):
        if isinstance(node, str):
            return hamiltonian_from_name(node, self.n)
        kind = self.require(node, "kind")
        if kind == "l1":
            return L1Norm()
        if kind == "l2":
            return L2Norm()
        if kind == "linf":
            return LinfNorm()
        if kind == "norm_a":
            return NormA(self.spectral(node, key))
        if kind == "min":
            return MinHamiltonian(self.members(node, key, self.hamiltonian))
        self.fail(f"unknown Hamiltonian kind '{kind}'", "kind")

    def initial(self, node, key: str = "initial"):
        kind = self.require(node, "kind")
        if kind == "half_sq_l2":
            return HalfSqL2()
        if kind == "half_sq_l1":
            return HalfSqL1()
        if kind == "half_sq_linf":
            return HalfSqLinf()
        if kind == "diag_quadratic":
            weights = node.get("inverse_weights", node.get("preset"))
            if weights is None:
                self.fail("expected 'inverse_weights' or 'preset'", key)
            return DiagQuadratic(self.vector(weights, "inverse_weights"))
        if kind == "ellipsoid_level":
            return EllipsoidLevel(self.vector(self.require(node, "semi_axes"), "semi_axes"))
        if kind == "shifted_quadratic":
            shift = self.vector(self.require(node, "shift"), "shift")
            return ShiftedQuadratic(shift, int(node.get("sign", 1)))
        if kind == "min":
            return MinInitial(self.members(node, key, self.initial))
        self.fail(f"unknown initial data kind '{kind}'", "kind")

    def center(self, node: dict):
        if "center" not in node:
            return None
        return self.vector(node["center"], "center")

    def shape(self, node, key: str = "shape"):
        kind = self.require(node, "kind")
        if kind == "p_norm_ball":
            return PNormBall(
                float(self.require(node, "p")), float(node.get("radius", 1.0)), self.center(node)
            )
        if kind == "ellipsoid":
            return Ellipsoid(
                self.vector(self.require(node, "semi_axes"), "semi_axes"),
                node.get("orthogonal_factor"),
                self.center(node),
            )
        if kind == "quad_over_norm":
            return QuadOverNorm(
                self.spectral(node, key), float(node.get("exponent", 2.0)), self.center(node)
            )
        if kind == "union":
            return UnionOf(self.members(node, key, self.shape))
        self.fail(f"unknown shape kind '{kind}'", "kind")

    def solver(self, node) -> SolverConfig:
        if not isinstance(node, dict):
            self.fail("expected an object", "solver")
        unknown = set(node) - set(SOLVER_KEYS)
        if unknown:
            self.fail(f"unknown solver keys {sorted(unknown)}", sorted(unknown)[0])
        changes = {SOLVER_KEYS[key]: value for key, value in node.items()}
        for key in ("max_iters", "balance_iters"):
            if key in changes:
                changes[key] = int(changes[key])
        return SolverConfig().replace(**changes)


def hamiltonian_from_name(name: str, dimension: int):
    """l1 | l2 | linf | D | A → описание гамильтониана размерности dimension."""
    if name == "l1":
        return L1Norm()
    if name == "l2":
        return L2Norm()
    if name == "linf":
        return LinfNorm()
    if name == "D":
        return NormA(SpectralMatrix.diagonal(preset_d(dimension)))
    if name == "A":
        return NormA(preset_a(dimension))
    raise ProblemFileError(
        f"unknown Hamiltonian name '{name}' (expected one of {', '.join(HAMILTONIAN_NAMES)})",
        field="hamiltonian",
    )


@dataclass(frozen=True, eq=False)
class ProblemFile:
    """Разобранный JSON; описания строятся методом build для выбранной размерности."""

    text: str
    data: Dict[str, Any]
    source: str = "<string>"

    @property
    def dimension(self) -> Optional[int]:
        return self.data.get("dimension")

    def build(self, dimension: Optional[int] = None) -> Problem:
        n = dimension if dimension is not None else self.dimension
        if n is None:
            raise ProblemFileError("dimension is not given", field="dimension")
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ProblemFileError(
                f"dimension must be a positive integer, got {n!r}",
                field="dimension",
                line=_Reader(self.text, 1).line_of("dimension"),
            )
        reader = _Reader(self.text, n)
        data = self.data
        try:
            return Problem(
                dimension=n,
                hamiltonian=reader.hamiltonian(data["hamiltonian"]) if "hamiltonian" in data else None,
                initial=reader.initial(data["initial"]) if "initial" in data else None,
                shape=reader.shape(data["shape"]) if "shape" in data else None,
                solver=reader.solver(data.get("solver", {})),
                slice=dict(data.get("slice", {})),
                bench=dict(data.get("bench", {})),
            )
        except ProblemFileError:
            raise
        except (HopfError, TypeError, ValueError) as e:
            logger.debug(f"Problem file {self.source} rejected: {e}")
            raise ProblemFileError(f"{self.source}: {e}") from e


def parse_problem(text: str, source: str = "<string>") -> ProblemFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemFileError(f"{source}: invalid JSON: {e.msg}", line=e.lineno) from e
    if not isinstance(data, dict):
        raise ProblemFileError(f"{source}: top level must be an object", line=1)
    return ProblemFile(text=text, data=data, source=source)


def load_problem(path) -> ProblemFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ProblemFileError(f"cannot read problem file {path}: {e}") from e
    logger.debug(f"Loaded problem file {path}")
    return parse_problem(text, source=str(path))
