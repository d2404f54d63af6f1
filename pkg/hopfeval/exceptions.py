# -*- coding: utf-8 -*-
"""Иерархия исключений пакета.

Каждое исключение наследует и от HopfError, и от встроенного типа, который
оно уточняет, поэтому вызывающий код может ловить привычные ValueError /
RuntimeError.
"""

from typing import Optional


class HopfError(Exception):
    """Базовое исключение пакета."""


class SpecValidationError(HopfError, ValueError):
    """Описание гамильтониана, начальных данных или множества некорректно."""


class DimensionMismatchError(HopfError, ValueError):
    """Размерность вектора не совпадает с размерностью описания."""


class UnsupportedVariantError(HopfError, ValueError):
    """Вариант (или их комбинация) не поддерживается операцией."""


class ZeroInputError(HopfError, ValueError):
    """Операция не определена в нуле."""


class NondifferentiableError(HopfError, ValueError):
    """Функция недифференцируема в точке: субградиент не единственен."""


class NonuniqueControlError(NondifferentiableError):
    """Оптимальное управление не единственно."""


class MultivaluedError(HopfError, ValueError):
    """Оператор многозначен в данной точке."""


class NonconvergenceError(HopfError, RuntimeError):
    """Внутренний итерационный метод не сошёлся за отведённое число шагов."""


class InvalidQueryError(HopfError, ValueError):
    """Запрос вне области применимости (например, внутренняя точка)."""


class BracketError(HopfError, RuntimeError):
    """Не удалось построить отрезок локализации корня."""


class GridTooCoarseError(HopfError, RuntimeError):
    """Лучшая точка перебора лежит на границе сетки."""


class ProblemFileError(HopfError, ValueError):
    """Ошибка разбора файла задачи с указанием поля и строки."""

    def __init__(
        self, message: str, field: Optional[str] = None, line: Optional[int] = None
    ):
        self.field = field
        self.line = line
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class ExportError(HopfError, OSError):
    """Не удалось записать результаты."""
