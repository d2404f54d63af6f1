# -*- coding: utf-8 -*-
"""Запись срезов в CSV и изолинии методом marching squares."""

import logging
from pathlib import Path
from typing import List, Sequence

import numpy as np

logger = logging.getLogger(__name__)

SLICE_HEADER = "x1,x2,phi,grad_norm,converged"
CONTOUR_HEADER = "level,x_start,y_start,x_end,y_end"


def write_slice_csv(path, x1, x2, phi, grad_norm, converged) -> Path:
    """Одна строка на точку сетки, порядок строк сохраняется."""
    path = Path(path)
    table = np.column_stack(
        [x1, x2, phi, grad_norm, np.asarray(converged, dtype=float)]
    )
    np.savetxt(
        path,
        table,
        fmt=["%.17g", "%.17g", "%.17g", "%.17g", "%d"],
        delimiter=",",
        header=SLICE_HEADER,
        comments="",
        newline="\n",
        encoding="utf-8",
    )
    logger.info(f"Wrote {len(table)} rows to {path}")
    return path


def _crossing(values, xs, ys, a, b):
    """Точка пересечения уровня 0 с ребром (a, b) или None.

    Узел со значением 0 относится к неотрицательной стороне, так что
    изолиния, проходящая через узел, попадает в него точно (w = 0 или 1).
    """
    va = values[a]
    vb = values[b]
    if not (np.isfinite(va) and np.isfinite(vb)) or (va < 0) == (vb < 0):
        return None
    pa = np.array([xs[a[0]], ys[a[1]]])
    pb = np.array([xs[b[0]], ys[b[1]]])
    if vb == 0:
        return pb
    return pa + va / (va - vb) * (pb - pa)


def marching_squares(values: np.ndarray, xs: np.ndarray, ys: np.ndarray, level: float) -> List[np.ndarray]:
    """Отрезки изолинии values = level; values[i, j] задано в точке (xs[i], ys[j]).

    Возвращает список массивов 2×2 (начало, конец). В седловых ячейках
    (четыре пересечения) пересечения соединяются попарно по обходу.
    Отрезки нулевой длины (касание в узле) отбрасываются.
    """
    shifted = np.asarray(values, dtype=float) - level
    segments = []
    for i in range(shifted.shape[0] - 1):
        for j in range(shifted.shape[1] - 1):
            corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
            points = []
            for k in range(4):
                p = _crossing(shifted, xs, ys, corners[k], corners[(k + 1) % 4])
                if p is not None:
                    points.append(p)
            pairs = [points[:2], points[2:]] if len(points) == 4 else [points]
            for pair in pairs:
                if len(pair) == 2 and not np.array_equal(pair[0], pair[1]):
                    segments.append(np.array(pair))
    return segments


def contour_levels(values: np.ndarray, step: float) -> np.ndarray:
    """Кратные step внутри диапазона значений."""
    finite = np.asarray(values, dtype=float)
    finite = finite[np.isfinite(finite)]
    if finite.size == 0:
        return np.array([])
    lo = np.ceil(finite.min() / step)
    hi = np.floor(finite.max() / step)
    return np.arange(lo, hi + 1) * step


def write_contours_csv(path, values, xs, ys, levels: Sequence[float]) -> Path:
    path = Path(path)
    rows = []
    for level in levels:
        for segment in marching_squares(values, xs, ys, level):
            rows.append([level, *segment[0], *segment[1]])
    table = np.array(rows, dtype=float).reshape(-1, 5)
    np.savetxt(
        path,
        table,
        fmt="%.17g",
        delimiter=",",
        header=CONTOUR_HEADER,
        comments="",
        newline="\n",
        encoding="utf-8",
    )
    logger.info(f"Wrote {len(table)} contour segments to {path}")
    return path
