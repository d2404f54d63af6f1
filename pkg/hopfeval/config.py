# -*- coding: utf-8 -*-
import os

from dotenv import load_dotenv

# Загружаем переменные из .env файла
load_dotenv()

# Настройки логирования
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

# Настройки split Bregman (значения по умолчанию для SolverConfig)
SOLVER_LAMBDA = float(os.getenv("SOLVER_LAMBDA", 1.0))
SOLVER_TOL = float(os.getenv("SOLVER_TOL", 1e-8))
SOLVER_MAX_ITERS = int(os.getenv("SOLVER_MAX_ITERS", 10000))
# Сверхрелаксация (1 отключает) и балансировка невязок подстройкой λ
SOLVER_RELAXATION = float(os.getenv("SOLVER_RELAXATION", 1.6))
SOLVER_BALANCE_ITERS = int(os.getenv("SOLVER_BALANCE_ITERS", 1000))
SOLVER_BALANCE_RATIO = float(os.getenv("SOLVER_BALANCE_RATIO", 10.0))
SOLVER_BALANCE_FACTOR = float(os.getenv("SOLVER_BALANCE_FACTOR", 2.0))

# Проекция на эллипсоид: Ньютон по множителю Лагранжа
ELLIPSOID_NEWTON_TOL = float(os.getenv("ELLIPSOID_NEWTON_TOL", 1e-8))
ELLIPSOID_NEWTON_MAX_ITERS = int(os.getenv("ELLIPSOID_NEWTON_MAX_ITERS", 200))

# Проксимальный оператор гладкой функции методом Ньютона
PROX_NEWTON_TOL = float(os.getenv("PROX_NEWTON_TOL", 1e-10))
PROX_NEWTON_STEP_TOL = float(os.getenv("PROX_NEWTON_STEP_TOL", 1e-12))
PROX_NEWTON_MAX_ITERS = int(os.getenv("PROX_NEWTON_MAX_ITERS", 100))
PROX_NEWTON_MAX_HALVINGS = int(os.getenv("PROX_NEWTON_MAX_HALVINGS", 30))

# Поиск ближайшей точки (Ньютон по времени s)
BOUNDARY_TOL = float(os.getenv("BOUNDARY_TOL", 1e-6))
BOUNDARY_NEWTON_MAX_ITERS = int(os.getenv("BOUNDARY_NEWTON_MAX_ITERS", 100))
BRACKET_GROWTH_CAP = int(os.getenv("BRACKET_GROWTH_CAP", 60))
TIE_TOL = float(os.getenv("TIE_TOL", 1e-9))

# Показатели m для функций уровня L (прямая сторона) и L* (двойственная)
PRIMAL_EXPONENT = float(os.getenv("PRIMAL_EXPONENT", 2.0))
DUAL_EXPONENT = float(os.getenv("DUAL_EXPONENT", 0.75))

# Настройки бенчмарка и срезов
BENCH_SEED = int(os.getenv("BENCH_SEED", 2016))
BENCH_SAMPLES = int(os.getenv("BENCH_SAMPLES", 100000))
WORKERS = int(os.getenv("WORKERS", 1))
SLICE_SAMPLES = int(os.getenv("SLICE_SAMPLES", 100))
SLICE_RANGE = os.getenv("SLICE_RANGE", "-20,20")
