# -*- coding: utf-8 -*-
import numpy as np
import pytest
from scipy.optimize import brentq, minimize_scalar

from hopfeval.core.level_sets import NormPower
from hopfeval.core.problem_spec import eval_initial, preset_a
from hopfeval.core.prox_ops import (
    conjugate_newton,
    huber,
    moreau_complement,
    project_ellipsoid,
    project_l1_ball,
    prox_half_l1_sq,
    prox_half_linf_sq,
    prox_linf,
    prox_norm_A,
    prox_quadratic,
    prox_smooth_newton,
    shrink1,
    shrink2,
    stretch1,
    stretch2,
)
from hopfeval.exceptions import MultivaluedError, NonconvergenceError
from hopfeval.models import HalfSqL1, HalfSqLinf, SpectralMatrix


def _random_rotation(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


class Quadratic:
    """½‖y‖² как гладкая функция."""

    def value(self, y):
        return 0.5 * y @ y

    def gradient(self, y):
        return y.copy()

    def hessian(self, y):
        return np.eye(y.size)


@pytest.mark.parametrize(
    "z, alpha, expected",
    [
        ([3, -0.5, -2], 1.0, [2, 0, -1]),
        ([3, -0.5, -2], 0.0, [3, -0.5, -2]),
        ([0.3, -0.2], 0.5, [0, 0]),
    ],
)
def test_shrink1(z, alpha, expected):
    np.testing.assert_allclose(shrink1(np.array(z, dtype=float), alpha), expected)


@pytest.mark.parametrize(
    "z, alpha, expected",
    [
        ([3, 4], 2.0, [1.8, 2.4]),
        ([0, 0], 5.0, [0, 0]),
        ([1, 0], 2.0, [0, 0]),
    ],
)
def test_shrink2(z, alpha, expected):
    np.testing.assert_allclose(shrink2(np.array(z, dtype=float), alpha), expected)


def test_shrink2_matches_scalar_search():
    z = np.array([3.0, 4.0])
    alpha = 2.0
    direction = z / np.linalg.norm(z)
    best = minimize_scalar(
        lambda r: alpha * abs(r) + 0.5 * np.sum((r * direction - z) ** 2), bounds=(0, 10), method="bounded"
    )
    np.testing.assert_allclose(shrink2(z, alpha), best.x * direction, atol=1e-5)


def test_huber():
    assert huber(np.array([0.3, 0.4]), 1.0) == pytest.approx(0.125)
    assert huber(np.array([3.0, 4.0]), 2.0) == pytest.approx(8.0)
    # значение совпадает с min_y ½‖y − z‖² + α‖y‖ в точке shrink2
    z = np.array([3.0, 4.0])
    y = shrink2(z, 2.0)
    assert huber(z, 2.0) == pytest.approx(0.5 * np.sum((y - z) ** 2) + 2.0 * np.linalg.norm(y))


@pytest.mark.parametrize(
    "z, alpha, weights, expected",
    [
        ([2, 2], 1.0, [1, 3], [1, 0.5]),
        ([1, 1], 1.0, [1, 1], [0.5, 0.5]),
        ([5, -3], 0.0, [1, 3], [5, -3]),
    ],
)
def test_prox_quadratic(z, alpha, weights, expected):
    result = prox_quadratic(np.array(z, dtype=float), alpha, np.array(weights, dtype=float))
    np.testing.assert_allclose(result, expected)


def test_prox_quadratic_rotated(rng):
    n = 4
    p = _random_rotation(rng, n)
    weights = rng.uniform(0.5, 2.0, n)
    z = rng.standard_normal(n)
    a = (p * weights) @ p.T
    expected = np.linalg.solve(np.eye(n) + 0.7 * a, z)
    np.testing.assert_allclose(prox_quadratic(z, 0.7, weights, p), expected, atol=1e-12)


@pytest.mark.parametrize(
    "z, alpha, point, multiplier",
    [
        ([3, 1], 2.0, [2, 0], 1.0),
        ([0.5, 0.5], 2.0, [0.5, 0.5], 0.0),
        ([-3, 0, 0], 1.0, [-1, 0, 0], 2.0),
    ],
)
def test_project_l1_ball(z, alpha, point, multiplier):
    result = project_l1_ball(np.array(z, dtype=float), alpha)
    np.testing.assert_allclose(result.point, point)
    assert result.multiplier == pytest.approx(multiplier)


def test_project_l1_ball_multiplier_equation(rng):
    """‖shrink1(z, μ̄)‖₁ = α на внешних точках."""
    for _ in range(1000):
        n = int(rng.integers(1, 10))
        z = rng.uniform(-10, 10, n)
        alpha = rng.uniform(0.01, 0.99) * np.sum(np.abs(z))
        result = project_l1_ball(z, alpha)
        assert np.sum(np.abs(result.point)) == pytest.approx(alpha, abs=1e-8)
        np.testing.assert_allclose(result.point, shrink1(z, result.multiplier), atol=1e-12)


def test_project_l1_ball_repeated_magnitudes():
    result = project_l1_ball(np.array([2.0, -2.0, 2.0, 0.5]), 3.0)
    np.testing.assert_allclose(result.point, [1.0, -1.0, 1.0, 0.0])
    assert result.multiplier == pytest.approx(1.0)


@pytest.mark.parametrize(
    "z, alpha, expected",
    [
        ([3, 1], 2.0, [1, 1]),
        ([0.5, -0.5], 2.0, [0, 0]),
        ([4, 0], 1.0, [3, 0]),
    ],
)
def test_prox_linf(z, alpha, expected):
    np.testing.assert_allclose(prox_linf(np.array(z, dtype=float), alpha), expected, atol=1e-14)


@pytest.mark.parametrize(
    "w, semi_axes, point, multiplier",
    [
        ([0, 3], [1, 2], [0, 2], 2.0),
        ([2, 0], [1, 1], [1, 0], 1.0),
        ([0.1, 0.1], [1, 2], [0.1, 0.1], 0.0),
    ],
)
def test_project_ellipsoid(w, semi_axes, point, multiplier):
    result = project_ellipsoid(np.array(w, dtype=float), np.array(semi_axes, dtype=float))
    np.testing.assert_allclose(result.point, point, atol=1e-8)
    assert result.multiplier == pytest.approx(multiplier, abs=1e-8)


def test_project_ellipsoid_multiplier_equation(rng):
    """Σ d_i²u_i²/(d_i² + μ)² = 1 и точка лежит на границе."""
    for _ in range(1000):
        n = int(rng.integers(1, 8))
        d = rng.uniform(0.5, 3.0, n)
        w = rng.uniform(-10, 10, n)
        if np.sum((w / d) ** 2) <= 1.0:
            continue
        result = project_ellipsoid(w, d)
        mu = result.multiplier
        assert np.sum(d**2 * w**2 / (d**2 + mu) ** 2) == pytest.approx(1.0, abs=1e-8)
        assert np.sum((result.point / d) ** 2) == pytest.approx(1.0, abs=1e-8)


def test_project_ellipsoid_rotated(rng):
    n = 3
    p = _random_rotation(rng, n)
    d = np.array([1.0, 2.0, 0.5])
    w = np.array([4.0, -1.0, 2.0])
    result = project_ellipsoid(w, d, p)
    u = result.point @ p
    assert np.sum((u / d) ** 2) == pytest.approx(1.0, abs=1e-8)
    # нормаль в точке проекции сонаправлена w − π(w)
    normal = p @ (u / d**2)
    residual = w - result.point
    cosine = normal @ residual / (np.linalg.norm(normal) * np.linalg.norm(residual))
    assert cosine == pytest.approx(1.0, abs=1e-8)


def test_project_ellipsoid_nonconvergence():
    with pytest.raises(NonconvergenceError):
        project_ellipsoid(np.array([0.0, 3.0]), np.array([1.0, 2.0]), max_iters=1)


@pytest.mark.parametrize(
    "eigenvalues, z, alpha, expected",
    [
        ([1, 1], [3, 4], 2.0, [1.2, 1.6]),
        ([4, 1], [10, 0], 1.0, [8, 0]),
        ([4, 1], [1, 0.5], 1.0, [0, 0]),
    ],
)
def test_prox_norm_A(eigenvalues, z, alpha, expected):
    spectral = SpectralMatrix.diagonal(np.array(eigenvalues, dtype=float))
    result = prox_norm_A(np.array(z, dtype=float), alpha, spectral)
    np.testing.assert_allclose(result, expected, atol=1e-8)


@pytest.mark.parametrize(
    "z, alpha, point, beta",
    [
        ([3, 1], 1.0, [1.5, 0], 1.5),
        ([2], 1.0, [1], 1.0),
        ([0, 0], 1.0, [0, 0], 0.0),
    ],
)
def test_prox_half_l1_sq(z, alpha, point, beta):
    result = prox_half_l1_sq(np.array(z, dtype=float), alpha)
    np.testing.assert_allclose(result.point, point)
    assert result.multiplier == pytest.approx(beta)


def test_prox_half_l1_sq_optimality(rng):
    """Точка минимизирует α½‖w‖₁² + ½‖w − z‖² среди возмущений."""
    J = HalfSqL1()
    for _ in range(50):
        z = rng.uniform(-5, 5, 6)
        alpha = rng.uniform(0.1, 5.0)
        w = prox_half_l1_sq(z, alpha).point
        best = alpha * eval_initial(J, w) + 0.5 * np.sum((w - z) ** 2)
        trial = w + 1e-3 * rng.standard_normal((200, 6))
        values = alpha * eval_initial(J, trial) + 0.5 * np.sum((trial - z) ** 2, axis=-1)
        assert np.all(values >= best - 1e-12)


@pytest.mark.parametrize(
    "z, alpha, expected",
    [
        ([3, 1], 1.0, [1.5, 1]),
        ([0, 0], 2.0, [0, 0]),
        ([2], 1.0, [1]),
    ],
)
def test_prox_half_linf_sq(z, alpha, expected):
    np.testing.assert_allclose(prox_half_linf_sq(np.array(z, dtype=float), alpha), expected)


def test_prox_half_linf_sq_optimality(rng):
    J = HalfSqLinf()
    for alpha in (0.1, 1.0, 10.0):
        z = rng.uniform(-5, 5, 5)
        w = prox_half_linf_sq(z, alpha)
        best = alpha * eval_initial(J, w) + 0.5 * np.sum((w - z) ** 2)
        trial = w + 1e-3 * rng.standard_normal((500, 5))
        values = alpha * eval_initial(J, trial) + 0.5 * np.sum((trial - z) ** 2, axis=-1)
        assert np.all(values >= best - 1e-12)


def test_moreau_identity(rng):
    """prox_{α∂f}(z) + α·prox_{(1/α)∂f*}(z/α) = z для сопряжённых пар."""
    pairs = [
        (shrink1, lambda w, beta: np.clip(w, -1.0, 1.0)),
        (prox_linf, lambda w, beta: project_l1_ball(w, 1.0).point),
        (lambda w, a: prox_half_l1_sq(w, a).point, prox_half_linf_sq),
    ]
    for _ in range(1000):
        z = rng.uniform(-10, 10, int(rng.integers(1, 8)))
        alpha = float(10.0 ** rng.uniform(-1, 1))
        for prox_f, prox_conj in pairs:
            reconstructed = prox_f(z, alpha) + alpha * prox_conj(z / alpha, 1.0 / alpha)
            np.testing.assert_allclose(reconstructed, z, atol=1e-8)


@pytest.mark.parametrize("n", [2, 5, 8])
def test_moreau_identity_norm_a(n, rng):
    """‖·‖_A и проекция на E_A = {y : ⟨y, A⁻¹y⟩ ≤ 1} при недиагональной A."""
    q = _random_rotation(rng, n)
    spectral = SpectralMatrix.from_matrix((q * rng.uniform(0.5, 3.0, n)) @ q.T)
    assert spectral.orthogonal_factor is not None
    semi_axes = np.sqrt(spectral.eigenvalues)
    a_inv = np.linalg.inv(spectral.matrix())
    for _ in range(200):
        z = rng.uniform(-10, 10, n)
        alpha = float(10.0 ** rng.uniform(-1, 1))
        projected = project_ellipsoid(z / alpha, semi_axes, spectral.orthogonal_factor).point
        assert projected @ a_inv @ projected <= 1.0 + 1e-9
        reconstructed = prox_norm_A(z, alpha, spectral) + alpha * projected
        np.testing.assert_allclose(reconstructed, z, atol=1e-8)


@pytest.mark.parametrize(
    "prox_conj, z, alpha, expected",
    [
        (lambda w, beta: np.clip(w, -1.0, 1.0), [3, -0.5, -2], 1.0, [2, 0, -1]),
        (lambda w, beta: w / (1.0 + beta), [2, -4], 1.0, [1, -2]),
        (lambda w, beta: np.zeros_like(w), [2, -4], 3.0, [2, -4]),
    ],
)
def test_moreau_complement(prox_conj, z, alpha, expected):
    np.testing.assert_allclose(moreau_complement(prox_conj, np.array(z, dtype=float), alpha), expected)


def test_prox_smooth_newton_quadratic():
    result = prox_smooth_newton(Quadratic(), np.array([2.0, 2.0]), 1.0)
    np.testing.assert_allclose(result.point, [1.0, 1.0])
    assert result.newton_iters <= 2


def test_prox_smooth_newton_quartic_level():
    """L = ¼(‖y‖⁴ − 1): на оси решается w + w³ = 2."""
    f = NormPower(2.0, 4.0, 1.0, 0.25, -0.25)
    result = prox_smooth_newton(f, np.array([2.0, 0.0]), 1.0)
    root = brentq(lambda w: w + w**3 - 2.0, 0.0, 2.0)
    np.testing.assert_allclose(result.point, [root, 0.0], atol=1e-9)


def test_prox_smooth_newton_stationary_point():
    result = prox_smooth_newton(Quadratic(), np.zeros(3), 5.0)
    np.testing.assert_array_equal(result.point, np.zeros(3))
    assert result.newton_iters == 0


def test_prox_smooth_newton_nonconvergence():
    f = NormPower(2.0, 4.0, 1.0, 0.25, -0.25)
    with pytest.raises(NonconvergenceError):
        prox_smooth_newton(f, np.array([2.0, 0.0]), 1.0, max_iters=1)


def test_conjugate_newton_matches_closed_form(rng):
    f = NormPower(4.0, 4.0, 1.0, 0.25, -0.25)
    conjugate = f.conjugate_function()
    for _ in range(10):
        v = rng.uniform(-3, 3, 3)
        value, y = conjugate_newton(f, v)
        assert value == pytest.approx(conjugate.value(v), rel=1e-9, abs=1e-9)
        np.testing.assert_allclose(f.gradient(y), v, atol=1e-9)


@pytest.mark.parametrize(
    "z, alpha, expected",
    [
        ([2, 0, -1], 1.0, [3, 0, -2]),
        ([2, 0, -1], 0.0, [2, 0, -1]),
        ([-0.5], 2.0, [-2.5]),
    ],
)
def test_stretch1(z, alpha, expected):
    np.testing.assert_allclose(stretch1(np.array(z, dtype=float), alpha), expected)


@pytest.mark.parametrize(
    "z, alpha, expected",
    [
        ([3, 4], 5.0, [6, 8]),
        ([3, 4], 0.0, [3, 4]),
        ([1, 0], 1.0, [2, 0]),
    ],
)
def test_stretch2(z, alpha, expected):
    np.testing.assert_allclose(stretch2(np.array(z, dtype=float), alpha), expected)


def test_stretch2_at_origin():
    with pytest.raises(MultivaluedError):
        stretch2(np.zeros(2), 1.0)


def test_prox_inputs_are_not_modified():
    z = np.array([3.0, -1.0, 0.5])
    z.setflags(write=False)
    shrink1(z, 1.0)
    shrink2(z, 1.0)
    prox_linf(z, 1.0)
    prox_half_l1_sq(z, 1.0)
    prox_half_linf_sq(z, 1.0)
    project_ellipsoid(z, np.ones(3))
    prox_smooth_newton(Quadratic(), z, 1.0)


def _quad_form(w, matrix):
    return np.einsum("...i,ij,...j->...", w, matrix, w)


def _indicator(inside):
    return np.where(inside, 0.0, np.inf)


def _l1(w):
    return np.sum(np.abs(w), axis=-1)


def _linf(w):
    return np.max(np.abs(w), axis=-1)


def _kernels(n):
    """Ядро prox(z, α) и его штраф α·f(w) на пакете (..., n)."""
    spectral = preset_a(n)
    a = spectral.matrix()
    a_inv = np.linalg.inv(a)
    semi_axes = np.sqrt(spectral.eigenvalues)
    quartic = NormPower(2.0, 4.0, 1.0, 0.25, -0.25)
    return {
        "shrink1": (shrink1, lambda w, al: al * _l1(w)),
        "shrink2": (shrink2, lambda w, al: al * np.linalg.norm(w, axis=-1)),
        "prox_linf": (prox_linf, lambda w, al: al * _linf(w)),
        "prox_half_l1_sq": (
            lambda z, al: prox_half_l1_sq(z, al).point,
            lambda w, al: 0.5 * al * _l1(w) ** 2,
        ),
        "prox_half_linf_sq": (prox_half_linf_sq, lambda w, al: 0.5 * al * _linf(w) ** 2),
        "prox_quadratic": (
            lambda z, al: prox_quadratic(z, al, spectral.eigenvalues, spectral.orthogonal_factor),
            lambda w, al: 0.5 * al * _quad_form(w, a),
        ),
        "prox_norm_A": (
            lambda z, al: prox_norm_A(z, al, spectral),
            lambda w, al: al * np.sqrt(_quad_form(w, a)),
        ),
        "project_l1_ball": (
            lambda z, al: project_l1_ball(z, al).point,
            lambda w, al: _indicator(_l1(w) <= al * (1 + 1e-12)),
        ),
        "project_ellipsoid": (
            lambda z, al: project_ellipsoid(z, al * semi_axes, spectral.orthogonal_factor).point,
            lambda w, al: _indicator(_quad_form(w, a_inv) <= al**2 * (1 + 1e-9)),
        ),
        "moreau_complement": (
            lambda z, al: moreau_complement(lambda w, beta: w / max(1.0, np.linalg.norm(w)), z, al),
            lambda w, al: al * np.linalg.norm(w, axis=-1),
        ),
        "prox_smooth_newton": (
            lambda z, al: prox_smooth_newton(quartic, z, al).point,
            lambda w, al: al * quartic.value(w),
        ),
    }


KERNEL_NAMES = sorted(_kernels(2))


def _grid_argmin(objective):
    """Перебор по сетке на плоскости с измельчением шага до 1e-6 вокруг лучшего узла."""
    center = np.zeros(2)
    for step, half in ((1e-2, 5.0), (1e-3, 0.1), (1e-4, 1e-2), (1e-5, 1e-3), (1e-6, 1e-4)):
        axis = np.arange(-half, half + step / 2, step)
        grid = center + np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)
        center = grid[np.argmin(objective(grid))]
    return center


@pytest.mark.parametrize("name", KERNEL_NAMES)
def test_prox_matches_grid_minimizer(name, rng):
    prox, penalty = _kernels(2)[name]
    for alpha in (0.5, 1.5):
        z = rng.uniform(-2, 2, 2)

        def objective(w):
            return penalty(w, alpha) + 0.5 * np.sum((w - z) ** 2, axis=-1)

        point = prox(z, alpha)
        reference = _grid_argmin(objective)
        np.testing.assert_allclose(point, reference, atol=1e-4)
        assert objective(point) <= objective(reference) + 1e-9


@pytest.mark.parametrize("name", KERNEL_NAMES)
def test_prox_first_order_optimality(name, rng):
    """z − w ∈ α∂f(w): α·f(y) ≥ α·f(w) + ⟨z − w, y − w⟩ для любых y."""
    n = 5
    prox, penalty = _kernels(n)[name]
    for alpha in (0.1, 1.0, 10.0):
        z = rng.uniform(-5, 5, n)
        w = prox(z, alpha)
        assert np.isfinite(penalty(w, alpha))
        near = w + 10.0 ** rng.uniform(-6, 0, (300, 1)) * rng.standard_normal((300, n))
        far = rng.uniform(-10, 10, (300, n))
        for y in (near, far):
            slack = penalty(y, alpha) - penalty(w, alpha) - (y - w) @ (z - w)
            assert np.all(slack >= -1e-8 * (1.0 + np.abs(penalty(w, alpha))))


@pytest.mark.parametrize("name", KERNEL_NAMES)
def test_prox_is_firmly_nonexpansive(name, rng):
    n = 5
    prox, _ = _kernels(n)[name]
    for alpha in (0.1, 1.0, 10.0):
        for _ in range(50):
            a = rng.uniform(-5, 5, n)
            b = a + 10.0 ** rng.uniform(-3, 1) * rng.standard_normal(n)
            diff = prox(a, alpha) - prox(b, alpha)
            assert np.linalg.norm(diff) <= np.linalg.norm(a - b) + 1e-9
            assert diff @ diff <= diff @ (a - b) + 1e-8
