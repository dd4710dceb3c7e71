import numpy as np
import pytest
from numpy.testing import assert_allclose

from rkcolloc import linalg
from rkcolloc.cardinal import gram, mgs_factor
from rkcolloc.diffmat import (
    apply_to_interpolant,
    build_diffmat,
    error_bound,
    iteration_spectrum,
    power_error,
)
from rkcolloc.errors import SmoothnessExceeded
from rkcolloc.kernel1d import build_base_kernel, kernel
from rkcolloc.tensor import (
    LinearOperator,
    TensorGrid,
    make_interior_grid,
    tensor_kernel,
)


def _factor_1d(m, n, precision=None):
    k = kernel(m, (0.0, 1.0), [(0.0, 0), (1.0, 0)])
    return mgs_factor(gram(k, make_interior_grid(k, n), precision=precision))


def _factor_2d(m, counts, precision=50):
    tk = tensor_kernel(m, [(0.0, 1.0)] * 2, [[(0.0, 0), (1.0, 0)]] * 2)
    grid = make_interior_grid(tk, counts)
    return mgs_factor(gram(tk, grid, precision=precision))


def _opk_direct(factor, op):
    # independent route: (op_1 K)(x_j, x_l) evaluated through the tensor
    # kernel API, then L = OPK A^{-1} via an LU solve on A^T
    nodes = factor.grid.nodes()
    opk = factor.kernel.apply(op, "first", nodes[:, None, :], nodes[None, :, :])
    return np.asarray(opk, dtype=float)


@pytest.mark.parametrize("orders", [(0,), (1,), (2,)])
def test_matrix_matches_gram_inverse_route_1d(orders):
    f = _factor_1d(3, 14)
    op = LinearOperator.derivative(orders)
    l = build_diffmat(f, op)
    opk = _opk_direct(f, op)
    ref = linalg.lu_solve(f.gram.matrix.T, opk.T).T
    denom = np.abs(ref).max()
    assert np.abs(l.matrix - ref).max() / denom < 1e-6


def test_matrix_matches_gram_inverse_route_2d():
    f = _factor_2d(3, (4, 4), precision=None)
    op = LinearOperator.laplacian(2)
    l = build_diffmat(f, op)
    opk = _opk_direct(f, op)
    ref = linalg.lu_solve(f.gram.matrix.T, opk.T).T
    assert np.abs(l.matrix - ref).max() / np.abs(ref).max() < 1e-6


def test_identity_matrix_is_identity():
    f = _factor_1d(2, 8)
    l = build_diffmat(f, LinearOperator.identity(1))
    assert np.abs(l.matrix - np.eye(8)).max() < 1e-8


def test_matrix_differentiates_subspace_functions():
    # a kernel translate centered on a grid node lies in the subspace, so
    # the matrix must reproduce its derivative exactly (up to conditioning)
    f = _factor_1d(4, 16)
    x = f.grid.nodes()[:, 0]
    center = 5
    vals = f.gram.matrix[:, center]
    l2 = build_diffmat(f, LinearOperator.derivative((2,)))
    k = f.kernel.factors[0]
    ref = k.eval(2, 0, x, np.full_like(x, x[center]))
    assert np.abs(l2 @ vals - ref).max() < 1e-6 * np.abs(ref).max()


def test_hp_matrix_retained():
    f = _factor_1d(5, 10, precision=40)
    l = build_diffmat(f, LinearOperator.derivative((2,)))
    assert l.hp is not None
    assert l.hp.dtype == object
    assert_allclose(np.asarray(l), np.array([[float(v) for v in row] for row in l.hp]),
                    rtol=1e-12, atol=1e-12)


def test_order_limit_enforced():
    f = _factor_1d(2, 6)  # 2m-2 = 2
    with pytest.raises(SmoothnessExceeded):
        build_diffmat(f, LinearOperator.derivative((3,)))


def test_dimension_mismatch():
    f = _factor_1d(3, 6)
    with pytest.raises(ValueError):
        build_diffmat(f, LinearOperator.laplacian(2))


def test_power_error_hand_value():
    # order-1 kernel K = 1 + min(x, y) at X = {0, 1}, identity operator:
    # eps(1/2)^2 = K(.5,.5) - k^T A^{-1} k = 1.5 - 1.25 = 0.25
    k = build_base_kernel(1, (0.0, 1.0))
    f = mgs_factor(gram(k, TensorGrid([np.array([0.0, 1.0])])))
    assert power_error(f, LinearOperator.identity(1), 0.5) == pytest.approx(0.5, abs=1e-12)


def test_power_error_vanishes_at_nodes():
    f = _factor_1d(3, 12, precision=30)
    eps = power_error(f, LinearOperator.identity(1), f.grid.nodes())
    assert np.max(eps) < 1e-10


def test_power_error_nonnegative_random_points():
    f = _factor_1d(3, 10)
    rng = np.random.default_rng(3)
    z = rng.uniform(0.0, 1.0, size=50)
    eps = power_error(f, LinearOperator.derivative((1,)), z)
    assert np.all(eps >= 0.0)
    # bounded by the operator's diagonal value
    diag = f.kernel.eval((1,), (1,), z.reshape(-1, 1), z.reshape(-1, 1), region="left")
    assert np.all(eps**2 <= np.asarray(diag, float) + 1e-9)


def test_power_error_decreases_under_refinement():
    z = np.array([0.3141, 0.5926, 0.7182])
    op = LinearOperator.identity(1)
    prev = None
    for n in (8, 16, 32):
        f = _factor_1d(3, n, precision=30)
        eps = power_error(f, op, z)
        if prev is not None:
            assert np.all(eps <= prev + 1e-12)
        prev = eps


def test_power_error_order_limit():
    f = _factor_1d(2, 6)  # 2m-2 = 2, so order 2 needs 2*2 = 4 > 2
    with pytest.raises(SmoothnessExceeded):
        power_error(f, LinearOperator.derivative((2,)), 0.5)


def test_apply_to_interpolant_identity_matches_interpolate():
    f = _factor_1d(3, 9)
    rng = np.random.default_rng(11)
    vals = rng.standard_normal(9)
    z = np.array([0.21, 0.55, 0.83])
    direct = f.interpolate(vals, z)
    via_op = apply_to_interpolant(f, LinearOperator.identity(1), vals, z)
    assert_allclose(via_op, direct, rtol=1e-12, atol=1e-12)


def test_apply_to_interpolant_derivative_at_nodes_matches_matrix():
    f = _factor_1d(3, 9)
    rng = np.random.default_rng(12)
    vals = rng.standard_normal(9)
    op = LinearOperator.derivative((1,))
    l = build_diffmat(f, op)
    at_nodes = apply_to_interpolant(f, op, vals, f.grid.nodes())
    assert_allclose(at_nodes, l @ vals, rtol=1e-7, atol=1e-9)


def test_error_bound_scales_estimate():
    assert error_bound(0.5, 2.0) == pytest.approx(1.0)
    assert_allclose(error_bound(np.array([0.1, 0.2]), 3.0), [0.3, 0.6])
    with pytest.raises(ValueError):
        error_bound(0.5, -1.0)


def test_iteration_spectrum_diagonal():
    lam = iteration_spectrum(np.diag([-1.0, -2.0]), 0.1)
    assert_allclose(sorted(lam.real), [0.8, 0.9], atol=1e-14)
    assert_allclose(lam.imag, 0.0, atol=1e-14)


def test_iteration_spectrum_small_dt_limit():
    f = _factor_1d(3, 8)
    l = build_diffmat(f, LinearOperator.derivative((2,)))
    lam = iteration_spectrum(l, 1e-12)
    assert np.abs(lam - 1.0).max() < 1e-6


def test_iteration_spectrum_rejects_bad_dt():
    with pytest.raises(ValueError):
        iteration_spectrum(np.eye(2), 0.0)
