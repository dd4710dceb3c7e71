import math

import numpy as np
import pytest
import sympy as sp
from numpy.testing import assert_allclose

from rkcolloc.errors import Divergence
from rkcolloc.kernel1d import kernel
from rkcolloc.solver import (
    LinearBVP,
    SemidiscreteSystem,
    burgers_rhs_1d,
    euler_integrate,
    heat3d_rhs,
    homogenize_rhs,
    make_extension,
    polynomial_extension,
    solve_linear_bvp,
    zero_extension,
)
from rkcolloc.tensor import LinearOperator, tensor_kernel


x_sym, y_sym, t_sym = sp.symbols("x y t")


def test_zero_extension():
    h = zero_extension([(0.0, 1.0), (0.0, 1.0)])
    pts = np.array([[0.2, 0.3], [0.9, 0.1]])
    assert_allclose(h(pts, t=0.5), 0.0)
    assert_allclose(h.dt(pts, t=0.5), 0.0)


def test_endpoint_pair_blend():
    h = make_extension((2.0, 5.0), [(1.0, 3.0)], "linear-blend")
    assert h(np.array([1.0])) == pytest.approx(2.0)
    assert h(np.array([3.0])) == pytest.approx(5.0)
    assert h(np.array([2.0])) == pytest.approx(3.5)
    assert h.eval_deriv((1,), np.array([1.7])) == pytest.approx(1.5)


def test_blend_matches_trace_of_expression():
    g = sp.sin(x_sym)
    h = make_extension(g, [(0.0, 2.0)], "linear-blend", syms=(x_sym,))
    assert h(np.array([0.0])) == pytest.approx(0.0, abs=1e-15)
    assert h(np.array([2.0])) == pytest.approx(math.sin(2.0))
    # interior is the straight line between the endpoint traces
    assert h(np.array([1.0])) == pytest.approx(math.sin(2.0) / 2)


def test_multilinear_transfinite_reproduces_multilinear():
    q = 1 + 2 * x_sym + 3 * y_sym + 4 * x_sym * y_sym
    h = make_extension(q, [(0.0, 1.0), (0.0, 2.0)], "multilinear-transfinite",
                       syms=(x_sym, y_sym))
    rng = np.random.default_rng(0)
    pts = rng.uniform([0, 0], [1, 2], size=(20, 2))
    expect = 1 + 2 * pts[:, 0] + 3 * pts[:, 1] + 4 * pts[:, 0] * pts[:, 1]
    assert_allclose(h(pts), expect, rtol=1e-12)


def test_transfinite_matches_data_on_faces():
    g = sp.exp(x_sym) * sp.cos(y_sym)
    box = [(0.0, 1.0), (0.0, 1.0)]
    h = make_extension(g, box, "multilinear-transfinite", syms=(x_sym, y_sym))
    f = sp.lambdify((x_sym, y_sym), g, "numpy")
    s = np.linspace(0.0, 1.0, 17)
    for c in (0.0, 1.0):
        face_x = np.stack([np.full_like(s, c), s], axis=-1)
        face_y = np.stack([s, np.full_like(s, c)], axis=-1)
        assert_allclose(h(face_x), f(c, s), atol=1e-12)
        assert_allclose(h(face_y), f(s, c), atol=1e-12)


def test_extension_kind_validation():
    with pytest.raises(ValueError):
        make_extension((0.0, 1.0), [(0.0, 1.0)], "cubic-spline")
    with pytest.raises(ValueError):
        make_extension(x_sym, [(0.0, 1.0), (0.0, 1.0)], "linear-blend")


def test_polynomial_extension_quartic():
    # h(0) = 0, h(1) = 0, h'(0) = 1, h'(1) = -e, h'''(0) = -3: solving the
    # 5x5 system by hand gives c = (0, 1, e/2 - 5/4, -1/2, 3/4 - e/2)
    e = math.e
    h = polynomial_extension(
        [(0.0, 0), (1.0, 0), (0.0, 1), (1.0, 1), (0.0, 3)],
        [0.0, 0.0, 1.0, -e, -3.0],
        (0.0, 1.0),
    )
    poly = sp.Poly(h.expr, sp.Symbol("x"))
    coeffs = [float(poly.coeff_monomial(sp.Symbol("x") ** j)) for j in range(5)]
    expect = [0.0, 1.0, e / 2 - 5 / 4, -0.5, 0.75 - e / 2]
    assert_allclose(coeffs, expect, atol=1e-10)
    # and it actually satisfies the functionals
    assert h(np.array([1.0])) == pytest.approx(0.0, abs=1e-12)
    assert h.eval_deriv((1,), np.array([1.0])) == pytest.approx(-e)
    assert h.eval_deriv((3,), np.array([0.0])) == pytest.approx(-3.0)


def test_polynomial_extension_validates_shapes():
    with pytest.raises(ValueError):
        polynomial_extension([(0.0, 0), (1.0, 0)], [1.0], (0.0, 1.0))


def test_eval_deriv_validation():
    h = zero_extension([(0.0, 1.0)])
    with pytest.raises(ValueError):
        h.eval_deriv((0, 0), np.array([0.5]))
    ht = make_extension((sp.sin(t_sym), 0), [(0.0, 1.0)], "linear-blend",
                        t_sym=t_sym)
    with pytest.raises(ValueError):
        ht(np.array([0.5]))  # time dependent, t is required


def test_homogenize_rhs():
    h = make_extension((0.0, 1.0), [(0.0, 1.0)], "linear-blend")
    op = LinearOperator.derivative((2,))
    nodes = np.array([[0.25], [0.5], [0.75]])
    rhs = homogenize_rhs(lambda p: np.ones(3), h, op, nodes)
    assert_allclose(rhs, 1.0)  # the blend is linear, op h = 0
    rhs2 = homogenize_rhs(np.zeros(3), h, LinearOperator.derivative((1,)), nodes)
    assert_allclose(rhs2, -1.0)


def test_solve_linear_bvp_poisson():
    # -u'' = pi^2 sin(pi x), u(0) = u(1) = 0; exact u = sin(pi x)
    k = kernel(3, (0.0, 1.0), [(0.0, 0), (1.0, 0)])
    op = LinearOperator.derivative((2,), coeff=-1.0)
    f = lambda p: np.pi**2 * np.sin(np.pi * p[:, 0])
    problem = LinearBVP(kernel=k, operator=op, f=f,
                        extension=zero_extension([(0.0, 1.0)]))
    xs = np.linspace(0.05, 0.95, 37)
    errs = []
    for n in (10, 20, 40):
        sol = solve_linear_bvp(problem, n)
        errs.append(np.abs(sol(xs) - np.sin(np.pi * xs)).max())
    assert errs[0] < 5e-3
    assert errs[1] < errs[0] and errs[2] < errs[1]
    # nodal residual of the collocation system
    resid = sol.diffmat @ sol.v - f(sol.grid.nodes())
    assert np.abs(resid).max() < 1e-7


def test_solve_linear_bvp_inhomogeneous():
    # u'' = 0 with u(0) = 1, u(1) = 3 has the exact solution 1 + 2x
    k = kernel(2, (0.0, 1.0), [(0.0, 0), (1.0, 0)])
    h = make_extension((1.0, 3.0), [(0.0, 1.0)], "linear-blend")
    problem = LinearBVP(kernel=k, operator=LinearOperator.derivative((2,)),
                        f=lambda p: np.zeros(len(p)), extension=h)
    sol = solve_linear_bvp(problem, 10)
    xs = np.linspace(0.0, 1.0, 11)
    assert np.abs(sol(xs) - (1 + 2 * xs)).max() < 1e-8


def test_euler_exact_decay_count():
    sys = SemidiscreteSystem(rhs=lambda v, t: -v, t0=0.0)
    res = euler_integrate(sys, np.array([1.0]), 0.1, 1.0)
    assert res.steps == 10
    assert res.t == pytest.approx(1.0)
    assert res.v[0] == pytest.approx(0.9**10, rel=1e-13)


def test_euler_shortened_final_step():
    sys = SemidiscreteSystem(rhs=lambda v, t: np.ones_like(v), t0=0.0)
    res = euler_integrate(sys, np.array([0.0]), 0.4, 1.0)
    # 2 full steps of 0.4 plus one shortened 0.2 step integrates dv/dt = 1
    assert res.steps == 3
    assert res.v[0] == pytest.approx(1.0, rel=1e-13)
    assert res.t == pytest.approx(1.0)


def test_euler_snapshots():
    sys = SemidiscreteSystem(rhs=lambda v, t: -v, t0=0.0)
    res = euler_integrate(sys, np.array([1.0]), 0.25, 1.0,
                          snapshot_times=(0.0, 0.5, 1.0))
    times = [t for t, _ in res.snapshots]
    assert_allclose(times, [0.0, 0.5, 1.0])
    assert res.snapshots[0][1][0] == pytest.approx(1.0)
    assert res.snapshots[1][1][0] == pytest.approx(0.75**2)


def test_euler_nonzero_t0():
    sys = SemidiscreteSystem(rhs=lambda v, t: np.full_like(v, t), t0=1.0)
    res = euler_integrate(sys, np.array([0.0]), 0.5, 2.0)
    # v += dt * t at t = 1.0 then t = 1.5
    assert res.v[0] == pytest.approx(0.5 * 1.0 + 0.5 * 1.5)


@pytest.mark.filterwarnings("ignore:overflow")
def test_euler_divergence():
    sys = SemidiscreteSystem(rhs=lambda v, t: v**2, t0=0.0)
    with pytest.raises(Divergence):
        euler_integrate(sys, np.array([10.0]), 10.0, 100.0)


def test_euler_validates_dt():
    sys = SemidiscreteSystem(rhs=lambda v, t: -v)
    with pytest.raises(ValueError):
        euler_integrate(sys, np.array([1.0]), 0.0, 1.0)
    with pytest.raises(ValueError):
        euler_integrate(sys, np.array([1.0]), 0.1, -1.0)


def test_rhs_builders_need_nodes_for_raw_matrices():
    with pytest.raises(ValueError):
        burgers_rhs_1d(np.eye(3), np.eye(3), 0.1, zero_extension([(0.0, 1.0)]))
    rhs = burgers_rhs_1d(np.zeros((3, 3)), np.eye(3), 2.0,
                         zero_extension([(0.0, 1.0)]),
                         nodes=np.linspace(0.25, 0.75, 3).reshape(-1, 1))
    # with h = 0 and D1 = 0 this reduces to nu * D2 v
    assert_allclose(rhs(np.array([1.0, 2.0, 3.0]), 0.0), [2.0, 4.0, 6.0])


def test_burgers_rhs_manufactured():
    # check the homogenized right-hand side against a direct computation of
    # -u u_x + nu u_xx - h_t with u = v + h at a few points
    h = make_extension((sp.sin(t_sym), sp.cos(t_sym)), [(0.0, 1.0)],
                       "linear-blend", t_sym=t_sym)
    nodes = np.linspace(0.2, 0.8, 4).reshape(-1, 1)
    rng = np.random.default_rng(5)
    d1 = rng.standard_normal((4, 4))
    d2 = rng.standard_normal((4, 4))
    v = rng.standard_normal(4)
    nu, t = 0.3, 0.7
    rhs = burgers_rhs_1d(d1, d2, nu, h, nodes=nodes)
    hv = h(nodes, t)
    hx = h.eval_deriv((1,), nodes, t)
    hxx = h.eval_deriv((2,), nodes, t)
    ht = h.dt(nodes, t)
    expect = -(v + hv) * (d1 @ v + hx) + nu * (d2 @ v + hxx) - ht
    assert_allclose(rhs(v, t), expect, rtol=1e-13)


def test_heat_rhs_manufactured():
    h = zero_extension([(0.0, 1.0), (0.0, 1.0)])
    nodes = np.array([[0.3, 0.3], [0.6, 0.6]])
    lap = np.array([[1.0, 2.0], [3.0, 4.0]])
    forcing = lambda p, t: p[:, 0] + t
    rhs = heat3d_rhs(lap, h, forcing, 0.5, nodes=nodes)
    v = np.array([1.0, 1.0])
    assert_allclose(rhs(v, 1.0), 0.5 * (lap @ v) + np.array([1.3, 1.6]))


def test_tensor_kernel_bvp_2d_laplace():
    # Laplace equation with multilinear data is solved exactly by v = 0
    tk = tensor_kernel(3, [(0.0, 1.0)] * 2, [[(0.0, 0), (1.0, 0)]] * 2)
    g = 1 + x_sym + 2 * y_sym + x_sym * y_sym
    h = make_extension(g, [(0.0, 1.0)] * 2, "multilinear-transfinite",
                       syms=(x_sym, y_sym))
    problem = LinearBVP(kernel=tk, operator=LinearOperator.laplacian(2),
                        f=lambda p: np.zeros(len(p)), extension=h)
    sol = solve_linear_bvp(problem, (6, 6))
    assert np.abs(sol.v).max() < 1e-7
    pts = np.array([[0.21, 0.38], [0.77, 0.52]])
    expect = 1 + pts[:, 0] + 2 * pts[:, 1] + pts[:, 0] * pts[:, 1]
    assert_allclose(sol(pts), expect, atol=1e-7)
