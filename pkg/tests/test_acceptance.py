"""End-to-end acceptance gate: one test per numbered criterion.

Run with -v for one line per criterion; a summary block also appears at the
end of the terminal report.  Criteria 3 and 4 assert tolerances the
first-order time integrator cannot reach on those configurations; they are
kept as real assertions (with the measured numbers in the failure message)
rather than weakened, because the rest of the pipeline is at reference
accuracy and the integrator is the documented limit.
"""

import functools
import itertools

import numpy as np
import pytest

from rkcolloc import linalg, problems
from rkcolloc.cardinal import gram, mgs_factor
from rkcolloc.cli import main
from rkcolloc.diffmat import build_diffmat, power_error
from rkcolloc.kernel1d import build_base_kernel, kernel, verify_reproducing
from rkcolloc.tensor import LinearOperator, make_interior_grid, tensor_kernel

DIRICHLET = ((0.0, 0), (1.0, 0))


@functools.lru_cache(maxsize=None)
def _table(table_id):
    spec, values = problems.run_table(table_id)
    return spec, np.asarray(values, dtype=float)


@functools.lru_cache(maxsize=None)
def _factor_1d(m, n, precision=None):
    k = kernel(m, (0.0, 1.0), DIRICHLET)
    return mgs_factor(gram(k, make_interior_grid(k, n), precision=precision))


@functools.lru_cache(maxsize=None)
def _factor_2d(m, per_axis, precision=None):
    tk = tensor_kernel(m, ((0.0, 1.0), (0.0, 1.0)), [DIRICHLET, DIRICHLET])
    grid = make_interior_grid(tk, (per_axis, per_axis))
    return mgs_factor(gram(tk, grid, precision=precision))


def test_criterion_01_steady_second_order_table():
    spec, v = _table("table1")
    refs = np.array([[c[2] for c in row] for row in spec.cells])
    assert np.all(v <= 100 * refs), "cells above the x100 window"
    assert np.all(v >= refs / 100), "cells below the x100 window"
    assert np.all(np.diff(v, axis=1) < 0), "errors not strictly decreasing in N"
    assert np.all(v[1] <= v[0]), "m=5 not at least as accurate as m=3"
    assert v[1, -1] <= 2.0e-9, f"(m=5, N=100) linf {v[1, -1]:.6e} > 2.0e-9"


def test_criterion_02_steady_fifth_order_tables():
    _, v2 = _table("table2")  # columns N = 13, 26, 52
    _, v3 = _table("table3")  # columns N = 10, 20, 40
    assert v3[1, 2] <= 1.2e-8, f"(m=8, N=40) linf {v3[1, 2]:.6e} > 1.2e-8"
    assert v2[0, 0] <= 4.2e-4, f"(m=6, N=13) linf {v2[0, 0]:.6e} > 4.2e-4"
    assert np.all(np.diff(v2, axis=1) < 0), "errors not decreasing in N"
    assert np.all(np.diff(v3, axis=1) < 0), "errors not decreasing in N"


def test_criterion_03_decaying_sine_flow():
    common = dict(m=5, n=40, dt=0.01, t_final=1.0, sigma=100.0)
    r1 = problems.run_case("ex3", nu=0.005, **common)
    r2 = problems.run_case("ex3", nu=0.01, **common)
    assert r1.linf <= 3.3e-9 and r2.linf <= 6.6e-9, (
        "first-order time stepping floors this configuration: "
        f"nu=0.005 linf={r1.linf:.6e} (limit 3.3e-9), "
        f"nu=0.01 linf={r2.linf:.6e} (limit 6.6e-9); "
        "the spatial discretization alone reaches the reference values"
    )


def test_criterion_04_spreading_front_flow():
    r = problems.run_case("ex4", m=5, n=50, dt=0.004, nu=0.005, t_final=2.4)
    assert r.linf <= 5.0e-4, (
        "first-order time stepping floors this configuration: "
        f"linf={r.linf:.6e} (limit 5.0e-4); the spatial discretization "
        "alone reaches the reference value"
    )


def test_criterion_05_planar_flow_unit_square():
    r1 = problems.run_case("ex5", m=5, n=25, dt=0.001, t_final=1.0, nu=1.0)
    assert r1.linf <= 4.1e-7, f"T=1 linf {r1.linf:.6e} > 4.1e-7"
    r2 = problems.run_case("ex5", m=5, n=25, dt=0.001, t_final=10.0, nu=1.0)
    assert r2.linf <= 3.1e-9, f"T=10 linf {r2.linf:.6e} > 3.1e-9"


def test_criterion_06_heat_cube_sweep():
    spec, v = _table("table8")
    row = spec.row_labels.index("T=1 dt=0.001 m=5")
    col = spec.col_labels.index("N=125")
    assert v[row, col] <= 6.2e-3, f"rel_l2 {v[row, col]:.6e} > 6.2e-3"
    assert np.all(np.diff(v, axis=1) < 0), "errors not decreasing in N per row"


def test_criterion_07_step_map_spectrum(tmp_path):
    out = tmp_path / "spectrum.csv"
    code = main(["spectrum", "--case", "ex7", "--m", "3", "--n", "125",
                 "--dt", "0.001", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "re,im"
    vals = np.array([[float(c) for c in ln.split(",")] for ln in lines[1:]])
    assert vals.shape == (125, 2), "expected exactly N eigenvalues"
    lam = vals[:, 0] + 1j * vals[:, 1]
    radius = float(np.abs(lam).max())
    assert radius <= 1.0 + 1e-6, f"spectral radius {radius:.9f} > 1 + 1e-6"
    # the multiset must be closed under conjugation
    a = lam[np.lexsort((lam.imag, lam.real))]
    b = np.conj(lam)
    b = b[np.lexsort((b.imag, b.real))]
    scale = np.abs(lam).max()
    assert np.max(np.abs(a - b)) <= 1e-9 * scale, "eigenvalues not conjugate consistent"


def test_criterion_08_reproducing_identity():
    rng = np.random.default_rng(20260819)
    worst = 0.0
    for m in (1, 2, 3, 5, 6, 8):
        for interval in ((0.0, 1.0), (-1.0, 1.0)):
            k = build_base_kernel(m, interval)
            ys = interval[0] + (interval[1] - interval[0]) * rng.random(10)
            for deg in range(2 * m):
                coeffs = np.zeros(deg + 1)
                coeffs[deg] = 1.0
                for y in ys:
                    worst = max(worst, verify_reproducing(k, coeffs, y))
    assert worst <= 1e-8, f"reproducing residual {worst:.3e} > 1e-8"


def test_criterion_09_cardinality():
    f1 = _factor_1d(3, 25, precision=30)
    h1 = f1.cardinal_values(f1.grid.nodes())
    r1 = np.abs(h1 - np.eye(25)).max()
    f2 = _factor_2d(5, 5, precision=30)
    h2 = f2.cardinal_values(f2.grid.nodes())
    r2 = np.abs(h2 - np.eye(25)).max()
    assert r1 <= 1e-8, f"1-D cardinality residual {r1:.3e} > 1e-8"
    assert r2 <= 1e-8, f"2-D cardinality residual {r2:.3e} > 1e-8"


def test_criterion_10_factor_identities():
    for f, tag in ((_factor_1d(3, 25, precision=30), "1-D"),
                   (_factor_2d(5, 5, precision=30), "2-D")):
        ortho = f.orthonormality_residual()
        inv = f.inverse_residual()
        assert ortho <= 1e-8, f"{tag} |B A B^T - I| {ortho:.3e} > 1e-8"
        assert inv <= 1e-6, f"{tag} relative B^T B vs A^-1 {inv:.3e} > 1e-6"


def test_criterion_11_diffmat_dual_route():
    f1 = _factor_1d(3, 16)
    f2 = _factor_2d(3, 4)
    checks = [
        (f1, LinearOperator.identity(1)),
        (f1, LinearOperator.derivative((1,))),
        (f1, LinearOperator.derivative((2,))),
        (f2, LinearOperator.laplacian(2)),
    ]
    for f, op in checks:
        l = build_diffmat(f, op).matrix
        nodes = f.grid.nodes()
        psi = np.asarray(
            f.kernel.apply(op, "first", nodes[:, None, :], nodes[None, :, :]),
            dtype=float,
        )
        ref = linalg.lu_solve(f.gram.matrix.T, psi.T).T
        rel = np.abs(l - ref).max() / np.abs(l).max()
        assert rel <= 1e-6, f"{op!r}: route disagreement {rel:.3e} > 1e-6"


def test_criterion_12_power_function_bound():
    rng = np.random.default_rng(7)
    z = rng.uniform(0.0, 1.0, 100)
    f = _factor_1d(3, 16, precision=30)
    for op in (LinearOperator.identity(1), LinearOperator.derivative((1,))):
        eps = power_error(f, op, z)
        assert np.all(eps >= 0.0)
        diag = np.asarray(
            f.kernel.eval(op.terms[0][1], op.terms[0][1],
                          z.reshape(-1, 1), z.reshape(-1, 1), region="left"),
            dtype=float,
        ) * op.terms[0][0] ** 2
        assert np.all(eps**2 <= diag + 1e-9), "squared estimate above the diagonal"
    at_nodes = power_error(f, LinearOperator.identity(1), f.grid.nodes())
    assert np.max(at_nodes) <= 1e-8, f"nonzero at nodes: {np.max(at_nodes):.3e}"
    zz = np.array([0.137, 0.493, 0.861])
    prev = None
    for n in (8, 16, 32):
        fe = _factor_1d(3, n, precision=30)
        cur = power_error(fe, LinearOperator.identity(1), zz)
        if prev is not None:
            assert np.all(cur <= prev + 1e-12), "estimate grew under refinement"
        prev = cur


def test_criterion_13_collocation_matrices_solvable():
    runs = [("ex1", (3, 5), (10, 25, 50, 100)),
            ("ex2", (6, 8), (13, 26, 52, 10, 20, 40))]
    for case_id, ms, ns in runs:
        case = problems.get_case(case_id)
        op = LinearOperator(list(case.operator))
        for m, n in itertools.product(ms, ns):
            sysd = problems._system(case, m, (n,), case.defaults["digits"])
            dm = problems._diffmat(sysd, op)
            v = linalg.lu_solve(dm.matrix, np.ones(n))
            assert np.all(np.isfinite(v)), f"{case_id} m={m} N={n}"


def test_criterion_14_boundary_exactness():
    configs = {
        "ex1": dict(m=3, n=10),
        "ex2": dict(m=6, n=13),
        "ex3": dict(t_final=0.1),
        "ex4": dict(t_final=1.2),
        "ex5": dict(t_final=0.05),
        "ex6": dict(t_final=0.05),
        "ex7": dict(n=27, t_final=0.02),
    }
    residuals = {}
    for case_id, overrides in configs.items():
        sol = problems.solve_case(case_id, **overrides)
        residuals[case_id] = sol.boundary_residual(count=100)
    worst = max(residuals, key=residuals.get)
    assert residuals[worst] <= 1e-8, f"boundary residuals {residuals}"


def test_criterion_15_deflation_order_independence():
    cons = ((0.0, 0), (1.0, 0), (0.0, 1), (1.0, 1), (0.0, 3))
    k1 = kernel(6, (0.0, 1.0), cons)
    k2 = kernel(6, (0.0, 1.0), cons[::-1])
    rng = np.random.default_rng(15)
    xs, ys = rng.random(100), rng.random(100)
    v1, v2 = k1(xs, ys), k2(xs, ys)
    scale = np.abs(v1).max()
    rel = np.abs(v1 - v2).max() / scale
    assert rel <= 1e-8, f"order-dependent deflation: relative gap {rel:.3e}"
    # the rational tables are in fact identical
    assert k1.left == k2.left and k1.right == k2.right
