"""Reference problems with closed-form solutions, and their error reports.

Seven cases are registered: two steady boundary value problems (a second
order and a fifth order one), four viscous Burgers flows (two on an
interval, two on a square), and a forced heat equation on a cube.  Each
case knows its box, the boundary functionals that carve out the trial
subspace, an analytic extension of the boundary data, and the exact
solution to compare against.

run_case() assembles the kernels, orthonormalizes, solves or integrates,
and reports the maximum absolute error, the relative l2 error, and the
root mean square error over the collocation nodes.  Systems are cached per
(case, m, grid, digits), so parameter sweeps re-use the expensive
construction work.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from . import _mpf, linalg
from .cardinal import gram, mgs_factor
from .diffmat import apply_to_interpolant, build_diffmat, iteration_spectrum
from .errors import ZeroReference
from .kernel1d import kernel
from .solver import (
    ExtensionFunction,
    SemidiscreteSystem,
    burgers_rhs_1d,
    burgers_rhs_multi,
    euler_integrate,
    heat3d_rhs,
    make_extension,
    polynomial_extension,
    _space_symbols,
)
from .tensor import LinearOperator, TensorKernel, make_interior_grid

DEFAULT_DIGITS = 50

_DIRICHLET = ((0, 0), (1, 0))


@dataclass(frozen=True)
class BenchmarkCase:
    """Static description of one reference problem."""

    id: str
    dim: int
    kind: str  # "steady" | "burgers" | "heat"
    box: tuple
    constraints: tuple  # per axis: ((end, order), ...) with end 0 = a, 1 = b
    operator: tuple  # steady cases: ((coeff, orders), ...); else None
    m_default: int
    defaults: dict
    description: str

    def boundary_functionals(self, axis):
        a, b = self.box[axis]
        return tuple(((a if end == 0 else b), order) for end, order in self.constraints[axis])


CASES = {
    "ex1": BenchmarkCase(
        "ex1", 1, "steady", ((-1.0, 1.0),), (_DIRICHLET,),
        ((1.0, (2,)),), 3,
        {"n": (50,), "digits": DEFAULT_DIGITS},
        "u'' = f on [-1, 1] with Dirichlet data, u = sinh x / (1 + cosh x)",
    ),
    "ex2": BenchmarkCase(
        "ex2", 1, "steady", ((0.0, 1.0),),
        (((0, 0), (1, 0), (0, 1), (1, 1), (0, 3)),),
        ((1.0, (5,)), (1.0, (0,))), 6,
        {"n": (26,), "digits": 60},
        "u^(5) + u = g on [0, 1] with five endpoint conditions, u = x(1-x)e^x",
    ),
    "ex3": BenchmarkCase(
        "ex3", 1, "burgers", ((0.0, 1.0),), (_DIRICHLET,), None, 5,
        {"n": (40,), "dt": 0.01, "t_final": 1.0, "t0": 0.0,
         "nu": 0.005, "sigma": 100.0, "digits": DEFAULT_DIGITS},
        "Burgers flow on [0, 1], decaying sine profile, homogeneous walls",
    ),
    "ex4": BenchmarkCase(
        "ex4", 1, "burgers", ((0.0, 1.0),), (_DIRICHLET,), None, 5,
        {"n": (50,), "dt": 0.004, "t_final": 2.4, "t0": 1.0,
         "nu": 0.005, "digits": DEFAULT_DIGITS},
        "Burgers flow on [0, 1], spreading front, started at t = 1",
    ),
    "ex5": BenchmarkCase(
        "ex5", 2, "burgers", ((0.0, 1.0), (0.0, 1.0)),
        (_DIRICHLET, _DIRICHLET), None, 5,
        {"n": (5, 5), "dt": 0.001, "t_final": 1.0, "t0": 0.0,
         "nu": 1.0, "digits": DEFAULT_DIGITS},
        "planar Burgers on the unit square, logistic front along x + y",
    ),
    "ex6": BenchmarkCase(
        "ex6", 2, "burgers", ((-0.5, 0.5), (-0.5, 0.5)),
        (_DIRICHLET, _DIRICHLET), None, 5,
        {"n": (5, 5), "dt": 0.001, "t_final": 1.0, "t0": 0.0,
         "nu": 1.0, "digits": DEFAULT_DIGITS},
        "planar Burgers on a centered square, tanh front along x + y",
    ),
    "ex7": BenchmarkCase(
        "ex7", 3, "heat", ((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)),
        (_DIRICHLET, _DIRICHLET, _DIRICHLET), None, 5,
        {"n": (5, 5, 5), "dt": 0.001, "t_final": 1.0, "t0": 0.0,
         "digits": DEFAULT_DIGITS},
        "forced heat equation on the unit cube, exponential plus linear drift",
    ),
}


def list_cases():
    """The seven registered case descriptors, in id order."""
    return tuple(CASES[k] for k in sorted(CASES))


def get_case(case_id):
    try:
        return CASES[case_id]
    except KeyError:
        raise ValueError(f"unknown case {case_id!r}; choose from {sorted(CASES)}") from None


# -- error metrics ------------------------------------------------------------


@dataclass(frozen=True)
class ErrorReport:
    linf: float
    rel_l2: float
    rms: float
    runtime_ms: float
    params: dict

    def as_dict(self):
        p = {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.params.items()}
        return {
            "linf": self.linf,
            "rel_l2": self.rel_l2,
            "rms": self.rms,
            "runtime_ms": self.runtime_ms,
            "params": p,
        }


def metrics(exact, approx):
    """(linf, rel_l2, rms) of approx against exact, elementwise over nodes."""
    e = np.asarray(exact, dtype=float).ravel()
    a = np.asarray(approx, dtype=float).ravel()
    if e.size == 0 or e.size != a.size:
        raise ValueError("need two equal-length nonempty value vectors")
    diff = e - a
    l2 = float(np.linalg.norm(diff))
    denom = float(np.linalg.norm(e))
    if denom == 0.0:
        raise ZeroReference("reference values are identically zero; rel_l2 undefined")
    return float(np.max(np.abs(diff))), l2 / denom, l2 / math.sqrt(e.size)


# -- grids --------------------------------------------------------------------


def axes_from_total(total, dim):
    """Split a total node count into per-axis counts.

    Perfect dim-th roots give uniform axes; otherwise the factorization
    with the smallest spread between the largest and smallest factor is
    chosen (ties broken toward larger minimum), e.g. 150 in 3-D -> (5, 5, 6).
    """
    total = int(total)
    if total < 1:
        raise ValueError("node count must be positive")
    if dim == 1:
        return (total,)
    best = None
    best_key = None

    def rec(remaining, slots, start, acc):
        nonlocal best, best_key
        if slots == 1:
            if remaining >= start:
                cand = acc + (remaining,)
                key = (cand[-1] - cand[0], -cand[0])
                if best_key is None or key < best_key:
                    best, best_key = cand, key
            return
        f = start
        while f**slots <= remaining:
            if remaining % f == 0:
                rec(remaining // f, slots - 1, f, acc + (f,))
            f += 1

    rec(total, dim, 1, ())
    return best


# -- exact solutions and extensions -------------------------------------------

_MODEL_CACHE = {}


def _model(case, params):
    """Exact solution, extension, and (for ex7) forcing, as evaluators.

    Cached per (case, nu, sigma) since those enter the expressions; the
    lambdified derivative closures on the evaluators then persist across
    runs with different grids.
    """
    key = (case.id, params.get("nu"), params.get("sigma"))
    got = _MODEL_CACHE.get(key)
    if got is not None:
        return got
    syms = _space_symbols(case.dim)
    t = sp.Symbol("t")
    forcing = None
    scale = None
    if case.id == "ex1":
        x = syms[0]
        expr = sp.sinh(x) / (1 + sp.cosh(x))
        t_used = None
    elif case.id == "ex2":
        x = syms[0]
        expr = x * (1 - x) * sp.exp(x)
        t_used = None
    elif case.id == "ex3":
        x = syms[0]
        nu = sp.Float(params["nu"], 17)
        sigma = sp.Float(params["sigma"], 17)
        decay = sp.exp(-sp.pi**2 * nu * t)
        expr = 2 * nu * sp.pi * decay * sp.sin(sp.pi * x) / (sigma + decay * sp.cos(sp.pi * x))
        t_used = t
    elif case.id == "ex4":
        x = syms[0]
        nu = sp.Float(params["nu"], 17)
        t_ref = sp.exp(1 / (8 * nu))
        expr = (x / t) / (1 + sp.sqrt(t / t_ref) * sp.exp(x**2 / (4 * nu * t)))
        t_used = t
    elif case.id in ("ex5", "ex6"):
        x, y = syms
        nu = sp.Float(params["nu"], 17)
        arg = (x + y - t) / (2 * nu)
        if case.id == "ex5":
            expr = 1 / (1 + sp.exp(arg))
        else:
            expr = sp.Rational(1, 2) - sp.tanh(arg)
        t_used = t
    elif case.id == "ex7":
        x, y, z = syms
        core = sp.exp(t - sp.pi * (x + y + z))
        expr = core + x + y + z
        forcing = ExtensionFunction(-2 * core, syms, case.box, t_sym=t)
        scale = 1.0 / math.pi**2
        t_used = t
    else:  # pragma: no cover - registry and branches are in sync
        raise ValueError(case.id)

    exact = ExtensionFunction(expr, syms, case.box, t_sym=t_used)
    if case.id == "ex2":
        # endpoint conditions of x(1-x)e^x: value, slope, third derivative
        ext = polynomial_extension(
            [(0.0, 0), (1.0, 0), (0.0, 1), (1.0, 1), (0.0, 3)],
            [0.0, 0.0, 1.0, -math.e, -3.0],
            case.box[0],
        )
    elif case.dim == 1:
        ext = make_extension(expr, case.box, "linear-blend", syms, t_sym=t_used)
    else:
        ext = make_extension(expr, case.box, "multilinear-transfinite", syms, t_sym=t_used)
    got = {"exact": exact, "extension": ext, "forcing": forcing, "scale": scale}
    _MODEL_CACHE[key] = got
    return got


# -- system assembly and caching ----------------------------------------------

_SYSTEM_CACHE = {}


def clear_caches():
    _SYSTEM_CACHE.clear()
    _MODEL_CACHE.clear()


def _system(case, m, counts, digits):
    key = (case.id, int(m), tuple(counts), digits)
    got = _SYSTEM_CACHE.get(key)
    if got is not None:
        return got
    factors = [
        kernel(m, case.box[d], case.boundary_functionals(d)) for d in range(case.dim)
    ]
    tk = TensorKernel(factors)
    grid = make_interior_grid(tk, counts)
    factor = mgs_factor(gram(tk, grid, precision=digits))
    got = {"kernel": tk, "grid": grid, "factor": factor, "diffmats": {}}
    _SYSTEM_CACHE[key] = got
    return got


def _diffmat(sysd, op):
    key = tuple(op.terms)
    dm = sysd["diffmats"].get(key)
    if dm is None:
        dm = build_diffmat(sysd["factor"], op)
        sysd["diffmats"][key] = dm
    return dm


def _resolve_params(case, overrides):
    params = {"m": case.m_default, **case.defaults}
    for k, v in overrides.items():
        if v is None:
            continue
        if k not in params:
            raise ValueError(f"parameter {k!r} does not apply to case {case.id}")
        params[k] = v
    n = params["n"]
    if np.isscalar(n):
        params["n"] = axes_from_total(n, case.dim)
    else:
        params["n"] = tuple(int(c) for c in n)
        if len(params["n"]) != case.dim:
            raise ValueError(f"case {case.id} needs {case.dim} per-axis counts")
    params["m"] = int(params["m"])
    for pos in ("dt", "nu", "sigma"):
        if pos in params and not params[pos] > 0:
            raise ValueError(f"{pos} must be positive")
    if "t_final" in params and not params["t_final"] > params["t0"]:
        raise ValueError("t_final must exceed the initial time")
    return params


# -- solving ------------------------------------------------------------------


@dataclass
class CaseSolution:
    """A solved case: nodal values plus a dense evaluator."""

    case: BenchmarkCase
    params: dict
    v: np.ndarray  # homogeneous nodal values at the final time
    extension: ExtensionFunction
    exact: ExtensionFunction
    t_final: float  # None for steady problems
    steps: int
    snapshots: list  # (t, homogeneous nodal values) pairs
    runtime_ms: float
    system: dict = field(repr=False, default=None)

    @property
    def factor(self):
        return self.system["factor"]

    @property
    def grid(self):
        return self.system["grid"]

    def nodal_values(self, v=None, t=None):
        v = self.v if v is None else v
        t = self.t_final if t is None else t
        return v + self.extension(self.grid.nodes(), t)

    def nodal_exact(self, t=None):
        t = self.t_final if t is None else t
        return self.exact(self.grid.nodes(), t)

    def evaluate(self, z, t=None, v=None):
        """Dense evaluation u(z) = kernel interpolant of v plus extension."""
        v = self.v if v is None else v
        t = self.t_final if t is None else t
        return self.factor.interpolate(v, z) + self.extension(z, t)

    def report(self):
        linf, rel_l2, rms = metrics(self.nodal_exact(), self.nodal_values())
        echo = {"case": self.case.id, **self.params}
        return ErrorReport(linf, rel_l2, rms, self.runtime_ms, echo)

    def boundary_residual(self, count=100, seed=20260819):
        """Worst violation of the original boundary conditions by u_N.

        Cases with derivative conditions are checked functional by
        functional at the endpoints; Dirichlet cases at `count` sampled
        boundary points (at the final time for evolution problems).
        """
        has_deriv = any(
            order > 0 for axis in self.case.constraints for (_, order) in axis
        )
        t = self.t_final
        if has_deriv:
            worst = 0.0
            for point, order in self.case.boundary_functionals(0):
                op = LinearOperator.derivative((order,))
                u_d = apply_to_interpolant(self.factor, op, self.v, point)
                u_d += self.extension.eval_deriv((order,), point, t)
                g_d = self.exact.eval_deriv((order,), point, t)
                worst = max(worst, abs(u_d - g_d))
            return worst
        pts = _boundary_samples(self.case.box, count, np.random.default_rng(seed))
        u = np.atleast_1d(self.evaluate(pts, t))
        g = np.atleast_1d(self.exact(pts, t))
        return float(np.max(np.abs(u - g)))

    def snapshot_rows(self):
        """Per-node rows (t, index, coords..., v, u, exact, abs err)."""
        entries = list(self.snapshots)
        if self.t_final is not None:
            if not entries or entries[-1][0] != self.t_final:
                entries.append((self.t_final, self.v))
        else:
            entries.append((0.0, self.v))
        nodes = self.grid.nodes()
        rows = []
        for tk, vk in entries:
            t_eval = None if self.t_final is None else tk
            u = vk + self.extension(nodes, t_eval)
            g = self.exact(nodes, t_eval)
            for i in range(len(vk)):
                rows.append(
                    (tk, i, *nodes[i], vk[i], u[i], g[i], abs(u[i] - g[i]))
                )
        return rows


def _boundary_samples(box, count, rng):
    dim = len(box)
    pts = np.empty((count, dim))
    for i in range(count):
        axis, side = divmod(i % (2 * dim), 2)
        for d in range(dim):
            a, b = box[d]
            if d == axis:
                pts[i, d] = a if side == 0 else b
            else:
                pts[i, d] = a + (b - a) * rng.random()
    return pts


def solve_case(case_id, snapshot_times=(), **overrides):
    """Solve one case and return the CaseSolution (dense evaluator included)."""
    case = get_case(case_id)
    params = _resolve_params(case, overrides)
    start = time.perf_counter()
    model = _model(case, params)
    sysd = _system(case, params["m"], params["n"], params["digits"])
    ext = model["extension"]
    exact = model["exact"]
    nodes = sysd["grid"].nodes()

    if case.kind == "steady":
        op = LinearOperator(list(case.operator))
        dm = _diffmat(sysd, op)
        x = _space_symbols(1)[0]
        g_expr = sum(c * sp.diff(exact.expr, x, orders[0]) for c, orders in op.terms)
        g = ExtensionFunction(g_expr, (x,), case.box)
        rhs = g(nodes) - ext.apply_op(op, nodes)
        if dm.hp is not None:
            digits = params["digits"]
            v = _mpf.to_float(_mpf.solve_obj(dm.hp, _mpf.to_obj(rhs, digits), digits))
        else:
            v = linalg.lu_solve(dm.matrix, rhs)
        sol = CaseSolution(case, params, v, ext, exact, None, 0, [], 0.0, sysd)
    else:
        t0 = params["t0"]
        v0 = exact(nodes, t0) - ext(nodes, t0)
        if case.kind == "burgers":
            dim = case.dim
            d1s = [
                _diffmat(sysd, LinearOperator.derivative(
                    tuple(1 if e == d else 0 for e in range(dim))))
                for d in range(dim)
            ]
            if dim == 1:
                d2 = _diffmat(sysd, LinearOperator.derivative((2,)))
                rhs_fn = burgers_rhs_1d(d1s[0], d2, params["nu"], ext)
            else:
                lap = _diffmat(sysd, LinearOperator.laplacian(dim))
                rhs_fn = burgers_rhs_multi(d1s, lap, params["nu"], ext)
        else:  # heat
            lap = _diffmat(sysd, LinearOperator.laplacian(case.dim))
            rhs_fn = heat3d_rhs(lap, ext, model["forcing"], model["scale"])
        res = euler_integrate(
            SemidiscreteSystem(rhs_fn, t0), v0, params["dt"], params["t_final"],
            snapshot_times,
        )
        sol = CaseSolution(
            case, params, res.v, ext, exact, res.t, res.steps, res.snapshots,
            0.0, sysd,
        )
    sol.runtime_ms = (time.perf_counter() - start) * 1e3
    return sol


def run_case(case_id, **overrides):
    """Solve one case and report nodal errors (see module docstring)."""
    return solve_case(case_id, **overrides).report()


# -- iteration-matrix spectra --------------------------------------------------


def iteration_matrix_spectrum(case_id="ex7", **overrides):
    """Eigenvalues of the explicit-Euler step map for a case's diffusion part.

    For the heat case the diffusion coefficient is the registered scale;
    for Burgers cases it is nu.  Returns (sorted eigenvalues, params).
    """
    case = get_case(case_id)
    if case.kind == "steady":
        raise ValueError(f"case {case.id} has no time stepping")
    params = _resolve_params(case, overrides)
    model = _model(case, params)
    sysd = _system(case, params["m"], params["n"], params["digits"])
    lap = _diffmat(sysd, LinearOperator.laplacian(case.dim))
    scale = model["scale"] if case.kind == "heat" else params["nu"]
    eig = iteration_spectrum(lap.matrix, params["dt"], scale)
    order = np.lexsort((eig.imag, eig.real))
    return eig[order], params


# -- reference tables ----------------------------------------------------------


@dataclass(frozen=True)
class TableSpec:
    """One published error table: a grid of runnable cells with cited values."""

    id: str
    case: str
    row_labels: tuple
    col_labels: tuple
    cells: tuple  # cells[i][j] = (overrides dict, metric name, cited value)


def _grid_cells(case, rows, cols, metric, refs, base=None):
    out = []
    for i, rv in enumerate(rows):
        row = []
        for j, cv in enumerate(cols):
            ov = {**(base or {}), **rv, **cv}
            row.append((ov, metric, refs[i][j]))
        out.append(tuple(row))
    return tuple(out)


def _make_tables():
    tables = {}

    rows = [{"m": 3}, {"m": 5}]
    cols = [{"n": n} for n in (10, 25, 50, 100)]
    tables["table1"] = TableSpec(
        "table1", "ex1", ("m=3", "m=5"), ("N=10", "N=25", "N=50", "N=100"),
        _grid_cells("ex1", rows, cols, "linf", [
            [9.36088e-5, 7.80543e-6, 9.09414e-7, 1.40113e-7],
            [1.64341e-6, 1.96221e-8, 6.34336e-10, 2.00868e-11],
        ]),
    )

    rows = [{"m": 6}, {"m": 8}]
    cols = [{"n": n} for n in (13, 26, 52)]
    tables["table2"] = TableSpec(
        "table2", "ex2", ("m=6", "m=8"), ("N=13", "N=26", "N=52"),
        _grid_cells("ex2", rows, cols, "linf", [
            [4.14718e-6, 3.29059e-7, 4.60087e-8],
            [3.1921e-8, 9.14844e-10, 3.37252e-11],
        ]),
    )
    cols = [{"n": n} for n in (10, 20, 40)]
    tables["table3"] = TableSpec(
        "table3", "ex2", ("m=6", "m=8"), ("N=10", "N=20", "N=40"),
        _grid_cells("ex2", rows, cols, "linf", [
            [4.06488e-6, 6.75653e-7, 9.77376e-8],
            [6.46414e-8, 3.078e-9, 1.19146e-10],
        ]),
    )

    rows = [{"m": 3}, {"m": 5}]
    cols = [{"n": n} for n in (10, 20, 40)]
    base3 = {"dt": 0.01, "t_final": 1.0, "sigma": 100.0}
    tables["table4"] = TableSpec(
        "table4", "ex3", ("m=3", "m=5"), ("N=10", "N=20", "N=40"),
        _grid_cells("ex3", rows, cols, "linf", [
            [2.18427e-7, 5.0701e-8, 8.45243e-9],
            [1.00476e-8, 7.34209e-10, 3.28094e-11],
        ], {**base3, "nu": 0.005}),
    )
    tables["table5"] = TableSpec(
        "table5", "ex3", ("m=3", "m=5"), ("N=10", "N=20", "N=40"),
        _grid_cells("ex3", rows, cols, "linf", [
            [5.70664e-7, 1.11397e-7, 1.71283e-8],
            [2.81404e-8, 1.61939e-9, 6.57035e-11],
        ], {**base3, "nu": 0.01}),
    )

    rows = [
        {"n": 50, "dt": 0.004, "t_final": 2.4},
        {"n": 100, "dt": 0.001, "t_final": 2.4},
        {"n": 50, "dt": 0.01, "t_final": 2.4},
        {"n": 50, "dt": 0.01, "t_final": 1.8},
    ]
    cols = [{"m": 3}, {"m": 5}]
    tables["table6"] = TableSpec(
        "table6", "ex4",
        ("N=50 dt=0.004 T=2.4", "N=100 dt=0.001 T=2.4",
         "N=50 dt=0.01 T=2.4", "N=50 dt=0.01 T=1.8"),
        ("m=3", "m=5"),
        _grid_cells("ex4", rows, cols, "linf", [
            [3.11061e-5, 5.00091e-6],
            [4.35295e-5, 8.59652e-7],
            [4.24253e-5, 3.20613e-5],
            [9.79958e-5, 6.82184e-5],
        ], {"nu": 0.005}),
    )

    combos5 = [
        (0.005, 1.0, 1.0), (0.001, 1.0, 1.0), (0.005, 10.0, 1.0), (0.001, 10.0, 1.0),
        (0.005, 1.0, 0.1), (0.001, 1.0, 0.1), (0.005, 10.0, 0.1), (0.001, 10.0, 0.1),
    ]
    refs5 = [
        (4.25623e-9, 5.65924e-9), (4.09451e-9, 5.183e-9),
        (1.30473e-10, 8.08799e-11), (3.05613e-11, 2.10146e-11),
        (2.53845e-3, 2.572e-3), (2.83507e-3, 2.35878e-3),
        (8.43362e-20, 3.299e-20), (3.0511e-20, 1.58742e-20),
    ]
    cells = tuple(
        (
            ({"dt": dt, "t_final": T, "nu": nu, "m": 5, "n": (5, 5)}, "linf", r[0]),
            ({"dt": dt, "t_final": T, "nu": nu, "m": 5, "n": (5, 5)}, "rel_l2", r[1]),
        )
        for (dt, T, nu), r in zip(combos5, refs5)
    )
    tables["table7"] = TableSpec(
        "table7", "ex5",
        tuple(f"dt={dt:g} T={T:g} nu={nu:g}" for dt, T, nu in combos5),
        ("linf", "rel_l2"), cells,
    )

    combos7 = [
        (1.0, 0.01, 3), (1.0, 0.01, 5), (1.0, 0.001, 3), (1.0, 0.001, 5),
        (5.0, 0.01, 3), (5.0, 0.01, 5), (5.0, 0.001, 3), (5.0, 0.001, 5),
    ]
    refs7 = [
        [1.68375e-3, 9.3954e-4, 5.77729e-4],
        [4.19018e-4, 1.72518e-4, 8.92225e-5],
        [1.65172e-3, 9.1161e-4, 5.5239e-4],
        [3.93504e-4, 1.41514e-4, 6.18902e-5],
        [3.10668e-2, 1.51374e-2, 8.47024e-3],
        [7.69788e-3, 2.78871e-3, 1.31209e-3],
        [3.04834e-2, 1.46877e-2, 8.09662e-3],
        [7.22393e-3, 2.28496e-3, 9.06803e-4],
    ]
    rows = [{"t_final": T, "dt": dt, "m": m} for T, dt, m in combos7]
    cols = [{"n": n} for n in (27, 64, 125)]
    tables["table8"] = TableSpec(
        "table8", "ex7",
        tuple(f"T={T:g} dt={dt:g} m={m}" for T, dt, m in combos7),
        ("N=27", "N=64", "N=125"),
        _grid_cells("ex7", rows, cols, "rel_l2", refs7),
    )

    refs9 = [
        [1.87124e-3, 8.1899e-4, 2.56833e-4, 1.27696e-4],
        [1.83218e-3, 7.79576e-4, 2.09345e-4, 8.43759e-5],
        [1.82829e-3, 7.75725e-4, 2.04977e-4, 8.06016e-5],
    ]
    cells = tuple(
        tuple(
            ({"dt": dt, "t_final": 1.0, "m": m, "n": 150}, metric, refs9[i][j])
            for j, (m, metric) in enumerate(
                [(3, "linf"), (3, "rms"), (5, "linf"), (5, "rms")]
            )
        )
        for i, dt in enumerate((0.01, 0.001, 0.0001))
    )
    tables["table9"] = TableSpec(
        "table9", "ex7",
        ("dt=0.01", "dt=0.001", "dt=0.0001"),
        ("m=3 linf", "m=3 rms", "m=5 linf", "m=5 rms"),
        cells,
    )
    return tables


TABLES = _make_tables()


def run_table(table_id, progress=None):
    """Run every cell of a reference table; returns (spec, value matrix).

    `progress`, when given, is called with (row label, column label,
    computed value, cited value) after each cell.
    """
    spec = TABLES.get(table_id)
    if spec is None:
        raise ValueError(f"unknown table {table_id!r}; choose from {sorted(TABLES)}")
    values = []
    for i, row in enumerate(spec.cells):
        out = []
        for j, (overrides, metric, ref) in enumerate(row):
            rep = run_case(spec.case, **overrides)
            val = getattr(rep, metric)
            out.append(val)
            if progress is not None:
                progress(spec.row_labels[i], spec.col_labels[j], val, ref)
        values.append(out)
    return spec, values


# -- figure lattices -----------------------------------------------------------

FIGURES = {
    "figure1": ("ex1", {"m": 5, "n": 50}),
    "figure2": ("ex2", {"m": 6, "n": 26}),
    "figure3": ("ex3", {}),
    "figure4": ("ex4", {}),
}

LOG_FLOOR = 1e-17


def figure_lattice(figure_id, **overrides):
    """Dense log10 error samples for one figure; returns (header, rows).

    Steady cases are sampled at 200 points across the interval; evolution
    cases on a 50 x 50 space-time lattice (snapshot times rounded to step
    boundaries).  Errors below LOG_FLOOR are floored before taking logs.
    """
    try:
        case_id, base = FIGURES[figure_id]
    except KeyError:
        raise ValueError(
            f"unknown figure {figure_id!r}; choose from {sorted(FIGURES)}"
        ) from None
    merged = {**base, **{k: v for k, v in overrides.items() if v is not None}}
    case = get_case(case_id)
    a, b = case.box[0]
    if case.kind == "steady":
        sol = solve_case(case_id, **merged)
        xs = np.linspace(a, b, 200)
        err = np.abs(sol.evaluate(xs) - sol.exact(xs))
        rows = [(x, lg) for x, lg in zip(xs, np.log10(np.maximum(err, LOG_FLOOR)))]
        return ("x", "log10_abs_err"), rows
    probe = _resolve_params(case, merged)
    times = np.linspace(probe["t0"], probe["t_final"], 50)
    sol = solve_case(case_id, snapshot_times=tuple(times), **merged)
    xs = np.linspace(a, b, 50)
    rows = []
    for tk, vk in sol.snapshots:
        u = sol.evaluate(xs, t=tk, v=vk)
        g = sol.exact(xs, tk)
        lg = np.log10(np.maximum(np.abs(u - g), LOG_FLOOR))
        rows.extend((x, tk, v) for x, v in zip(xs, lg))
    return ("x", "t", "log10_abs_err"), rows
