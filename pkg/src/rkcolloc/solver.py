"""Boundary-value solves and explicit time stepping on collocation grids.

Inhomogeneous boundary data is handled by splitting u = v + h where h is a
smooth extension of the boundary data into the box and v lives in the
boundary-constrained kernel subspace.  Extensions are symbolic (sympy
expressions), so every derivative the right-hand sides need is analytic.

Available extension shapes:

* linear blend (one axis): h = g(a) + (x - a)/(b - a) * (g(b) - g(a)),
* multilinear transfinite (any dimension): the boolean sum of per-axis
  linear blends, which matches g on every face of the box exactly and
  reproduces multilinear functions,
* interpolating polynomial matching endpoint derivative functionals.

Time integration is the explicit Euler method, deliberately first order:
higher-order integrators are out of scope, and the error floors this
produces are reported as they are.
"""

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import sympy as sp

from . import linalg
from .cardinal import gram, mgs_factor
from .diffmat import DiffMatrix, build_diffmat
from .errors import Divergence
from .tensor import LinearOperator, TensorGrid, TensorKernel, make_interior_grid

__all__ = [
    "ExtensionFunction",
    "make_extension",
    "polynomial_extension",
    "zero_extension",
    "LinearBVP",
    "BVPSolution",
    "homogenize_rhs",
    "solve_linear_bvp",
    "SemidiscreteSystem",
    "EulerResult",
    "euler_integrate",
    "burgers_rhs_1d",
    "burgers_rhs_multi",
    "heat3d_rhs",
]


class ExtensionFunction:
    """A symbolic function of space (and optionally time) on a box.

    Wraps a sympy expression and serves float64 evaluations of the function
    and any of its derivatives at arrays of points.  Derivative evaluators
    are lambdified once and cached.
    """

    def __init__(self, expr, space_syms, box, t_sym=None):
        self.expr = sp.sympify(expr)
        self.syms = tuple(space_syms)
        self.box = tuple((float(a), float(b)) for a, b in box)
        self.t_sym = t_sym
        self.dim = len(self.syms)
        self._fns = {}

    def _fn(self, orders, t_order):
        key = (orders, t_order)
        if key not in self._fns:
            e = self.expr
            for s, o in zip(self.syms, orders):
                if o:
                    e = sp.diff(e, s, o)
            if t_order:
                if self.t_sym is None:
                    e = sp.Integer(0)
                else:
                    e = sp.diff(e, self.t_sym, t_order)
            args = list(self.syms) + ([self.t_sym] if self.t_sym is not None else [])
            self._fns[key] = sp.lambdify(args, e, "numpy")
        return self._fns[key]

    def _split(self, pts):
        pts = np.asarray(pts, dtype=float)
        if self.dim == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
            pts = pts[..., np.newaxis]
        if pts.shape[-1] != self.dim:
            raise ValueError(f"points need {self.dim} coordinates, got {pts.shape}")
        return [pts[..., d] for d in range(self.dim)], pts.shape[:-1]

    def eval_deriv(self, orders, pts, t=None, t_order=0):
        orders = tuple(int(o) for o in orders)
        if len(orders) != self.dim:
            raise ValueError(f"need {self.dim} derivative orders")
        cols, shape = self._split(pts)
        args = list(cols)
        if self.t_sym is not None:
            if t is None:
                raise ValueError("this extension is time dependent; pass t")
            args.append(float(t))
        val = self._fn(orders, t_order)(*args)
        out = np.broadcast_to(np.asarray(val, dtype=float), shape)
        return out.copy() if shape else float(out)

    def __call__(self, pts, t=None):
        return self.eval_deriv((0,) * self.dim, pts, t)

    def dt(self, pts, t=None):
        """Time derivative (zero for time-independent extensions)."""
        return self.eval_deriv((0,) * self.dim, pts, t, t_order=1)

    def apply_op(self, op, pts, t=None):
        """Evaluate (op h)(pts) analytically."""
        out = None
        for c, orders in op.terms:
            v = c * self.eval_deriv(orders, pts, t)
            out = v if out is None else out + v
        return out


def _as_box(box):
    return tuple((float(a), float(b)) for a, b in box)


def _space_symbols(dim):
    names = ["x", "y", "z"] if dim <= 3 else [f"x{i}" for i in range(dim)]
    return sp.symbols(names[:dim])


def zero_extension(box):
    """The zero function, for problems with homogeneous boundary data.

    Carries no time symbol: passing t to evaluations is accepted and
    ignored, and all derivatives (including in time) are zero.
    """
    box = _as_box(box)
    syms = _space_symbols(len(box))
    return ExtensionFunction(sp.Integer(0), syms, box)


def make_extension(g, box, kind, syms=None, t_sym=None):
    """Extend boundary data into the box as a symbolic function.

    `g` is a sympy expression in the space symbols (and optionally a time
    symbol) whose restriction to the box faces is the boundary data.  For a
    one-axis box `g` may instead be a pair (g_a, g_b) of endpoint values
    (constants or expressions in t).

    kind "linear-blend" (single axis) blends the two endpoint traces
    linearly; "multilinear-transfinite" forms the boolean sum of the
    per-axis blends, which is exact on every face and reproduces
    multilinear functions.  For one axis the two kinds coincide.
    """
    box = _as_box(box)
    dim = len(box)
    if syms is None:
        syms = _space_symbols(dim)
    syms = tuple(syms)
    if kind not in ("linear-blend", "multilinear-transfinite"):
        raise ValueError(f"unknown extension kind {kind!r}")
    if kind == "linear-blend" and dim != 1:
        raise ValueError("linear-blend extends data on a single axis")

    if isinstance(g, (tuple, list)):
        if dim != 1:
            raise ValueError("endpoint-pair data only makes sense for one axis")
        (a, b), (ga, gb) = box[0], g
        x = syms[0]
        lam = (x - a) / (b - a)
        expr = sp.sympify(ga) * (1 - lam) + sp.sympify(gb) * lam
        return ExtensionFunction(sp.expand(expr), syms, box, t_sym=t_sym)

    g = sp.sympify(g)
    # Boolean sum over nonempty axis subsets S of (-1)^(|S|+1) prod_d P_d g,
    # where P_d substitutes the d-th blend.  Substituting one axis at a time
    # pins the expression at faces, then edges, then corners.
    total = sp.Integer(0)
    axes = range(dim)
    for size in range(1, dim + 1):
        sign = (-1) ** (size + 1)
        for subset in itertools.combinations(axes, size):
            for corner in itertools.product((0, 1), repeat=size):
                term = g
                weight = sp.Integer(1)
                for d, side in zip(subset, corner):
                    a, b = box[d]
                    lam = (syms[d] - a) / (b - a)
                    weight *= (1 - lam) if side == 0 else lam
                    term = term.subs(syms[d], a if side == 0 else b)
                total += sign * weight * term
    return ExtensionFunction(sp.expand(total), syms, box, t_sym=t_sym)


def polynomial_extension(functionals, values, interval):
    """Lowest-degree polynomial h with h^(order_i)(point_i) = value_i.

    Builds the q-by-q collocation system in the monomial basis (q is the
    number of functionals) and solves it directly.  Used to homogenize
    boundary conditions that involve derivative values at the endpoints.
    """
    a, b = float(interval[0]), float(interval[1])
    fns = [(float(p), int(o)) for p, o in functionals]
    vals = np.asarray(values, dtype=float)
    q = len(fns)
    if vals.shape != (q,):
        raise ValueError("need one value per functional")
    mat = np.zeros((q, q))
    for i, (p, o) in enumerate(fns):
        for j in range(o, q):
            fall = 1.0
            for t in range(o):
                fall *= j - t
            mat[i, j] = fall * p ** (j - o)
    coeffs = linalg.lu_solve(mat, vals)
    x = sp.Symbol("x")
    expr = sum(sp.Float(c, 17) * x**j for j, c in enumerate(coeffs))
    return ExtensionFunction(expr, (x,), [(a, b)], t_sym=None)


# -- linear boundary-value problems ------------------------------------------


@dataclass
class LinearBVP:
    """op u = f on the interior, u = h's trace on the boundary.

    `kernel` must already be deflated by the boundary functionals, so its
    subspace is the homogeneous part; `extension` carries the data.
    """

    kernel: TensorKernel
    operator: LinearOperator
    f: Callable
    extension: ExtensionFunction


@dataclass
class BVPSolution:
    values: np.ndarray  # u at the nodes (homogeneous part plus extension)
    v: np.ndarray  # homogeneous nodal coefficients
    grid: TensorGrid
    factor: object
    diffmat: DiffMatrix
    extension: ExtensionFunction

    def __call__(self, z):
        """Dense evaluation u(z) = interpolant of v at z, plus h(z)."""
        return self.factor.interpolate(self.v, z) + self.extension(z)


def homogenize_rhs(f, extension, op, nodes, t=None):
    """Interior right-hand side for the homogeneous unknown: f - op h."""
    nodes = np.asarray(nodes, dtype=float)
    fv = f(nodes) if callable(f) else np.asarray(f, dtype=float)
    return fv - extension.apply_op(op, nodes, t)


def solve_linear_bvp(problem, grid, precision=None):
    """Collocation solve of a linear BVP on the given interior grid."""
    if not isinstance(grid, TensorGrid):
        grid = make_interior_grid(problem.kernel, grid)
    factor = mgs_factor(gram(problem.kernel, grid, precision=precision))
    dm = build_diffmat(factor, problem.operator)
    rhs = homogenize_rhs(problem.f, problem.extension, problem.operator, grid.nodes())
    v = linalg.lu_solve(dm.matrix, rhs)
    u = v + problem.extension(grid.nodes())
    return BVPSolution(u, v, grid, factor, dm, problem.extension)


# -- explicit Euler ----------------------------------------------------------


@dataclass
class SemidiscreteSystem:
    """dv/dt = rhs(v, t) with initial time t0."""

    rhs: Callable
    t0: float = 0.0


@dataclass
class EulerResult:
    v: np.ndarray
    t: float
    steps: int
    snapshots: list = field(default_factory=list)


def euler_integrate(system, v0, dt, t_end, snapshot_times=()):
    """March v <- v + dt * rhs(v, t) from t0 to t_end.

    The step count is (t_end - t0)/dt rounded when that is within one ulp
    of an integer; otherwise the last partial interval is covered by a
    single shortened step.  Raises Divergence as soon as the state stops
    being finite.  `snapshot_times` are rounded to the nearest step
    boundary and recorded as (t, v.copy()) pairs.
    """
    rhs = system.rhs
    t0 = float(system.t0)
    dt = float(dt)
    t_end = float(t_end)
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_end < t0:
        raise ValueError("t_end precedes the initial time")
    span = t_end - t0
    ratio = span / dt
    nfull = int(np.floor(ratio))
    if ratio - nfull > 1.0 - 4 * np.finfo(float).eps * max(1.0, ratio):
        nfull += 1
    rem = span - nfull * dt
    if rem < 4 * np.finfo(float).eps * max(abs(t_end), 1.0):
        rem = 0.0

    want = sorted(
        set(min(max(int(round((float(ts) - t0) / dt)), 0), nfull) for ts in snapshot_times)
    )
    want_idx = 0
    v = np.array(v0, dtype=float, copy=True)
    snaps = []

    def note(k, t, v):
        nonlocal want_idx
        while want_idx < len(want) and want[want_idx] == k:
            snaps.append((t, v.copy()))
            want_idx += 1

    note(0, t0, v)
    for k in range(nfull):
        t = t0 + k * dt
        v = v + dt * rhs(v, t)
        if not np.all(np.isfinite(v)):
            raise Divergence(f"non-finite state after step {k + 1} (t={t + dt:.6g})")
        note(k + 1, t0 + (k + 1) * dt, v)
    t = t0 + nfull * dt
    if rem > 0.0:
        v = v + rem * rhs(v, t)
        if not np.all(np.isfinite(v)):
            raise Divergence(f"non-finite state after the final shortened step (t={t_end:.6g})")
        t = t_end
    return EulerResult(v, t, nfull + (1 if rem > 0.0 else 0), snaps)


# -- semidiscrete right-hand sides -------------------------------------------


def _nodes_of(dm, nodes):
    if nodes is not None:
        return np.asarray(nodes, dtype=float)
    if isinstance(dm, DiffMatrix):
        return dm.factor.grid.nodes()
    raise ValueError("pass nodes explicitly when using raw matrices")


def burgers_rhs_1d(d1, d2, nu, extension, nodes=None):
    """Viscous Burgers right-hand side for the homogenized unknown v.

    u = v + h;  dv/dt = -u (D1 v + h_x) + nu (D2 v + h_xx) - h_t.
    """
    nu = float(nu)
    x = _nodes_of(d1, nodes)
    m1 = d1.matrix if isinstance(d1, DiffMatrix) else np.asarray(d1, float)
    m2 = d2.matrix if isinstance(d2, DiffMatrix) else np.asarray(d2, float)

    def rhs(v, t):
        h = extension(x, t)
        hx = extension.eval_deriv((1,), x, t)
        hxx = extension.eval_deriv((2,), x, t)
        ht = extension.dt(x, t)
        return -(v + h) * (m1 @ v + hx) + nu * (m2 @ v + hxx) - ht

    return rhs


def burgers_rhs_multi(d1_list, lap, nu, extension, nodes=None):
    """Multi-dimensional Burgers with the same scalar advected field:

    dv/dt = -(v + h) sum_d (D1_d v + h_{x_d}) + nu (Lap v + lap h) - h_t.
    """
    nu = float(nu)
    dim = len(d1_list)
    x = _nodes_of(d1_list[0], nodes)
    m1s = [d.matrix if isinstance(d, DiffMatrix) else np.asarray(d, float) for d in d1_list]
    mlap = lap.matrix if isinstance(lap, DiffMatrix) else np.asarray(lap, float)
    lap_op = LinearOperator.laplacian(dim)

    def rhs(v, t):
        h = extension(x, t)
        adv = np.zeros_like(v)
        for d, m1 in enumerate(m1s):
            orders = [0] * dim
            orders[d] = 1
            adv += m1 @ v + extension.eval_deriv(orders, x, t)
        return (
            -(v + h) * adv
            + nu * (mlap @ v + extension.apply_op(lap_op, x, t))
            - extension.dt(x, t)
        )

    return rhs


def heat3d_rhs(lap, extension, forcing, scale, nodes=None):
    """Forced heat equation: dv/dt = scale (Lap v + lap h) + forcing - h_t."""
    scale = float(scale)
    x = _nodes_of(lap, nodes)
    mlap = lap.matrix if isinstance(lap, DiffMatrix) else np.asarray(lap, float)
    dim = x.shape[1]
    lap_op = LinearOperator.laplacian(dim)

    def rhs(v, t):
        return (
            scale * (mlap @ v + extension.apply_op(lap_op, x, t))
            + forcing(x, t)
            - extension.dt(x, t)
        )

    return rhs
