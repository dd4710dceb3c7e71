"""Differentiation matrices and the pointwise interpolation error estimator.

For nodal values v with kernel interpolant u = sum_i v_i h_i, the matrix L
returned by :func:`build_diffmat` satisfies (L v)_j = (op u)(x_j): apply the
operator to each orthonormal basis function at the nodes,

    Psi_op[j, k] = (op psi_k)(x_j) = sum_l B_kl (op_1 K)(x_j, x_l),

then map back through the cardinal construction, L = Psi_op B.  On tensor
grids the operator evaluation matrix is assembled per term as a Kronecker
product of per-axis derivative matrices.

The power function bounds the pointwise error of operator evaluation:

    |{op u}(z) - w(z) . u(X)| <= eps_op(z) * ||u||_K,
    eps_op(z)^2 = (op (x) op K)(z, z) - w(z)^T A w(z),

with w(z) = B^T B k_op(z) the exactness weights.  All products run in the
factor's construction arithmetic.
"""

import numpy as np

from . import _mpf, linalg
from .errors import LossOfPositivity, SmoothnessExceeded
from .tensor import LinearOperator

# Squared power-function values in [-POWER_CLAMP, 0) are rounding residue
# of an exact zero and are clamped; anything more negative is an error.
POWER_CLAMP = 1e-10


def _check_op_orders(factor, op, limit_shift):
    ms = factor.kernel.orders
    for d, o in enumerate(op.max_orders()):
        if o > 2 * ms[d] - 2 - limit_shift:
            raise SmoothnessExceeded(
                f"axis {d} operator order {o} exceeds the space's "
                f"well-defined pointwise order {2 * ms[d] - 2 - limit_shift}"
            )


def _axis_deriv_matrix(factor, d, order):
    """Per-axis matrix M[j, l] = d^order/dx^order K_d(x_j, x_l) (cached)."""
    cache = getattr(factor, "_axis_deriv_cache", None)
    if cache is None:
        cache = factor._axis_deriv_cache = {}
    key = (d, order)
    if key not in cache:
        k1d = factor.kernel.factors[d]
        ax = factor.grid.axes[d]
        if factor.precision is None:
            m = k1d.eval(order, 0, ax[:, None], ax[None, :])
        else:
            axo = _mpf.to_obj(ax, factor.precision)
            with _mpf.workprec(factor.precision):
                m = k1d._eval_obj(order, 0, axo[:, None], axo[None, :], factor.precision)
        cache[key] = m
    return cache[key]


def _op_eval_matrix(factor, op):
    """OPK[j, l] = (op applied to the first argument of K)(x_j, x_l)."""
    out = None
    with _mpf.workprec(factor.precision or 17):
        for c, orders in op.terms:
            term = None
            for d, o in enumerate(orders):
                m = _axis_deriv_matrix(factor, d, o)
                term = m if term is None else np.kron(term, m)
            if factor.precision is not None:
                c = _mpf.number_to_obj(c, factor.precision)
            term = c * term
            out = term if out is None else out + term
    return out


class DiffMatrix:
    """Float64 collocation matrix for one operator over one factor.

    When the factor was orthonormalized in extended precision, `hp` holds
    the unrounded object-dtype matrix (used for direct nodal solves where
    float64 back substitution would dominate the error budget).
    """

    def __init__(self, matrix, op, factor, hp=None):
        self.matrix = matrix
        self.op = op
        self.factor = factor
        self.hp = hp

    @property
    def shape(self):
        return self.matrix.shape

    def __matmul__(self, v):
        return self.matrix @ v

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __repr__(self):
        return f"DiffMatrix(n={self.shape[0]}, op={self.op!r})"


def build_diffmat(factor, op):
    """Nodal operator-evaluation matrix L with (L v)_j = (op u)(x_j).

    `op` orders are limited to 2 m_d - 2 per axis (the kernel's mixed
    derivatives must stay continuous across the diagonal).  The matrix is
    built in the factor's construction arithmetic and exported as float64.
    """
    if not isinstance(op, LinearOperator):
        op = LinearOperator(op)
    if op.dim != factor.kernel.dim:
        raise ValueError(f"operator dimension {op.dim} != kernel dimension {factor.kernel.dim}")
    _check_op_orders(factor, op, 0)
    opk = _op_eval_matrix(factor, op)
    if factor.precision is None:
        l = (opk @ factor.B.T) @ factor.B
        return DiffMatrix(l, op, factor)
    with _mpf.workprec(factor.precision):
        l_hp = (opk @ factor._hpB.T) @ factor._hpB
    return DiffMatrix(_mpf.to_float(l_hp), op, factor, hp=l_hp)


def _op_kvec(factor, op, pts):
    """Rows k_op(z)_l = (op_1 K)(z, x_l) for a batch of points."""
    zero = (0,) * factor.kernel.dim
    nodes = factor.grid.nodes()
    if factor.precision is None:
        out = None
        for c, orders in op.terms:
            v = factor.kernel.eval(orders, zero, pts[:, None, :], nodes[None, :, :])
            out = c * v if out is None else out + c * v
        return out
    zo = _mpf.to_obj(pts, factor.precision)
    no = factor._nodes_hp()
    out = None
    with _mpf.workprec(factor.precision):
        for c, orders in op.terms:
            v = factor.kernel._eval_obj(
                orders, zero, zo[:, None, :], no[None, :, :], factor.precision
            )
            cv = _mpf.number_to_obj(c, factor.precision) * v
            out = cv if out is None else out + cv
    return out


def _op_op_diag(factor, op, pts):
    """(op (x) op K)(z, z) for a batch of points (both arguments)."""
    out = None
    if factor.precision is not None:
        zo = _mpf.to_obj(pts, factor.precision)
    for ci, oi in op.terms:
        for cj, oj in op.terms:
            if factor.precision is None:
                v = factor.kernel.eval(oi, oj, pts, pts, region="left")
                v = ci * cj * np.asarray(v, dtype=float)
            else:
                with _mpf.workprec(factor.precision):
                    v = factor.kernel._eval_obj(oi, oj, zo, zo, factor.precision)
                    v = _mpf.number_to_obj(ci * cj, factor.precision) * v
            out = v if out is None else out + v
    return out


def power_error(factor, op, z):
    """Pointwise power-function estimate eps_op(z); z may be a batch.

    Requires twice the operator order to stay within 2 m_d - 2 per axis,
    since the diagonal value (op (x) op K)(z, z) must be continuous.
    Squared values in [-1e-10, 0) are clamped to zero; more negative
    values raise LossOfPositivity.
    """
    if not isinstance(op, LinearOperator):
        op = LinearOperator(op)
    ms = factor.kernel.orders
    for d, o in enumerate(op.max_orders()):
        if 2 * o > 2 * ms[d] - 2:
            raise SmoothnessExceeded(
                f"power function needs 2*order <= 2m-2 on axis {d} "
                f"(order {o}, m {ms[d]})"
            )
    pts, single = factor._split_batch(z)
    kv = _op_kvec(factor, op, pts)
    diag = _op_op_diag(factor, op, pts)
    if factor.precision is None:
        w = (kv @ factor.B.T) @ factor.B
        val2 = diag - np.einsum("ij,jk,ik->i", w, factor.gram.matrix, w)
    else:
        with _mpf.workprec(factor.precision):
            w = (kv @ factor._hpB.T) @ factor._hpB
            aw = w @ factor.gram.hp
            quad = np.array([aw[i] @ w[i] for i in range(len(w))], dtype=object)
            val2 = diag - quad
        val2 = _mpf.to_float(val2)
    val2 = np.atleast_1d(np.asarray(val2, dtype=float))
    neg = val2 < -POWER_CLAMP
    if neg.any():
        raise LossOfPositivity(
            f"squared power function reached {val2.min():.3e} (below the "
            f"-{POWER_CLAMP:g} rounding window)"
        )
    val2 = np.where(val2 < 0.0, 0.0, val2)
    out = np.sqrt(val2)
    return float(out[0]) if single else out


def apply_to_interpolant(factor, op, values, z):
    """(op u)(z) where u is the kernel interpolant of nodal `values`.

    Evaluates op against the first kernel argument and contracts with the
    representer coefficients, staying in the construction arithmetic until
    the final rounding.  With op = identity this reduces to
    factor.interpolate.
    """
    if not isinstance(op, LinearOperator):
        op = LinearOperator(op)
    _check_op_orders(factor, op, 0)
    values = np.asarray(values, dtype=float)
    pts, single = factor._split_batch(z)
    kv = _op_kvec(factor, op, pts)
    if factor.precision is None:
        out = kv @ (factor.B.T @ (factor.B @ values))
    else:
        with _mpf.workprec(factor.precision):
            c = factor._hpB.T @ (factor._hpB @ _mpf.to_obj(values, factor.precision))
            out = kv @ c
        out = _mpf.to_float(out)
    return float(out[0]) if single else out


def error_bound(estimate, norm_u):
    """Rigorous pointwise bound: power estimate times the solution norm."""
    norm_u = float(norm_u)
    if norm_u < 0:
        raise ValueError("norm bound must be nonnegative")
    return np.asarray(estimate, dtype=float) * norm_u


def iteration_spectrum(l, dt, scale=1.0):
    """Eigenvalues of the explicit-Euler step map I + dt * scale * L."""
    mat = np.asarray(l.matrix if isinstance(l, DiffMatrix) else l, dtype=float)
    dt = float(dt)
    if dt <= 0:
        raise ValueError("dt must be positive")
    g = np.eye(mat.shape[0]) + dt * float(scale) * mat
    return linalg.eigenvalues(g)
