"""Cardinal (Lagrange) bases in the kernel's native Hilbert space.

Given nodes X = {x_1..x_N} and a kernel K, the representers K(., x_j) span
an N-dimensional subspace in which interpolation at X is exact.  A modified
Gram-Schmidt pass over the representers in the kernel inner product, where
(K(., x_i), K(., x_j)) = K(x_i, x_j) = A_ij, produces an orthonormal basis
psi_k = sum_j B_kj K(., x_j) with B lower triangular and B A B^T = I.  The
cardinal functions follow by a second application of B:

    h_i(z) = sum_k B_ki psi_k(z),    h_i(x_j) = delta_ij.

The Gram matrix A becomes numerically rank deficient in float64 well before
it is mathematically singular (for order-5 spaces this happens by N ~ 50 in
one dimension), in which case the factorization raises LossOfPositivity.
Passing `precision=<decimal digits>` to :func:`gram` runs the whole chain,
and everything later built from the factor, in multiple-precision floats;
results are rounded to float64 only at the very end.
"""

import math

import numpy as np

from . import _mpf, linalg
from .errors import DegenerateNode, LossOfPositivity
from .kernel1d import Kernel1D
from .tensor import TensorGrid, TensorKernel

# A squared norm at or below this fraction of the Gram diagonal maximum is
# treated as loss of positive definiteness (float64 path).
MGS_GUARD_RTOL = 1e-14

# A node whose kernel diagonal falls at or below this fraction of the
# largest diagonal entry is degenerate (it nearly annihilates the kernel).
NODE_GUARD_RTOL = 1e-12


def _normalize(kernel, grid):
    if isinstance(kernel, Kernel1D):
        kernel = TensorKernel([kernel])
    if not isinstance(grid, TensorGrid):
        grid = TensorGrid([grid] if np.ndim(grid) == 1 else grid)
    if grid.dim != kernel.dim:
        raise ValueError(f"grid dimension {grid.dim} != kernel dimension {kernel.dim}")
    return kernel, grid


def _gram_axis_f64(k1d, x):
    n = len(x)
    g = np.empty((n, n), dtype=float)
    iu, ju = np.triu_indices(n)
    g[iu, ju] = k1d.eval(0, 0, x[iu], x[ju])
    g[ju, iu] = g[iu, ju]
    return g


def _gram_axis_obj(k1d, x, digits):
    n = len(x)
    xo = _mpf.to_obj(x, digits)
    g = np.empty((n, n), dtype=object)
    with _mpf.workprec(digits):
        for i in range(n):
            row = k1d._eval_obj(0, 0, xo[i], xo[i:], digits)
            g[i, i:] = row
            g[i:, i] = row
    return g


class GramMatrix:
    """Kernel Gram matrix over a grid, float64 plus optional hp view."""

    def __init__(self, kernel, grid, matrix, hp=None, precision=None):
        self.kernel = kernel
        self.grid = grid
        self.matrix = matrix
        self.hp = hp
        self.precision = precision

    @property
    def shape(self):
        return self.matrix.shape

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __repr__(self):
        p = f", precision={self.precision}" if self.precision else ""
        return f"GramMatrix(n={self.shape[0]}{p})"


def gram(kernel, grid, precision=None):
    """Assemble the symmetric Gram matrix A_ij = K(x_i, x_j).

    Symmetry is exact by construction (only i <= j entries are computed,
    then mirrored), and on a tensor grid the matrix is the Kronecker
    product of per-axis Gram matrices.  Raises DegenerateNode when a node
    nearly annihilates the kernel, e.g. a boundary-constrained kernel
    evaluated at its own constrained endpoint.
    """
    kernel, grid = _normalize(kernel, grid)
    grid.check_inside(kernel)
    if precision is None:
        a = _gram_axis_f64(kernel.factors[0], grid.axes[0])
        for f, ax in zip(kernel.factors[1:], grid.axes[1:]):
            a = np.kron(a, _gram_axis_f64(f, ax))
        hp = None
    else:
        with _mpf.workprec(precision):
            hp = _gram_axis_obj(kernel.factors[0], grid.axes[0], precision)
            for f, ax in zip(kernel.factors[1:], grid.axes[1:]):
                hp = np.kron(hp, _gram_axis_obj(f, ax, precision))
        a = _mpf.to_float(hp)
    d = np.diag(a)
    dmax = float(d.max(initial=0.0))
    bad = d <= NODE_GUARD_RTOL * dmax
    if dmax <= 0.0 or bad.any():
        i = int(np.argmax(bad)) if dmax > 0.0 else 0
        where = tuple(float(c) for c in grid.nodes()[i])
        raise DegenerateNode(
            f"node {where} has kernel diagonal {d[i]:.3e} (scale {dmax:.3e})"
        )
    return GramMatrix(kernel, grid, a, hp=hp, precision=precision)


def _mgs(a, guard, reorthogonalize, hp_digits=None):
    """Modified Gram-Schmidt on representers; returns B with B A B^T = I.

    Works on float64 or object arrays.  `a` is consumed read-only.  Row i of
    the result expresses the i-th orthonormal function in terms of the
    first i representers, so B is lower triangular with positive diagonal.
    """
    n = a.shape[0]
    b = np.zeros_like(a)
    g = np.zeros_like(a)  # g[j] = A @ b[j], cached inner-product rows
    dmax = max(a[i, i] for i in range(n))
    for i in range(n):
        w = np.zeros_like(a[0])
        w[i] = a[0, 0] * 0 + 1  # one in the working scalar type
        passes = 2 if reorthogonalize else 1
        for _ in range(passes):
            for j in range(i):
                w = w - (g[j] @ w) * b[j]
        nrm2 = w @ (a @ w)
        if not nrm2 > guard * dmax:
            raise LossOfPositivity(
                f"squared norm {float(nrm2):.3e} at step {i} fell below "
                f"{float(guard):g} * diagonal max {float(dmax):.3e}"
            )
        if hp_digits is None:
            bi = w / math.sqrt(nrm2)
        else:
            bi = w / _mpf.sqrt_any(nrm2)
        b[i] = bi
        g[i] = a @ bi
    return b


class OrthoFactor:
    """Lower-triangular factor B of a Gram matrix with B A B^T = I.

    Provides evaluation of the cardinal functions and interpolation in the
    kernel subspace.  When built from a high-precision Gram matrix, all
    internal products run at construction precision and only final values
    are rounded; the `B` attribute is the float64 rounding of the factor.
    """

    def __init__(self, gram_, b_f64, b_hp=None):
        self.gram = gram_
        self.kernel = gram_.kernel
        self.grid = gram_.grid
        self.precision = gram_.precision
        self.B = b_f64
        self._hpB = b_hp
        self._nodes_obj = None

    @property
    def n(self):
        return self.B.shape[0]

    def __repr__(self):
        p = f", precision={self.precision}" if self.precision else ""
        return f"OrthoFactor(n={self.n}{p})"

    def _nodes_hp(self):
        if self._nodes_obj is None:
            self._nodes_obj = _mpf.to_obj(self.grid.nodes(), self.precision)
        return self._nodes_obj

    # -- self checks --------------------------------------------------------

    def orthonormality_residual(self):
        """max |B A B^T - I|, computed in the construction arithmetic."""
        if self._hpB is not None:
            with _mpf.workprec(self.precision):
                r = self._hpB @ self.gram.hp @ self._hpB.T
                n = self.n
                worst = max(
                    abs(r[i, j] - (1 if i == j else 0))
                    for i in range(n)
                    for j in range(n)
                )
            return float(worst)
        r = self.B @ self.gram.matrix @ self.B.T
        return float(np.abs(r - np.eye(self.n)).max())

    def inverse_residual(self):
        """Relative max-norm error of B^T B against A^-1 (same arithmetic)."""
        if self._hpB is not None:
            with _mpf.workprec(self.precision):
                inv = _mpf.inv_obj(self.gram.hp, self.precision)
                diff = self._hpB.T @ self._hpB - inv
                num = max(abs(v) for v in diff.reshape(-1))
                den = max(abs(v) for v in inv.reshape(-1))
            return float(num / den)
        inv = linalg.lu_solve(self.gram.matrix, np.eye(self.n))
        num = np.abs(self.B.T @ self.B - inv).max()
        return float(num / np.abs(inv).max())

    # -- evaluation ---------------------------------------------------------

    def _split_batch(self, z):
        z = np.asarray(z, dtype=float)
        single = z.ndim == 0 or (z.ndim == 1 and self.kernel.dim > 1)
        pts = np.atleast_2d(z) if self.kernel.dim > 1 else np.atleast_1d(z).reshape(-1, 1)
        return pts, single

    def _kvec_f64(self, z):
        pts, single = self._split_batch(z)
        nodes = self.grid.nodes()
        kv = self.kernel.eval(
            (0,) * self.kernel.dim,
            (0,) * self.kernel.dim,
            pts[:, None, :],
            nodes[None, :, :],
        )
        return kv, single

    def _kvec_hp(self, z):
        pts, single = self._split_batch(z)
        zo = _mpf.to_obj(pts, self.precision)
        nodes = self._nodes_hp()
        zero = (0,) * self.kernel.dim
        with _mpf.workprec(self.precision):
            kv = self.kernel._eval_obj(zero, zero, zo[:, None, :], nodes[None, :, :], self.precision)
        return kv, single

    def cardinal_values(self, z):
        """Values of all cardinal functions at z: rows h(z), h_i(x_j) = d_ij.

        Evaluation is two staged: psi(z) = B k(z), then h(z) = B^T psi(z).
        """
        if self._hpB is not None:
            kv, single = self._kvec_hp(z)
            with _mpf.workprec(self.precision):
                h = (kv @ self._hpB.T) @ self._hpB
            h = _mpf.to_float(h)
        else:
            kv, single = self._kvec_f64(z)
            h = (kv @ self.B.T) @ self.B
        return h[0] if single else h

    def eval_cardinal(self, i, z):
        """Value of the i-th cardinal function (0-based node index) at z."""
        vals = self.cardinal_values(z)
        return vals[..., i]

    def representer_coefficients(self, values):
        """Coefficients c with sum_j c_j K(., x_j) interpolating `values`.

        Computed as c = B^T (B values); float64 output.
        """
        values = np.asarray(values, dtype=float)
        if self._hpB is not None:
            with _mpf.workprec(self.precision):
                c = self._hpB.T @ (self._hpB @ _mpf.to_obj(values, self.precision))
            return _mpf.to_float(c)
        return self.B.T @ (self.B @ values)

    def interpolate(self, values, z):
        """Evaluate the kernel interpolant of nodal `values` at point(s) z."""
        values = np.asarray(values, dtype=float)
        if values.shape[-1] != self.n:
            raise ValueError(f"need {self.n} nodal values, got {values.shape}")
        if self._hpB is not None:
            kv, single = self._kvec_hp(z)
            with _mpf.workprec(self.precision):
                c = self._hpB.T @ (self._hpB @ _mpf.to_obj(values, self.precision))
                u = kv @ c
            u = _mpf.to_float(u)
        else:
            kv, single = self._kvec_f64(z)
            u = kv @ (self.B.T @ (self.B @ values))
        return float(u[0]) if single else u


def mgs_factor(a, reorthogonalize=False):
    """Orthonormalize the representers of a GramMatrix; returns OrthoFactor.

    Raises LossOfPositivity when a squared norm falls to the roundoff floor
    of the working arithmetic (1e-14 of the diagonal max in float64; the
    analogous precision-scaled floor for high-precision Gram matrices).
    The optional second orthogonalization pass improves orthogonality in
    borderline float64 cases but cannot repair genuine rank deficiency.
    """
    if not isinstance(a, GramMatrix):
        raise TypeError("mgs_factor expects the GramMatrix built by gram()")
    if a.precision is None:
        b = _mgs(a.matrix, MGS_GUARD_RTOL, reorthogonalize)
        return OrthoFactor(a, b)
    digits = a.precision
    guard = 10.0 ** (-(digits - 12))
    with _mpf.workprec(digits):
        b_hp = _mgs(a.hp, _mpf.number_to_obj(guard, digits), reorthogonalize, hp_digits=digits)
    return OrthoFactor(a, _mpf.to_float(b_hp), b_hp)
