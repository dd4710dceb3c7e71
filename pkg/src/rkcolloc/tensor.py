"""Tensor-product kernels, collocation grids, and differential operators.

A kernel on a box is the product of one-dimensional kernels, one per axis:

    K(x, y) = prod_d K_d(x_d, y_d)

so every mixed partial derivative factorizes into one-dimensional table
evaluations.  Grids are Cartesian products of per-axis node sets, flattened
in row-major order (last axis fastest), which keeps the tensor Gram matrix
equal to the Kronecker product of the per-axis Gram matrices in the same
order as the node list.
"""

import numpy as np

from . import _mpf
from .errors import OutOfDomain
from .kernel1d import Kernel1D, kernel


class LinearOperator:
    """A constant-coefficient differential operator sum_t c_t D^(alpha_t).

    `terms` is a sequence of (coefficient, orders) pairs where `orders` is a
    per-axis tuple of derivative orders.  The identity is the zero
    multi-index.
    """

    def __init__(self, terms):
        terms = tuple((float(c), tuple(int(o) for o in orders)) for c, orders in terms)
        if not terms:
            raise ValueError("operator needs at least one term")
        dims = {len(orders) for _, orders in terms}
        if len(dims) != 1:
            raise ValueError("all terms must share the same dimension")
        if any(o < 0 for _, orders in terms for o in orders):
            raise ValueError("derivative orders must be nonnegative")
        self.terms = terms
        self.dim = dims.pop()

    @classmethod
    def identity(cls, dim):
        return cls([(1.0, (0,) * dim)])

    @classmethod
    def derivative(cls, orders, coeff=1.0):
        return cls([(coeff, tuple(orders))])

    @classmethod
    def laplacian(cls, dim, coeff=1.0):
        terms = []
        for d in range(dim):
            orders = [0] * dim
            orders[d] = 2
            terms.append((coeff, tuple(orders)))
        return cls(terms)

    def __add__(self, other):
        if not isinstance(other, LinearOperator):
            return NotImplemented
        return LinearOperator(self.terms + other.terms)

    def scaled(self, c):
        return LinearOperator([(c * coeff, orders) for coeff, orders in self.terms])

    def max_orders(self):
        """Per-axis maximum derivative order across terms."""
        out = [0] * self.dim
        for _, orders in self.terms:
            for d, o in enumerate(orders):
                out[d] = max(out[d], o)
        return tuple(out)

    def __repr__(self):
        parts = " + ".join(f"{c:g}*D{list(o)}" for c, o in self.terms)
        return f"LinearOperator({parts})"


def _normalize_orders(orders, dim):
    if np.isscalar(orders):
        orders = (int(orders),)
    else:
        orders = tuple(int(o) for o in orders)
    if len(orders) != dim:
        raise ValueError(f"expected {dim} derivative orders, got {orders}")
    return orders


class TensorKernel:
    """Product of per-axis one-dimensional kernels."""

    def __init__(self, factors):
        factors = tuple(factors)
        if not factors:
            raise ValueError("need at least one factor kernel")
        if not all(isinstance(f, Kernel1D) for f in factors):
            raise TypeError("factors must be Kernel1D instances")
        self.factors = factors
        self.dim = len(factors)

    @property
    def orders(self):
        """Per-axis smoothness orders m_d."""
        return tuple(f.m for f in self.factors)

    @property
    def box(self):
        return tuple(f.interval for f in self.factors)

    def __repr__(self):
        return f"TensorKernel({', '.join(map(repr, self.factors))})"

    def _split_points(self, p):
        p = np.asarray(p, dtype=float)
        if self.dim == 1 and (p.ndim == 0 or p.shape[-1] != 1):
            p = p[..., np.newaxis]
        if p.shape[-1] != self.dim:
            raise ValueError(
                f"points must have {self.dim} coordinates, got shape {p.shape}"
            )
        return p

    def eval(self, s, r, x, y, region=None):
        """Evaluate a mixed partial of K; s and r are per-axis orders.

        `x`, `y` have the axis as the trailing dimension (plain scalars or
        1-D arrays are fine for one-dimensional kernels).
        """
        s = _normalize_orders(s, self.dim)
        r = _normalize_orders(r, self.dim)
        x = self._split_points(x)
        y = self._split_points(y)
        out = 1.0
        for d, f in enumerate(self.factors):
            out = out * f.eval(s[d], r[d], x[..., d], y[..., d], region=region)
        return out

    def __call__(self, x, y):
        return self.eval((0,) * self.dim, (0,) * self.dim, x, y)

    def _eval_obj(self, s, r, x, y, digits):
        """Extended-precision product evaluation (internal; object arrays)."""
        out = None
        for d, f in enumerate(self.factors):
            v = f._eval_obj(s[d], r[d], x[..., d], y[..., d], digits)
            out = v if out is None else out * v
        return out

    def apply(self, op, argument, x, y):
        """Apply a LinearOperator to one argument of K and evaluate.

        `argument` is "first" (derivatives in x) or "second" (in y).
        """
        if op.dim != self.dim:
            raise ValueError(f"operator dimension {op.dim} != kernel dimension {self.dim}")
        if argument not in ("first", "second"):
            raise ValueError("argument must be 'first' or 'second'")
        zero = (0,) * self.dim
        out = 0.0
        for c, orders in op.terms:
            if argument == "first":
                out = out + c * self.eval(orders, zero, x, y)
            else:
                out = out + c * self.eval(zero, orders, x, y)
        return out


def tensor_kernel(m, box, constraints=None):
    """Convenience builder: same order m on every axis of `box`.

    `constraints` is a per-axis list of BoundaryFunctional sequences (or
    None for unconstrained axes).
    """
    box = tuple(box)
    if constraints is None:
        constraints = [()] * len(box)
    factors = [kernel(m, iv, cons) for iv, cons in zip(box, constraints)]
    return TensorKernel(factors)


class TensorGrid:
    """Cartesian product of per-axis node arrays, flattened row-major.

    Node i of the flat ordering has per-axis indices given by unraveling i
    with the last axis varying fastest, matching both ``nodes()`` and the
    Kronecker structure of tensor Gram matrices.
    """

    def __init__(self, axes):
        axes = tuple(np.asarray(ax, dtype=float).reshape(-1) for ax in axes)
        for ax in axes:
            if len(ax) == 0:
                raise ValueError("empty grid axis")
            if np.any(np.diff(ax) <= 0):
                raise ValueError("grid axes must be strictly increasing")
        self.axes = axes
        self.dim = len(axes)
        self.shape = tuple(len(ax) for ax in axes)
        self._nodes = None

    def __len__(self):
        return int(np.prod(self.shape))

    def nodes(self):
        """All grid points as an (N, dim) array, last axis fastest."""
        if self._nodes is None:
            mesh = np.meshgrid(*self.axes, indexing="ij")
            self._nodes = np.stack([m.ravel() for m in mesh], axis=-1)
        return self._nodes

    def check_inside(self, kernel_):
        """Verify every axis lies inside the kernel's (closed) box."""
        for d, (ax, f) in enumerate(zip(self.axes, kernel_.factors)):
            if ax[0] < f.a or ax[-1] > f.b:
                raise OutOfDomain(
                    f"axis {d} nodes exceed [{f.a:g}, {f.b:g}]"
                )

    def __repr__(self):
        return f"TensorGrid(shape={self.shape})"


def make_interior_grid(k, counts):
    """Equispaced strictly-interior nodes x_i = a + i (b-a)/(n+1), i=1..n.

    `k` may be a TensorKernel, a Kernel1D, or a sequence of (a, b) pairs;
    `counts` is one n for all axes or a per-axis sequence.
    """
    if isinstance(k, TensorKernel):
        box = k.box
    elif isinstance(k, Kernel1D):
        box = (k.interval,)
    else:
        box = tuple((float(a), float(b)) for a, b in k)
    if np.isscalar(counts):
        counts = (int(counts),) * len(box)
    else:
        counts = tuple(int(n) for n in counts)
    if len(counts) != len(box):
        raise ValueError(f"expected {len(box)} counts, got {len(counts)}")
    axes = []
    for (a, b), n in zip(box, counts):
        if n < 1:
            raise ValueError("each axis needs at least one node")
        i = np.arange(1, n + 1, dtype=float)
        axes.append(a + i * (b - a) / (n + 1))
    return TensorGrid(axes)


def eval_tensor(k, s, r, x, y):
    return k.eval(s, r, x, y)


def apply_operator(k, op, argument, x, y):
    return k.apply(op, argument, x, y)
